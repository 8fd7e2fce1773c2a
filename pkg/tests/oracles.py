"""Independent reference computations used by the tests.

Nothing here imports the library's series arithmetic, solvers or root
generation, so agreement with the library is evidence rather than tautology.
Series are plain dicts ``{exponent tuple: Fraction}`` truncated at a total
degree.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb
from typing import Dict, List, Tuple

PS = Dict[Tuple[int, ...], Fraction]


# ---------------------------------------------------------------------------
# minimal dict power series
# ---------------------------------------------------------------------------

def ps_one(n: int) -> PS:
    return {(0,) * n: Fraction(1)}


def ps_var(n: int, i: int) -> PS:
    e = [0] * n
    e[i] = 1
    return {tuple(e): Fraction(1)}


def ps_add(f: PS, g: PS, s: int = 1) -> PS:
    out = dict(f)
    for e, c in g.items():
        out[e] = out.get(e, 0) + s * c
    return {e: c for e, c in out.items() if c}


def ps_mul(f: PS, g: PS, cutoff: int) -> PS:
    out: PS = {}
    for e1, c1 in f.items():
        d1 = sum(e1)
        for e2, c2 in g.items():
            if d1 + sum(e2) > cutoff:
                continue
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def ps_scale(f: PS, k) -> PS:
    return {e: c * k for e, c in f.items() if c * k}


def binom_q(a: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for t in range(k):
        out = out * (a - t) / (t + 1)
    return out


def ps_pow1p(x: PS, alpha, n: int, cutoff: int) -> PS:
    """``(1 + x)**alpha`` for ``x`` without constant term, by the binomial series."""
    alpha = Fraction(alpha)
    out = ps_one(n)
    power = ps_one(n)
    for k in range(1, cutoff + 1):
        power = ps_mul(power, x, cutoff)
        if not power:
            break
        out = ps_add(out, ps_scale(power, binom_q(alpha, k)))
    return out


def ps_truncate(f: PS, cutoff: int) -> PS:
    return {e: c for e, c in f.items() if sum(e) <= cutoff}


# ---------------------------------------------------------------------------
# inverse-map oracle for the standard system
# ---------------------------------------------------------------------------

def _phi(v: List[PS], G, n: int, cutoff: int) -> List[PS]:
    """``phi_i = prod_j (1 - v_j)**G_ij``."""
    out = []
    for i in range(n):
        acc = ps_one(n)
        for j in range(n):
            if G[i][j]:
                acc = ps_mul(acc, ps_pow1p(ps_scale(v[j], -1), G[i][j], n, cutoff), cutoff)
        out.append(acc)
    return out


def newton_standard(G, cutoff: int) -> List[PS]:
    """Solve ``v_i = w_i prod_j (1 - v_j)**G_ij`` by Newton's method; returns ``Q_i = 1 - v_i``.

    The Jacobian ``I - d(w_i phi_i)/dv_j`` is inverted by its Neumann series,
    which terminates because the correction has positive degree.
    """
    n = len(G)
    G = [[Fraction(x) for x in row] for row in G]
    v = [ps_var(n, i) for i in range(n)]
    prec = 1
    while True:
        phi = _phi(v, G, n, cutoff)
        resid = [ps_add(v[i], ps_mul(ps_var(n, i), phi[i], cutoff), -1) for i in range(n)]
        if not any(resid):
            break
        # d phi_i / d v_j = -G_ij phi_i / (1 - v_j)
        inv1m = [ps_pow1p(ps_scale(v[j], -1), -1, n, cutoff) for j in range(n)]
        M = [[ps_scale(ps_mul(ps_mul(ps_var(n, i), phi[i], cutoff), inv1m[j], cutoff), G[i][j])
              for j in range(n)] for i in range(n)]
        # J = I + M; solve J delta = resid via delta = sum_k (-M)^k resid
        delta = [dict(r) for r in resid]
        term = [dict(r) for r in resid]
        for _ in range(cutoff + 1):
            term = [ps_scale(_matvec_row(M[i], term, cutoff), -1) for i in range(n)]
            if not any(term):
                break
            delta = [ps_add(delta[i], term[i]) for i in range(n)]
        v = [ps_add(v[i], delta[i], -1) for i in range(n)]
        prec *= 2
        if prec > 4 * (cutoff + 2):
            raise RuntimeError("Newton iteration did not converge")
    return [ps_add(ps_one(n), vi, -1) for vi in v]


def _matvec_row(row: List[PS], vec: List[PS], cutoff: int) -> PS:
    acc: PS = {}
    for m, x in zip(row, vec):
        acc = ps_add(acc, ps_mul(m, x, cutoff))
    return acc


def signed_catalan(k: int) -> int:
    return (-1) ** k * comb(2 * k, k) // (k + 1)


def lambert_newton(cutoff: int) -> List[Fraction]:
    """Coefficients of the root ``Q = 1 + O(w)`` of ``Q + w Q**2 = 1``, via Newton's method."""
    def mul(a, b):
        out = [Fraction(0)] * (cutoff + 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b[: cutoff + 1 - i]):
                    out[i + j] += x * y
        return out

    def inv(a):
        out = [Fraction(0)] * (cutoff + 1)
        out[0] = 1 / a[0]
        for k in range(1, cutoff + 1):
            out[k] = -sum(a[j] * out[k - j] for j in range(1, k + 1)) / a[0]
        return out

    w = [Fraction(0), Fraction(1)] + [Fraction(0)] * (cutoff - 1)
    q = [Fraction(1)] + [Fraction(0)] * cutoff
    for _ in range(cutoff + 2):
        f = [a + b for a, b in zip(q, mul(w, mul(q, q)))]
        f[0] -= 1
        df = [Fraction(1) if i == 0 else Fraction(0) for i in range(cutoff + 1)]
        df = [a + 2 * b for a, b in zip(df, mul(w, q))]
        step = mul(f, inv(df))
        q = [a - b for a, b in zip(q, step)]
    return q


# ---------------------------------------------------------------------------
# Lie data written out by hand in the epsilon basis
# ---------------------------------------------------------------------------

def classical_positive_roots(kind: str, n: int) -> List[Tuple[int, ...]]:
    """Positive roots in simple-root coordinates from their epsilon-basis description."""
    roots = set()

    def seg(i: int, j: int, coeff=1) -> List[int]:
        # e_i - e_j (i < j) = alpha_i + ... + alpha_{j-1}
        c = [0] * n
        for k in range(i, j):
            c[k - 1] += coeff
        return c

    if kind == "A":
        for i in range(1, n + 2):
            for j in range(i + 1, n + 2):
                roots.add(tuple(seg(i, j)))
        return sorted(roots)
    if kind == "B":
        # e_i = alpha_i + ... + alpha_n ; alpha_n = e_n
        def e(i):
            c = [0] * n
            for k in range(i, n + 1):
                c[k - 1] = 1
            return c
        for i in range(1, n + 1):
            roots.add(tuple(e(i)))
            for j in range(i + 1, n + 1):
                roots.add(tuple(seg(i, j)))
                roots.add(tuple(a + b for a, b in zip(e(i), e(j))))
        return sorted(roots)
    if kind == "C":
        # 2 e_n = alpha_n ; e_i = alpha_i + ... + alpha_{n-1} + alpha_n / 2
        def e2(i):
            c = [0] * n
            for k in range(i, n):
                c[k - 1] = 2
            c[n - 1] = 1
            return c
        for i in range(1, n + 1):
            roots.add(tuple(e2(i)))
            for j in range(i + 1, n + 1):
                roots.add(tuple(seg(i, j)))
                roots.add(tuple((a + b) // 2 for a, b in zip(e2(i), e2(j))))
        return sorted(roots)
    if kind == "D":
        # alpha_a = e_a - e_{a+1} (a < n), alpha_n = e_{n-1} + e_n
        def plus(i, j):
            # e_i + e_j = (e_i - e_{n-1}) + (e_j - e_n) + alpha_n  (i < j)
            c = [0] * n
            for k in range(i, n - 1):
                c[k - 1] += 1
            for k in range(j, n):
                c[k - 1] += 1
            c[n - 1] += 1
            return c
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                roots.add(tuple(seg(i, j)))
                roots.add(tuple(plus(i, j)))
        return sorted(roots)
    raise ValueError(kind)


def expected_root_count(kind: str, n: int) -> int:
    return {"A": n * (n + 1) // 2, "B": n * n, "C": n * n, "D": n * (n - 1),
            "E": {6: 36, 7: 63, 8: 120}.get(n, 0), "F": 24, "G": 6}[kind]


# ---------------------------------------------------------------------------
# type A characters from semistandard tableaux
# ---------------------------------------------------------------------------

def ssyt_rectangle(rows: int, cols: int, alphabet: int):
    """All semistandard tableaux of a ``rows x cols`` rectangle with entries ``1..alphabet``."""
    row_choices = [tuple(r) for r in combinations_with_replacement(range(1, alphabet + 1), cols)]

    def rec(prev, depth):
        if depth == rows:
            yield []
            return
        for r in row_choices:
            if prev is None or all(a < b for a, b in zip(prev, r)):
                for rest in rec(r, depth + 1):
                    yield [r] + rest

    return rec(None, 0)


def type_a_normalized_character(n: int, a: int, m: int) -> Dict[Tuple[int, ...], int]:
    """``e^{-m Lambda_a} ch V(m Lambda_a)`` for sl_{n+1} as ``{y-exponent: multiplicity}``."""
    out: Dict[Tuple[int, ...], int] = {}
    top = [m] * a + [0] * (n + 1 - a)
    for T in ssyt_rectangle(a, m, n + 1):
        content = [0] * (n + 1)
        for row in T:
            for x in row:
                content[x - 1] += 1
        diff = [t - c for t, c in zip(top, content)]
        y = tuple(sum(diff[: k + 1]) for k in range(n))
        out[y] = out.get(y, 0) + 1
    return out


def sl2_clebsch_gordan(j1: int, j2: int) -> Dict[int, int]:
    """``V(j1) x V(j2)`` for sl_2 with highest weights as integers."""
    return {j1 + j2 - 2 * k: 1 for k in range(min(j1, j2) + 1)}
