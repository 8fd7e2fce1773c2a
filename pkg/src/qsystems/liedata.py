"""Lie-theoretic data: Cartan matrices, roots, KR matrices, denominators and characters.

Conventions.  ``A[a][b] = 2 (alpha_a, alpha_b) / (alpha_a, alpha_a)`` and
``alpha_b = sum_a A[a][b] Lambda_a``.  Symmetrizers ``d`` make ``d_a A[a][b]``
symmetric and are normalized so that ``(alpha_a, alpha_a) = 2 d_a``.
Weights are integer vectors in the fundamental-weight basis; roots are integer
vectors in the simple-root basis.  ``y_a = e^{-alpha_a}`` and
``x_a = e^{eps_a Lambda_a}``.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .qsolve import QSystemSpec
from .report import FAIL, PASS, Check, Discrepancy
from .series import LaurentPoly, TruncatedSeries, label_str, x_labels, y_labels

Weight = Tuple[int, ...]


class LieDataError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Cartan matrices
# ---------------------------------------------------------------------------

def cartan_matrix(kind: str, n: int) -> List[List[int]]:
    """Cartan matrix of a simple Lie algebra (Bourbaki labels)."""
    if n < 1:
        raise LieDataError("rank must be positive")
    A = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i: int, j: int, aij: int = -1, aji: int = -1) -> None:
        A[i - 1][j - 1] = aij
        A[j - 1][i - 1] = aji

    if kind == "A":
        for i in range(1, n):
            link(i, i + 1)
    elif kind == "B":
        if n == 1:
            return A
        for i in range(1, n - 1):
            link(i, i + 1)
        link(n - 1, n, -1, -2)
    elif kind == "C":
        if n == 1:
            return A
        for i in range(1, n - 1):
            link(i, i + 1)
        link(n - 1, n, -2, -1)
    elif kind == "D":
        if n < 2:
            raise LieDataError("D_n needs n >= 2")
        if n == 2:
            return A
        for i in range(1, n - 2):
            link(i, i + 1)
        link(n - 2, n - 1)
        link(n - 2, n)
    elif kind == "E":
        if n not in (6, 7, 8):
            raise LieDataError("E_n needs n in 6, 7, 8")
        link(1, 3)
        link(2, 4)
        for i in range(3, n):
            link(i, i + 1)
    elif kind == "F":
        if n != 4:
            raise LieDataError("F_n needs n = 4")
        link(1, 2)
        link(2, 3, -1, -2)
        link(3, 4)
    elif kind == "G":
        if n != 2:
            raise LieDataError("G_n needs n = 2")
        link(1, 2, -3, -1)
    else:
        raise LieDataError(f"unknown Cartan type {kind!r}")
    return A


def symmetrizers(kind: str, n: int) -> List[int]:
    if kind == "B" and n >= 2:
        return [2] * (n - 1) + [1]
    if kind == "C" and n >= 2:
        return [1] * (n - 1) + [2]
    if kind == "F":
        return [2, 2, 1, 1]
    if kind == "G":
        return [1, 3]
    return [1] * n


def positive_roots_of(A: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    """Positive roots (simple-root coordinates) by root-string closure, sorted by height."""
    n = len(A)
    simple = [tuple(int(i == a) for i in range(n)) for a in range(n)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(n):
                # p = how far the i-string extends downward from beta
                p = 0
                cur = list(beta)
                while True:
                    cur[i] -= 1
                    if tuple(cur) in roots:
                        p += 1
                    else:
                        break
                pairing = sum(beta[b] * A[i][b] for b in range(n))
                if p - pairing > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in roots:
                        roots.add(up)
                        nxt.append(up)
        layer = nxt
    return sorted(roots, key=lambda r: (sum(r), tuple(-x for x in r)))


# ---------------------------------------------------------------------------
# AlgebraData
# ---------------------------------------------------------------------------

_SELECTOR = re.compile(r"^([A-G])(\d+)(?:\^(\d))?$", re.IGNORECASE)


@dataclass(frozen=True)
class AlgebraData:
    base_type: str
    N: int
    r: int
    g0_type: str
    n: int
    A: Tuple[Tuple[int, ...], ...]
    d: Tuple[int, ...]
    eps: Tuple[int, ...]

    @property
    def name(self) -> str:
        return f"{self.base_type}{self.N}" + (f"^{self.r}" if self.r > 1 else "")

    @property
    def g0_name(self) -> str:
        return f"{self.g0_type}{self.n}"

    @property
    def classical(self) -> bool:
        """Inside the proven scope: classical untwisted types and classical twisted types."""
        return self.base_type in "ABCD" and not (self.base_type == "D" and self.r == 3)

    @cached_property
    def positive_roots(self) -> List[Tuple[int, ...]]:
        return positive_roots_of(self.A)

    @cached_property
    def g(self) -> Tuple[Tuple[int, ...], ...]:
        out = []
        for a in range(self.n):
            row = []
            for b in range(self.n):
                v = Fraction(self.A[b][a], self.eps[b])
                if v.denominator != 1:
                    raise LieDataError("g entries must be integers")
                row.append(int(v))
            out.append(tuple(row))
        return tuple(out)

    @cached_property
    def A_inv(self) -> List[List[Fraction]]:
        return linalg.inverse(self.A)

    @cached_property
    def rho(self) -> Weight:
        return (1,) * self.n

    def root_as_weight(self, root: Sequence[int]) -> Weight:
        return tuple(sum(self.A[a][b] * root[b] for b in range(self.n)) for a in range(self.n))

    def to_root_coords(self, weight: Sequence[int]) -> Tuple[Fraction, ...]:
        Ai = self.A_inv
        return tuple(sum((Ai[a][b] * weight[b] for b in range(self.n)), Fraction(0)) for a in range(self.n))

    def inner(self, u: Sequence[int], v: Sequence[int]) -> Fraction:
        """Invariant form on weights, with ``(alpha_a, alpha_a) = 2 d_a``."""
        r = self.to_root_coords(u)
        return sum((r[b] * self.d[b] * v[b] for b in range(self.n)), Fraction(0))


_TWISTED = {
    # (type, r) -> function N -> (g0 type, n)
    ("A", 2): lambda N: ("B", N // 2) if N % 2 == 0 else ("C", (N + 1) // 2),
    ("D", 2): lambda N: ("B", N - 1),
    ("E", 2): lambda N: ("F", 4),
    ("D", 3): lambda N: ("G", 2),
}


def algebra(base_type: str, N: int, r: int = 1) -> AlgebraData:
    """Data for ``X_N^{(r)}`` with its fixed-point subalgebra g0."""
    base_type = base_type.upper()
    if r == 1:
        cartan_matrix(base_type, N)
        g0, n = base_type, N
    elif (base_type, r) in _TWISTED:
        ok = {("A", 2): N >= 2, ("D", 2): N >= 3, ("E", 2): N == 6, ("D", 3): N == 4}[(base_type, r)]
        if not ok:
            raise LieDataError(f"unsupported twisted type {base_type}{N}^{r}")
        g0, n = _TWISTED[(base_type, r)](N)
    else:
        raise LieDataError(f"unsupported pair ({base_type}{N}, r={r})")
    A = cartan_matrix(g0, n)
    d = symmetrizers(g0, n)
    eps = [1] * n
    if base_type == "A" and r == 2 and N % 2 == 0:
        eps[n - 1] = 2
    return AlgebraData(base_type, N, r, g0, n, tuple(map(tuple, A)), tuple(d), tuple(eps))


def parse_algebra(selector: str) -> AlgebraData:
    m = _SELECTOR.match(selector.strip())
    if not m:
        raise LieDataError(f"bad algebra selector {selector!r}")
    return algebra(m.group(1), int(m.group(2)), int(m.group(3) or 1))


# ---------------------------------------------------------------------------
# KR matrices
# ---------------------------------------------------------------------------

def kr_D_entry(a: int, m: int, b: int, k: int) -> int:
    if a != b:
        return 0
    return -2 if m == k else 1 if abs(m - k) == 1 else 0


def kr_Dinv_entry(a: int, m: int, b: int, k: int) -> int:
    return -min(m, k) if a == b else 0


def kr_Gprime_entry(alg: AlgebraData, a: int, m: int, b: int, k: int) -> Fraction:
    Aba = alg.A[b - 1][a - 1]
    if alg.r > 1:
        return Fraction(Aba, alg.eps[b - 1]) * min(m, k)
    da, db = alg.d[a - 1], alg.d[b - 1]
    return db * Aba * min(Fraction(m, db), Fraction(k, da))


def kr_G_entry(alg: AlgebraData, a: int, m: int, b: int, k: int) -> Fraction:
    Aab, Aba = alg.A[a - 1][b - 1], alg.A[b - 1][a - 1]
    if alg.r > 1:
        return -Fraction(Aba, alg.eps[b - 1]) * (m == k)
    da, db = alg.d[a - 1], alg.d[b - 1]
    if db == 2 * da:
        return Fraction(-Aba * ((m == 2 * k - 1) + 2 * (m == 2 * k) + (m == 2 * k + 1)))
    if db == 3 * da:
        pattern = {3 * k - 2: 1, 3 * k - 1: 2, 3 * k: 3, 3 * k + 1: 2, 3 * k + 2: 1}
        return Fraction(-Aba * pattern.get(m, 0))
    return Fraction(-Aab * (da * m == db * k))


def kr_indices(alg: AlgebraData, L: int) -> List[Tuple[int, int]]:
    return [(a, m) for a in range(1, alg.n + 1) for m in range(1, L + 1)]


def kr_matrices(alg: AlgebraData, L: int) -> QSystemSpec:
    """Window ``H_L`` of the KR-type specialized system of ``alg``."""
    if L < 1:
        raise LieDataError("L must be at least 1")
    idx = kr_indices(alg, L)
    D = [[kr_D_entry(a, m, b, k) for (b, k) in idx] for (a, m) in idx]
    Dinv = [[kr_Dinv_entry(a, m, b, k) for (b, k) in idx] for (a, m) in idx]
    G = [[kr_G_entry(alg, a, m, b, k) for (b, k) in idx] for (a, m) in idx]
    Gp = [[kr_Gprime_entry(alg, a, m, b, k) for (b, k) in idx] for (a, m) in idx]
    reach = 3 * L + 3
    complete = []
    for a, m in idx:
        if m >= L:
            continue
        if all(kr_G_entry(alg, a, m, b, k) == 0 for b in range(1, alg.n + 1) for k in range(L + 1, reach)):
            complete.append((a, m))
    return QSystemSpec.truncated("specialized", idx, D, Dinv, G, Gp, None, complete, alg.n)


# ---------------------------------------------------------------------------
# denominators
# ---------------------------------------------------------------------------

def root_height_total(alg: AlgebraData) -> int:
    return sum(sum(r) for r in alg.positive_roots)


def weyl_denominator(alg: AlgebraData, cutoff: Optional[int] = None,
                     box: Optional[int] = None) -> TruncatedSeries:
    """``prod_{alpha > 0} (1 - y^alpha)``; by default the cutoff keeps the full polynomial."""
    if cutoff is None:
        cutoff = root_height_total(alg)
    ys = y_labels(alg.n)
    out = TruncatedSeries.one(ys, cutoff, None, box)
    for root in alg.positive_roots:
        out = out * (out.one_like() - out.like({tuple(root): 1}))
    return out


def weyl_group_orbit(alg: AlgebraData, weight: Sequence[int]) -> Dict[Weight, int]:
    """Orbit of a weight, mapped to the parity of a shortest reflection word reaching it."""
    start = tuple(weight)
    seen = {start: 0}
    queue = deque([start])
    while queue:
        mu = queue.popleft()
        for i in range(alg.n):
            if mu[i] == 0:
                continue
            nu = tuple(mu[a] - mu[i] * alg.A[a][i] for a in range(alg.n))
            if nu not in seen:
                seen[nu] = seen[mu] ^ 1
                queue.append(nu)
    return seen


def alternating_denominator(alg: AlgebraData, cutoff: Optional[int] = None) -> TruncatedSeries:
    """``sum_w sgn(w) e^{w rho - rho}`` written in y (the Weyl denominator identity's other side)."""
    if cutoff is None:
        cutoff = root_height_total(alg)
    ys = y_labels(alg.n)
    rho = alg.rho
    terms: Dict[Tuple[int, ...], int] = {}
    for mu, parity in weyl_group_orbit(alg, rho).items():
        diff = [x - y for x, y in zip(rho, mu)]
        c = alg.to_root_coords(diff)
        e = tuple(int(x) for x in c)
        terms[e] = terms.get(e, 0) + (-1 if parity else 1)
    return TruncatedSeries(ys, terms, cutoff)


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------

def is_dominant(weight: Sequence[int]) -> bool:
    return all(x >= 0 for x in weight)


def weyl_dimension(alg: AlgebraData, weight: Sequence[int]) -> int:
    lr = tuple(x + 1 for x in weight)
    num = Fraction(1)
    for root in alg.positive_roots:
        aw = alg.root_as_weight(root)
        num *= alg.inner(lr, aw) / alg.inner(alg.rho, aw)
    if num.denominator != 1:
        raise LieDataError("dimension formula gave a non-integer")
    return int(num)


def weight_multiplicities(alg: AlgebraData, weight: Sequence[int]) -> Dict[Tuple[int, ...], int]:
    """Freudenthal recursion. Keys are ``c`` with weight ``lambda - sum c_a alpha_a``."""
    lam = tuple(int(x) for x in weight)
    if len(lam) != alg.n or not is_dominant(lam):
        raise LieDataError(f"{lam} is not a dominant weight of {alg.g0_name}")
    n = alg.n
    roots = [(tuple(r), alg.root_as_weight(r)) for r in alg.positive_roots]
    simple_w = [alg.root_as_weight(tuple(int(i == a) for i in range(n))) for a in range(n)]
    lr = tuple(x + 1 for x in lam)
    top = alg.inner(lr, lr)
    mult: Dict[Tuple[int, ...], int] = {(0,) * n: 1}
    wt: Dict[Tuple[int, ...], Weight] = {(0,) * n: lam}
    layer = [(0,) * n]
    while layer:
        cands = set()
        for c in layer:
            for a in range(n):
                cc = list(c)
                cc[a] += 1
                cands.add(tuple(cc))
        nxt = []
        for c in sorted(cands):
            mu = tuple(lam[b] - sum(c[a] * simple_w[a][b] for a in range(n)) for b in range(n))
            mr = tuple(x + 1 for x in mu)
            den = top - alg.inner(mr, mr)
            if den == 0:
                continue
            s = Fraction(0)
            for rc, rw in roots:
                k = 1
                while True:
                    up = tuple(x - k * y for x, y in zip(c, rc))
                    if any(x < 0 for x in up):
                        break
                    m_up = mult.get(up, 0)
                    if m_up:
                        nu = tuple(x + k * y for x, y in zip(mu, rw))
                        s += m_up * alg.inner(nu, rw)
                    k += 1
            val = 2 * s / den
            if val.denominator != 1:
                raise LieDataError("Freudenthal recursion produced a non-integer")
            if val:
                mult[c] = int(val)
                wt[c] = mu
                nxt.append(c)
        layer = nxt
    return mult


def character_weights(alg: AlgebraData, weight: Sequence[int]) -> Dict[Weight, int]:
    """Character as a map from weights (fundamental coordinates) to multiplicities."""
    lam = tuple(weight)
    out = {}
    for c, m in weight_multiplicities(alg, lam).items():
        mu = tuple(lam[b] - sum(c[a] * alg.A[b][a] for a in range(alg.n)) for b in range(alg.n))
        out[mu] = m
    return out


def weight_to_x(alg: AlgebraData, mu: Sequence[int]) -> Tuple[int, ...]:
    """Exponents of ``x`` for ``e^mu``; requires ``mu_a`` divisible by ``eps_a``."""
    out = []
    for a in range(alg.n):
        q, rem = divmod(mu[a], alg.eps[a])
        if rem:
            raise LieDataError(f"weight {tuple(mu)} is not a monomial in x")
        out.append(q)
    return tuple(out)


def weyl_character(alg: AlgebraData, weight: Sequence[int], cutoff: Optional[int] = None,
                   box: Optional[int] = None) -> Tuple[Optional[LaurentPoly], TruncatedSeries]:
    """Character of ``V(weight)``: (Laurent polynomial in x or ``None``, normalized series in y).

    The normalized form is ``e^{-weight} ch V(weight)``, a polynomial in y with
    unit constant term.  The x form is ``None`` when some weight is not an
    integral monomial in ``x_a = e^{eps_a Lambda_a}``.
    """
    mults = weight_multiplicities(alg, weight)
    if cutoff is None:
        cutoff = max(sum(c) for c in mults)
    normalized = TruncatedSeries(y_labels(alg.n), mults, cutoff, None, box)
    try:
        xs = {weight_to_x(alg, mu): m for mu, m in character_weights(alg, weight).items()}
        laurent: Optional[LaurentPoly] = LaurentPoly(x_labels(alg.n), xs)
    except LieDataError:
        laurent = None
    return laurent, normalized


def tensor_weights(*chars: Dict[Weight, int]) -> Dict[Weight, int]:
    out: Dict[Weight, int] = {(): 1} if not chars else dict(chars[0])
    for ch in chars[1:]:
        nxt: Dict[Weight, int] = {}
        for u, a in out.items():
            for v, b in ch.items():
                w = tuple(x + y for x, y in zip(u, v))
                nxt[w] = nxt.get(w, 0) + a * b
        out = nxt
    return out


def decompose(alg: AlgebraData, char: Dict[Weight, int]) -> Dict[Weight, int]:
    """Irreducible decomposition of a (virtual) character by peeling highest weights."""
    rest = {w: m for w, m in char.items() if m}
    out: Dict[Weight, int] = {}
    while rest:
        dom = [w for w in rest if is_dominant(w)]
        if not dom:
            raise LieDataError("character has no dominant weight left; not a character")
        top = max(dom, key=lambda w: (sum(alg.to_root_coords(w)), w))
        m = rest[top]
        out[top] = out.get(top, 0) + m
        for w, k in character_weights(alg, top).items():
            v = rest.get(w, 0) - m * k
            if v:
                rest[w] = v
            else:
                rest.pop(w, None)
    return out


# ---------------------------------------------------------------------------
# denominator identities between B_n, C_n, D_n
# ---------------------------------------------------------------------------

def _denominator_laurent(roots: Sequence[Sequence[int]], images: Sequence[Sequence[int]],
                         ys: Sequence[str]) -> LaurentPoly:
    """``prod (1 - e^{-alpha})`` with ``e^{-alpha_i}`` sent to the y-monomial ``images[i]``."""
    one = LaurentPoly.constant(1, ys)
    out = one
    for root in roots:
        e = tuple(sum(root[i] * images[i][k] for i in range(len(images))) for k in range(len(ys)))
        out = out * (one - LaurentPoly(ys, {e: 1}))
    return out


def _unit(n: int, *pairs: Tuple[int, int]) -> Tuple[int, ...]:
    e = [0] * n
    for a, k in pairs:
        e[a - 1] += k
    return tuple(e)


def identity_sides(which: str, n: int) -> Tuple[LaurentPoly, LaurentPoly]:
    """Both sides of one of the B/C/D denominator identities in variables y_1..y_n."""
    ys = y_labels(n)
    one = LaurentPoly.constant(1, ys)
    if which == "denom7":
        if n < 1:
            raise LieDataError("denom7 needs n >= 1")
        eps = [1] * (n - 1) + [2]
        lhs = _denominator_laurent(positive_roots_of(cartan_matrix("C", n)),
                                   [_unit(n, (a, eps[a - 1])) for a in range(1, n + 1)], ys)
        rhs = _denominator_laurent(positive_roots_of(cartan_matrix("B", n)),
                                   [_unit(n, (a, 1)) for a in range(1, n + 1)], ys)
        for a in range(1, n + 1):
            rhs = rhs * (one + LaurentPoly(ys, {_unit(n, *[(k, 1) for k in range(a, n + 1)]): 1}))
        return lhs, rhs
    if which in ("denom12", "denom13"):
        if n < 2:
            raise LieDataError(f"{which} needs n >= 2")
        ident = [_unit(n, (a, 1)) for a in range(1, n + 1)]
        droots = positive_roots_of(cartan_matrix("D", n))
        if which == "denom12":
            lhs = _denominator_laurent(positive_roots_of(cartan_matrix("B", n)), ident, ys)
            dimg = ident[:-1] + [_unit(n, (n - 1, 1), (n, 2))]
            rhs = _denominator_laurent(droots, dimg, ys)
            for a in range(1, n + 1):
                rhs = rhs * (one - LaurentPoly(ys, {_unit(n, *[(k, 1) for k in range(a, n + 1)]): 1}))
        else:
            lhs = _denominator_laurent(positive_roots_of(cartan_matrix("C", n)), ident, ys)
            dimg = ident[:-1] + [_unit(n, (n - 1, 1), (n, 1))]
            rhs = _denominator_laurent(droots, dimg, ys)
            for a in range(1, n + 1):
                e = _unit(n, *[(k, 2) for k in range(a, n + 1)], (n, -1))
                rhs = rhs * (one - LaurentPoly(ys, {e: 1}))
        return lhs, rhs
    raise LieDataError(f"unknown identity {which!r}")


def denominator_identity_check(which: str, n: int) -> Check:
    lhs, rhs = identity_sides(which, n)
    diff = lhs.first_difference(rhs)
    name = f"{which}(n={n})"
    if diff is None:
        return Check(name, PASS)
    e, a, b = diff
    return Check(name, FAIL, Discrepancy({label_str(v): k for v, k in zip(lhs.variables, e) if k}, a, b))
