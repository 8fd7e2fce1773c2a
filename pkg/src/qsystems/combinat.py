"""Closed-form coefficients of the K and R series and their specializations.

For a system (D, G) with ``G' = G D^{-1}``, a weight vector nu and an exponent
vector N (support ``H(N)``):

    P_i  = -sum_j nu_j Dinv[j][i] - sum_j N_j G'[j][i]
    K    = prod_{i in H(N)} binom(P_i + N_i, N_i)
    F_ij = delta_ij P_j + G'[i][j] N_j
    R    = det_{H(N)} F * prod_{i in H(N)} binom(P_i + N_i - 1, N_i - 1) / N_i

``K^nu`` and ``R^nu`` are the generating series of these coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, lcm
from typing import Any, Dict, Hashable, Iterator, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .qsolve import QSystemSpec, SolverError, level
from .series import TruncatedSeries, as_fraction, label_str, y_labels

TYPE_I = "type1"
TYPE_II = "type2"


def gen_binom(a: Any, b: int, convention: str = TYPE_I) -> Fraction:
    """``a (a-1) ... (a-b+1) / b!`` for rational ``a``.

    Under the type-II convention the value is 0 whenever ``a`` is an integer
    smaller than ``b``.
    """
    if b < 0:
        raise ValueError("b must be nonnegative")
    if convention not in (TYPE_I, TYPE_II):
        raise ValueError(f"unknown convention {convention!r}")
    a = as_fraction(a)
    if a.denominator == 1:
        ai = a.numerator
        if convention == TYPE_II and ai < b:
            return Fraction(0)
        if ai >= 0:
            return Fraction(comb(ai, b))
        return Fraction((-1) ** b * comb(b - ai - 1, b))
    num = Fraction(1)
    for t in range(b):
        num *= a - t
    return num / factorial(b)


@dataclass
class CoeffContext:
    """Everything the K and R coefficients of one exponent vector depend on."""

    spec: QSystemSpec
    nu: Mapping[Hashable, Any]
    N: Sequence[int]
    binomial_convention: str = TYPE_I
    _base: Optional[List[Fraction]] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if len(self.N) != self.spec.size or any(x < 0 for x in self.N):
            raise SolverError("N must be a nonnegative vector over the index set")
        for i in self.nu:
            self.spec.position(i)

    @property
    def support(self) -> List[int]:
        return [k for k, x in enumerate(self.N) if x]

    def base(self) -> List[Fraction]:
        if self._base is None:
            self._base = nu_part(self.spec, self.nu)
        return self._base

    def P(self) -> List[Fraction]:
        base = self.base()
        Gp = self.spec.G_prime
        sup = self.support
        return [base[i] - sum((self.N[j] * Gp[j][i] for j in sup), Fraction(0))
                for i in range(self.spec.size)]

    def F(self) -> List[List[Fraction]]:
        """F restricted to ``H(N)`` (rows and columns in index order)."""
        P = self.P()
        sup = self.support
        Gp = self.spec.G_prime
        return [[(P[j] if i == j else 0) + Gp[i][j] * self.N[j] for j in sup] for i in sup]


def nu_part(spec: QSystemSpec, nu: Mapping[Hashable, Any]) -> List[Fraction]:
    """``-sum_j nu_j Dinv[j][i]`` for every i."""
    out = [Fraction(0)] * spec.size
    for lab, v in nu.items():
        v = as_fraction(v)
        if not v:
            continue
        j = spec.position(lab)
        row = spec.D_inv[j]
        for i in range(spec.size):
            if row[i]:
                out[i] -= v * row[i]
    return out


def coeff_K(ctx: CoeffContext) -> Fraction:
    P = ctx.P()
    out = Fraction(1)
    for i in ctx.support:
        out *= gen_binom(P[i] + ctx.N[i], ctx.N[i], ctx.binomial_convention)
        if not out:
            break
    return out


def coeff_R(ctx: CoeffContext) -> Fraction:
    P = ctx.P()
    prod = Fraction(1)
    for i in ctx.support:
        Ni = ctx.N[i]
        prod *= gen_binom(P[i] + Ni - 1, Ni - 1, ctx.binomial_convention) / Ni
        if not prod:
            return prod
    return linalg.det(ctx.F()) * prod


class _Kernel:
    """Integer-scaled evaluation of K and R coefficients, touching only ``H(N)``.

    Every ``P_i`` is ``(base_i - sum_j N_j Gp_ij) / M`` with integers scaled by
    the common denominator ``M``; this is the hot loop of the series sums.
    """

    def __init__(self, spec: QSystemSpec, nu: Mapping[Hashable, Any], convention: str) -> None:
        base = nu_part(spec, nu)
        Gp = spec.G_prime
        M = 1
        for x in base + [x for row in Gp for x in row]:
            M = lcm(M, x.denominator)
        self.M = M
        self.base = [int(x * M) for x in base]
        self.Gp = [[int(x * M) for x in row] for row in Gp]
        self.convention = convention

    def _P(self, N: Sequence[int], sup: Sequence[int]) -> List[int]:
        Gp = self.Gp
        return [self.base[i] - sum(N[j] * Gp[j][i] for j in sup) for i in sup]

    def _binom(self, num: int, extra: int, b: int) -> Fraction:
        # binom(num / M + extra, b)
        if num % self.M == 0:
            a = num // self.M + extra
            if self.convention == TYPE_II and a < b:
                return Fraction(0)
            if a >= 0:
                return Fraction(comb(a, b))
            return Fraction((-1) ** b * comb(b - a - 1, b))
        return gen_binom(Fraction(num, self.M) + extra, b, self.convention)

    def K(self, N: Sequence[int]) -> Fraction:
        sup = [k for k, x in enumerate(N) if x]
        out = Fraction(1)
        for i, p in zip(sup, self._P(N, sup)):
            out *= self._binom(p, N[i], N[i])
            if not out:
                break
        return out

    def R(self, N: Sequence[int]) -> Fraction:
        sup = [k for k, x in enumerate(N) if x]
        P = self._P(N, sup)
        prod = Fraction(1)
        for i, p in zip(sup, P):
            prod *= self._binom(p, N[i] - 1, N[i] - 1) / N[i]
            if not prod:
                return prod
        Gp = self.Gp
        F = [[(P[r] if r == c else 0) + Gp[i][j] * N[j] for c, j in enumerate(sup)]
             for r, i in enumerate(sup)]
        return Fraction(linalg.det_int(F), self.M ** len(sup)) * prod


# ---------------------------------------------------------------------------
# enumeration of exponent vectors
# ---------------------------------------------------------------------------

def enumerate_exponents(weights: Sequence[int], cutoff: int, box: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """All nonnegative vectors with ``sum w_i N_i <= cutoff`` (and ``N_i <= box``)."""
    n = len(weights)
    buf = [0] * n

    def rec(k: int, left: int) -> Iterator[Tuple[int, ...]]:
        if k == n:
            yield tuple(buf)
            return
        w = weights[k]
        top = left // w
        if box is not None:
            top = min(top, box)
        for x in range(top + 1):
            buf[k] = x
            yield from rec(k + 1, left - x * w)
        buf[k] = 0

    return rec(0, cutoff)


def _enumerate_specialized(spec: QSystemSpec, cutoff: int, box: Optional[int]) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Pairs (N, y-exponent) with every y-exponent within the cutoff and the box.

    The chain for each node ``a`` is enumerated separately so the box on
    ``y_a`` prunes it directly.
    """
    n = spec.rank
    by_chain: Dict[int, List[int]] = {a: [] for a in range(1, n + 1)}
    for pos, (a, m) in enumerate(spec.indices):
        by_chain[a].append(pos)
    cap = cutoff if box is None else min(cutoff, box)
    per_chain: Dict[int, List[Tuple[int, List[Tuple[int, int]]]]] = {}
    for a, poss in by_chain.items():
        ws = [level(spec.indices[p]) for p in poss]
        rows = []
        for e in enumerate_exponents(ws, cap):
            deg = sum(w * x for w, x in zip(ws, e))
            rows.append((deg, [(p, x) for p, x in zip(poss, e) if x]))
        rows.sort(key=lambda t: t[0])
        per_chain[a] = rows
    size = spec.size
    degs = [0] * n
    picks: List[List[Tuple[int, int]]] = [[] for _ in range(n)]

    def rec(a: int, left: int):
        if a > n:
            N = [0] * size
            for part in picks:
                for p, x in part:
                    N[p] = x
            yield tuple(N), tuple(degs)
            return
        for deg, part in per_chain[a]:
            if deg > left:
                break
            degs[a - 1] = deg
            picks[a - 1] = part
            yield from rec(a + 1, left - deg)
        degs[a - 1] = 0
        picks[a - 1] = []

    return rec(1, cutoff)


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------

def _coefficient_fn(which: str, spec: QSystemSpec, nu: Mapping[Hashable, Any], convention: str):
    kernel = _Kernel(spec, nu, convention)
    if which == "K":
        return kernel.K
    if which == "R":
        return kernel.R
    raise ValueError(f"unknown series {which!r}")


def _series(which: str, spec: QSystemSpec, nu: Mapping[Hashable, Any], cutoff: int,
            box: Optional[int], convention: str) -> TruncatedSeries:
    fn = _coefficient_fn(which, spec, nu, convention)
    terms: Dict[Tuple[int, ...], Fraction] = {}
    for N in enumerate_exponents(spec.weights, cutoff, box):
        c = fn(N)
        if c:
            terms[N] = c
    return TruncatedSeries(spec.indices, terms, cutoff, spec.weights, box)


def series_K(spec: QSystemSpec, nu: Mapping[Hashable, Any], cutoff: int, *, box: Optional[int] = None,
             convention: str = TYPE_I) -> TruncatedSeries:
    """``K^nu`` over the index variables with the system's weights, to the given cutoff."""
    return _series("K", spec, nu, cutoff, box, convention)


def series_R(spec: QSystemSpec, nu: Mapping[Hashable, Any], cutoff: int, *, box: Optional[int] = None,
             convention: str = TYPE_I) -> TruncatedSeries:
    return _series("R", spec, nu, cutoff, box, convention)


def _check_window(spec: QSystemSpec, cutoff: int, box: Optional[int]) -> None:
    if spec.kind != "specialized":
        raise SolverError("specialized series need a specialized system")
    reach = cutoff if box is None else min(cutoff, box)
    if spec.window() < reach:
        raise SolverError(f"window L={spec.window()} is smaller than the cutoff {reach}")


def _specialized(which: str, spec: QSystemSpec, nu: Mapping[Hashable, Any], cutoff: int,
                 box: Optional[int], convention: str) -> TruncatedSeries:
    _check_window(spec, cutoff, box)
    fn = _coefficient_fn(which, spec, nu, convention)
    terms: Dict[Tuple[int, ...], Fraction] = {}
    for N, e in _enumerate_specialized(spec, cutoff, box):
        c = fn(N)
        if c:
            terms[e] = terms.get(e, 0) + c
    return TruncatedSeries(y_labels(spec.rank), terms, cutoff, None, box)


def series_K_specialized(spec: QSystemSpec, nu: Mapping[Hashable, Any], cutoff: int, *,
                         box: Optional[int] = None, convention: str = TYPE_I) -> TruncatedSeries:
    """``K^nu`` with ``w[(a, m)] -> y_a**m``, summed directly by y-degree."""
    return _specialized("K", spec, nu, cutoff, box, convention)


def series_R_specialized(spec: QSystemSpec, nu: Mapping[Hashable, Any], cutoff: int, *,
                         box: Optional[int] = None, convention: str = TYPE_I) -> TruncatedSeries:
    return _specialized("R", spec, nu, cutoff, box, convention)


def coefficient_table(spec: QSystemSpec, nu: Mapping[Hashable, Any], cutoff: int,
                      convention: str = TYPE_I) -> List[Dict[str, Any]]:
    """Rows ``{"N": {...}, "K": "p/q", "R": "p/q"}`` for every N up to the cutoff."""
    base = nu_part(spec, nu)
    rows = []
    for N in sorted(enumerate_exponents(spec.weights, cutoff),
                    key=lambda e: (sum(w * x for w, x in zip(spec.weights, e)), tuple(-x for x in e))):
        ctx = CoeffContext(spec, nu, N, convention, base)
        k, r = coeff_K(ctx), coeff_R(ctx)
        rows.append({"N": {label_str(i): x for i, x in zip(spec.indices, N) if x},
                     "K": f"{k.numerator}/{k.denominator}", "R": f"{r.numerator}/{r.denominator}"})
    return rows


# ---------------------------------------------------------------------------
# cluster expansion
# ---------------------------------------------------------------------------

def cluster_coefficient(spec: QSystemSpec, i: Hashable, N: Sequence[int]) -> Fraction:
    """Coefficient of ``w^N`` in ``log Q_i`` for a standard system, via d/dnu_i of R at nu = 0.

    At nu = 0 the full determinant of F vanishes, so only the derivative of
    the ``(i, i)`` entry survives: minus the principal minor without ``i``.
    """
    if spec.kind != "standard":
        raise SolverError("the cluster expansion is stated for standard systems")
    pos = spec.position(i)
    if not N[pos]:
        return Fraction(0)
    ctx = CoeffContext(spec, {}, N)
    P = ctx.P()
    prod = Fraction(1)
    for j in ctx.support:
        prod *= gen_binom(P[j] + N[j] - 1, N[j] - 1) / N[j]
    if not prod:
        return prod
    sup = ctx.support
    keep = [k for k, j in enumerate(sup) if j != pos]
    F = ctx.F()
    minor = [[F[r][c] for c in keep] for r in keep]
    return -linalg.det(minor) * prod


def cluster_series(spec: QSystemSpec, i: Hashable, cutoff: int) -> TruncatedSeries:
    terms = {}
    for N in enumerate_exponents(spec.weights, cutoff):
        if any(N):
            c = cluster_coefficient(spec, i, N)
            if c:
                terms[N] = c
    return TruncatedSeries(spec.indices, terms, cutoff, spec.weights)
