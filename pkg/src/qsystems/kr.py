"""Kirillov-Reshetikhin verification pipeline and multiplicity extraction."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

from . import linalg
from .combinat import TYPE_I, series_K_specialized, series_R_specialized
from .liedata import (AlgebraData, LieDataError, character_weights, is_dominant, kr_matrices,
                      positive_roots_of, cartan_matrix, weyl_character, weyl_denominator)
from .qsolve import (SolutionFamily, SolverError, check_convergence_property, check_residual,
                     power_combination, solve_specialized)
from .report import FAIL, PASS, SKIPPED, Check, Discrepancy, VerificationReport
from .series import LaurentPoly, TruncatedSeries, label_str, laurent_substitute, x_labels, y_labels

Nu = Mapping[Tuple[int, int], Any]


def proven_scope(alg: AlgebraData) -> bool:
    """Untwisted classical types, where the character identities are theorems."""
    return alg.r == 1 and alg.base_type in "ABCD"


def _window(cutoff: int, box: Optional[int], nu: Optional[Nu] = None) -> int:
    reach = cutoff if box is None else min(cutoff, box)
    top = max((m for (_, m) in (nu or {})), default=0)
    return max(reach, top, 1)


def _check_nu(alg: AlgebraData, nu: Nu) -> Dict[Tuple[int, int], Fraction]:
    out = {}
    for key, v in nu.items():
        if not (isinstance(key, tuple) and len(key) == 2):
            raise SolverError(f"nu key {key!r} must be a pair (a, m)")
        a, m = key
        if not 1 <= a <= alg.n or m < 1:
            raise SolverError(f"nu key {key!r} out of range for {alg.name}")
        out[(a, m)] = Fraction(v)
    return out


def kr_canonical(alg: AlgebraData, cutoff: int, *, box: Optional[int] = None, L: Optional[int] = None,
                 method: str = "direct") -> SolutionFamily:
    """Canonical solution of the KR-type system of ``alg`` on the window ``L`` (default: cutoff)."""
    if cutoff < 0:
        raise SolverError("cutoff must be nonnegative")
    L = _window(cutoff, box) if L is None else L
    spec = kr_matrices(alg, L)
    return solve_specialized(spec, alg.n, cutoff, box=box, method=method)


def _witness(f, g, index: Optional[str] = None) -> Optional[Discrepancy]:
    diff = f.first_difference(g)
    if diff is None:
        return None
    e, a, b = diff
    return Discrepancy({label_str(v): k for v, k in zip(f.variables, e) if k}, a, b, index)


def _compare(name: str, lhs, rhs, gating: bool = True, index: Optional[str] = None) -> Check:
    w = _witness(lhs, rhs, index)
    return Check(name, PASS if w is None else FAIL, w, gating)


def nu_label(nu: Nu) -> str:
    items = sorted((k, v) for k, v in nu.items() if v)
    if not items:
        return "0"
    return ",".join(f"({a},{m}):{Fraction(v)}" for (a, m), v in items)


# ---------------------------------------------------------------------------
# theorem-level checks
# ---------------------------------------------------------------------------

def verify_type_I(alg: AlgebraData, nu: Nu, cutoff: int, *, sol: Optional[SolutionFamily] = None,
                  convention: str = TYPE_I, box: Optional[int] = None) -> VerificationReport:
    """``Q^nu K^0 = K^nu`` and ``Q^nu = R^nu`` coefficient-exactly within the cutoff."""
    nu = _check_nu(alg, nu)
    report = VerificationReport(alg.name, cutoff)
    L = _window(cutoff, box, nu)
    spec = kr_matrices(alg, L)
    if sol is None or sol.spec.window() < L:
        sol = solve_specialized(spec, alg.n, cutoff, box=box)
    q = power_combination(sol, nu)
    K0 = series_K_specialized(spec, {}, cutoff, box=box, convention=convention)
    Knu = series_K_specialized(spec, nu, cutoff, box=box, convention=convention)
    Rnu = series_R_specialized(spec, nu, cutoff, box=box, convention=convention)
    tag = nu_label(nu)
    report.add(_compare(f"typeI-K[{tag}]", q * K0, Knu))
    report.add(_compare(f"typeI-R[{tag}]", q, Rnu))
    return report


def denominator_target(alg: AlgebraData, cutoff: int, box: Optional[int] = None) -> TruncatedSeries:
    """Weyl denominator of g0, with the extra factors ``prod_a (1 + y_a ... y_n)`` for A_2n^(2)."""
    den = weyl_denominator(alg, cutoff, box)
    if alg.base_type == "A" and alg.r == 2 and alg.N % 2 == 0:
        n = alg.n
        for a in range(1, n + 1):
            e = tuple(int(b >= a) for b in range(1, n + 1))
            den = den * (den.one_like() + den.like({e: 1}))
    return den


def c_form_denominator(alg: AlgebraData, cutoff: int, box: Optional[int] = None) -> TruncatedSeries:
    """For A_2n^(2): ``prod over C_n positive roots`` with ``e^{-alpha_a} -> y_a**eps_a``."""
    n = alg.n
    ys = y_labels(n)
    out = TruncatedSeries.one(ys, cutoff, None, box)
    for root in positive_roots_of(cartan_matrix("C", n)):
        e = tuple(root[a] * alg.eps[a] for a in range(n))
        out = out * (out.one_like() - out.like({e: 1}))
    return out


def verify_denominator(alg: AlgebraData, cutoff: int, *, box: Optional[int] = None,
                       K0: Optional[TruncatedSeries] = None) -> VerificationReport:
    """``K^0`` against the Weyl denominator of g0 (or the A_2n^(2) product) modulo the cutoff."""
    report = VerificationReport(alg.name, cutoff)
    if K0 is None:
        K0 = series_K_specialized(kr_matrices(alg, _window(cutoff, box)), {}, cutoff, box=box)
    twisted_even = alg.base_type == "A" and alg.r == 2 and alg.N % 2 == 0
    gating = proven_scope(alg) or twisted_even
    report.add(_compare("denominator", K0, denominator_target(alg, cutoff, box), gating))
    if twisted_even:
        report.add(_compare("denominator-C-form", K0, c_form_denominator(alg, cutoff, box), gating))
    return report


# ---------------------------------------------------------------------------
# Laurent-polynomial checks
# ---------------------------------------------------------------------------

def is_stable(f: TruncatedSeries) -> bool:
    """No coefficient at the top degree: the truncations at d-1 and d coincide."""
    return f.max_degree() < f.cutoff


def unnormalized(alg: AlgebraData, q: TruncatedSeries, a: int, m: int) -> LaurentPoly:
    """``x_a**m * Q(y(x))`` for ``Q = Q_m^(a)`` (an exact Laurent polynomial once stable)."""
    base = laurent_substitute(q, alg.g)
    shift = [0] * alg.n
    shift[a - 1] = m
    return base.monomial_shift(shift)


def verify_jacobian_denominator(alg: AlgebraData, cutoff: int, *, sol: Optional[SolutionFamily] = None,
                                K0: Optional[TruncatedSeries] = None) -> VerificationReport:
    """``K^0(y(x)) = det(d Qbold_1^(a) / d x_b)`` as Laurent polynomials."""
    report = VerificationReport(alg.name, cutoff)
    gating = proven_scope(alg)
    if sol is None:
        sol = kr_canonical(alg, cutoff)
    firsts = [sol[(a, 1)] for a in range(1, alg.n + 1)]
    if K0 is None:
        K0 = series_K_specialized(sol.spec, {}, cutoff)
    unstable = [f"Q_1^({a + 1})" for a, f in enumerate(firsts) if not is_stable(f)]
    if not is_stable(K0):
        unstable.append("K^0")
    if unstable:
        report.add(Check("jacobian-denominator", SKIPPED, None, gating,
                         f"not stabilized at cutoff {cutoff}: {', '.join(unstable)}; raise the cutoff"))
        return report
    xs = x_labels(alg.n)
    Qb = [unnormalized(alg, f, a + 1, 1) for a, f in enumerate(firsts)]
    J = [[Qb[a].derivative(xs[b]) for b in range(alg.n)] for a in range(alg.n)]
    det = linalg.det_generic(J, LaurentPoly.constant(1, xs))
    report.add(_compare("jacobian-denominator", det, laurent_substitute(K0, alg.g), gating))
    return report


def verify_unnormalized_recursion(alg: AlgebraData, cutoff: int, *,
                                  sol: Optional[SolutionFamily] = None) -> VerificationReport:
    """``Qb_m^2 = Qb_{m-1} Qb_{m+1} + Qb_m^2 prod Qb_k^(b)**G`` on every row with stable inputs."""
    report = VerificationReport(alg.name, cutoff)
    gating = proven_scope(alg)
    if sol is None:
        sol = kr_canonical(alg, cutoff)
    spec = sol.spec
    xs = x_labels(alg.n)
    one = LaurentPoly.constant(1, xs)
    cache: Dict[Tuple[int, int], Optional[LaurentPoly]] = {}

    def bold(a: int, m: int) -> Optional[LaurentPoly]:
        if m == 0:
            return one
        if (a, m) not in cache:
            q = sol[(a, m)]
            cache[(a, m)] = unnormalized(alg, q, a, m) if is_stable(q) else None
        return cache[(a, m)]

    checked = 0
    for (a, m) in spec.complete_rows:
        r = spec.position((a, m))
        need = [(a, m - 1), (a, m), (a, m + 1)]
        powers = []
        for c, (b, k) in enumerate(spec.indices):
            e = spec.G[r][c] + (2 if (b, k) == (a, m) else 0)
            if e:
                if e.denominator != 1 or e < 0:
                    raise SolverError(f"row {(a, m)} has exponent {e} on {(b, k)}; not a polynomial identity")
                powers.append(((b, k), int(e)))
                need.append((b, k))
        if any(bold(*i) is None for i in need):
            continue
        rhs = bold(a, m - 1) * bold(a, m + 1)
        extra = one
        for i, e in powers:
            extra = extra * bold(*i) ** e
        rhs = rhs + extra
        lhs = bold(a, m) ** 2
        check = _compare(f"unnormalized-recursion({a},{m})", lhs, rhs, gating)
        report.add(check)
        checked += 1
    if not checked:
        report.add(Check("unnormalized-recursion", SKIPPED, None, gating,
                         f"no row has stable inputs at cutoff {cutoff}; raise the cutoff"))
    return report


def character_comparison(alg: AlgebraData, a: int, m: int, cutoff: int, *,
                         sol: Optional[SolutionFamily] = None) -> VerificationReport:
    """``Q_m^(a)`` against the normalized character of ``V(m Lambda_a)`` (type A only)."""
    if alg.base_type != "A" or alg.r != 1:
        raise LieDataError("character comparison applies to untwisted type A")
    if not 1 <= a <= alg.n or m < 0:
        raise LieDataError(f"bad node/level ({a}, {m})")
    report = VerificationReport(alg.name, cutoff)
    if sol is None or sol.spec.window() < max(m, 1):
        sol = kr_canonical(alg, cutoff, L=max(cutoff, m, 1))
    lam = tuple(m * alg.eps[b] * (b == a - 1) for b in range(alg.n))
    _, target = weyl_character(alg, lam, cutoff=cutoff)
    report.add(_compare(f"character(a={a},m={m})", sol[(a, m)], target))
    return report


# ---------------------------------------------------------------------------
# multiplicities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultiplicityTable:
    algebra: str
    highest: Tuple[int, ...]
    entries: Tuple[Tuple[Tuple[int, ...], Fraction], ...]
    complete: bool
    cutoff: int

    def as_dict(self) -> Dict[Tuple[int, ...], Fraction]:
        return dict(self.entries)

    def nonnegative_integers(self) -> bool:
        return all(v.denominator == 1 and v >= 0 for _, v in self.entries)

    def to_json(self) -> Dict[str, Any]:
        return {
            "algebra": self.algebra,
            "cutoff": self.cutoff,
            "highest_weight": list(self.highest),
            "complete": self.complete,
            "multiplicities": [{"weight": list(w), "multiplicity": f"{v.numerator}/{v.denominator}"}
                               for w, v in self.entries],
        }


def total_weight(alg: AlgebraData, nu: Nu) -> Tuple[int, ...]:
    lam = [Fraction(0)] * alg.n
    for (a, m), v in nu.items():
        lam[a - 1] += Fraction(v) * m * alg.eps[a - 1]
    if any(x.denominator != 1 for x in lam):
        raise LieDataError("total weight is not integral")
    return tuple(int(x) for x in lam)


def completeness_cutoff(alg: AlgebraData, lam: Sequence[int]) -> int:
    """Cutoff that reaches every dominant weight below ``lam``."""
    r = alg.to_root_coords(lam)
    return sum(int(x) for x in r if x > 0)


def kr_multiplicities(alg: AlgebraData, nu: Nu, cutoff: int, *,
                      convention: str = TYPE_I) -> MultiplicityTable:
    """Dominant-weight coefficients of ``K^nu``, read as g0-multiplicities."""
    nu = _check_nu(alg, nu)
    lam = total_weight(alg, nu)
    if not is_dominant(lam):
        raise LieDataError(f"total weight {lam} is not dominant")
    spec = kr_matrices(alg, _window(cutoff, None, nu))
    K = series_K_specialized(spec, nu, cutoff, convention=convention)
    entries = []
    for M, c in K.items():
        mu = tuple(lam[b] - sum(M[a] * alg.A[b][a] for a in range(alg.n)) for b in range(alg.n))
        if is_dominant(mu):
            entries.append((mu, c))
    return MultiplicityTable(alg.name, lam, tuple(entries), cutoff >= completeness_cutoff(alg, lam), cutoff)


def oracle_decomposition(alg: AlgebraData, nu: Nu) -> Dict[Tuple[int, ...], int]:
    """Decompose ``tensor_a,m V(m eps_a Lambda_a)**nu`` with the character oracle (A_n: KR modules are irreducible)."""
    from .liedata import decompose, tensor_weights
    chars = []
    for (a, m), v in _check_nu(alg, nu).items():
        if v.denominator != 1 or v < 0:
            raise LieDataError("oracle decomposition needs nonnegative integer nu")
        lam = tuple(m * alg.eps[a - 1] * (b == a - 1) for b in range(alg.n))
        chars.extend([character_weights(alg, lam)] * int(v))
    if not chars:
        return {(0,) * alg.n: 1}
    return decompose(alg, tensor_weights(*chars))


# ---------------------------------------------------------------------------
# full suite
# ---------------------------------------------------------------------------

def random_nu(alg: AlgebraData, rng: random.Random, max_level: int, max_value: int = 2) -> Dict[Tuple[int, int], int]:
    nu = {}
    for _ in range(rng.randint(1, 2)):
        key = (rng.randint(1, alg.n), rng.randint(1, max_level))
        nu[key] = nu.get(key, 0) + rng.randint(1, max_value)
    return nu


def verify(alg: AlgebraData, cutoff: int, *, seed: int = 0, n_random: int = 2,
           convention: str = TYPE_I) -> VerificationReport:
    """Run the whole suite; informational checks never make ``report.ok`` false."""
    if cutoff < 1:
        raise SolverError("cutoff must be at least 1")
    report = VerificationReport(alg.name, cutoff)
    sol = kr_canonical(alg, cutoff)
    report.add(check_residual(sol))
    if cutoff >= 2:
        report.add(check_convergence_property(sol, cutoff - 2))
    K0 = series_K_specialized(sol.spec, {}, cutoff, convention=convention)
    report.extend(verify_type_I(alg, {}, cutoff, sol=sol, convention=convention))
    rng = random.Random(seed)
    for _ in range(n_random):
        nu = random_nu(alg, rng, min(cutoff, 3))
        report.extend(verify_type_I(alg, nu, cutoff, sol=sol, convention=convention))
    report.extend(verify_denominator(alg, cutoff, K0=K0))
    report.extend(verify_jacobian_denominator(alg, cutoff, sol=sol, K0=K0))
    report.extend(verify_unnormalized_recursion(alg, cutoff, sol=sol))
    if alg.base_type == "A" and alg.r == 1:
        for a in range(1, alg.n + 1):
            for m in range(1, min(cutoff, 3) + 1):
                report.extend(character_comparison(alg, a, m, cutoff, sol=sol))
    return report
