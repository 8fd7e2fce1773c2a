"""Solvers for finite, truncated infinite, and specialized Q-systems.

A Q-system on an index set H is the family of equations

    prod_j Q_j**D[i][j] + m_i * prod_j Q_j**G[i][j] = 1        (i in H)

for unit-constant-term series Q_i, where the driving monomial m_i is the
variable w_i (or ``y_a**m`` for a specialized index ``(a, m)``).  With
``G' = G D^{-1}`` the standard system ``Q'_i + m_i prod_j Q'_j**G'[i][j] = 1``
is solved by fixed-point iteration and ``Q_i = prod_j Q'_j**Dinv[i][j]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .report import FAIL, PASS, Check, Discrepancy
from .series import (SeriesError, TruncatedSeries, as_fraction, fraction_str, label_str,
                     parse_label, y_labels)

KINDS = ("standard", "finite-general", "infinite-truncated", "specialized")


class SolverError(ValueError):
    """A solver precondition was violated."""


def level(label: Hashable) -> int:
    """Position of an index along its chain: ``m`` for ``(a, m)``, the integer itself otherwise."""
    if isinstance(label, tuple) and len(label) == 2:
        return int(label[1])
    if isinstance(label, int):
        return label
    raise SolverError(f"index {label!r} has no chain level")


def chain(label: Hashable) -> Hashable:
    if isinstance(label, tuple) and len(label) == 2:
        return label[0]
    return None


# ---------------------------------------------------------------------------
# QSystemSpec
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QSystemSpec:
    kind: str
    indices: Tuple[Hashable, ...]
    D: Tuple[Tuple[Fraction, ...], ...]
    D_inv: Tuple[Tuple[Fraction, ...], ...]
    G: Tuple[Tuple[Fraction, ...], ...]
    G_prime: Tuple[Tuple[Fraction, ...], ...]
    weights: Tuple[int, ...]
    complete_rows: Tuple[Hashable, ...]
    rank: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SolverError(f"unknown kind {self.kind!r}")
        n = len(self.indices)
        if len(set(self.indices)) != n:
            raise SolverError("duplicate indices")
        for name in ("D", "D_inv", "G", "G_prime"):
            m = getattr(self, name)
            if len(m) != n or any(len(r) != n for r in m):
                raise SolverError(f"{name} must be {n}x{n}")
        prod = linalg.matmul(self.D, self.D_inv)
        if self.kind in ("standard", "finite-general"):
            if not linalg.is_identity(prod):
                raise SolverError("D * D_inv is not the identity")
            if linalg.matmul(self.G, self.D_inv) != [list(r) for r in self.G_prime]:
                raise SolverError("G_prime differs from G * D_inv")
        else:
            # only the window interior sees the whole infinite row and column
            top = max(level(i) for i in self.indices)
            for r, i in enumerate(self.indices):
                for c, j in enumerate(self.indices):
                    if level(i) < top and level(j) < top and prod[r][c] != (r == c):
                        raise SolverError("D * D_inv is not the identity on the window interior")
        if self.kind == "standard" and not linalg.is_identity(self.D):
            raise SolverError("a standard system has D = identity")
        if self.kind == "specialized":
            if self.rank is None:
                raise SolverError("specialized systems need a rank")
            for i in self.indices:
                if not (isinstance(i, tuple) and len(i) == 2 and 1 <= i[0] <= self.rank and i[1] >= 1):
                    raise SolverError(f"specialized index {i!r} must be (a, m) with 1 <= a <= rank")
        if len(self.weights) != n or any(w <= 0 for w in self.weights):
            raise SolverError("weights must be positive, one per index")
        if not set(self.complete_rows) <= set(self.indices):
            raise SolverError("complete_rows must be indices")

    # -- constructors ------------------------------------------------------

    @classmethod
    def standard(cls, G: Sequence[Sequence[Any]], indices: Optional[Sequence[Hashable]] = None) -> "QSystemSpec":
        G = linalg.to_matrix(G)
        n = len(G)
        idx = tuple(indices) if indices is not None else tuple(range(1, n + 1))
        eye = linalg.identity(n)
        return cls("standard", idx, _frozen(eye), _frozen(eye), _frozen(G), _frozen(G),
                   (1,) * n, idx)

    @classmethod
    def finite(cls, D: Sequence[Sequence[Any]], G: Sequence[Sequence[Any]],
               indices: Optional[Sequence[Hashable]] = None) -> "QSystemSpec":
        D = linalg.to_matrix(D)
        G = linalg.to_matrix(G)
        if len(D) != len(G):
            raise SolverError("D and G must have the same size")
        try:
            Dinv = linalg.inverse(D)
        except linalg.SingularMatrixError as exc:
            raise SolverError("D is not invertible") from exc
        n = len(D)
        idx = tuple(indices) if indices is not None else tuple(range(1, n + 1))
        kind = "standard" if linalg.is_identity(D) else "finite-general"
        return cls(kind, idx, _frozen(D), _frozen(Dinv), _frozen(G),
                   _frozen(linalg.matmul(G, Dinv)), (1,) * n, idx)

    @classmethod
    def truncated(cls, kind: str, indices: Sequence[Hashable], D: Sequence[Sequence[Any]],
                  D_inv: Sequence[Sequence[Any]], G: Sequence[Sequence[Any]],
                  G_prime: Optional[Sequence[Sequence[Any]]] = None,
                  weights: Optional[Sequence[int]] = None,
                  complete_rows: Optional[Sequence[Hashable]] = None,
                  rank: Optional[int] = None) -> "QSystemSpec":
        """Window of an infinite system; ``D_inv`` is the window of the infinite inverse."""
        if kind not in ("infinite-truncated", "specialized"):
            raise SolverError("truncated windows are infinite-truncated or specialized")
        indices = tuple(indices)
        D, Dinv, G = linalg.to_matrix(D), linalg.to_matrix(D_inv), linalg.to_matrix(G)
        Gp = linalg.to_matrix(G_prime) if G_prime is not None else linalg.matmul(G, Dinv)
        if weights is None:
            weights = tuple(level(i) for i in indices) if kind == "specialized" else (1,) * len(indices)
        if complete_rows is None:
            top = max(level(i) for i in indices)
            complete_rows = tuple(i for i in indices if level(i) < top)
        return cls(kind, indices, _frozen(D), _frozen(Dinv), _frozen(G), _frozen(Gp),
                   tuple(weights), tuple(complete_rows), rank)

    # -- helpers -----------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.indices)

    def position(self, label: Hashable) -> int:
        try:
            return self.indices.index(label)
        except ValueError:
            raise SolverError(f"index {label!r} not in the system") from None

    def window(self) -> int:
        return max(level(i) for i in self.indices)

    def to_json(self) -> Dict[str, Any]:
        mat = lambda m: [[fraction_str(x) for x in row] for row in m]
        out: Dict[str, Any] = {"kind": self.kind, "indices": [label_str(i) for i in self.indices],
                               "D": mat(self.D), "G": mat(self.G)}
        if self.kind in ("infinite-truncated", "specialized"):
            out["D_inv"] = mat(self.D_inv)
            out["G_prime"] = mat(self.G_prime)
            out["weights"] = list(self.weights)
            out["complete_rows"] = [label_str(i) for i in self.complete_rows]
        if self.rank is not None:
            out["rank"] = self.rank
        return out

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "QSystemSpec":
        if not isinstance(data, Mapping):
            raise SolverError("spec must be a JSON object")
        try:
            kind = data.get("kind", "finite-general")
            G = data["G"]
            n = len(G)
            indices = [parse_label(i) for i in data.get("indices", range(1, n + 1))]
            D = data.get("D")
            if kind == "standard":
                if D is not None and not linalg.is_identity(linalg.to_matrix(D)):
                    raise SolverError("a standard system has D = identity")
                return cls.standard(G, indices)
            if kind == "finite-general":
                return cls.finite(D, G, indices)
            if kind in ("infinite-truncated", "specialized"):
                if "D_inv" not in data:
                    raise SolverError("truncated windows need the infinite inverse as D_inv")
                rows = data.get("complete_rows")
                rows = [parse_label(i) for i in rows] if rows is not None else None
                return cls.truncated(kind, indices, D, data["D_inv"], G, data.get("G_prime"),
                                     data.get("weights"), rows, data.get("rank"))
        except (KeyError, TypeError, SeriesError, ZeroDivisionError) as exc:
            raise SolverError(f"malformed spec: {exc}") from exc
        raise SolverError(f"unknown kind {kind!r}")


def _frozen(m: Sequence[Sequence[Fraction]]) -> Tuple[Tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(x) for x in row) for row in m)


def tridiagonal_chain_spec(L: int, specialized: bool = False) -> QSystemSpec:
    """Chain ``Q_{i-1} Q_{i+1} / Q_i**2 + w_i = 1`` (G = 0) on the window ``1..L``."""
    if L < 1:
        raise SolverError("L must be at least 1")
    D = [[Fraction(-2 if i == j else 1 if abs(i - j) == 1 else 0) for j in range(L)] for i in range(L)]
    Dinv = [[Fraction(-min(i, j)) for j in range(1, L + 1)] for i in range(1, L + 1)]
    Z = linalg.zeros(L)
    if specialized:
        return QSystemSpec.truncated("specialized", [(1, m) for m in range(1, L + 1)], D, Dinv, Z, Z, rank=1)
    return QSystemSpec.truncated("infinite-truncated", list(range(1, L + 1)), D, Dinv, Z, Z)


# ---------------------------------------------------------------------------
# SolutionFamily
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolutionFamily:
    spec: QSystemSpec
    members: Mapping[Hashable, TruncatedSeries]
    space: str = "w"
    monomials: Mapping[Hashable, Tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for i, q in self.members.items():
            if q.constant_term() != 1:
                raise SolverError(f"member {i!r} lacks a unit constant term")

    @property
    def cutoff(self) -> int:
        return self._any().cutoff

    @property
    def box(self) -> Optional[int]:
        return self._any().box

    @property
    def variables(self) -> Tuple[Hashable, ...]:
        return self._any().variables

    def _any(self) -> TruncatedSeries:
        return next(iter(self.members.values()))

    def one(self) -> TruncatedSeries:
        return self._any().one_like()

    def __getitem__(self, label: Hashable) -> TruncatedSeries:
        if label in self.members:
            return self.members[label]
        try:
            if level(label) == 0:
                return self.one()
        except SolverError:
            pass
        raise SolverError(f"index {label!r} outside the family")

    def to_json(self) -> Dict[str, Any]:
        return {label_str(i): q.to_json() for i, q in self.members.items()}


def _ring(spec: QSystemSpec, space: str, cutoff: int, box: Optional[int]):
    """Variables, weights and driving monomials for the chosen space."""
    if space == "w":
        variables = spec.indices
        weights = spec.weights
        monos = {}
        for r, i in enumerate(spec.indices):
            e = [0] * len(variables)
            e[r] = 1
            monos[i] = tuple(e)
        return variables, weights, monos
    if space == "y":
        if spec.kind != "specialized":
            raise SolverError("the y space needs a specialized system")
        variables = y_labels(spec.rank)
        monos = {}
        for a, m in spec.indices:
            e = [0] * spec.rank
            e[a - 1] = m
            monos[(a, m)] = tuple(e)
        return variables, (1,) * spec.rank, monos
    raise SolverError(f"unknown space {space!r}")


def _shift(f: TruncatedSeries, mono: Tuple[int, ...], coef: Fraction) -> TruncatedSeries:
    """``coef * y**mono * f`` in f's ring."""
    out = {}
    for e, c in f.terms.items():
        t = tuple(a + b for a, b in zip(e, mono))
        out[t] = c * coef
    return f.like(out)


def _combine(logs: Sequence[TruncatedSeries], row: Sequence[Fraction], one: TruncatedSeries) -> TruncatedSeries:
    acc = None
    for c, lg in zip(row, logs):
        if c:
            term = lg.scale(c)
            acc = term if acc is None else acc + term
    return one if acc is None else acc.exp()


def _standard_fixed_point(Gp: Sequence[Sequence[Fraction]], order: Sequence[Hashable],
                          monos: Mapping[Hashable, Tuple[int, ...]], variables, weights,
                          cutoff: int, box: Optional[int]) -> List[TruncatedSeries]:
    """Solve ``Q_i = 1 - m_i prod_j Q_j**Gp[i][j]``; pass ``p`` runs in the degree-``p`` ring."""
    n = len(order)
    Q = [TruncatedSeries.one(variables, 0, weights, box) for _ in range(n)]
    wdeg = [sum(w * x for w, x in zip(weights, monos[i])) for i in order]
    if min(wdeg, default=1) < 1:
        raise SolverError("driving monomials must have positive degree")
    for p in range(1, cutoff + 1):
        Q = [q.lift(p, box) for q in Q]
        logs = [q.log() for q in Q]
        one = Q[0].one_like() if Q else None
        new = []
        for r, i in enumerate(order):
            if wdeg[r] > p:
                new.append(one)
                continue
            prod = _combine(logs, Gp[r], one)
            new.append(one - _shift(prod, monos[i], Fraction(1)))
        Q = new
    return Q


def solve_standard(spec: QSystemSpec, cutoff: int, *, box: Optional[int] = None,
                   space: str = "w") -> SolutionFamily:
    """Unique unit-constant-term solution of the standard system ``Q_i + m_i prod Q_j**G_ij = 1``.

    For windows of infinite systems the matrix used is ``G_prime`` (equal to
    ``G`` when D is the identity).
    """
    if cutoff < 0:
        raise SolverError("cutoff must be nonnegative")
    if spec.kind == "standard":
        Gp = spec.G
    elif spec.kind != "finite-general" and linalg.is_identity(spec.D):
        Gp = spec.G_prime
    else:
        raise SolverError("solve_standard needs D = identity")
    variables, weights, monos = _ring(spec, space, cutoff, box)
    Q = _standard_fixed_point(Gp, spec.indices, monos, variables, weights, cutoff, box)
    return SolutionFamily(spec, dict(zip(spec.indices, Q)), space, monos)


def solve_general(spec: QSystemSpec, cutoff: int, *, box: Optional[int] = None,
                  space: str = "w") -> SolutionFamily:
    """Unique (finite) or canonical (window) solution ``Q_i = prod_j Q'_j**Dinv[i][j]``."""
    if cutoff < 0:
        raise SolverError("cutoff must be nonnegative")
    variables, weights, monos = _ring(spec, space, cutoff, box)
    Qp = _standard_fixed_point(spec.G_prime, spec.indices, monos, variables, weights, cutoff, box)
    logs = [q.log() for q in Qp]
    one = TruncatedSeries.one(variables, cutoff, weights, box)
    members = {i: _combine(logs, spec.D_inv[r], one) for r, i in enumerate(spec.indices)}
    return SolutionFamily(spec, members, space, monos)


def solve_specialized(spec: QSystemSpec, n: int, cutoff: int, *, box: Optional[int] = None,
                      method: str = "direct") -> SolutionFamily:
    """Canonical solution of a specialized system, as series in ``y_1..y_n``.

    ``method="direct"`` iterates in the y ring; ``method="specialize"`` solves
    in the w ring (weight m on ``w[(a, m)]``) and substitutes ``w[(a, m)] -> y_a**m``.
    Both agree exactly; the direct path is far cheaper.
    """
    if spec.kind != "specialized":
        raise SolverError("solve_specialized needs a specialized system")
    if spec.rank != n:
        raise SolverError(f"system has rank {spec.rank}, not {n}")
    L = spec.window()
    reach = cutoff if box is None else min(cutoff, box)
    if L < reach:
        raise SolverError(f"window L={L} is smaller than the cutoff {reach}; truncation would be unfaithful")
    if method == "direct":
        return solve_general(spec, cutoff, box=box, space="y")
    if method == "specialize":
        from .series import specialize
        wsol = solve_general(spec, cutoff, space="w")
        members = {i: specialize(q, n, cutoff, box) for i, q in wsol.members.items()}
        _, _, monos = _ring(spec, "y", cutoff, box)
        return SolutionFamily(spec, members, "y", monos)
    raise SolverError(f"unknown method {method!r}")


def power_combination(sol: SolutionFamily, nu: Mapping[Hashable, Any]) -> TruncatedSeries:
    """``prod_i Q_i**nu_i`` within the family's ring."""
    result = sol.one()
    for i, v in nu.items():
        v = as_fraction(v)
        if not v:
            continue
        if i not in sol.members:
            raise SolverError(f"index {i!r} outside the family")
        result = result * sol.members[i].pow(v)
    return result


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def _witness(f: TruncatedSeries, g: TruncatedSeries, index: Optional[Hashable] = None) -> Optional[Discrepancy]:
    diff = f.first_difference(g)
    if diff is None:
        return None
    e, a, b = diff
    return Discrepancy({label_str(v): k for v, k in zip(f.variables, e) if k}, a, b,
                       None if index is None else label_str(index))


def _prod_pow(factors: Sequence[Tuple[TruncatedSeries, Fraction]], one: TruncatedSeries) -> TruncatedSeries:
    out = one
    for f, e in factors:
        if e:
            out = out * f.pow(e)
    return out


def check_residual(sol: SolutionFamily, name: str = "residual") -> Check:
    """Evaluate each complete row of the system on the family; pass iff LHS == 1."""
    spec = sol.spec
    one = sol.one()
    for i in spec.complete_rows:
        r = spec.position(i)
        left = _prod_pow([(sol[j], spec.D[r][c]) for c, j in enumerate(spec.indices)], one)
        right = _prod_pow([(sol[j], spec.G[r][c]) for c, j in enumerate(spec.indices)], one)
        lhs = left + _shift(right, sol.monomials[i], Fraction(1))
        w = _witness(lhs, one, i)
        if w is not None:
            return Check(name, FAIL, w)
    return Check(name, PASS)


def _chain_members(sol: SolutionFamily) -> Dict[Hashable, List[Hashable]]:
    chains: Dict[Hashable, List[Hashable]] = {}
    for i in sol.spec.indices:
        chains.setdefault(chain(i), []).append(i)
    for c in chains.values():
        c.sort(key=level)
        if [level(i) for i in c] != list(range(1, len(c) + 1)):
            raise SolverError("chain levels must run 1..L")
    return chains


def _mod_level(f: TruncatedSeries, L: int, space: str) -> TruncatedSeries:
    """Reduce modulo J_L: kill ``w`` variables of level > L, or powers ``y_a**(L+1)``."""
    if space == "y":
        return f.like(f.reduce_box(L))
    dead = [k for k, v in enumerate(f.variables) if level(v) > L]
    return f.like({e: c for e, c in f.terms.items() if not any(e[k] for k in dead)})


def check_convergence_property(sol: SolutionFamily, L: int, name: str = "convergence") -> Check:
    """Pass iff ``Q_m == Q_L (mod J_L)`` for every chain and every available ``m > L``."""
    if L < 0:
        raise SolverError("L must be nonnegative")
    chains = _chain_members(sol)
    found = False
    for c, members in chains.items():
        top = level(members[-1])
        if top <= L:
            continue
        found = True
        base = _mod_level(sol[_at(c, L)], L, sol.space)
        for m in range(L + 1, top + 1):
            other = _mod_level(sol[_at(c, m)], L, sol.space)
            w = _witness(other, base, _at(c, m))
            if w is not None:
                return Check(name, FAIL, w)
    if not found:
        raise SolverError(f"no index beyond level {L}; insufficient index range")
    return Check(name, PASS)


def _at(c: Hashable, m: int) -> Hashable:
    return m if c is None else (c, m)


def check_inversion_property(sol: SolutionFamily, L: int, name: str = "inversion") -> Check:
    """Evaluate ``prod_{j<=L} (Q_{j-1} Q_{j+1} / Q_j**2)**(-min(i, j)) == Q_i`` mod J_L.

    Finite systems pass by rearranging finite products.  Windows of infinite
    systems are supported only for chains with the tridiagonal second
    difference D; the product needs ``Q_{L+1}``.
    """
    spec = sol.spec
    if spec.kind in ("standard", "finite-general"):
        return Check(name, PASS, message="finite system: finite products rearrange freely")
    chains = _chain_members(sol)
    for r, i in enumerate(spec.indices):
        for c, j in enumerate(spec.indices):
            expect = 0
            if chain(i) == chain(j):
                d = level(i) - level(j)
                expect = -2 if d == 0 else 1 if abs(d) == 1 else 0
            if spec.D[r][c] != expect:
                raise SolverError("inversion check supports only tridiagonal chain D")
    if L < 1:
        raise SolverError("L must be at least 1")
    for c, members in chains.items():
        if level(members[-1]) < L + 1:
            raise SolverError(f"need Q at level {L + 1} for the window computation")
        red = {m: _mod_level(sol[_at(c, m)], L, sol.space) for m in range(0, L + 2)}
        one = sol.one()
        ratios = {j: red[j - 1] * red[j + 1] * red[j].pow(-2) for j in range(1, L + 1)}
        for i in range(1, L + 1):
            lhs = one
            for j in range(1, L + 1):
                lhs = lhs * ratios[j].pow(-min(i, j))
            w = _witness(lhs, red[i], _at(c, i))
            if w is not None:
                return Check(name, FAIL, w)
    return Check(name, PASS)


def noncanonical_chain_family(L: int, cutoff: int, q1: Optional[TruncatedSeries] = None,
                              specialized: bool = False) -> SolutionFamily:
    """``Q_i = Q_1**i prod_{j<i} (1 - w_j)**(i - j)``: solves the G = 0 chain for any Q_1.

    Only ``Q_1 = prod_j (1 - w_j)**(-1)`` gives the canonical solution; this is a
    source of true negatives for the canonicality checks.
    """
    spec = tridiagonal_chain_spec(L, specialized)
    space = "y" if specialized else "w"
    variables, weights, monos = _ring(spec, space, cutoff, None)
    one = TruncatedSeries.one(variables, cutoff, weights)
    if q1 is None:
        q1 = one
    elif not q1.same_ring(one):
        raise SolverError("Q_1 must live in the family's ring")
    members = {}
    for i in range(1, L + 1):
        q = q1.pow(i)
        for j in range(1, i):
            q = q * (one - _shift(one, monos[_at(chain(spec.indices[0]), j)], Fraction(1))).pow(i - j)
        members[spec.indices[i - 1]] = q
    return SolutionFamily(spec, members, space, monos)
