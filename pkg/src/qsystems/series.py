"""Sparse truncated multivariate power series and Laurent polynomials over Q.

A :class:`TruncatedSeries` is an element of ``Q[[w]]`` modulo the ideal spanned
by all monomials of weighted total degree greater than ``cutoff`` (and, when
``box`` is set, additionally by every ``w_i**(box+1)``).  Both ideals are
monomial, so the quotient is a ring and every operation here is exact in it.

Exponents are stored as dense tuples aligned with ``variables``.
"""
from __future__ import annotations

import re
from fractions import Fraction
from operator import add
from typing import Any, Dict, Hashable, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

Exp = Tuple[int, ...]
Number = Union[int, Fraction]


class SeriesError(ValueError):
    """Raised on incompatible operands or violated preconditions."""


def as_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise SeriesError(f"cannot interpret {value!r} as a rational number")


def fraction_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# variable labels <-> strings (JSON keys)
# ---------------------------------------------------------------------------

_TUPLE_RE = re.compile(r"^\(\s*-?\d+(\s*,\s*-?\d+)*\s*\)$")


def label_str(label: Hashable) -> str:
    if isinstance(label, bool):
        raise SeriesError("boolean labels are not supported")
    if isinstance(label, int):
        return str(label)
    if isinstance(label, tuple):
        return "(" + ",".join(str(int(x)) for x in label) + ")"
    if isinstance(label, str):
        return label
    raise SeriesError(f"unsupported variable label {label!r}")


def parse_label(text: Any) -> Hashable:
    if isinstance(text, int):
        return text
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    if not isinstance(text, str):
        raise SeriesError(f"unsupported label {text!r}")
    s = text.strip()
    if re.fullmatch(r"-?\d+", s):
        return int(s)
    if _TUPLE_RE.match(s):
        return tuple(int(x) for x in s[1:-1].split(","))
    return s


# ---------------------------------------------------------------------------
# TruncatedSeries
# ---------------------------------------------------------------------------

class TruncatedSeries:
    """Immutable sparse truncated power series with rational coefficients."""

    __slots__ = ("variables", "weights", "cutoff", "box", "_terms", "_index", "_buckets")

    def __init__(
        self,
        variables: Sequence[Hashable],
        terms: Optional[Mapping[Exp, Number]] = None,
        cutoff: int = 0,
        weights: Optional[Sequence[int]] = None,
        box: Optional[int] = None,
    ) -> None:
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise SeriesError("duplicate variable labels")
        if weights is None:
            weights = (1,) * len(variables)
        weights = tuple(int(x) for x in weights)
        if len(weights) != len(variables) or any(x <= 0 for x in weights):
            raise SeriesError("weights must be positive integers, one per variable")
        if cutoff < 0:
            raise SeriesError("cutoff must be nonnegative")
        if box is not None and box < 0:
            raise SeriesError("box must be nonnegative")
        self.variables = variables
        self.weights = weights
        self.cutoff = int(cutoff)
        self.box = box
        clean: Dict[Exp, Fraction] = {}
        if terms:
            nv = len(variables)
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nv or any(x < 0 for x in e):
                    raise SeriesError(f"bad exponent {e} for {nv} variables")
                if not self._admits(e):
                    continue
                c = as_fraction(c)
                if c:
                    clean[e] = c
        self._terms = clean
        self._index = None
        self._buckets = None

    @classmethod
    def _raw(cls, like: "TruncatedSeries", terms: Dict[Exp, Fraction]) -> "TruncatedSeries":
        # trusted constructor: terms already admissible and nonzero
        obj = cls.__new__(cls)
        obj.variables = like.variables
        obj.weights = like.weights
        obj.cutoff = like.cutoff
        obj.box = like.box
        obj._terms = terms
        obj._index = like._index
        obj._buckets = None
        return obj

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value: Number, variables: Sequence[Hashable], cutoff: int,
                 weights: Optional[Sequence[int]] = None, box: Optional[int] = None) -> "TruncatedSeries":
        return cls(variables, {(0,) * len(tuple(variables)): value}, cutoff, weights, box)

    @classmethod
    def one(cls, variables: Sequence[Hashable], cutoff: int,
            weights: Optional[Sequence[int]] = None, box: Optional[int] = None) -> "TruncatedSeries":
        return cls.constant(1, variables, cutoff, weights, box)

    @classmethod
    def zero(cls, variables: Sequence[Hashable], cutoff: int,
             weights: Optional[Sequence[int]] = None, box: Optional[int] = None) -> "TruncatedSeries":
        return cls(variables, {}, cutoff, weights, box)

    @classmethod
    def monomial(cls, exponents: Mapping[Hashable, int], coef: Number, variables: Sequence[Hashable],
                 cutoff: int, weights: Optional[Sequence[int]] = None,
                 box: Optional[int] = None) -> "TruncatedSeries":
        variables = tuple(variables)
        pos = {v: i for i, v in enumerate(variables)}
        e = [0] * len(variables)
        for v, k in exponents.items():
            if v not in pos:
                raise SeriesError(f"unknown variable {v!r}")
            e[pos[v]] += int(k)
        return cls(variables, {tuple(e): coef}, cutoff, weights, box)

    @classmethod
    def variable(cls, label: Hashable, variables: Sequence[Hashable], cutoff: int,
                 weights: Optional[Sequence[int]] = None, box: Optional[int] = None) -> "TruncatedSeries":
        return cls.monomial({label: 1}, 1, variables, cutoff, weights, box)

    def like(self, terms: Mapping[Exp, Number]) -> "TruncatedSeries":
        """A series in the same ring as ``self`` with the given terms."""
        return TruncatedSeries(self.variables, terms, self.cutoff, self.weights, self.box)

    def one_like(self) -> "TruncatedSeries":
        return self.like({(0,) * len(self.variables): 1})

    # -- basic data ----------------------------------------------------------

    def _admits(self, e: Exp) -> bool:
        if sum(w * x for w, x in zip(self.weights, e)) > self.cutoff:
            return False
        return self.box is None or all(x <= self.box for x in e)

    def degree_of(self, e: Exp) -> int:
        return sum(w * x for w, x in zip(self.weights, e))

    @property
    def terms(self) -> Dict[Exp, Fraction]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Tuple[Exp, Fraction]]:
        return iter(self.items())

    def items(self) -> list:
        """Terms in graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda t: (self.degree_of(t[0]), tuple(-x for x in t[0])))

    def is_zero(self) -> bool:
        return not self._terms

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * len(self.variables), Fraction(0))

    def coefficient(self, exponent: Union[Exp, Mapping[Hashable, int]]) -> Fraction:
        if isinstance(exponent, Mapping):
            e = [0] * len(self.variables)
            for v, k in exponent.items():
                e[self._pos(v)] = int(k)
            exponent = tuple(e)
        return self._terms.get(tuple(exponent), Fraction(0))

    def _pos(self, label: Hashable) -> int:
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self.variables)}
        try:
            return self._index[label]
        except KeyError:
            raise SeriesError(f"unknown variable {label!r}") from None

    def max_degree(self) -> int:
        return max((self.degree_of(e) for e in self._terms), default=-1)

    def by_degree(self) -> list:
        """List indexed by weighted degree of ``[(exp, coef), ...]`` buckets."""
        if self._buckets is None:
            b = [[] for _ in range(self.cutoff + 1)]
            for e, c in self._terms.items():
                b[self.degree_of(e)].append((e, c))
            self._buckets = b
        return self._buckets

    # -- ring compatibility --------------------------------------------------

    def same_ring(self, other: "TruncatedSeries") -> bool:
        return (self.variables == other.variables and self.weights == other.weights
                and self.cutoff == other.cutoff and self.box == other.box)

    def _check(self, other: "TruncatedSeries") -> None:
        if not self.same_ring(other):
            raise SeriesError(
                "series live in different rings: "
                f"vars {self.variables} / {other.variables}, cutoff {self.cutoff} / {other.cutoff}, "
                f"weights {self.weights} / {other.weights}, box {self.box} / {other.box}")

    def _coerce(self, other: Any) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.like({(0,) * len(self.variables): other})
        return NotImplemented

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: Any) -> "TruncatedSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return TruncatedSeries._raw(self, out)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries._raw(self, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: Any) -> "TruncatedSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other: Any) -> "TruncatedSeries":
        return (-self) + other

    def scale(self, factor: Number) -> "TruncatedSeries":
        factor = as_fraction(factor)
        if not factor:
            return TruncatedSeries._raw(self, {})
        return TruncatedSeries._raw(self, {e: c * factor for e, c in self._terms.items()})

    def __mul__(self, other: Any) -> "TruncatedSeries":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TruncatedSeries._raw(self, _mul_terms(self, other))

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "TruncatedSeries":
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / as_fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, alpha: Any) -> "TruncatedSeries":
        if isinstance(alpha, int) and alpha >= 0 and self.constant_term() != 1:
            result = self.one_like()
            base = self
            while alpha:
                if alpha & 1:
                    result = result * base
                base = base * base
                alpha >>= 1
            return result
        return self.pow(alpha)

    def inverse(self) -> "TruncatedSeries":
        c0 = self.constant_term()
        if not c0:
            raise SeriesError("series with zero constant term is not invertible")
        if c0 == 1:
            return self.pow(-1)
        return self.scale(1 / c0).pow(-1).scale(1 / c0)

    def pow(self, alpha: Number) -> "TruncatedSeries":
        """``self**alpha`` for a unit-constant-term series and rational ``alpha``.

        Uses the first-order recursion coming from ``f * E(g) = alpha * E(f) * g``
        with ``E`` the weighted Euler operator.
        """
        alpha = as_fraction(alpha)
        if self.constant_term() != 1:
            raise SeriesError("fractional powers need a unit constant term")
        zero = (0,) * len(self.variables)
        if alpha == 0:
            return TruncatedSeries._raw(self, {zero: Fraction(1)})
        if alpha == 1:
            return self
        fb = self.by_degree()
        gb = [[] for _ in range(self.cutoff + 1)]
        gb[0] = [(zero, Fraction(1))]
        out = {zero: Fraction(1)}
        admits = self._admits
        for d in range(1, self.cutoff + 1):
            acc: Dict[Exp, Fraction] = {}
            for k in range(1, d + 1):
                fk = fb[k]
                gs = gb[d - k]
                if not fk or not gs:
                    continue
                w = alpha * k - (d - k)
                if not w:
                    continue
                for et, ct in fk:
                    ctw = ct * w
                    for es, cs in gs:
                        e = tuple(map(add, et, es))
                        if self.box is not None and not admits(e):
                            continue
                        acc[e] = acc.get(e, 0) + ctw * cs
            bucket = []
            for e, c in acc.items():
                if c:
                    c = c / d
                    out[e] = c
                    bucket.append((e, c))
            gb[d] = bucket
        return TruncatedSeries._raw(self, out)

    def log(self) -> "TruncatedSeries":
        """Logarithm of a unit-constant-term series (zero constant term)."""
        if self.constant_term() != 1:
            raise SeriesError("log needs a unit constant term")
        fb = self.by_degree()
        lb = [[] for _ in range(self.cutoff + 1)]
        out: Dict[Exp, Fraction] = {}
        admits = self._admits
        for d in range(1, self.cutoff + 1):
            acc: Dict[Exp, Fraction] = {e: c for e, c in fb[d]}
            for k in range(1, d):
                fk = fb[k]
                ls = lb[d - k]
                if not fk or not ls:
                    continue
                w = Fraction(d - k, d)
                for et, ct in fk:
                    ctw = ct * w
                    for es, cs in ls:
                        e = tuple(map(add, et, es))
                        if self.box is not None and not admits(e):
                            continue
                        acc[e] = acc.get(e, 0) - ctw * cs
            bucket = [(e, c) for e, c in acc.items() if c]
            out.update(bucket)
            lb[d] = bucket
        return TruncatedSeries._raw(self, out)

    def exp(self) -> "TruncatedSeries":
        """Exponential of a zero-constant-term series."""
        if self.constant_term() != 0:
            raise SeriesError("exp needs a zero constant term")
        zero = (0,) * len(self.variables)
        gb = self.by_degree()
        eb = [[] for _ in range(self.cutoff + 1)]
        eb[0] = [(zero, Fraction(1))]
        out = {zero: Fraction(1)}
        admits = self._admits
        for d in range(1, self.cutoff + 1):
            acc: Dict[Exp, Fraction] = {}
            for k in range(1, d + 1):
                gk = gb[k]
                es_ = eb[d - k]
                if not gk or not es_:
                    continue
                for et, ct in gk:
                    ctk = ct * k
                    for es, cs in es_:
                        e = tuple(map(add, et, es))
                        if self.box is not None and not admits(e):
                            continue
                        acc[e] = acc.get(e, 0) + ctk * cs
            bucket = []
            for e, c in acc.items():
                if c:
                    c = c / d
                    out[e] = c
                    bucket.append((e, c))
            eb[d] = bucket
        return TruncatedSeries._raw(self, out)

    # -- calculus / structural -----------------------------------------------

    def derivative(self, label: Hashable) -> "TruncatedSeries":
        """Partial derivative; the result is exact only up to degree ``cutoff - weight``."""
        i = self._pos(label)
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return TruncatedSeries._raw(self, out)

    def euler(self) -> "TruncatedSeries":
        """Weighted Euler operator: each monomial times its weighted degree."""
        return TruncatedSeries._raw(self, {e: c * self.degree_of(e) for e, c in self._terms.items() if self.degree_of(e)})

    def truncate(self, cutoff: Optional[int] = None, box: Optional[int] = None) -> "TruncatedSeries":
        """Reduce into a smaller quotient ring (cutoff and box can only shrink)."""
        cutoff = self.cutoff if cutoff is None else cutoff
        if cutoff > self.cutoff:
            raise SeriesError("cannot raise the cutoff of a truncated series")
        if box is None:
            box = self.box
        elif self.box is not None and box > self.box:
            raise SeriesError("cannot enlarge the box of a truncated series")
        return TruncatedSeries(self.variables, self._terms, cutoff, self.weights, box)

    def lift(self, cutoff: int, box: Optional[int] = None) -> "TruncatedSeries":
        """Re-read a polynomial in a ring with a larger cutoff (no information is added)."""
        return TruncatedSeries(self.variables, self._terms, cutoff, self.weights, box)

    def reduce_box(self, L: int) -> Dict[Exp, Fraction]:
        """Coefficients modulo the ideal generated by every ``w_i**(L+1)``."""
        return {e: c for e, c in self._terms.items() if all(x <= L for x in e)}

    def substitute_monomials(self, images: Sequence[Exp], variables: Sequence[Hashable], cutoff: int,
                             weights: Optional[Sequence[int]] = None,
                             box: Optional[int] = None) -> "TruncatedSeries":
        """Substitute each variable by a monomial (given by its exponent tuple) in a new ring."""
        nv = len(tuple(variables))
        out: Dict[Exp, Fraction] = {}
        for e, c in self._terms.items():
            t = [0] * nv
            for k, img in zip(e, images):
                if k:
                    for j, x in enumerate(img):
                        t[j] += k * x
            t = tuple(t)
            out[t] = out.get(t, 0) + c
        return TruncatedSeries(variables, out, cutoff, weights, box)

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self._terms == ({(0,) * len(self.variables): Fraction(other)} if other else {})
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.same_ring(other) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.variables, self.weights, self.cutoff, self.box, frozenset(self._terms.items())))

    def first_difference(self, other: "TruncatedSeries") -> Optional[Tuple[Exp, Fraction, Fraction]]:
        """First exponent (graded-lex order) where the coefficients differ, or ``None``."""
        self._check(other)
        keys = set(self._terms) | set(other._terms)
        bad = [e for e in keys if self._terms.get(e, 0) != other._terms.get(e, 0)]
        if not bad:
            return None
        e = min(bad, key=lambda t: (self.degree_of(t), tuple(-x for x in t)))
        return e, self._terms.get(e, Fraction(0)), other._terms.get(e, Fraction(0))

    def exp_dict(self, e: Exp) -> Dict[Hashable, int]:
        return {v: k for v, k in zip(self.variables, e) if k}

    # -- display / serialization -------------------------------------------

    def __repr__(self) -> str:
        return f"TruncatedSeries({self}, cutoff={self.cutoff})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.items():
            mono = "*".join(
                (f"{_show(v)}^{k}" if k > 1 else _show(v)) for v, k in zip(self.variables, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "vars": [label_str(v) for v in self.variables],
            "cutoff": self.cutoff,
            "weights": list(self.weights),
            "terms": [
                {"exp": {label_str(v): k for v, k in zip(self.variables, e) if k}, "coef": fraction_str(c)}
                for e, c in self.items()
            ],
        }
        if self.box is not None:
            data["box"] = self.box
        return data

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "TruncatedSeries":
        try:
            variables = [parse_label(v) for v in data["vars"]]
            cutoff = int(data["cutoff"])
            weights = data.get("weights")
            box = data.get("box")
            keys = {label_str(v): i for i, v in enumerate(variables)}
            terms: Dict[Exp, Fraction] = {}
            for t in data["terms"]:
                e = [0] * len(variables)
                for name, k in t["exp"].items():
                    e[keys[name]] = int(k)
                terms[tuple(e)] = terms.get(tuple(e), 0) + as_fraction(t["coef"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SeriesError(f"malformed series JSON: {exc}") from exc
        return cls(variables, terms, cutoff, weights, box)


def _show(label: Hashable) -> str:
    if isinstance(label, tuple):
        return "w" + label_str(label)
    if isinstance(label, int):
        return f"w{label}"
    return str(label)


def _mul_terms(f: TruncatedSeries, g: TruncatedSeries) -> Dict[Exp, Fraction]:
    fb = f.by_degree()
    gb = g.by_degree()
    cutoff = f.cutoff
    box = f.box
    out: Dict[Exp, Fraction] = {}
    for df, bucket in enumerate(fb):
        if not bucket:
            continue
        for dg in range(cutoff - df + 1):
            other = gb[dg]
            if not other:
                continue
            for ef, cf in bucket:
                for eg, cg in other:
                    e = tuple(map(add, ef, eg))
                    if box is not None and max(e) > box:
                        continue
                    out[e] = out.get(e, 0) + cf * cg
    return {e: c for e, c in out.items() if c}


def product(factors: Iterable[TruncatedSeries], one: TruncatedSeries) -> TruncatedSeries:
    result = one
    for f in factors:
        result = result * f
    return result


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def series_add(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    f._check(g)
    return f + g


def series_mul(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    f._check(g)
    return f * g


def series_pow(f: TruncatedSeries, alpha: Number) -> TruncatedSeries:
    return f.pow(alpha)


def series_log(f: TruncatedSeries) -> TruncatedSeries:
    return f.log()


def series_exp(f: TruncatedSeries) -> TruncatedSeries:
    return f.exp()


def y_labels(n: int) -> Tuple[str, ...]:
    return tuple(f"y{a}" for a in range(1, n + 1))


def x_labels(n: int) -> Tuple[str, ...]:
    return tuple(f"x{a}" for a in range(1, n + 1))


def specialize(f: TruncatedSeries, n: int, cutoff: int, box: Optional[int] = None) -> TruncatedSeries:
    """Substitute ``w[(a, m)] -> y_a**m`` and truncate in the ``y`` ring.

    ``f`` must be a series over pair labels ``(a, m)`` with weight ``m`` on
    ``w[(a, m)]`` and ``f.cutoff >= cutoff``; then no ``y`` coefficient of
    total degree ``<= cutoff`` depends on discarded ``w`` terms.
    """
    for v, wt in zip(f.variables, f.weights):
        if not (isinstance(v, tuple) and len(v) == 2):
            raise SeriesError(f"specialize expects (a, m) labels, got {v!r}")
        a, m = v
        if not 1 <= a <= n or m < 1:
            raise SeriesError(f"label {v!r} out of range for rank {n}")
        if wt != m:
            raise SeriesError(f"variable {v!r} must carry weight {m}, has {wt}")
    if f.cutoff < cutoff:
        raise SeriesError(f"source cutoff {f.cutoff} cannot determine y-degree {cutoff}")
    if box is not None:
        if f.box is not None and f.box < box:
            raise SeriesError("source box too small")
        present = {v for v in f.variables}
        for a in range(1, n + 1):
            for m in range(1, min(box, cutoff) + 1):
                if (a, m) not in present:
                    raise SeriesError(f"variable {(a, m)} missing; target not determined")
    images = []
    for a, m in f.variables:
        img = [0] * n
        img[a - 1] = m
        images.append(tuple(img))
    return f.substitute_monomials(images, y_labels(n), cutoff, None, box)


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------

class LaurentPoly:
    """Finite-support Laurent polynomial with rational coefficients."""

    __slots__ = ("variables", "_terms")

    def __init__(self, variables: Sequence[Hashable], terms: Optional[Mapping[Exp, Number]] = None) -> None:
        self.variables = tuple(variables)
        clean: Dict[Exp, Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != len(self.variables):
                raise SeriesError("exponent length mismatch")
            c = as_fraction(c)
            if c:
                clean[e] = clean.get(e, 0) + c
                if not clean[e]:
                    del clean[e]
        self._terms = clean

    @classmethod
    def constant(cls, value: Number, variables: Sequence[Hashable]) -> "LaurentPoly":
        return cls(variables, {(0,) * len(tuple(variables)): value})

    @property
    def terms(self) -> Dict[Exp, Fraction]:
        return dict(self._terms)

    def items(self) -> list:
        return sorted(self._terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0])))

    def _check(self, other: "LaurentPoly") -> None:
        if self.variables != other.variables:
            raise SeriesError("Laurent polynomials over different variables")

    def _coerce(self, other: Any) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.constant(other, self.variables)
        return NotImplemented

    def __add__(self, other: Any) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: Any) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other: Any) -> "LaurentPoly":
        return (-self) + other

    def __mul__(self, other: Any) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Exp, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(map(add, e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if not isinstance(k, int) or k < 0:
            if isinstance(k, int) and len(self._terms) == 1:
                (e, c), = self._terms.items()
                return LaurentPoly(self.variables, {tuple(x * k for x in e): Fraction(1) / c ** (-k)})
            raise SeriesError("only nonnegative integer powers of non-monomial Laurent polynomials")
        result = LaurentPoly.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def derivative(self, label: Hashable) -> "LaurentPoly":
        i = self.variables.index(label)
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return LaurentPoly(self.variables, out)

    def monomial_shift(self, shift: Sequence[int]) -> "LaurentPoly":
        return LaurentPoly(self.variables, {tuple(map(add, e, shift)): c for e, c in self._terms.items()})

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.constant(other, self.variables)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.variables == other.variables and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self._terms.items())))

    def first_difference(self, other: "LaurentPoly") -> Optional[Tuple[Exp, Fraction, Fraction]]:
        self._check(other)
        keys = set(self._terms) | set(other._terms)
        bad = sorted((e for e in keys if self._terms.get(e, 0) != other._terms.get(e, 0)),
                     key=lambda t: (-sum(t), tuple(-x for x in t)))
        if not bad:
            return None
        e = bad[0]
        return e, self._terms.get(e, Fraction(0)), other._terms.get(e, Fraction(0))

    def __repr__(self) -> str:
        if not self._terms:
            return "LaurentPoly(0)"
        parts = []
        for e, c in self.items():
            mono = "*".join((f"{v}^{k}" if k != 1 else str(v)) for v, k in zip(self.variables, e) if k)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return "LaurentPoly(" + " + ".join(parts) + ")"

    def to_json(self) -> Dict[str, Any]:
        return {
            "vars": [label_str(v) for v in self.variables],
            "terms": [
                {"exp": {label_str(v): k for v, k in zip(self.variables, e) if k}, "coef": fraction_str(c)}
                for e, c in self.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "LaurentPoly":
        try:
            variables = [parse_label(v) for v in data["vars"]]
            keys = {label_str(v): i for i, v in enumerate(variables)}
            terms: Dict[Exp, Fraction] = {}
            for t in data["terms"]:
                e = [0] * len(variables)
                for name, k in t["exp"].items():
                    e[keys[name]] = int(k)
                terms[tuple(e)] = terms.get(tuple(e), 0) + as_fraction(t["coef"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SeriesError(f"malformed Laurent JSON: {exc}") from exc
        return cls(variables, terms)


def laurent_substitute(f: TruncatedSeries, g_matrix: Sequence[Sequence[Number]],
                       variables: Optional[Sequence[Hashable]] = None) -> LaurentPoly:
    """Map ``y_a -> prod_b x_b**(-g[a][b])``; ``f`` is read as the polynomial it stores."""
    n = len(f.variables)
    if len(g_matrix) != n or any(len(row) != n for row in g_matrix):
        raise SeriesError("g matrix must be square of size len(f.variables)")
    g = []
    for row in g_matrix:
        r = []
        for x in row:
            x = as_fraction(x)
            if x.denominator != 1:
                raise SeriesError("g entries must be integers")
            r.append(int(x))
        g.append(r)
    xs = tuple(variables) if variables is not None else x_labels(n)
    out: Dict[Exp, Fraction] = {}
    for e, c in f._terms.items():
        t = tuple(-sum(e[a] * g[a][b] for a in range(n)) for b in range(n))
        out[t] = out.get(t, 0) + c
    return LaurentPoly(xs, out)
