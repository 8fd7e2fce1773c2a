"""Exact dense linear algebra over the rationals (and generic commutative rings)."""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import lcm
from typing import Any, List, Sequence

Matrix = List[List[Fraction]]


class SingularMatrixError(ValueError):
    pass


def to_matrix(rows: Sequence[Sequence[Any]]) -> Matrix:
    from .series import as_fraction
    m = [[as_fraction(x) for x in row] for row in rows]
    if any(len(r) != len(m) for r in m):
        raise ValueError("matrix must be square")
    return m


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(n: int) -> Matrix:
    return [[Fraction(0)] * n for _ in range(n)]


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    bt = list(zip(*b))
    return [[sum((a[i][t] * bt[j][t] for t in range(k)), Fraction(0)) for j in range(m)] for i in range(n)]


def transpose(a: Sequence[Sequence[Fraction]]) -> Matrix:
    return [list(r) for r in zip(*a)]


def is_identity(a: Sequence[Sequence[Fraction]]) -> bool:
    return all(a[i][j] == (i == j) for i in range(len(a)) for j in range(len(a)))


def det(a: Sequence[Sequence[Any]]) -> Fraction:
    """Determinant by fraction-free Bareiss elimination after clearing denominators."""
    n = len(a)
    if n == 0:
        return Fraction(1)
    rows = to_matrix(a)
    # scale each row to integers so Bareiss stays inside Z
    scale = 1
    ints = []
    for r in rows:
        row_lcm = 1
        for x in r:
            row_lcm = lcm(row_lcm, x.denominator)
        ints.append([int(x * row_lcm) for x in r])
        scale *= row_lcm
    return Fraction(det_int(ints)) / scale


def det_int(m: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by Bareiss elimination (exact integer divisions)."""
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def inverse(a: Sequence[Sequence[Any]]) -> Matrix:
    """Exact inverse by Gauss-Jordan elimination; raises on singular input."""
    n = len(a)
    m = [row + idr for row, idr in zip(to_matrix(a), identity(n))]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def det_generic(a: Sequence[Sequence[Any]], one: Any) -> Any:
    """Determinant over any commutative ring by cofactor expansion.

    Intended for small matrices of series or Laurent polynomials.
    """
    n = len(a)
    if n == 0:
        return one
    if n <= 3:
        total = None
        for perm in permutations(range(n)):
            term = one
            for i, j in enumerate(perm):
                term = term * a[i][j]
            if _parity(perm):
                term = -term
            total = term if total is None else total + term
        return total
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * det_generic(minor, one)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def _parity(perm: Sequence[int]) -> int:
    p = list(perm)
    odd = 0
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            odd ^= 1
    return odd
