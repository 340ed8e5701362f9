"""Exact linear algebra over the rationals.

Matrices are lists of rows of Fractions.  Everything here is a plain
Gaussian-elimination routine; no floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

Matrix = list[list[Fraction]]
Vector = list[Fraction]


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def eye(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = Fraction(1)
    return m


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for t in range(inner):
            c = ai[t]
            if c:
                bt = b[t]
                for j in range(cols):
                    if bt[j]:
                        oi[j] += c * bt[j]
    return out


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, c: Fraction) -> Matrix:
    return [[c * x for x in row] for row in a]


def mat_vec(a: Matrix, v: Sequence[Fraction]) -> Vector:
    return [sum((c * x for c, x in zip(row, v) if c), Fraction(0)) for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row-echelon form; returns (reduced matrix, pivot columns)."""
    m = [row[:] for row in m]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def nullspace(m: Matrix) -> list[Vector]:
    """Basis of the right kernel {v : m v = 0}, in echelon order."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if rows == 0:
        return [
            [Fraction(1) if j == i else Fraction(0) for j in range(cols)]
            for i in range(cols)
        ]
    red, pivots = rref(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * cols
        v[free] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][free]
        basis.append(v)
    return basis


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def solve(a: Matrix, b: Vector) -> Optional[Vector]:
    """One solution of a x = b, or None if inconsistent."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [a[i][:] + [b[i]] for i in range(rows)]
    red, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][cols]
    return x


def invert(a: Matrix) -> Matrix:
    n = len(a)
    aug = [a[i][:] + eye(n)[i] for i in range(n)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def column_space_contains(basis: list[Vector], v: Vector) -> bool:
    """Is v a linear combination of the given vectors?"""
    if not basis:
        return all(x == 0 for x in v)
    m = transpose([list(b) for b in basis])
    return solve(m, list(v)) is not None


def same_span(a: list[Vector], b: list[Vector]) -> bool:
    return all(column_space_contains(a, v) for v in b) and all(
        column_space_contains(b, v) for v in a
    )
