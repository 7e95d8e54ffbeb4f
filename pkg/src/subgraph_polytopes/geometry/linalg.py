"""Exact rational linear algebra on small dense matrices."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Point = tuple[Fraction, ...]


def as_point(coords) -> Point:
    return tuple(Fraction(c) for c in coords)


def parse_rational(text: str) -> Fraction:
    return Fraction(str(text).strip())


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def sub(a: Sequence, b: Sequence) -> Point:
    return tuple(x - y for x, y in zip(a, b))


def det(matrix: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction Gaussian elimination."""
    a = [[Fraction(x) for x in row] for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("determinant needs a square matrix")
    sign = 1
    result = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        p = a[col][col]
        result *= p
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] / p
                row_r, row_c = a[r], a[col]
                for c in range(col, n):
                    row_r[c] -= f * row_c[c]
    return sign * result


def row_reduce(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    """Reduced row echelon form, zero rows dropped."""
    a = [[Fraction(x) for x in row] for row in rows]
    if not a:
        return []
    ncols = len(a[0])
    out_row = 0
    for col in range(ncols):
        piv = next((r for r in range(out_row, len(a)) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[out_row], a[piv] = a[piv], a[out_row]
        p = a[out_row][col]
        a[out_row] = [x / p for x in a[out_row]]
        for r in range(len(a)):
            if r != out_row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[out_row])]
        out_row += 1
        if out_row == len(a):
            break
    return a[:out_row]


def rank(rows: Sequence[Sequence]) -> int:
    return len(row_reduce(rows))


def affine_rank(points: Sequence[Sequence]) -> int:
    """Rank of the differences to the first point (0 for a single point)."""
    if not points:
        raise ValueError("affine rank of an empty set is undefined")
    base = points[0]
    return rank([sub(p, base) for p in points[1:]]) if len(points) > 1 else 0


def affine_basis(points: Sequence[Sequence]) -> tuple[Point, list[Point]]:
    """Origin and an echelon basis of the affine hull's direction space."""
    base = as_point(points[0])
    basis = row_reduce([sub(p, base) for p in points[1:]])
    return base, [tuple(r) for r in basis]


def independent_subset(points: Sequence[Sequence], size: int) -> list[int]:
    """Greedily pick ``size`` affinely independent points; indices returned."""
    chosen = [0]
    rows: list[list[Fraction]] = []
    base = points[0]
    for idx in range(1, len(points)):
        if len(chosen) == size:
            break
        cand = rows + [list(sub(points[idx], base))]
        if rank(cand) == len(cand):
            rows = cand
            chosen.append(idx)
    return chosen


def simplex_volume(points: Sequence[Sequence]) -> Fraction:
    """Volume of the simplex spanned by d+1 points in R^d."""
    from math import factorial

    d = len(points) - 1
    base = points[0]
    return abs(det([sub(p, base) for p in points[1:]])) / factorial(d)


def nullspace_vector(rows: Sequence[Sequence]) -> Point:
    """A nonzero vector orthogonal to all rows (rows of rank ncols - 1)."""
    ncols = len(rows[0])
    red = row_reduce(rows)
    pivots = []
    for r in red:
        pivots.append(next(c for c, x in enumerate(r) if x != 0))
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        raise ValueError("rows have full column rank")
    f = free[0]
    vec = [Fraction(0)] * ncols
    vec[f] = Fraction(1)
    for r, pc in zip(red, pivots):
        vec[pc] = -r[f]
    return tuple(vec)


def primitive(vec: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector (same direction)."""
    from math import gcd, lcm

    den = 1
    for x in vec:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints) if g else tuple(ints)
