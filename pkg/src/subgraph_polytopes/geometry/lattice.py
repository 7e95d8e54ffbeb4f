"""Lattice point counting in dilates and Ehrhart polynomial fitting."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from ..exceptions import DegenerateError, InconsistencyError
from .hull import VPolytope, hull_facets, membership
from .linalg import row_reduce


def _require_integral(poly: VPolytope):
    if any(x.denominator != 1 for v in poly.vertices for x in v):
        raise ValueError("lattice point counting needs integral vertices")


def count_lattice_points(poly: VPolytope, k: int = 1) -> int:
    """Number of integer points in ``k * poly`` (bounding box scan)."""
    _require_integral(poly)
    if poly.dim > 3:
        raise ValueError("lattice point counting is limited to dimension <= 3")
    if k < 0:
        raise ValueError("dilation must be non-negative")
    if k == 0:
        return 1
    lo = [int(min(v[i] for v in poly.vertices)) * k for i in range(poly.dim)]
    hi = [int(max(v[i] for v in poly.vertices)) * k for i in range(poly.dim)]
    try:
        facets = poly.facets if poly.facets is not None else hull_facets(poly)
    except DegenerateError:
        facets = None
    if facets is None:
        scaled = poly.scaled(k)
        return sum(
            1
            for x in product(*(range(a, b + 1) for a, b in zip(lo, hi)))
            if membership(x, scaled).inside
        )
    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, poly.dim)
    keep = np.ones(len(grid), dtype=bool)
    for f in facets:
        # facet normals and offsets are integral (primitive normal, integral vertices)
        normal = np.array([int(c) for c in f.normal], dtype=np.int64)
        keep &= grid @ normal <= int(f.offset) * k
    return int(np.count_nonzero(keep))


@dataclass(frozen=True)
class EhrhartPolynomial:
    """Coefficients, constant term first."""

    coefficients: tuple[Fraction, ...]

    def __call__(self, k) -> Fraction:
        return sum((c * Fraction(k) ** i for i, c in enumerate(self.coefficients)), Fraction(0))

    @property
    def degree(self) -> int:
        nz = [i for i, c in enumerate(self.coefficients) if c != 0]
        return nz[-1] if nz else 0

    def compose_scale(self, s) -> EhrhartPolynomial:
        """The polynomial ``k -> self(s * k)``."""
        s = Fraction(s)
        return EhrhartPolynomial(tuple(c * s**i for i, c in enumerate(self.coefficients)))

    def __str__(self):
        parts = []
        for i in range(len(self.coefficients) - 1, -1, -1):
            c = self.coefficients[i]
            if c == 0:
                continue
            cs = str(c)
            if i == 0:
                parts.append(cs)
            else:
                mono = "k" if i == 1 else f"k^{i}"
                parts.append(mono if c == 1 else f"{cs}{mono}")
        return "+".join(parts).replace("+-", "-") or "0"


def interpolate(xs: Sequence[int], ys: Sequence) -> tuple[Fraction, ...]:
    """Coefficients of the unique polynomial of degree < len(xs) through the data."""
    n = len(xs)
    rows = [[Fraction(x) ** j for j in range(n)] + [Fraction(y)] for x, y in zip(xs, ys)]
    red = row_reduce(rows)
    if len(red) != n:
        raise ValueError("interpolation nodes must be distinct")
    return tuple(r[-1] for r in red)


def fit_ehrhart(poly: VPolytope, ks: Sequence[int] | None = None, dilation: int = 1) -> EhrhartPolynomial:
    """Ehrhart polynomial of ``dilation * poly`` by interpolation.

    Fitted on ``ks`` (default ``1..dim+1``), then re-verified at a held-out k.
    """
    dim = poly.dim
    ks = list(ks) if ks is not None else list(range(1, dim + 2))
    if len(set(ks)) < dim + 1 or any(k < 1 for k in ks):
        raise ValueError(f"need at least {dim + 1} distinct positive evaluation points")
    ks = sorted(set(ks))
    counts = [count_lattice_points(poly, dilation * k) for k in ks]
    coeffs = list(interpolate(ks, counts))
    coeffs += [Fraction(0)] * (dim + 1 - len(coeffs))
    if any(c != 0 for c in coeffs[dim + 1:]):
        raise InconsistencyError("lattice counts are not polynomial of degree <= dim")
    poly_e = EhrhartPolynomial(tuple(coeffs[: dim + 1]))
    held = max(ks) + 1
    if poly_e(held) != count_lattice_points(poly, dilation * held):
        raise InconsistencyError(f"Ehrhart fit fails held-out check at k={held}")
    return poly_e
