"""Exact volumes in dimension <= 3 and a seeded Monte Carlo estimator."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ..exceptions import DegenerateError
from .hull import VPolytope, _convex_polygon_cycle, _scaled_integer, facet_cycles, hull_facets
from .linalg import affine_basis


def _isub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _det3(u, v, w) -> int:
    return u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) + u[2] * (v[0] * w[1] - v[1] * w[0])


def exact_volume(poly: VPolytope, with_flag: bool = False):
    """Volume via a fan from one vertex over triangulated facets.

    Lower-dimensional input has volume 0; with ``with_flag`` the result is
    ``(volume, degenerate)``.
    """
    dim, verts = poly.dim, poly.vertices
    if dim > 3:
        raise ValueError("exact volume is limited to dimension <= 3")
    _, basis = affine_basis(verts)
    if len(basis) < dim:
        return (Fraction(0), True) if with_flag else Fraction(0)
    if dim == 1:
        vol = max(verts)[0] - min(verts)[0]
    elif dim == 2:
        cyc = _convex_polygon_cycle({i: v for i, v in enumerate(verts)})
        area = Fraction(0)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            (x1, y1), (x2, y2) = verts[a], verts[b]
            area += x1 * y2 - x2 * y1
        vol = abs(area) / 2
    else:
        if poly.facets is None:
            hull_facets(poly)
        ints, den = _scaled_integer(verts)
        apex = ints[0]
        total = 0
        for cyc in facet_cycles(poly):
            if 0 in cyc:
                continue
            a = _isub(ints[cyc[0]], apex)
            for b, c in zip(cyc[1:-1], cyc[2:]):
                total += abs(_det3(a, _isub(ints[b], apex), _isub(ints[c], apex)))
        vol = Fraction(total, 6 * den**3)
    return (vol, False) if with_flag else vol


@dataclass
class MonteCarloEstimate:
    estimate: float
    stderr: float
    samples: int
    hits: int

    def within(self, value: float, k: float = 5.0) -> bool:
        return abs(self.estimate - value) <= k * self.stderr + 1e-15


def monte_carlo_volume(
    inside: Callable[[np.ndarray], np.ndarray],
    box: Sequence[tuple[float, float]],
    samples: int,
    seed: int = 0,
    chunk: int = 65536,
) -> MonteCarloEstimate:
    """Hit-ratio volume estimate of ``{x in box : inside(x)}``.

    ``inside`` maps an ``(N, d)`` float array to a boolean array.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    lo = np.array([b[0] for b in box], dtype=float)
    hi = np.array([b[1] for b in box], dtype=float)
    box_vol = float(np.prod(hi - lo))
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        x = lo + (hi - lo) * rng.random((m, len(lo)))
        hits += int(np.count_nonzero(inside(x)))
        done += m
    p = hits / samples
    se = box_vol * np.sqrt(p * (1 - p) / samples)
    return MonteCarloEstimate(box_vol * p, float(se), samples, hits)


def bounding_box(poly: VPolytope) -> list[tuple[float, float]]:
    return [
        (float(min(v[i] for v in poly.vertices)), float(max(v[i] for v in poly.vertices)))
        for i in range(poly.dim)
    ]


def hull_oracle(poly: VPolytope) -> Callable[[np.ndarray], np.ndarray]:
    """Float membership oracle for conv(vertices), any dimension."""
    if poly.dim <= 3:
        try:
            facets = poly.facets if poly.facets is not None else hull_facets(poly)
        except DegenerateError:
            return lambda x: np.zeros(len(x), dtype=bool)
        normals = np.array([[float(c) for c in f.normal] for f in facets])
        offsets = np.array([float(f.offset) for f in facets])
        return lambda x: np.all(x @ normals.T <= offsets + 1e-12, axis=1)
    from scipy.spatial import Delaunay

    tri = Delaunay(np.array([[float(c) for c in v] for v in poly.vertices]))
    return lambda x: tri.find_simplex(x) >= 0
