"""Vertex-described polytopes with exact extremality, membership and facets.

Qhull (via scipy) is only used to propose candidate vertices and facet
planes; every answer returned here is re-derived and checked in exact
rational arithmetic.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm
from typing import Sequence

import numpy as np

from ..exceptions import DegenerateError, InconsistencyError
from .linalg import Point, affine_basis, as_point, dot, nullspace_vector, primitive, rank, sub
from .lp import convex_combination

PREFILTER_THRESHOLD = 24


@dataclass(frozen=True)
class Facet:
    """Supporting inequality ``normal . x <= offset`` with its incident vertices."""

    normal: Point
    offset: Fraction
    incident: tuple[int, ...]

    def slack(self, p: Sequence) -> Fraction:
        return self.offset - dot(self.normal, p)


@dataclass
class VPolytope:
    dim: int
    vertices: list[Point]
    witnesses: dict[int, list[str]] = field(default_factory=dict)
    facets: list[Facet] | None = None

    def __post_init__(self):
        self.vertices = [as_point(v) for v in self.vertices]
        if any(len(v) != self.dim for v in self.vertices):
            raise ValueError("vertex dimension mismatch")

    def __len__(self):
        return len(self.vertices)

    def scaled(self, k) -> VPolytope:
        k = Fraction(k)
        return VPolytope(self.dim, [tuple(k * x for x in v) for v in self.vertices], dict(self.witnesses))

    def mapped(self, scales: Sequence) -> VPolytope:
        """Coordinatewise rescaling ``x_i -> scales[i] * x_i``."""
        s = [Fraction(x) for x in scales]
        return VPolytope(self.dim, [tuple(a * x for a, x in zip(s, v)) for v in self.vertices], dict(self.witnesses))

    def vertex_set(self) -> set[Point]:
        return set(self.vertices)

    def contains(self, p: Sequence) -> bool:
        return membership(p, self).inside


@dataclass
class Membership:
    inside: bool
    coefficients: tuple[Fraction, ...] | None = None
    normal: Point | None = None
    offset: Fraction | None = None

    def __bool__(self):
        return self.inside


def _dedupe(points: Sequence[Sequence]) -> list[Point]:
    seen = {}
    for p in points:
        q = as_point(p)
        seen.setdefault(q, None)
    return list(seen)


def membership(p: Sequence, poly: VPolytope | Sequence[Sequence]) -> Membership:
    """Exact LP membership test with a certificate either way.

    Inside: convex coefficients reproducing ``p``. Outside: ``(normal, offset)``
    with ``normal . p > offset >= normal . v`` for all vertices ``v``.
    """
    verts = poly.vertices if isinstance(poly, VPolytope) else [as_point(v) for v in poly]
    if not verts:
        raise ValueError("membership in an empty polytope")
    p = as_point(p)
    if len(p) != len(verts[0]):
        raise ValueError("dimension mismatch")
    ok, cert = convex_combination(p, verts)
    if ok:
        return Membership(True, coefficients=cert)
    normal, offset = cert
    return Membership(False, normal=normal, offset=offset)


def verify_membership(p: Sequence, verts: Sequence[Point], result: Membership) -> bool:
    """Independently re-check a membership certificate."""
    p = as_point(p)
    if result.inside:
        lam = result.coefficients
        if any(x < 0 for x in lam) or sum(lam) != 1:
            return False
        combo = tuple(sum((l * v[i] for l, v in zip(lam, verts)), Fraction(0)) for i in range(len(p)))
        return combo == p
    return dot(result.normal, p) > result.offset and all(dot(result.normal, v) <= result.offset for v in verts)


def _float_hull(points: list[Point]):
    from scipy.spatial import ConvexHull, QhullError

    arr = np.array([[float(x) for x in p] for p in points])
    try:
        return ConvexHull(arr)
    except (QhullError, ValueError):
        return None


def _scaled_integer(points: list[Point]) -> tuple[list[tuple[int, ...]], int]:
    den = 1
    for p in points:
        for x in p:
            den = lcm(den, x.denominator)
    return [tuple(int(x * den) for x in p) for p in points], den


def _int_plane(pts: list[tuple[int, ...]]) -> tuple[tuple[int, ...], int] | None:
    """Integer plane through dim integer points (dim 2 or 3), or None if degenerate."""
    a = pts[0]
    if len(a) == 2:
        b = pts[1]
        n = (a[1] - b[1], b[0] - a[0])
    else:
        b, c = pts[1], pts[2]
        u = (b[0] - a[0], b[1] - a[1], b[2] - a[2])
        v = (c[0] - a[0], c[1] - a[1], c[2] - a[2])
        n = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
    if not any(n):
        return None
    off = sum(x * y for x, y in zip(n, a))
    g = 0
    for x in (*n, off):
        g = gcd(g, x)
    return tuple(x // g for x in n), off // g


def _int_rank(rows: list[tuple[int, ...]]) -> int:
    return rank([tuple(Fraction(x) for x in r) for r in rows]) if rows else 0


def _integer_hull(points: list[Point]) -> tuple[list[int], list[tuple[tuple[int, ...], int, tuple[int, ...]]], int] | None:
    """Exact hull of a full-dimensional point set in dimension 2 or 3.

    Works on the points scaled to a common integer lattice. Qhull proposes
    the facet planes; each is recomputed in integers, every point is checked
    against it (floats only to skip points that are far inside, with a
    rounding margin), vertices are the points whose tight normals span
    R^dim, and the facet list is accepted only if it closes up.
    Returns ``(vertex_indices, [(normal, offset, incident)], den)`` in the
    scaled coordinates, or None when the fast path does not apply.
    """
    dim = len(points[0])
    if dim not in (2, 3) or len(points) <= dim + 1:
        return None
    ints, den = _scaled_integer(points)
    hull = _float_hull(points)
    if hull is None:
        return None
    big = max(max(abs(x) for x in p) for p in ints) or 1
    shift = max(big.bit_length() - 60, 0)
    approx = np.array([[float(x >> shift) if shift else float(x) for x in p] for p in ints])
    absapprox = np.abs(approx)
    planes: dict[tuple[tuple[int, ...], int], tuple[int, ...]] = {}
    for simplex in hull.simplices:
        plane = _int_plane([ints[i] for i in simplex])
        if plane is None:
            return None
        normal, off = plane
        if any(sum(x * y for x, y in zip(normal, ints[i])) != off for i in simplex):
            return None
        # orient using a point off the plane
        ref = next((q for q in ints if sum(x * y for x, y in zip(normal, q)) != off), None)
        if ref is None:
            return None
        if sum(x * y for x, y in zip(normal, ref)) > off:
            normal, off = tuple(-x for x in normal), -off
        if (normal, off) in planes:
            continue
        nf = np.array([float(x) for x in normal])
        scale = 2.0 ** shift
        offf = float(off) / scale
        slack = approx @ nf - offf
        margin = 1e-9 * (absapprox @ np.abs(nf) + abs(offf) + 1.0)
        near = np.nonzero(slack > -margin)[0]
        incident = []
        for i in near.tolist():
            v = sum(x * y for x, y in zip(normal, ints[i]))
            if v > off:
                return None
            if v == off:
                incident.append(i)
        planes[(normal, off)] = tuple(incident)
    tight: dict[int, list[tuple[int, ...]]] = {}
    for (normal, _), inc in planes.items():
        for i in inc:
            tight.setdefault(i, []).append(normal)
    verts = sorted(i for i, ns in tight.items() if len(ns) >= dim and _int_rank(ns) == dim)
    vset = set(verts)
    facets = [(n, off, tuple(i for i in inc if i in vset)) for (n, off), inc in planes.items()]
    check = [Facet(tuple(Fraction(x) for x in n), Fraction(off), inc) for n, off, inc in facets]
    if not _closed_surface(check, [as_point(p) for p in ints], dim, restrict=vset):
        return None
    return verts, facets, den


def _lift_facets(facets, verts: list[int], den: int) -> list[Facet]:
    """Facets of the scaled integer hull, re-indexed onto the vertex list."""
    pos = {v: k for k, v in enumerate(verts)}
    out = [
        Facet(tuple(Fraction(x) for x in n), Fraction(off, den), tuple(sorted(pos[i] for i in inc)))
        for n, off, inc in facets
    ]
    out.sort(key=lambda f: (f.incident, f.normal))
    return out


def extreme_points(points: Sequence[Sequence], prefilter: bool = True) -> VPolytope:
    """Vertices of conv(points), each one certified by an exact LP.

    With ``prefilter`` a floating hull proposes candidates; candidates are
    then accepted only after an exact LP shows they are not convex
    combinations of the other candidates, and every remaining point is
    checked to lie in the hull of the accepted set. Misses are fed back.
    """
    pts = _dedupe(points)
    if not pts:
        raise ValueError("extreme_points needs a nonempty point set")
    dim = len(pts[0])
    if len(pts) == 1:
        return VPolytope(dim, pts)
    index = {p: i for i, p in enumerate(pts)}
    if prefilter and dim in (2, 3) and len(pts) > dim + 1:
        fast = _integer_hull(pts)
        if fast is not None:
            verts, facets, den = fast
            return VPolytope(dim, [pts[i] for i in verts], facets=_lift_facets(facets, verts, den))
    cand: list[Point] = pts
    if prefilter and len(pts) > PREFILTER_THRESHOLD and dim >= 2:
        # prefilter in the affine hull, where qhull needs full dimension
        origin, basis = affine_basis(pts)
        if len(basis) >= 2:
            coords = [tuple(dot(b, sub(p, origin)) for b in basis) for p in pts]
            hull = _float_hull(coords)
            if hull is not None:
                cand = [pts[i] for i in sorted(set(hull.vertices.tolist()))]
    while True:
        accepted = _certify_candidates(cand)
        accepted_set = set(accepted)
        rest = [p for p in pts if p not in accepted_set]
        missed = _outside_points(rest, accepted, dim)
        if not missed:
            break
        cand = sorted(accepted_set | set(missed), key=index.__getitem__)
    accepted.sort(key=index.__getitem__)
    return VPolytope(dim, accepted)


def _outside_points(rest: list[Point], accepted: list[Point], dim: int) -> list[Point]:
    if not rest:
        return []
    facets = None
    if 1 <= dim <= 3 and len(accepted) > dim:
        try:
            facets = hull_facets(VPolytope(dim, accepted))
        except DegenerateError:
            facets = None
    if facets is None:
        return [p for p in rest if not membership(p, accepted).inside]
    # exact integer test of every facet inequality
    ints, den = _scaled_integer(rest)
    arr = np.array(ints, dtype=object)
    bad = np.zeros(len(rest), dtype=bool)
    for f in facets:
        nint = primitive(f.normal)
        scale = Fraction(nint[0], 1) / f.normal[0] if f.normal[0] else None
        if scale is None:
            k = next(i for i, x in enumerate(f.normal) if x)
            scale = Fraction(nint[k]) / f.normal[k]
        bound = f.offset * scale * den
        lhs = arr.dot(np.array(nint, dtype=object))
        bad |= np.array([x > bound for x in lhs], dtype=bool)
    return [p for p, b in zip(rest, bad) if b]


def _certify_candidates(cand: list[Point]) -> list[Point]:
    if len(cand) == 1:
        return list(cand)
    keep = []
    for i, p in enumerate(cand):
        others = cand[:i] + cand[i + 1:]
        if not membership(p, others).inside:
            keep.append(p)
    return keep


def is_extreme(p: Sequence, points: Sequence[Sequence]) -> Membership:
    """Membership of ``p`` in conv(points without p); ``inside`` means not extreme."""
    p = as_point(p)
    others = [q for q in _dedupe(points) if q != p]
    if not others:
        return Membership(False, normal=tuple(Fraction(0) for _ in p), offset=Fraction(-1))
    return membership(p, others)


# facets ---------------------------------------------------------------------


def _orient_plane(normal: Sequence[Fraction], offset: Fraction, verts: list[Point]):
    """Flip a plane through some vertices so all vertices satisfy ``<=``."""
    side = [dot(normal, v) - offset for v in verts]
    pos = any(s > 0 for s in side)
    neg = any(s < 0 for s in side)
    if pos and neg:
        return None
    if pos:
        return tuple(-x for x in normal), -offset
    return tuple(normal), offset


def _plane_through(pts: list[Point]) -> tuple[Point, Fraction] | None:
    base = pts[0]
    rows = [sub(p, base) for p in pts[1:]]
    if rank(rows) != len(base) - 1:
        return None
    normal = tuple(Fraction(x) for x in primitive(nullspace_vector(rows)))
    return normal, dot(normal, base)


def _normalise(normal: Point, offset: Fraction) -> tuple[tuple[int, ...], Fraction]:
    ints = primitive(list(normal) + [offset])
    return ints[:-1], Fraction(ints[-1])


def _facet_from_plane(normal, offset, verts) -> Facet:
    ints, off = _normalise(normal, offset)
    n = tuple(Fraction(x) for x in ints)
    inc = tuple(i for i, v in enumerate(verts) if dot(n, v) == off)
    return Facet(n, off, inc)


def _polygon_order(facet: Facet, verts: list[Point]) -> list[int]:
    """Incident vertices of a 3D facet in boundary (cyclic) order."""
    drop = max(range(3), key=lambda i: abs(facet.normal[i]))
    keep = [i for i in range(3) if i != drop]
    pts2 = {i: tuple(verts[i][k] for k in keep) for i in facet.incident}
    return _convex_polygon_cycle(pts2)


def _convex_polygon_cycle(pts2: dict[int, tuple[Fraction, Fraction]]) -> list[int]:
    # Andrew's monotone chain, exact, collinear points dropped
    items = sorted(pts2.items(), key=lambda kv: kv[1])
    if len(items) <= 2:
        return [k for k, _ in items]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for k, p in items:
        while len(lower) >= 2 and cross(lower[-2][1], lower[-1][1], p) <= 0:
            lower.pop()
        lower.append((k, p))
    upper: list = []
    for k, p in reversed(items):
        while len(upper) >= 2 and cross(upper[-2][1], upper[-1][1], p) <= 0:
            upper.pop()
        upper.append((k, p))
    return [k for k, _ in lower[:-1] + upper[:-1]]


def _closed_surface(facets: list[Facet], verts: list[Point], dim: int, restrict: set[int] | None = None) -> bool:
    if dim == 1:
        return len(facets) == 2
    if dim == 2:
        counts = Counter(i for f in facets for i in f.incident)
        nverts = len(restrict) if restrict is not None else len(verts)
        return all(len(f.incident) == 2 for f in facets) and all(c == 2 for c in counts.values()) and len(counts) == nverts
    edges: Counter = Counter()
    for f in facets:
        cyc = _polygon_order(f, verts)
        if len(cyc) != len(f.incident):
            return False
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            edges[frozenset((a, b))] += 1
    return all(c == 2 for c in edges.values())


def _brute_facets(verts: list[Point], dim: int) -> list[Facet]:
    planes = {}
    for combo in combinations(range(len(verts)), dim):
        plane = _plane_through([verts[i] for i in combo])
        if plane is None:
            continue
        oriented = _orient_plane(plane[0], plane[1], verts)
        if oriented is None:
            continue
        key = _normalise(*oriented)
        if key not in planes:
            planes[key] = _facet_from_plane(oriented[0], oriented[1], verts)
    return list(planes.values())


def hull_facets(poly: VPolytope) -> list[Facet]:
    """Complete irredundant facet list with exact normals (dim <= 3).

    Raises ``DegenerateError`` carrying an affine hull basis when the
    vertices do not span their ambient space.
    """
    dim, verts = poly.dim, poly.vertices
    if dim > 3:
        raise ValueError("exact facet enumeration is limited to dimension <= 3")
    origin, basis = affine_basis(verts)
    if len(basis) < dim:
        raise DegenerateError(
            f"vertices span a {len(basis)}-dimensional affine subspace of R^{dim}", origin, basis
        )
    if dim == 1:
        lo, hi = min(verts), max(verts)
        facets = [
            Facet((Fraction(-1),), -lo[0], (verts.index(lo),)),
            Facet((Fraction(1),), hi[0], (verts.index(hi),)),
        ]
        poly.facets = facets
        return facets
    facets = None
    fast = _integer_hull(verts)
    if fast is not None and len(fast[0]) == len(verts):
        facets = _lift_facets(fast[1], fast[0], fast[2])
    hull = _float_hull(verts) if facets is None and len(verts) > dim + 1 else None
    if hull is not None:
        planes = {}
        ok = True
        for simplex in hull.simplices:
            plane = _plane_through([verts[i] for i in simplex])
            if plane is None:
                ok = False
                break
            oriented = _orient_plane(plane[0], plane[1], verts)
            if oriented is None:
                ok = False
                break
            key = _normalise(*oriented)
            if key not in planes:
                planes[key] = _facet_from_plane(oriented[0], oriented[1], verts)
        if ok:
            facets = list(planes.values())
            if not _closed_surface(facets, verts, dim):
                facets = None
    if facets is None:
        facets = _brute_facets(verts, dim)
        if not _closed_surface(facets, verts, dim):
            raise InconsistencyError("facet list does not close up")
    if fast is not None and len(fast[0]) == len(verts):
        # already verified in integer arithmetic
        poly.facets = facets
        return facets
    for f in facets:
        if any(dot(f.normal, v) > f.offset for v in verts) or rank([sub(verts[i], verts[f.incident[0]]) for i in f.incident]) != dim - 1:
            raise InconsistencyError("invalid facet produced")
    per_vertex = Counter(i for f in facets for i in f.incident)
    if any(per_vertex[i] < dim for i in range(len(verts))):
        raise InconsistencyError("some vertex lies on fewer than dim facets")
    facets.sort(key=lambda f: (f.incident, f.normal))
    poly.facets = facets
    return facets


def inside_by_facets(p: Sequence, facets: Sequence[Facet]) -> bool:
    p = as_point(p)
    return all(dot(f.normal, p) <= f.offset for f in facets)


def facet_cycles(poly: VPolytope) -> list[list[int]]:
    """Vertex cycles of each facet (3D) for mesh export."""
    facets = poly.facets if poly.facets is not None else hull_facets(poly)
    if poly.dim != 3:
        return [list(f.incident) for f in facets]
    cycles = []
    for f in facets:
        cyc = _polygon_order(f, poly.vertices)
        # orient counter-clockwise seen from outside
        a, b, c = (poly.vertices[i] for i in cyc[:3])
        u, v = sub(b, a), sub(c, a)
        cr = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
        if dot(cr, f.normal) < 0:
            cyc = cyc[::-1]
        cycles.append(cyc)
    return cycles
