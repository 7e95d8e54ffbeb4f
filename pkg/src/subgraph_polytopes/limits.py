"""Finite approximations of the limit object P_{F;inf} for clique vectors.

Tail points ``s_i(1/k) = prod_{j<e_i} (1 - j/k)`` are the clique densities
of balanced complete k-partite graphons. The conjectured limit body for
``F = (K_{e_1}, ..., K_{e_m})`` is the hull of the all-ones point and all
tail points. Nothing here assumes that; the harnesses classify what they
see as ``consistent``, ``inconclusive`` or ``candidate counterexample``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Sequence

from .exceptions import DegenerateError, HypothesisError
from .geometry.hull import VPolytope, extreme_points, hull_facets, membership
from .geometry.linalg import affine_rank, format_rational
from .geometry.volume import bounding_box, exact_volume, hull_oracle, monte_carlo_volume
from .graphs import MAX_ENUMERATION_ORDER, Graph, GraphVector, complete_graph, stat_vector, turan_graph
from .polytope import SubgraphPolytope, build_polytope, report
from .spine import curve_polytope, gale_facets
from .zonotope import zonotope_sample

CONSISTENT = "consistent"
INCONCLUSIVE = "inconclusive"
CANDIDATE = "candidate counterexample (requires asymptotic analysis)"


@dataclass(frozen=True)
class TailSpec:
    """Clique orders ``e_1 < ... < e_m`` (orders, not edge counts)."""

    orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(e) for e in self.orders)
        if not orders:
            raise ValueError("tail spec needs at least one order")
        if any(e < 2 for e in orders):
            raise ValueError("clique orders must be at least 2")
        if any(a >= b for a, b in zip(orders, orders[1:])):
            raise ValueError("clique orders must be strictly increasing")
        object.__setattr__(self, "orders", orders)

    @classmethod
    def parse(cls, text: str) -> TailSpec:
        return cls(tuple(int(t) for t in text.replace(" ", "").split(",") if t))

    @classmethod
    def of(cls, fs: GraphVector) -> TailSpec:
        """The spec of a vector of complete graphs."""
        for f in fs:
            if f.num_edges != f.n * (f.n - 1) // 2:
                raise HypothesisError(f"{f.label()} is not a complete graph")
        return cls(fs.orders)

    @property
    def dim(self) -> int:
        return len(self.orders)

    def vector(self) -> GraphVector:
        return GraphVector(tuple(complete_graph(e) for e in self.orders))

    def __str__(self):
        return ",".join(map(str, self.orders))


def tail_point(spec: TailSpec, x) -> tuple[Fraction, ...]:
    """``s_i(x) = prod_{j=1}^{e_i - 1} (1 - j x)``; negative entries are returned as they are."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError("tail parameter must lie in [0, 1]")
    return tuple(prod((1 - j * x for j in range(1, e)), start=Fraction(1)) for e in spec.orders)


def tail_points(spec: TailSpec, K: int) -> list[tuple[Fraction, ...]]:
    return [tail_point(spec, Fraction(1, k)) for k in range(1, K + 1)]


def razborov_points(K: int) -> list[tuple[Fraction, Fraction]]:
    if K < 2:
        raise ValueError("K must be at least 2")
    pts = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(1))]
    pts += [(1 - Fraction(1, k), Fraction((k - 1) * (k - 2), k * k)) for k in range(2, K + 1)]
    return pts


def razborov_polygon(K: int) -> VPolytope:
    """Hull of the origin, the all-ones point and the Turan points for k = 2..K."""
    return extreme_points(razborov_points(K))


def inner_body(spec: TailSpec, K: int) -> VPolytope:
    """conv({1} and tail points at x = 1/k, k = 1..K)."""
    ones = tuple(Fraction(1) for _ in spec.orders)
    return extreme_points([ones] + tail_points(spec, K))


def _volume(poly: VPolytope, seed: int = 0, samples: int = 200_000) -> dict:
    if poly.dim <= 3:
        vol, degenerate = exact_volume(poly, with_flag=True)
        return {"volume": format_rational(vol), "volume_estimate": float(vol), "degenerate": degenerate, "value": vol}
    if affine_rank(poly.vertices) < poly.dim:
        return {"volume": "0/1", "volume_estimate": 0.0, "degenerate": True, "value": Fraction(0)}
    est = monte_carlo_volume(hull_oracle(poly), bounding_box(poly), samples, seed)
    return {"volume_estimate": est.estimate, "volume_stderr": est.stderr, "degenerate": False, "value": est.estimate}


def _sqdist(a: Sequence, b: Sequence) -> Fraction:
    return sum(((Fraction(x) - Fraction(y)) ** 2 for x, y in zip(a, b)), Fraction(0))


def turan_distances(spec: TailSpec, k: int, ns: Sequence[int]) -> list[Fraction]:
    """Squared distance from the Turan graph T(k, n) statistics to the tail point at 1/k.

    For ``k >= n`` the Turan graph is the complete graph K_n.
    """
    fs = spec.vector()
    target = tail_point(spec, Fraction(1, k))
    return [_sqdist(stat_vector(fs, turan_graph(min(k, n), n)).values, target) for n in ns]


def check_limit_inclusions(fs: GraphVector, n_max: int = MAX_ENUMERATION_ORDER, K: int = 10) -> dict:
    """Finite polytopes against known points of the limit object.

    (a) the Razborov polygon for K parts lies in every P_{(K2,K3);n};
    (b) tail points at 1/k (k <= K) and the all-ones point lie in P_{F;n};
    (c) squared distances from Turan statistics to the tail points do not
        increase with the host size.
    """
    spec = TailSpec.of(fs)
    if not spec.orders[-1] <= n_max <= MAX_ENUMERATION_ORDER:
        raise HypothesisError("need max|F_i| <= n_max <= 7")
    instances, certs = [], []
    edge_triangle = GraphVector.parse("K2,K3")
    razb = razborov_polygon(K).vertices
    for n in range(3, n_max + 1):
        poly = build_polytope(edge_triangle, n)
        bad = [v for v in razb if not membership(v, poly.hull).inside]
        instances.append({"part": "razborov", "vector": "K2,K3", "n": n, "K": K, "points": len(razb), "outside": len(bad), "ok": not bad})
        certs += [{"part": "razborov", "n": n, "point": [format_rational(x) for x in v]} for v in bad]
    ones = tuple(Fraction(1) for _ in spec.orders)
    pts = [ones] + tail_points(spec, K)
    for n in range(spec.orders[-1], n_max + 1):
        poly = build_polytope(fs, n)
        bad = []
        for p in pts:
            m = membership(p, poly.hull)
            if not m.inside:
                bad.append(p)
                certs.append(
                    {
                        "part": "tail",
                        "n": n,
                        "point": [format_rational(x) for x in p],
                        "normal": [format_rational(x) for x in m.normal],
                        "offset": format_rational(m.offset),
                    }
                )
        instances.append({"part": "tail", "vector": str(fs), "n": n, "K": K, "points": len(pts), "outside": len(bad), "ok": not bad})
    ns = list(range(spec.orders[-1], n_max + 1))
    for k in range(2, K + 1):
        dists = turan_distances(spec, k, ns)
        monotone = all(b <= a for a, b in zip(dists, dists[1:]))
        instances.append(
            {
                "part": "turan",
                "vector": str(fs),
                "k": k,
                "hosts": ns,
                "squared_distances": [format_rational(d) for d in dists],
                "ok": monotone,
            }
        )
    return report("known limit points lie in every finite polytope", instances, certs)


def check_tail_cyclic(spec: TailSpec, ks: Sequence[int]) -> dict:
    """Tail points at x = 1/k are in convex position with cyclic combinatorics.

    Points are ordered by k; Gale's condition is symmetric under reversing
    the order, so the direction of the parameter does not matter.
    """
    ks = sorted(set(int(k) for k in ks))
    if len(ks) < spec.dim + 1:
        raise ValueError("need at least m+1 values of k")
    if ks[0] < 1:
        raise ValueError("k must be positive")
    pts = [tail_point(spec, Fraction(1, k)) for k in ks]
    poly, facets = curve_polytope(pts, spec.dim)
    all_extreme = len(poly.vertices) == len(pts)
    inst = {"spec": str(spec), "ks": ks, "points": len(pts), "vertices": len(poly.vertices), "all_extreme": all_extreme}
    ok = all_extreme
    if facets is not None and spec.dim >= 2:
        predicted = gale_facets(len(pts), spec.dim)
        inst["hull_facets"] = sorted(list(f) for f in facets)
        inst["gale_facets"] = sorted(list(f) for f in predicted)
        inst["facets_match"] = facets == predicted
        ok = ok and facets == predicted
    inst["ok"] = ok
    return report("tail points span a cyclic polytope", [inst])


@dataclass
class LimitApproximation:
    fs: GraphVector
    outer: SubgraphPolytope
    inner: VPolytope
    metrics: dict = field(default_factory=dict)


def conjecture_gap(
    spec: TailSpec,
    host_n: int,
    K: int,
    samples: int = 0,
    seed: int = 0,
    kernel_sizes: Sequence[int] = (2, 3, 4),
    refine: Sequence[int] = (2, 4, 8),
) -> dict:
    """Inner body conv(1, tail points) against P_{F;host_n}, plus graphon samples.

    Zonotope points are statistics of actual graphons, so they lie in the
    limit object. A point outside the truncated inner body (k <= K) is
    re-tested against bodies with ``K * r`` tail points; it is
    ``consistent`` once some refinement contains it, ``inconclusive`` if
    its distance to the refined bodies keeps shrinking, and a
    ``candidate counterexample`` otherwise.
    """
    if not spec.orders[-1] <= host_n <= MAX_ENUMERATION_ORDER:
        raise HypothesisError("need max order <= host_n <= 7")
    if K < 1:
        raise ValueError("K must be positive")
    fs = spec.vector()
    outer = build_polytope(fs, host_n)
    inner = inner_body(spec, K)
    outside_outer = [v for v in inner.vertices if not membership(v, outer.hull).inside]
    inst = {
        "spec": str(spec),
        "host_n": host_n,
        "K": K,
        "inner_vertices": len(inner.vertices),
        "outer_vertices": len(outer.vertices),
        "inner_in_outer": not outside_outer,
    }
    if outside_outer:
        inst["ok"] = False
        inst["inner_outside_outer"] = [[format_rational(x) for x in v] for v in outside_outer]
        return report("inner body certified inside the outer polytope", [inst])
    vo = _volume(outer.hull, seed)
    vi = _volume(inner, seed)
    inst["outer_volume"] = {k: v for k, v in vo.items() if k != "value"}
    inst["inner_volume"] = {k: v for k, v in vi.items() if k != "value"}
    if fs.dim <= 3:
        inst["volume_gap"] = format_rational(vo["value"] - vi["value"])
    inst["volume_gap_estimate"] = float(vo["value"]) - float(vi["value"])
    if fs.dim <= 3:
        trend = []
        for n in range(spec.orders[-1], host_n + 1):
            v = _volume(build_polytope(fs, n).hull)["value"]
            trend.append({"n": n, "volume": format_rational(v), "volume_estimate": float(v)})
        inst["outer_volume_by_n"] = trend
    classes = {CONSISTENT: 0, INCONCLUSIVE: 0, CANDIDATE: 0}
    flagged = []
    if samples > 0:
        sizes = list(kernel_sizes)
        per = [samples // len(sizes) + (1 if i < samples % len(sizes) else 0) for i in range(len(sizes))]
        refined = [inner_body(spec, K * r) for r in refine]
        inside_count = 0
        for size, cnt in zip(sizes, per):
            if cnt == 0:
                continue
            sample = zonotope_sample(fs, size, cnt, seed + size)
            for kern, pt in zip(sample.kernels, sample.points):
                if membership(pt, inner).inside:
                    inside_count += 1
                    continue
                verdict, detail = _classify(pt, refined)
                classes[verdict] += 1
                flagged.append(
                    {
                        "kernel": kern.to_dict(),
                        "point": [format_rational(x) for x in pt],
                        "classification": verdict,
                        "violations": detail,
                    }
                )
        inst["samples_inside_inner"] = inside_count
        inst["samples_outside_inner"] = len(flagged)
    inst["classification_counts"] = classes
    inst["ok"] = classes[CANDIDATE] == 0
    return report("conv(1, tail points) against finite polytopes and graphon samples", [inst], flagged)


def _violation(pt, body: VPolytope) -> tuple[bool, Fraction | None]:
    """``(inside, worst normalised facet violation)``; the violation is None for flat bodies."""
    if membership(pt, body).inside:
        return True, None
    if body.facets is None:
        if affine_rank(body.vertices) < body.dim:
            return False, None
        hull_facets(body)
    worst = max(
        (sum((a * x for a, x in zip(f.normal, pt)), Fraction(0)) - f.offset) / sum(abs(a) for a in f.normal)
        for f in body.facets
    )
    return False, worst


def _classify(pt, refined: list[VPolytope]) -> tuple[str, list[str]]:
    viol = []
    for body in refined:
        inside, v = _violation(pt, body)
        if inside:
            return CONSISTENT, [format_rational(x) for x in viol]
        viol.append(v)
    if any(v is None for v in viol):
        return INCONCLUSIVE, []
    if all(b < a for a, b in zip(viol, viol[1:])):
        return INCONCLUSIVE, [format_rational(x) for x in viol]
    return CANDIDATE, [format_rational(x) for x in viol]


# chopping near the all-ones point (edge-triangle case) ----------------------------


def _clip(polygon: list[tuple[Fraction, Fraction]], normal, offset) -> list[tuple[Fraction, Fraction]]:
    """Sutherland-Hodgman clip of a convex polygon to ``normal . x <= offset``, exact."""
    out = []
    n = len(polygon)
    for i in range(n):
        a, b = polygon[i], polygon[(i + 1) % n]
        sa = normal[0] * a[0] + normal[1] * a[1] - offset
        sb = normal[0] * b[0] + normal[1] * b[1] - offset
        if sa <= 0:
            out.append(a)
        if (sa < 0 < sb) or (sb < 0 < sa):
            t = sa / (sa - sb)
            out.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
    return out


def _area(polygon) -> Fraction:
    s = Fraction(0)
    for (x1, y1), (x2, y2) in zip(polygon, polygon[1:] + polygon[:1]):
        s += x1 * y2 - x2 * y1
    return abs(s) / 2


def chop_analysis(depths: Sequence, K: int = 200) -> dict:
    """Area removed from the edge-triangle body by the chop ``x + y <= 2 - depth``.

    The body is the Razborov polygon with K parts, standing in for the
    limit object. Each row also reports how many vertices the chopped body
    keeps, which stays finite for every positive depth.
    """
    poly = razborov_polygon(K)
    from .geometry.hull import _convex_polygon_cycle

    cyc = _convex_polygon_cycle({i: v for i, v in enumerate(poly.vertices)})
    polygon = [poly.vertices[i] for i in cyc]
    total = _area(polygon)
    rows = []
    for depth in depths:
        depth = Fraction(depth)
        if not 0 < depth <= 2:
            raise ValueError("chop depth must lie in (0, 2]")
        clipped = _clip(polygon, (1, 1), 2 - depth)
        removed = total - _area(clipped) if clipped else total
        rows.append(
            {
                "depth": format_rational(depth),
                "removed_area": format_rational(removed),
                "removed_area_estimate": float(removed),
                "remaining_vertices": len(clipped),
            }
        )
    return {"body": f"razborov_polygon({K})", "area": format_rational(total), "rows": rows}


def nested_volumes(fs: GraphVector, n_max: int = MAX_ENUMERATION_ORDER) -> dict:
    """Vol(P_{F;n}) for n = max|F_i|..n_max, exact in dim <= 3; must not increase."""
    if fs.dim > 3:
        raise ValueError("nested volume check needs dimension <= 3")
    vols = []
    for n in range(max(fs.max_order, 2), n_max + 1):
        vols.append((n, exact_volume(build_polytope(fs, n).hull)))
    ok = all(b[1] <= a[1] for a, b in zip(vols, vols[1:]))
    inst = {
        "vector": str(fs),
        "volumes": [{"n": n, "volume": format_rational(v), "volume_estimate": float(v)} for n, v in vols],
        "ok": ok,
    }
    return report("Vol(P_{F;n}) is non-increasing in n", [inst])
