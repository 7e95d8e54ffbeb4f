"""Polytopes of subgraph statistics built by exhaustive enumeration.

Stat vectors of all ``2^C(n,2)`` labeled graphs are computed at once with
numpy: each copy of a pattern inside ``K_n`` is an edge mask, and a graph
contains that copy iff its own mask covers it.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

from .exceptions import CapacityError, HypothesisError
from .geometry.hull import VPolytope, extreme_points, hull_facets, membership
from .geometry.lattice import EhrhartPolynomial, fit_ehrhart
from .geometry.linalg import affine_rank, format_rational
from .graphs import (
    DENSITY,
    KINDS,
    LATTICE,
    MAX_ENUMERATION_ORDER,
    Graph,
    GraphVector,
    automorphism_count,
    count_in_complete,
    is_subgraph,
    pair_index,
    stat_vector,
    to_graph6,
)

MAX_WITNESSES = 8
THREADS = 1


def set_threads(n: int) -> None:
    """Cap the data-parallel width used for bulk counting."""
    global THREADS
    THREADS = max(1, int(n))


@lru_cache(maxsize=None)
def copy_masks(f: Graph, n: int) -> tuple[tuple[int, int], ...]:
    """Distinct copies of ``f`` in ``K_n`` as ``(edge_mask, multiplicity)``.

    A copy is a (vertex set, edge set) pair; copies that differ only in
    isolated vertices share an edge mask and add to its multiplicity.
    """
    bit = {p: k for k, p in enumerate(pair_index(n))}
    copies = set()
    f_edges = f.edges()
    for image in itertools.permutations(range(n), f.n):
        mask = 0
        for i, j in f_edges:
            a, b = image[i], image[j]
            mask |= 1 << bit[(a, b) if a < b else (b, a)]
        copies.add((frozenset(image), mask))
    mult: dict[int, int] = {}
    for _, mask in copies:
        mult[mask] = mult.get(mask, 0) + 1
    return tuple(sorted(mult.items()))


def _count_chunk(masks: np.ndarray, copies) -> np.ndarray:
    out = np.zeros(len(masks), dtype=np.int32)
    for mask, m in copies:
        hit = (masks & mask) == mask
        out += hit if m == 1 else m * hit
    return out


def lattice_table(fs: GraphVector, n: int) -> np.ndarray:
    """t^L(F_i, G) for every labeled graph G on n vertices, row = edge mask."""
    if not 1 <= n <= MAX_ENUMERATION_ORDER:
        raise CapacityError(f"exhaustive enumeration supports 1..{MAX_ENUMERATION_ORDER} vertices, got {n}")
    total = 1 << (n * (n - 1) // 2)
    masks = np.arange(total, dtype=np.int64)
    cols = []
    for f in fs:
        copies = copy_masks(f, n) if f.n <= n else ()
        if THREADS > 1 and total > 4096:
            chunks = np.array_split(masks, THREADS)
            with ThreadPoolExecutor(THREADS) as pool:
                parts = list(pool.map(lambda c: _count_chunk(c, copies), chunks))
            cols.append(np.concatenate(parts))
        else:
            cols.append(_count_chunk(masks, copies))
    return np.stack(cols, axis=1)


def lattice_scales(fs: GraphVector, n: int) -> tuple[int, ...]:
    """t^L(F_i, K_n), the factor between density and lattice coordinates."""
    return tuple(count_in_complete(f, n) for f in fs)


def _to_points(rows: np.ndarray, kind: str, scales) -> list[tuple[Fraction, ...]]:
    if kind == LATTICE:
        return [tuple(Fraction(int(x)) for x in r) for r in rows]
    return [
        tuple(Fraction(int(x), s) if s else Fraction(0) for x, s in zip(r, scales)) for r in rows
    ]


@dataclass
class SubgraphPolytope:
    fs: GraphVector
    n: int
    kind: str
    hull: VPolytope
    point_count_raw: int
    point_count_dedup: int
    points: list[tuple[Fraction, ...]] = field(default_factory=list, repr=False)

    @property
    def vertices(self):
        return self.hull.vertices

    @property
    def dim(self) -> int:
        return self.hull.dim

    def witnesses(self, i: int) -> list[str]:
        return self.hull.witnesses.get(i, [])

    def facets(self):
        if self.hull.facets is None:
            hull_facets(self.hull)
        return self.hull.facets

    def contains(self, p) -> bool:
        return membership(p, self.hull).inside

    def summary(self) -> dict:
        out = {
            "vector": str(self.fs),
            "n": self.n,
            "kind": self.kind,
            "dim": self.dim,
            "labeled_graphs": self.point_count_raw,
            "distinct_points": self.point_count_dedup,
            "vertices": len(self.vertices),
        }
        if self.hull.facets is not None:
            out["facets"] = len(self.hull.facets)
        return out


@lru_cache(maxsize=32)
def _lattice_core(fs: GraphVector, n: int):
    table = lattice_table(fs, n)
    uniq, inverse = np.unique(table, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    lattice_pts = _to_points(uniq, LATTICE, None)
    # the hull is computed once, on integer lattice coordinates
    hull_l = extreme_points(lattice_pts)
    pos = {p: i for i, p in enumerate(lattice_pts)}
    vertex_ids = [pos[v] for v in hull_l.vertices]
    witnesses = {}
    for k, u in enumerate(vertex_ids):
        idx = np.flatnonzero(inverse == u)[:MAX_WITNESSES]
        witnesses[k] = [to_graph6(Graph.from_edge_mask(n, int(m))) for m in idx]
    return uniq, vertex_ids, witnesses, len(table)


@lru_cache(maxsize=64)
def _build_cached(fs: GraphVector, n: int, kind: str) -> SubgraphPolytope:
    uniq, vertex_ids, witnesses, raw = _lattice_core(fs, n)
    points = _to_points(uniq, kind, lattice_scales(fs, n))
    hull = VPolytope(len(fs), [points[u] for u in vertex_ids], {k: list(w) for k, w in witnesses.items()})
    if hull.dim <= 3 and affine_rank(hull.vertices) == hull.dim:
        hull_facets(hull)
    return SubgraphPolytope(fs, n, kind, hull, int(raw), int(len(uniq)), points)


def build_polytope(fs: GraphVector, n: int, kind: str = DENSITY) -> SubgraphPolytope:
    """Exact P_{F;n} (density) or P^L_{F;n} (lattice) with vertex witnesses."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if n > MAX_ENUMERATION_ORDER:
        raise CapacityError(f"host size {n} exceeds the enumeration limit {MAX_ENUMERATION_ORDER}")
    if fs.max_order > n:
        raise HypothesisError(f"pattern order {fs.max_order} exceeds host size {n}")
    return _build_cached(fs, n, kind)


# checks ---------------------------------------------------------------------


def report(claim: str, instances: list[dict], certificates: list | None = None, status: str | None = None) -> dict:
    if status is None:
        status = "pass" if all(i.get("ok", False) for i in instances) else "fail"
    return {"claim": claim, "instances": instances, "status": status, "certificates": certificates or []}


def _cert(m, p) -> dict:
    return {
        "point": [format_rational(x) for x in p],
        "normal": [format_rational(x) for x in m.normal],
        "offset": format_rational(m.offset),
    }


def check_inclusion(fs: GraphVector, n_small: int, n_big: int) -> dict:
    """Every vertex of P_{F;n_big} lies in P_{F;n_small} (exact LP)."""
    if not fs.max_order <= n_small <= n_big <= MAX_ENUMERATION_ORDER:
        raise HypothesisError("need max|F_i| <= n_small <= n_big <= 7")
    small = build_polytope(fs, n_small)
    big = build_polytope(fs, n_big)
    failures = []
    for v in big.vertices:
        m = membership(v, small.hull)
        if not m.inside:
            failures.append(_cert(m, v))
    inst = {
        "vector": str(fs),
        "n_small": n_small,
        "n_big": n_big,
        "vertices_checked": len(big.vertices),
        "violations": len(failures),
        "ok": not failures,
    }
    return report("P_{F;n_big} is contained in P_{F;n_small}", [inst], failures)


def check_inclusion_chain(fs: GraphVector, n_max: int = MAX_ENUMERATION_ORDER) -> dict:
    instances, certs = [], []
    for n in range(fs.max_order, n_max):
        r = check_inclusion(fs, n, n + 1)
        instances += r["instances"]
        certs += r["certificates"]
    return report("P_{F;n+1} is contained in P_{F;n} along the chain", instances, certs)


def ehrhart(fs: GraphVector, n: int, dilation: int = 1) -> EhrhartPolynomial:
    """Ehrhart polynomial of ``dilation * P^L_{F;n}``."""
    return fit_ehrhart(build_polytope(fs, n, LATTICE).hull, dilation=dilation)


def _dil(a: int) -> str:
    return "k" if a == 1 else f"{a}k"


def check_ehrhart_scaling(fs: GraphVector, n: int, n_mid: int, n_big: int, ks=(1, 2, 3, 4)) -> dict:
    """E_{P^L;n_big}(C(n_mid,n) k) <= E_{P^L;n_mid}(C(n_big,n) k), plus the
    underlying scaled inclusion C(n_mid,n) P^L_{n_big} in C(n_big,n) P^L_{n_mid}."""
    if len(set(fs.orders)) != 1 or fs.orders[0] != n:
        raise HypothesisError("all patterns must have order n (see pad_to_order)")
    if not n <= n_mid <= n_big <= MAX_ENUMERATION_ORDER:
        raise HypothesisError("need n <= n_mid <= n_big <= 7")
    if fs.dim > 3:
        raise HypothesisError("Ehrhart comparison needs dimension <= 3")
    a, b = comb(n_mid, n), comb(n_big, n)
    left = ehrhart(fs, n_big, dilation=a)
    right = ehrhart(fs, n_mid, dilation=b)
    values = [{"k": k, "left": str(left(k)), "right": str(right(k)), "ok": left(k) <= right(k)} for k in ks]
    big = build_polytope(fs, n_big, LATTICE).hull.scaled(a)
    mid = build_polytope(fs, n_mid, LATTICE).hull.scaled(b)
    certs = []
    for v in big.vertices:
        m = membership(v, mid)
        if not m.inside:
            certs.append(_cert(m, v))
    inst = {
        "vector": str(fs),
        "n": n,
        "n_mid": n_mid,
        "n_big": n_big,
        "left": f"E_(P^L;{n_big})({_dil(a)}) = {left}",
        "right": f"E_(P^L;{n_mid})({_dil(b)}) = {right}",
        "left_coefficients": [str(c) for c in left.coefficients],
        "right_coefficients": [str(c) for c in right.coefficients],
        "coefficientwise_dominated": all(x <= y for x, y in zip(left.coefficients, right.coefficients)),
        "equal": left == right,
        "values": values,
        "scaled_inclusion_violations": len(certs),
        "ok": all(v["ok"] for v in values) and not certs,
    }
    return report("Ehrhart inequality for equal-order pattern vectors", [inst], certs)


def check_nonneg_facets(fs: GraphVector, n: int) -> dict:
    """Each inequality x_i >= 0 supports a facet of P_{F;n}.

    The facet is witnessed by d affinely independent vertices with zero
    i-th coordinate, including the origin and the points of the graphs
    F_j plus isolated vertices for j != i.
    """
    if fs.max_order > n:
        raise HypothesisError("every pattern must fit inside the host")
    for a, b in itertools.permutations(fs.patterns, 2):
        if is_subgraph(a, b):
            raise HypothesisError(f"{a.label()} is a subgraph of {b.label()}")
    poly = build_polytope(fs, n)
    d = fs.dim
    padded = [f.add_isolated(n - f.n) if f.n < n else f for f in fs]
    witness_pts = [stat_vector(fs, g).values for g in padded]
    vset = poly.hull.vertex_set()
    instances = []
    for i in range(d):
        zero_face = [v for v in poly.vertices if v[i] == 0]
        required = [tuple(Fraction(0) for _ in range(d))] + [witness_pts[j] for j in range(d) if j != i]
        req_ok = all(p in vset for p in required)
        rank_face = affine_rank(zero_face) if zero_face else -1
        simplex_rank = affine_rank(required)
        facet_listed = None
        if poly.hull.facets is not None:
            facet_listed = any(
                all(x == 0 for k, x in enumerate(f.normal) if k != i) and f.normal[i] < 0 and f.offset == 0
                for f in poly.hull.facets
            )
        on_face = all(p[i] == 0 for p in required)
        ok = rank_face == d - 1 and simplex_rank == d - 1 and on_face and facet_listed is not False
        instances.append(
            {
                "coordinate": i,
                "pattern": fs.patterns[i].label(),
                "vertices_on_face": len(zero_face),
                "face_dimension": rank_face,
                "witness_simplex_dimension": simplex_rank,
                "disjoint_union_witnesses_are_vertices": req_ok,
                "facet_in_exact_facet_list": facet_listed,
                "ok": ok,
            }
        )
    return report("x_i >= 0 is facet defining", instances)


def rescale_density_to_lattice(fs: GraphVector, n: int, point) -> tuple[Fraction, ...]:
    """x_i -> (|F_i|!/|Aut F_i|) C(n,|F_i|) x_i."""
    return tuple(
        Fraction(factorial(f.n), automorphism_count(f)) * comb(n, f.n) * Fraction(x) for f, x in zip(fs, point)
    )
