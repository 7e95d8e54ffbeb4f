"""Finite approximations of the limit object, tails and the conjecture harnesses."""

from fractions import Fraction
from math import prod

import pytest
from hypothesis import given
from hypothesis import strategies as st

from subgraph_polytopes.exceptions import HypothesisError
from subgraph_polytopes.geometry.hull import is_extreme, membership
from subgraph_polytopes.geometry.linalg import parse_rational
from subgraph_polytopes.graphs import GraphVector, complete_graph, density, turan_graph
from subgraph_polytopes.limits import (
    CANDIDATE,
    CONSISTENT,
    INCONCLUSIVE,
    TailSpec,
    _classify,
    chop_analysis,
    check_limit_inclusions,
    check_tail_cyclic,
    conjecture_gap,
    inner_body,
    nested_volumes,
    razborov_points,
    razborov_polygon,
    tail_point,
    tail_points,
    turan_distances,
)

F = Fraction


def test_tail_spec_validation():
    assert TailSpec.parse("2, 3,4").orders == (2, 3, 4)
    for bad in ((), (1, 2), (3, 3), (4, 3)):
        with pytest.raises(ValueError):
            TailSpec(bad)
    assert TailSpec.of(GraphVector.parse("K3,K4")).orders == (3, 4)
    with pytest.raises(HypothesisError):
        TailSpec.of(GraphVector.parse("K3,C4"))


def test_tail_point_examples():
    s = TailSpec((2, 3))
    assert tail_point(s, F(1, 2)) == (F(1, 2), 0)
    for k in range(1, 12):
        assert tail_point(s, F(1, k)) == (1 - F(1, k), F((k - 1) * (k - 2), k * k))
    assert tail_point(TailSpec((2, 5, 7)), 0) == (1, 1, 1)
    assert tail_point(TailSpec((4,)), F(1, 2)) == ((1 - F(1, 2)) * 0 * (1 - F(3, 2)),)
    assert tail_point(TailSpec((4,)), F(1)) == (0,)
    assert tail_point(TailSpec((5,)), F(1, 3))[0] == 0
    assert tail_point(TailSpec((4,)), F(2, 5))[0] < 0
    with pytest.raises(ValueError):
        tail_point(s, F(3, 2))


def falling(x, m):
    return prod(range(x - m + 1, x + 1))


@given(st.integers(2, 5), st.integers(2, 5))
def test_balanced_turan_densities_decrease_to_tail(m, k):
    # in T(k, kt) the K_m density is k_(m) t^m / (kt)_(m), never below the tail value
    limit = tail_point(TailSpec((m,)), F(1, k))[0]
    prev = None
    for t in range(1, 10 // k + 1):
        n = k * t
        if n < m:
            continue
        d = density(complete_graph(m), turan_graph(k, n))
        assert d == F(falling(k, m) * t**m, falling(n, m))
        assert d >= limit
        if prev is not None:
            assert d <= prev
        prev = d


def test_bipartite_turan_graphs_are_triangle_free():
    for n in range(3, 8):
        assert density(complete_graph(3), turan_graph(2, n)) == 0


def test_razborov_polygon_examples():
    assert set(razborov_polygon(2).vertices) == {(0, 0), (1, 1), (F(1, 2), 0)}
    assert (F(2, 3), F(2, 9)) in razborov_polygon(3).vertices
    pts = razborov_points(10)
    assert len(razborov_polygon(10).vertices) == len(pts) == 11
    for p in pts:
        assert not is_extreme(p, [q for q in pts if q != p]).inside
    with pytest.raises(ValueError):
        razborov_points(1)


def test_razborov_polygons_are_nested():
    for K in range(2, 10):
        big = razborov_polygon(K + 1)
        assert all(membership(v, big).inside for v in razborov_polygon(K).vertices)


def test_razborov_points_match_tail_points():
    spec = TailSpec((2, 3))
    assert set(razborov_points(9)[2:]) == set(tail_points(spec, 9)[1:])


def test_limit_inclusions_edge_triangle():
    r = check_limit_inclusions(GraphVector.parse("K2,K3"), 7, K=10)
    assert r["status"] == "pass"
    assert {i["part"] for i in r["instances"]} == {"razborov", "tail", "turan"}


def test_limit_inclusions_triangle_k4():
    r = check_limit_inclusions(GraphVector.parse("K3,K4"), 7, K=7)
    assert r["status"] == "pass"


def test_turan_distances_shrink():
    d = turan_distances(TailSpec((2, 3)), 2, range(3, 8))
    assert all(b <= a for a, b in zip(d, d[1:]))
    assert d[-1] < d[0]


@pytest.mark.parametrize(
    "orders,ks,vertices",
    [((2, 3), range(1, 7), 6), ((2, 3, 4), range(1, 8), 7), ((2, 3), range(1, 4), 3)],
)
def test_tail_cyclic(orders, ks, vertices):
    r = check_tail_cyclic(TailSpec(orders), ks)
    inst = r["instances"][0]
    assert r["status"] == "pass" and inst["vertices"] == vertices
    if len(orders) == 3:
        assert inst["facets_match"] and len(inst["hull_facets"]) == 10


def test_tail_cyclic_needs_enough_points():
    with pytest.raises(ValueError):
        check_tail_cyclic(TailSpec((2, 3, 4)), [1, 2, 3])


def test_conjecture_gap_examples():
    r = conjecture_gap(TailSpec((2, 3)), 7, 7)
    inst = r["instances"][0]
    assert inst["inner_in_outer"] and r["status"] == "pass"
    assert "samples_outside_inner" not in inst
    gap = parse_rational(inst["volume_gap"])
    assert gap > 0
    vols = [parse_rational(row["volume"]) for row in inst["outer_volume_by_n"]]
    assert vols == sorted(vols, reverse=True)


def test_conjecture_gap_degenerate_inner_body():
    r = conjecture_gap(TailSpec((2, 3)), 5, 1)
    inst = r["instances"][0]
    assert inst["inner_vertices"] == 2 and inst["inner_volume"]["degenerate"]
    assert inst["inner_volume"]["volume"] == "0/1"


def test_conjecture_gap_with_samples_never_claims_refutation():
    r = conjecture_gap(TailSpec((2, 3)), 6, 6, samples=60, seed=1)
    inst = r["instances"][0]
    assert inst["samples_inside_inner"] + inst["samples_outside_inner"] == 60 + 2 * 3
    counts = inst["classification_counts"]
    assert set(counts) == {CONSISTENT, INCONCLUSIVE, CANDIDATE}
    assert sum(counts.values()) == inst["samples_outside_inner"]
    for f in r["certificates"]:
        assert f["classification"] in counts


def test_classification_rules():
    spec = TailSpec((2, 3))
    refined = [inner_body(spec, K) for K in (2, 4, 8)]
    # on a tail point beyond the coarse body, but inside finer bodies
    assert _classify(tail_point(spec, F(1, 4)), refined)[0] == CONSISTENT
    # far outside every body: violation does not shrink
    assert _classify((F(1, 4), F(1, 2)), refined)[0] == CANDIDATE


def test_conjecture_gap_rejects_large_host():
    with pytest.raises(HypothesisError):
        conjecture_gap(TailSpec((2, 3)), 8, 5)


def test_chop_analysis_monotone():
    res = chop_analysis([F(1, 100), F(1, 10), F(1, 2), 1], K=50)
    removed = [parse_rational(r["removed_area"]) for r in res["rows"]]
    assert removed == sorted(removed) and removed[0] > 0
    # the chop x + y <= 2 - 1/100 only cuts a triangle near (1, 1)
    assert res["rows"][0]["remaining_vertices"] >= 3
    with pytest.raises(ValueError):
        chop_analysis([0])


def test_nested_volumes_report():
    r = nested_volumes(GraphVector.parse("K2,K3"))
    assert r["status"] == "pass"
    assert [v["volume"] for v in r["instances"][0]["volumes"]] == ["1/3", "1/3", "8/25", "8/25", "229/735"]
    with pytest.raises(ValueError):
        nested_volumes(GraphVector.parse("K2,P3,K3,C4"))
