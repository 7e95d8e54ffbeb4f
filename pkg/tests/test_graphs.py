"""Graph representation, graph6, counting and the two counting identities."""

import itertools
import random
from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from subgraph_polytopes.exceptions import CapacityError, PatternParseError
from subgraph_polytopes.graphs import (
    DENSITY,
    LATTICE,
    Graph,
    GraphVector,
    automorphism_count,
    complete_bipartite,
    complete_graph,
    complete_minus_edge,
    count_in_complete,
    count_subgraphs,
    cycle_graph,
    density,
    empty_graph,
    enumerate_labeled_graphs,
    from_graph6,
    is_isomorphic,
    pad_to_order,
    parse_pattern,
    parse_pattern_list,
    path_graph,
    stat_vector,
    turan_graph,
)


# brute-force oracles ----------------------------------------------------------


def brute_aut(f: Graph) -> int:
    edges = {frozenset(e) for e in f.edges()}
    return sum(
        1
        for perm in itertools.permutations(range(f.n))
        if {frozenset((perm[i], perm[j])) for i, j in edges} == edges
    )


def brute_copies(f: Graph, g: Graph) -> int:
    """Edge subsets of g that, with their endpoints and the needed isolated
    vertices, form a copy of f. Patterns here have no isolated vertices."""
    fe = f.num_edges
    count = 0
    for sub in itertools.combinations(g.edges(), fe):
        verts = sorted({v for e in sub for v in e})
        if len(verts) != f.n:
            continue
        idx = {v: k for k, v in enumerate(verts)}
        h = Graph.from_edges(f.n, [(idx[a], idx[b]) for a, b in sub])
        if is_isomorphic(h, f):
            count += 1
    return count


def random_graph(rng: random.Random, n: int, p: float = 0.5) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


graphs_st = st.integers(1, 7).flatmap(
    lambda n: st.integers(0, 2 ** (n * (n - 1) // 2) - 1).map(lambda m: Graph.from_edge_mask(n, m))
)


def patterns_upto(order: int, isolated: bool = False):
    """All unlabeled graphs with at least one edge on 2..order vertices."""
    seen = []
    for n in range(2, order + 1):
        for g in enumerate_labeled_graphs(n):
            if g.num_edges == 0 or (not isolated and g.isolated_vertices()):
                continue
            if not any(h.n == g.n and is_isomorphic(h, g) for h in seen):
                seen.append(g)
    return seen


# construction and parsing ------------------------------------------------------


def test_graph_rejects_asymmetric_and_loops():
    with pytest.raises(ValueError):
        Graph(2, (0b10, 0))
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 0)])
    with pytest.raises(CapacityError):
        Graph.from_edges(11, [])


@pytest.mark.parametrize(
    "text, n, m",
    [("K4", 4, 6), ("C5", 5, 5), ("P3", 3, 2), ("K4-e", 4, 5), ("K2,3", 5, 6), ("E3", 3, 0)],
)
def test_parse_shorthands(text, n, m):
    g = parse_pattern(text)
    assert (g.n, g.num_edges) == (n, m)


def test_parse_list_merges_bipartite_token():
    gs = parse_pattern_list("K3,K2,3,C4")
    assert [g.label() for g in gs] == ["K3", "K2,3", "C4"]


def test_parse_error_position():
    with pytest.raises(PatternParseError) as exc:
        parse_pattern_list("K3,Q4")
    assert exc.value.position == 3


def test_graph6_known_strings():
    # K3 and C4 in graph6 (checked against the format definition by hand)
    assert complete_graph(3).to_graph6() == "Bw"
    assert from_graph6("Bw") == complete_graph(3)
    assert empty_graph(1).to_graph6() == "@"


@given(graphs_st)
def test_graph6_round_trip(g):
    assert from_graph6(g.to_graph6()) == g


def test_graph_vector_validation():
    with pytest.raises(ValueError):
        GraphVector((complete_graph(3), cycle_graph(3)))  # isomorphic
    with pytest.raises(ValueError):
        GraphVector((empty_graph(3),))
    with pytest.raises(ValueError):
        GraphVector((complete_graph(2).add_isolated(1),))
    fs = GraphVector((complete_graph(2).add_isolated(1), complete_graph(3)), allow_isolated=True)
    assert fs.edge_counts == (1, 3)
    padded = pad_to_order(GraphVector.parse("P3,K4"))
    assert padded.orders == (4, 4)


# enumeration --------------------------------------------------------------------


@pytest.mark.parametrize("n, count", [(1, 1), (3, 8), (4, 64), (6, 32768)])
def test_enumeration_counts(n, count):
    graphs = list(enumerate_labeled_graphs(n))
    assert len(graphs) == count
    assert len({g.edge_mask for g in graphs}) == count


def test_enumeration_capacity():
    with pytest.raises(CapacityError):
        next(enumerate_labeled_graphs(8))


# automorphisms and counts ------------------------------------------------------------


@pytest.mark.parametrize(
    "g, aut",
    [(complete_graph(3), 6), (complete_minus_edge(4), 4), (cycle_graph(4), 8), (path_graph(3), 2), (complete_bipartite(2, 3), 12)],
)
def test_automorphism_counts(g, aut):
    assert automorphism_count(g) == aut == brute_aut(g)


@pytest.mark.parametrize(
    "f, g, count",
    [
        (complete_graph(3), complete_graph(6), 20),
        (cycle_graph(4), complete_graph(6), 45),
        (complete_minus_edge(4), complete_graph(6), 90),
        (complete_graph(3), empty_graph(5), 0),
        (complete_graph(3), turan_graph(3, 6), 8),
        (complete_graph(4), complete_graph(3), 0),
    ],
)
def test_count_subgraphs_examples(f, g, count):
    assert count_subgraphs(f, g) == count


def test_count_against_edge_subset_oracle():
    rng = random.Random(11)
    pats = patterns_upto(4)
    for _ in range(25):
        g = random_graph(rng, rng.randint(3, 6))
        for f in pats:
            assert count_subgraphs(f, g) == brute_copies(f, g)


def test_count_in_complete_formula():
    for f in patterns_upto(5, isolated=True):
        for m in range(1, 9):
            expected = factorial(f.n) // automorphism_count(f) * comb(m, f.n)
            assert count_subgraphs(f, complete_graph(m)) == expected == count_in_complete(f, m)


@pytest.mark.parametrize(
    "f, g, value",
    [
        (complete_graph(3), complete_graph(6), Fraction(1)),
        (complete_graph(3), complete_graph(2), Fraction(0)),
        (complete_graph(2), cycle_graph(5), Fraction(1, 2)),
    ],
)
def test_density_examples(f, g, value):
    assert density(f, g) == value


def test_stat_vector_examples():
    fs = GraphVector.parse("P3,K3")
    assert stat_vector(fs, complete_graph(3), LATTICE).values == (3, 1)
    assert stat_vector(fs, empty_graph(3), LATTICE).values == (0, 0)
    fs3 = GraphVector.parse("K3,C4,K4-e")
    assert stat_vector(fs3, complete_graph(6), DENSITY).values == (1, 1, 1)


def test_turan_examples():
    assert is_isomorphic(turan_graph(2, 4), cycle_graph(4))
    assert turan_graph(5, 5) == complete_graph(5)


# the two counting lemmas -------------------------------------------------------------


def test_lattice_density_rescaling_identity():
    """t^L(F,G) = (|F|!/|Aut F|) C(|G|,|F|) t(F,G) on random hosts (500 of them)."""
    rng = random.Random(5)
    pats = patterns_upto(4, isolated=True)
    for _ in range(500):
        g = random_graph(rng, rng.randint(1, 7), rng.random())
        for f in pats:
            if f.n > g.n:
                continue
            lhs = Fraction(count_subgraphs(f, g))
            rhs = Fraction(factorial(f.n), automorphism_count(f)) * comb(g.n, f.n) * density(f, g)
            assert lhs == rhs


def test_averaging_identity():
    """C(|G|-|F|, n-|F|) t^L(F,G) = sum over n-subsets U of t^L(F, G[U])."""
    rng = random.Random(6)
    pats = patterns_upto(4, isolated=True)
    for _ in range(500):
        g = random_graph(rng, rng.randint(2, 7), rng.random())
        f = rng.choice([p for p in pats if p.n <= g.n])
        n = rng.randint(f.n, g.n)
        lhs = comb(g.n - f.n, n - f.n) * count_subgraphs(f, g)
        rhs = sum(count_subgraphs(f, g.induced(u)) for u in itertools.combinations(range(g.n), n))
        assert lhs == rhs


@given(graphs_st, st.randoms(use_true_random=False))
def test_density_relabeling_invariance(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    h = g.relabel(perm)
    fs = GraphVector.parse("K2,P3,K3")
    assert stat_vector(fs, g).values == stat_vector(fs, h).values


@given(graphs_st)
def test_density_in_unit_interval(g):
    for f in (complete_graph(2), path_graph(3), complete_graph(3), cycle_graph(4)):
        assert 0 <= density(f, g) <= 1
