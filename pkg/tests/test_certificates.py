"""Polynomial nonnegativity certificates from density polytopes."""

import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from subgraph_polytopes.certificates import (
    CERTIFIED,
    INCONCLUSIVE,
    REFUTED,
    PolynomialParseError,
    SparsePolynomial,
    certifier_strength,
    certify_nonneg,
    coefficient_vector,
    dual_polynomial,
    facet_dual,
    parse_polynomial,
    sample_check,
)
from subgraph_polytopes.exceptions import DegenerateError
from subgraph_polytopes.geometry.hull import Facet
from subgraph_polytopes.graphs import LATTICE, GraphVector
from subgraph_polytopes.polytope import build_polytope
from subgraph_polytopes.spine import SpineSpec, spine_point

F = Fraction
TRIPLE = GraphVector.parse("K3,C4,K4-e")
FACET_Q = "1 - 16/3 x^3 + 11/2 x^4 - 1/2 x^5"
KNOWN_FACET = {(F(8, 20), F(10, 45), F(16, 90)), (F(10, 20), F(15, 45), F(30, 90)), (F(5, 20), F(3, 45), F(6, 90))}


@pytest.fixture(scope="module")
def p6():
    return build_polytope(TRIPLE, 6)


# parsing ----------------------------------------------------------------------------


def test_parse_examples():
    q = parse_polynomial(FACET_Q)
    assert q.terms == ((3, F(-16, 3)), (4, F(11, 2)), (5, F(-1, 2)))
    assert str(q) == "1 - 16/3 x^3 + 11/2 x^4 - 1/2 x^5"
    assert parse_polynomial(str(q)) == q
    assert parse_polynomial("1").terms == ()
    assert parse_polynomial("x - 2*x + 1 + 0.5x^2").terms == ((1, F(-1)), (2, F(1, 2)))
    assert parse_polynomial("2 - 1 + x^3 - x^3").terms == ()


@pytest.mark.parametrize(
    "text,pos",
    [("1 + x^", 6), ("1 + y", 4), ("", 0), ("2 + x", 0), ("1 2", 2), ("1 + 3 *", 7), ("1 + x^-2", 6)],
)
def test_parse_errors_point_at_the_problem(text, pos):
    with pytest.raises(PolynomialParseError) as exc:
        parse_polynomial(text)
    assert exc.value.position == pos


def test_polynomial_type_invariants():
    with pytest.raises(ValueError):
        SparsePolynomial(((0, 1),))
    with pytest.raises(ValueError):
        SparsePolynomial(((2, 1), (2, 3)))
    q = SparsePolynomial(((5, 1), (3, -2)))
    assert q.exponents == (3, 5) and q(1) == 0 and q(0) == 1


def test_coefficient_alignment():
    q = parse_polynomial("1 - x^5 + 2x^3")
    assert coefficient_vector(q, (3, 4, 5)) == (2, 0, -1)
    with pytest.raises(ValueError):
        coefficient_vector(q, (3, 4))
    with pytest.raises(ValueError):
        coefficient_vector(parse_polynomial("1 - x^2"), (2, 2))


# sample check ---------------------------------------------------------------------------


def test_sample_check_examples():
    assert sample_check(parse_polynomial(FACET_Q), 10_000).minimum >= 0
    r = sample_check(parse_polynomial("1 - 2x"), 10)
    assert (r.minimum, r.argmin) == (-1, 1)
    r = sample_check(parse_polynomial("1 + x^3"), 10)
    assert (r.minimum, r.argmin) == (1, 0)
    with pytest.raises(ValueError):
        sample_check(parse_polynomial("1"), 1)


# certification -----------------------------------------------------------------------------


def test_running_example_certificate(p6):
    cert = certify_nonneg(parse_polynomial(FACET_Q), p6)
    assert cert.status == CERTIFIED and cert.certified
    assert cert.min_inner_product == -1
    assert set(cert.tight_vertices) == KNOWN_FACET
    assert cert.polytope_id == "P[K3,C4,K4-e;n=6;density]"
    doc = cert.to_dict()
    assert set(doc) == {"polynomial", "polytope_id", "status", "min_inner_product", "tight_vertices", "witnesses"}
    assert all(w for w in doc["witnesses"])


def test_trivial_and_refuted(p6):
    assert certify_nonneg(parse_polynomial("1"), p6).status == CERTIFIED
    cert = certify_nonneg(parse_polynomial("1 - 100x^3"), p6)
    assert cert.status == REFUTED
    assert cert.min_inner_product == -100
    assert cert.tight_vertices == [(1, 1, 1)]
    assert cert.refutation == (1, -99)
    assert cert.to_dict()["refutation"] == {"x": "1/1", "value": "-99/1"}


def test_inconclusive_branch(p6):
    # 1 - a/4 (x^3 - x^4) is nonnegative on [0, 1] for a <= 4*256/27 (about 37.9),
    # but the vertex scan fails well before that because P_{F;6} is larger than the spine
    found = None
    for a in range(1, 38):
        q = parse_polynomial(f"1 - {a}/4 x^3 + {a}/4 x^4")
        if certify_nonneg(q, p6).status != CERTIFIED:
            found = q
            break
    assert found is not None
    assert sample_check(found, 1000).minimum >= 0
    assert certify_nonneg(found, p6).status == INCONCLUSIVE


def test_certify_rejects_mismatch(p6):
    with pytest.raises(ValueError):
        certify_nonneg(parse_polynomial("1 - x^2"), p6)
    with pytest.raises(ValueError):
        certify_nonneg(parse_polynomial("1"), build_polytope(TRIPLE, 5, LATTICE))


@settings(max_examples=40)
@given(st.lists(st.fractions(min_value=-8, max_value=8, max_denominator=6), min_size=3, max_size=3))
def test_certificates_are_sound(p6, coeffs):
    q = SparsePolynomial(tuple((e, c) for e, c in zip((3, 4, 5), coeffs) if c))
    cert = certify_nonneg(q, p6)
    if cert.status == CERTIFIED:
        assert sample_check(q, 2000).minimum >= 0
        spec = SpineSpec((3, 4, 5))
        c = coefficient_vector(q, (3, 4, 5))
        for j in range(101):
            pt = spine_point(spec, F(j, 100))
            assert sum(a * x for a, x in zip(c, pt)) >= -1
    if cert.status == REFUTED:
        assert q(cert.refutation[0]) == cert.refutation[1] < 0


def test_fuzzing_around_the_facet_certificate(p6):
    rng = random.Random(8)
    base = parse_polynomial(FACET_Q).coefficients
    certified = 0
    for _ in range(60):
        c = [b + F(rng.randint(-20, 20), 100) for b in base]
        q = SparsePolynomial(tuple(zip((3, 4, 5), c)))
        cert = certify_nonneg(q, p6)
        if cert.certified:
            certified += 1
            assert sample_check(q, 10_000).minimum >= 0
    assert certified > 0


# facet duals -----------------------------------------------------------------------------------


def test_facet_dual_round_trip(p6):
    idx = {v: i for i, v in enumerate(p6.vertices)}
    target = tuple(sorted(idx[v] for v in KNOWN_FACET))
    facets = [f for f in p6.facets() if set(target) <= set(f.incident)]
    assert len(facets) == 1
    c = facet_dual(facets[0])
    assert c == (F(-16, 3), F(11, 2), F(-1, 2))
    q = dual_polynomial(c, (3, 4, 5))
    assert str(q) == FACET_Q
    cert = certify_nonneg(q, p6)
    assert cert.certified and set(cert.tight_vertices) == KNOWN_FACET


def test_every_facet_dual_is_tight_on_its_facet(p6):
    for f in p6.facets():
        if f.offset == 0:
            with pytest.raises(DegenerateError):
                facet_dual(f)
            continue
        c = facet_dual(f)
        vals = [sum(a * x for a, x in zip(c, v)) for v in p6.vertices]
        assert all(vals[i] == -1 for i in f.incident)
        if f.offset > 0:
            assert min(vals) == -1
            assert certify_nonneg(dual_polynomial(c, (3, 4, 5)), p6).certified


def test_facet_dual_one_dimensional_examples():
    with pytest.raises(DegenerateError):
        facet_dual(Facet((F(-1),), F(0), (0,)))
    c = facet_dual(Facet((F(-1),), F(-1, 2), (0,)))
    assert c == (-2,)
    q = dual_polynomial(c, (1,))
    assert str(q) == "1 - 2 x^1"
    # <c, 1> = -2 < -1: this dual does not certify on [0, 1]
    assert c[0] * 1 < -1
    assert sample_check(q, 10).minimum == -1


def test_certifier_strength_table():
    q = parse_polynomial(FACET_Q)
    rows = certifier_strength(q, TRIPLE, [5, 6, 7])
    assert [r["n"] for r in rows] == [5, 6, 7]
    mins = [F(r["min_inner_product"]) for r in rows]
    assert mins == sorted(mins)  # smaller polytopes certify more
    assert rows[1]["min_inner_product"] == "-1/1" and rows[1]["status"] == CERTIFIED
