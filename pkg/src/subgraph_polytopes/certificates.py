"""Nonnegativity certificates on [0, 1] read off from statistics polytopes.

If every vertex ``v`` of a density polytope satisfies ``<c, v> >= -1`` then
the sparse polynomial ``1 + sum_i c_i x^{e_i}`` is nonnegative on [0, 1],
because the spine ``(p^{e_1}, ..., p^{e_d})`` lies inside the polytope.
The converse does not hold, so a failed check is only "inconclusive"
unless a dense evaluation finds an actual negative value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exceptions import DegenerateError, PatternParseError
from .geometry.hull import Facet
from .geometry.linalg import format_rational
from .graphs import DENSITY
from .polytope import SubgraphPolytope, build_polytope

CERTIFIED = "certified"
INCONCLUSIVE = "inconclusive"
REFUTED = "refuted"


class PolynomialParseError(PatternParseError):
    """Malformed polynomial text; ``position`` points at the offending character."""


@dataclass(frozen=True)
class SparsePolynomial:
    """``1 + sum c_i x^{e_i}`` with distinct positive exponents, sorted ascending."""

    terms: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        terms = tuple(sorted((int(e), Fraction(c)) for e, c in self.terms))
        exps = [e for e, _ in terms]
        if any(e <= 0 for e in exps):
            raise ValueError("exponents must be positive integers")
        if len(set(exps)) != len(exps):
            raise ValueError("exponents must be distinct")
        object.__setattr__(self, "terms", terms)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.terms)

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return tuple(c for _, c in self.terms)

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        return 1 + sum((c * x**e for e, c in self.terms), Fraction(0))

    def __str__(self):
        out = "1"
        for e, c in self.terms:
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            coef = "" if mag == 1 else f"{mag} "
            out += f" {sign} {coef}x^{e}"
        return out

    @classmethod
    def parse(cls, text: str) -> SparsePolynomial:
        return parse_polynomial(text)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+|\.\d*)?|\.\d+)|(?P<x>x)|(?P<op>[+\-*^])|(?P<bad>\S))"
)


def parse_polynomial(text: str) -> SparsePolynomial:
    """Parse text such as ``"1 - 16/3 x^3 + 11/2 x^4 - 1/2 x^5"``.

    Coefficients are integers, ``p/q`` fractions or decimals; ``*`` between
    a coefficient and ``x`` is optional and a bare ``x`` means ``x^1``.
    Constant terms must add up to exactly 1.
    """
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group("bad"):
            raise PolynomialParseError(f"unexpected character {m.group('bad')!r}", text, m.start("bad"))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))

    constant = Fraction(0)
    coeffs: dict[int, Fraction] = {}
    i = 0
    first = True
    while tokens[i][0] != "end":
        sign = 1
        kind, val, at = tokens[i]
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            i += 1
        elif not first:
            raise PolynomialParseError("expected '+' or '-' between terms", text, at)
        first = False
        kind, val, at = tokens[i]
        coef = None
        if kind == "num":
            coef = Fraction(val)
            i += 1
            if tokens[i][0] == "op" and tokens[i][1] == "*":
                i += 1
                if tokens[i][0] != "x":
                    raise PolynomialParseError("expected 'x' after '*'", text, tokens[i][2])
        kind, val, at = tokens[i]
        if kind == "x":
            i += 1
            exp = 1
            if tokens[i][0] == "op" and tokens[i][1] == "^":
                i += 1
                kind, val, at = tokens[i]
                if kind != "num" or not val.isdigit():
                    raise PolynomialParseError("expected a positive integer exponent after '^'", text, at)
                exp = int(val)
                i += 1
            if exp == 0:
                constant += sign * (1 if coef is None else coef)
            else:
                coeffs[exp] = coeffs.get(exp, Fraction(0)) + sign * (1 if coef is None else coef)
        elif coef is None:
            raise PolynomialParseError("expected a coefficient or 'x'", text, at)
        else:
            constant += sign * coef
    if first:
        raise PolynomialParseError("empty polynomial", text, 0)
    if constant != 1:
        raise PolynomialParseError(f"constant term must be exactly 1, got {constant}", text, 0)
    return SparsePolynomial(tuple((e, c) for e, c in coeffs.items() if c != 0))


def coefficient_vector(q: SparsePolynomial, edge_counts: Sequence[int]) -> tuple[Fraction, ...]:
    """Coefficients of ``q`` aligned with the pattern edge counts (0 where absent)."""
    counts = list(edge_counts)
    if len(set(counts)) != len(counts):
        raise ValueError(f"pattern edge counts {tuple(counts)} are not distinct; coefficients would be ambiguous")
    extra = [e for e in q.exponents if e not in counts]
    if extra:
        raise ValueError(f"exponents {extra} have no pattern with that many edges (edge counts {tuple(counts)})")
    lookup = dict(q.terms)
    return tuple(lookup.get(e, Fraction(0)) for e in counts)


def polytope_id(poly: SubgraphPolytope) -> str:
    return f"P[{poly.fs};n={poly.n};{poly.kind}]"


@dataclass
class SampleCheck:
    minimum: Fraction
    argmin: Fraction
    grid: int


def sample_check(q: SparsePolynomial, grid: int = 10_000) -> SampleCheck:
    """Exact minimum of ``q`` over ``{j / grid : j = 0..grid}`` (a one-sided oracle)."""
    if grid < 2:
        raise ValueError("grid must be at least 2")
    best, arg = None, None
    for j in range(grid + 1):
        x = Fraction(j, grid)
        v = q(x)
        if best is None or v < best:
            best, arg = v, x
    return SampleCheck(best, arg, grid)


@dataclass
class Certificate:
    polynomial: SparsePolynomial
    polytope_id: str
    status: str
    min_inner_product: Fraction
    tight_vertices: list[tuple[Fraction, ...]]
    witnesses: list[list[str]]
    refutation: tuple[Fraction, Fraction] | None = None

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def to_dict(self) -> dict:
        doc = {
            "polynomial": str(self.polynomial),
            "polytope_id": self.polytope_id,
            "status": self.status,
            "min_inner_product": format_rational(self.min_inner_product),
            "tight_vertices": [[format_rational(x) for x in v] for v in self.tight_vertices],
            "witnesses": self.witnesses,
        }
        if self.refutation is not None:
            doc["refutation"] = {"x": format_rational(self.refutation[0]), "value": format_rational(self.refutation[1])}
        return doc


def certify_nonneg(q: SparsePolynomial, poly: SubgraphPolytope, grid: int = 1000) -> Certificate:
    """Vertex scan for ``min <c, v>``; certified iff the minimum is at least -1.

    When the scan fails, a dense grid evaluation decides between
    ``refuted`` (a negative value was found) and ``inconclusive``.
    """
    if poly.kind != DENSITY:
        raise ValueError("certificates need a density polytope")
    c = coefficient_vector(q, poly.fs.edge_counts)
    values = [sum((a * x for a, x in zip(c, v)), Fraction(0)) for v in poly.vertices]
    best = min(values) if values else Fraction(0)
    tight = [i for i, val in enumerate(values) if val == best]
    refutation = None
    if best >= -1:
        status = CERTIFIED
    else:
        chk = sample_check(q, grid)
        if chk.minimum < 0:
            status = REFUTED
            refutation = (chk.argmin, chk.minimum)
        else:
            status = INCONCLUSIVE
    return Certificate(
        q,
        polytope_id(poly),
        status,
        best,
        [poly.vertices[i] for i in tight],
        [poly.witnesses(i) for i in tight],
        refutation,
    )


def facet_dual(facet: Facet) -> tuple[Fraction, ...]:
    """``c = -normal / offset``, so ``<c, v> = -1`` on the facet.

    For a positive offset (the origin strictly inside the half-space) every
    other vertex has ``<c, v> >= -1``; for a negative offset the inequality
    flips, which is how a dual can fail to certify. A facet through the
    origin has no normalised dual.
    """
    if facet.offset == 0:
        raise DegenerateError("facet passes through the origin; no normalised dual exists", None, None)
    return tuple(-x / facet.offset for x in facet.normal)


def dual_polynomial(c: Sequence, edge_counts: Sequence[int]) -> SparsePolynomial:
    return SparsePolynomial(tuple((e, Fraction(x)) for e, x in zip(edge_counts, c) if x != 0))


def certifier_strength(q: SparsePolynomial, fs, ns: Sequence[int]) -> list[dict]:
    """``min <c, v>`` over P_{F;n} for several host sizes (larger n, tighter polytope)."""
    rows = []
    for n in ns:
        cert = certify_nonneg(q, build_polytope(fs, n))
        rows.append({"n": n, "min_inner_product": format_rational(cert.min_inner_product), "status": cert.status})
    return rows
