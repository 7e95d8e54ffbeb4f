"""Spines (generalized moment curves), cyclic polytopes inscribed in them,
and three independent routes to the volume of the spine's convex hull:
exact cyclic-polytope sums, a Schur-polynomial integral, and a closed
product formula (a Pfaffian).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence

import numpy as np

from .exceptions import CapacityError, InconsistencyError
from .geometry.hull import VPolytope, extreme_points, hull_facets, membership
from .geometry.linalg import det, format_rational
from .graphs import GraphVector
from .polytope import build_polytope, report


@dataclass(frozen=True)
class SpineSpec:
    """Distinct positive exponents, kept in the caller's coordinate order."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        e = tuple(int(x) for x in self.exponents)
        object.__setattr__(self, "exponents", e)
        if not e:
            raise ValueError("a spine needs at least one exponent")
        if any(x <= 0 for x in e):
            raise ValueError("spine exponents must be positive")
        if len(set(e)) != len(e):
            raise ValueError("spine exponents must be distinct")

    @classmethod
    def of(cls, fs: GraphVector) -> SpineSpec:
        return cls(fs.edge_counts)

    @classmethod
    def parse(cls, text: str) -> SpineSpec:
        return cls(tuple(int(t) for t in text.replace(" ", "").split(",") if t))

    @property
    def dim(self) -> int:
        return len(self.exponents)

    @property
    def ascending(self) -> tuple[int, ...]:
        return tuple(sorted(self.exponents))

    @property
    def descending(self) -> tuple[int, ...]:
        return tuple(sorted(self.exponents, reverse=True))

    @property
    def descending_order(self) -> tuple[int, ...]:
        """Original coordinate index of each entry of ``descending``."""
        return tuple(sorted(range(self.dim), key=lambda i: -self.exponents[i]))

    def __str__(self):
        return ",".join(map(str, self.exponents))


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        p = tuple(int(x) for x in self.parts)
        object.__setattr__(self, "parts", p)
        if any(x < 0 for x in p) or any(a < b for a, b in zip(p, p[1:])):
            raise ValueError(f"{p} is not a partition")

    def padded(self, k: int) -> tuple[int, ...]:
        if len(self.parts) > k and any(self.parts[k:]):
            raise ValueError("partition has more nonzero parts than variables")
        return (self.parts + (0,) * k)[:k]


def spine_partition(spec: SpineSpec) -> Partition:
    """lambda_i = e_i - (d - i) with exponents sorted descending."""
    e = spec.descending
    d = len(e)
    return Partition(tuple(e[i] - (d - 1 - i) for i in range(d)))


def spine_point(spec: SpineSpec, p) -> tuple[Fraction, ...]:
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("spine parameter must lie in [0, 1]")
    return tuple(p**e for e in spec.exponents)


def check_spine_containment(fs: GraphVector, n: int, grid: int = 100) -> dict:
    """Exact membership of spine points at p = j/grid in P_{F;n}."""
    poly = build_polytope(fs, n)
    spec = SpineSpec.of(fs)
    failures = []
    for j in range(grid + 1):
        pt = spine_point(spec, Fraction(j, grid))
        m = membership(pt, poly.hull)
        if not m.inside:
            failures.append(
                {
                    "p": format_rational(Fraction(j, grid)),
                    "point": [format_rational(x) for x in pt],
                    "normal": [format_rational(x) for x in m.normal],
                    "offset": format_rational(m.offset),
                }
            )
    inst = {"vector": str(fs), "n": n, "grid": grid, "points": grid + 1, "failures": len(failures), "ok": not failures}
    return report("the spine lies in P_{F;n}", [inst], failures)


# cyclic polytopes -----------------------------------------------------------


def gale_evenness(subset: Sequence[int], count: int) -> bool:
    """Gale's condition for ``subset`` of the ordered vertices ``0..count-1``."""
    s = set(subset)
    outside = [i for i in range(count) if i not in s]
    for a, b in zip(outside, outside[1:]):
        if sum(1 for k in s if a < k < b) % 2:
            return False
    return True


def gale_facets(count: int, d: int) -> set[tuple[int, ...]]:
    return {c for c in itertools.combinations(range(count), d) if gale_evenness(c, count)}


@dataclass
class CyclicPolytope:
    spec: SpineSpec
    xs: tuple[Fraction, ...]
    polytope: VPolytope
    predicted_facets: set[tuple[int, ...]]
    hull_facets: set[tuple[int, ...]] | None

    @property
    def all_vertices(self) -> bool:
        return len(self.polytope.vertices) == len(self.xs)

    @property
    def facets_match(self) -> bool | None:
        if self.hull_facets is None:
            return None
        return self.hull_facets == self.predicted_facets


def curve_polytope(points: Sequence[Sequence], d: int) -> tuple[VPolytope, set | None]:
    """Hull of curve points given in parameter order; facet index sets for d <= 3."""
    poly = extreme_points(points)
    order = {tuple(Fraction(x) for x in p): i for i, p in enumerate(points)}
    facets = None
    if d <= 3 and len(poly.vertices) > d:
        facets = {
            tuple(sorted(order[poly.vertices[i]] for i in f.incident)) for f in hull_facets(poly)
        }
    return poly, facets


def cyclic_polytope_on_spine(spec: SpineSpec, xs: Sequence) -> CyclicPolytope:
    xs = sorted(Fraction(x) for x in xs)
    if len(set(xs)) != len(xs):
        raise ValueError("curve parameters must be distinct")
    if len(xs) < spec.dim + 1:
        raise ValueError("need at least d+1 points")
    pts = [spine_point(spec, x) for x in xs]
    poly, facets = curve_polytope(pts, spec.dim)
    return CyclicPolytope(spec, tuple(xs), poly, gale_facets(len(xs), spec.dim), facets)


# exact cyclic-polytope volume ---------------------------------------------------


def _wedge(a: dict, b: dict) -> dict:
    out: dict = {}
    for i, x in a.items():
        si = set(i)
        for j, y in b.items():
            if si.intersection(j):
                continue
            merged = i + j
            inv = sum(1 for p in range(len(merged)) for q in range(p + 1, len(merged)) if merged[p] > merged[q])
            key = tuple(sorted(merged))
            val = x * y if inv % 2 == 0 else -x * y
            out[key] = out.get(key, 0) + val
    return out


def _add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return out


def gale_volume_sum(spec: SpineSpec, n: int) -> Fraction:
    """Exact volume of the cyclic polytope on the spine points at x = i/n.

    The polytope is triangulated from the vertex 0 over the facets missing
    it; by Gale's condition those are unions of adjacent pairs (plus the
    vertex 1 in odd dimension). The sum over pair sequences is accumulated
    in the exterior algebra, which makes it linear in ``n``.
    """
    d = spec.dim
    m = d // 2
    if n < d:
        raise ValueError(f"need n >= d = {d}")
    e = spec.ascending
    # integer coordinates i^e; the volume is rescaled by n^(sum e) at the end
    col = [tuple(i**x for x in e) for i in range(n + 1)]

    def omega(i):
        a, b = col[i], col[i + 1]
        return {(p, q): a[p] * b[q] - a[q] * b[p] for p in range(d) for q in range(p + 1, d)}

    if m == 0:
        total = {(0,): col[n][0]}
    else:
        last_pair = n - 1 if d % 2 == 0 else n - 2
        # level[k][i]: sum of wedges of k pairs whose last pair starts at i
        prev = {i: omega(i) for i in range(1, last_pair + 1)}
        for _ in range(m - 1):
            cur = {}
            prefix: dict = {}
            for j in range(1, last_pair + 1):
                if j - 2 >= 1 and (j - 2) in prev:
                    prefix = _add(prefix, prev[j - 2])
                if prefix:
                    cur[j] = _wedge(prefix, omega(j))
            prev = cur
        total = {}
        for v in prev.values():
            total = _add(total, v)
        if d % 2 == 1:
            total = _wedge(total, {(k,): col[n][k] for k in range(d)})
    top = total.get(tuple(range(d)), 0)
    return Fraction(top, factorial(d) * n ** sum(e))


def gale_volume_sum_direct(spec: SpineSpec, n: int) -> Fraction:
    """The same sum, enumerated term by term (small n only)."""
    d = spec.dim
    m = d // 2
    e = spec.ascending
    f = [tuple(Fraction(i, n) ** x for x in e) for i in range(n + 1)]
    last_pair = n - 1 if d % 2 == 0 else n - 2
    total = Fraction(0)
    for seq in itertools.combinations(range(1, last_pair + 1), m):
        if any(b - a < 2 for a, b in zip(seq, seq[1:])):
            continue
        cols = [f[i] for s in seq for i in (s, s + 1)]
        if d % 2 == 1:
            cols.append(f[n])
        total += abs(det([list(r) for r in zip(*cols)]))
    return total / factorial(d)


# Schur polynomials ------------------------------------------------------------


def _ssyt_contents(shape: tuple[int, ...], k: int):
    """Yield the content vector of every SSYT of ``shape`` with entries 1..k."""
    cells = [(r, c) for r, length in enumerate(shape) for c in range(length)]
    filling: dict = {}
    content = [0] * k

    def rec(idx):
        if idx == len(cells):
            yield tuple(content)
            return
        r, c = cells[idx]
        lo = 1
        if c > 0:
            lo = max(lo, filling[(r, c - 1)])
        if r > 0:
            lo = max(lo, filling[(r - 1, c)] + 1)
        # leave room for the rows below in this column
        below = sum(1 for rr in range(r + 1, len(shape)) if shape[rr] > c)
        for v in range(lo, k - below + 1):
            filling[(r, c)] = v
            content[v - 1] += 1
            yield from rec(idx + 1)
            content[v - 1] -= 1
        filling.pop((r, c), None)

    yield from rec(0)


@lru_cache(maxsize=None)
def schur_monomials(parts: tuple[int, ...], k: int) -> dict[tuple[int, ...], int]:
    """Monomial expansion of S_lambda in k variables (Kostka numbers)."""
    shape = tuple(x for x in parts if x > 0)
    if len(shape) > k:
        return {}
    out: dict = {}
    for c in _ssyt_contents(shape, k):
        out[c] = out.get(c, 0) + 1
    return out


def schur_eval(lam: Partition | Sequence[int], xs: Sequence) -> Fraction:
    """S_lambda(xs) as a sum over semistandard tableaux; exact, any arguments.

    Zero when lambda has more nonzero parts than there are variables.
    """
    lam = lam if isinstance(lam, Partition) else Partition(tuple(lam))
    k = len(xs)
    if sum(1 for x in lam.parts if x) > k:
        return Fraction(0)
    parts = lam.padded(k) if k else ()
    vals = [Fraction(x) for x in xs]
    total = Fraction(0)
    for c, mult in schur_monomials(parts, k).items():
        term = Fraction(mult)
        for x, a in zip(vals, c):
            if a:
                term *= x**a
        total += term
    return total


def schur_bialternant(lam: Partition | Sequence[int], xs: Sequence) -> Fraction:
    """det[x_i^(lambda_j + k - j)] / det[x_i^(k - j)]; needs distinct arguments."""
    lam = lam if isinstance(lam, Partition) else Partition(tuple(lam))
    k = len(xs)
    parts = lam.padded(k)
    vals = [Fraction(x) for x in xs]
    if len(set(vals)) != k:
        raise ValueError("bialternant needs distinct arguments")
    num = det([[x ** (parts[j] + k - 1 - j) for j in range(k)] for x in vals])
    den = det([[x ** (k - 1 - j) for j in range(k)] for x in vals])
    return num / den


# quadrature -----------------------------------------------------------------------


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            out[key] = out.get(key, 0) + ca * cb
    return {k: v for k, v in out.items() if v}


def spine_integrand(spec: SpineSpec) -> tuple[dict, Fraction]:
    """Integrand polynomial in m variables (exponent tuple -> int) and prefactor.

    Even d = 2m: S_lambda(x1,x1,...,xm,xm) prod_{i<j} (xi - xj)^4 / ((2m)! m!).
    Odd d = 2m+1: S_lambda(x1,x1,...,xm,xm,1) prod_{i<j} (xi - xj)^4
    prod_i (1 - xi)^2 / ((2m+1)! m!).
    """
    d = spec.dim
    m = d // 2
    lam = spine_partition(spec)
    mono = schur_monomials(lam.padded(d), d)
    poly: dict = {}
    for c, mult in mono.items():
        key = tuple(c[2 * i] + c[2 * i + 1] for i in range(m))
        poly[key] = poly.get(key, 0) + mult
    zero = (0,) * m

    def unit(i, power=1):
        return tuple(power if j == i else 0 for j in range(m))

    for i in range(m):
        for j in range(i + 1, m):
            diff = {unit(i): 1, unit(j): -1}
            for _ in range(4):
                poly = _poly_mul(poly, diff)
    if d % 2 == 1:
        for i in range(m):
            one_minus = {zero: 1, unit(i): -1}
            poly = _poly_mul(poly, _poly_mul(one_minus, one_minus))
    return poly, Fraction(1, factorial(d) * factorial(m))


def _gauss_rule(nodes: int):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return (x + 1) / 2, w / 2


def _integrate(poly: dict, m: int, nodes: int) -> float:
    if m == 0:
        return float(sum(poly.values()))
    x, w = _gauss_rule(nodes)
    grids = np.meshgrid(*([x] * m), indexing="ij")
    weight = np.ones_like(grids[0])
    for g in np.meshgrid(*([w] * m), indexing="ij"):
        weight = weight * g
    maxdeg = max(max(k) for k in poly)
    powers = [np.stack([g**a for a in range(maxdeg + 1)]) for g in grids]
    values = np.zeros_like(grids[0])
    for expo, coef in poly.items():
        term = np.full_like(values, float(coef))
        for i, a in enumerate(expo):
            if a:
                term = term * powers[i][a]
        values += term
    return float(np.sum(values * weight))


MAX_QUADRATURE_M = 3


@dataclass
class QuadratureResult:
    value: float
    error_estimate: float
    nodes: int


def spine_volume_integrand_quadrature(spec: SpineSpec, nodes: int = 64, coarse: int = 48) -> QuadratureResult:
    """Tensor Gauss-Legendre value of the Schur integral for the spine-hull volume."""
    m = spec.dim // 2
    if m > MAX_QUADRATURE_M:
        raise CapacityError(f"quadrature supports m <= {MAX_QUADRATURE_M}")
    poly, pref = spine_integrand(spec)
    fine = _integrate(poly, m, nodes) * float(pref)
    rough = _integrate(poly, m, coarse) * float(pref)
    return QuadratureResult(fine, abs(fine - rough), nodes)


def spine_integral_exact(spec: SpineSpec) -> Fraction:
    """Exact integral of the same polynomial (monomials integrate to 1/(a+1))."""
    m = spec.dim // 2
    poly, pref = spine_integrand(spec)
    total = Fraction(0)
    for expo, coef in poly.items():
        term = Fraction(coef)
        for a in expo:
            term /= a + 1
        total += term
    return total * pref


# Pfaffians ----------------------------------------------------------------------------


def pfaffian_product(spec: SpineSpec) -> Fraction:
    """1/k! prod_{i<j} (e_i - e_j)/(e_i + e_j), exponents sorted descending."""
    e = spec.descending
    k = len(e)
    val = Fraction(1, factorial(k))
    for i in range(k):
        for j in range(i + 1, k):
            val *= Fraction(e[i] - e[j], e[i] + e[j])
    return val


MAX_PFAFFIAN_SIZE = 12


def _pf(a: list[list[Fraction]], idx: tuple[int, ...]) -> Fraction:
    if not idx:
        return Fraction(1)
    first = idx[0]
    total = Fraction(0)
    for pos in range(1, len(idx)):
        j = idx[pos]
        if a[first][j] == 0:
            continue
        rest = idx[1:pos] + idx[pos + 1:]
        sign = 1 if pos % 2 == 1 else -1
        total += sign * a[first][j] * _pf(a, rest)
    return total


def pfaffian_eval(matrix: Sequence[Sequence], verify: bool = True) -> Fraction:
    """Pfaffian by expansion along the first row; Pf^2 = det checked exactly."""
    a = [[Fraction(x) for x in row] for row in matrix]
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("Pfaffian needs a square matrix")
    for i in range(n):
        for j in range(n):
            if a[i][j] != -a[j][i]:
                raise ValueError("matrix is not antisymmetric")
    if n % 2:
        raise ValueError("Pfaffian needs an even-sized matrix")
    if n > MAX_PFAFFIAN_SIZE:
        raise CapacityError(f"Pfaffian expansion supports size <= {MAX_PFAFFIAN_SIZE}")
    pf = _pf(a, tuple(range(n)))
    if verify and pf * pf != det(a):
        raise InconsistencyError("Pf(A)^2 != det(A)")
    return pf


def schur_pfaffian_matrix(ys: Sequence) -> list[list[Fraction]]:
    ys = [Fraction(y) for y in ys]
    return [[(a - b) / (a + b) for b in ys] for a in ys]


# comparison table ---------------------------------------------------------------------


def volume_oracles(spec: SpineSpec, gale_n: int = 2000, quadrature: bool = True) -> dict:
    closed = pfaffian_product(spec)
    gale = gale_volume_sum(spec, gale_n)
    row = {
        "spec": str(spec),
        "gale_n": gale_n,
        "gale_value": format_rational(gale),
        "gale_value_estimate": float(gale),
        "closed_form": format_rational(closed),
        "closed_form_estimate": float(closed),
        "gale_gap_estimate": float(closed - gale),
        "gale_bound_estimate": 5 * sum(spec.exponents) / gale_n,
        "fitted_constant_estimate": float((closed - gale) * gale_n / sum(spec.exponents)),
        "gale_below_closed_form": gale <= closed,
    }
    if quadrature and spec.dim // 2 <= MAX_QUADRATURE_M:
        q = spine_volume_integrand_quadrature(spec)
        row["quadrature_estimate"] = q.value
        row["quadrature_stderr"] = q.error_estimate
        row["quadrature_gap_estimate"] = abs(q.value - float(closed))
    return row
