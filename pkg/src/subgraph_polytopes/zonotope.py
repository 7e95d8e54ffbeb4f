"""Stepfunction kernels W_M, their subgraph densities p_{F;n}(M), and
curvy-zonotope sampling.

A kernel's density polynomial sums over *all* maps V(F) -> [n], so the
diagonal entries of M take part.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, lcm
from pathlib import Path
from typing import Sequence

import numpy as np

from .geometry.hull import VPolytope, extreme_points, membership
from .geometry.linalg import affine_rank, format_rational, independent_subset, parse_rational, simplex_volume
from .geometry.volume import exact_volume
from .graphs import Graph, GraphVector
from .polytope import build_polytope, report

SAMPLE_DENOMINATOR = 10_000


@dataclass(frozen=True)
class StepKernel:
    n: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        if len(rows) != self.n or any(len(r) != self.n for r in rows):
            raise ValueError("kernel must be n x n")
        for i in range(self.n):
            for j in range(self.n):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("kernel must be symmetric")
                if not 0 <= rows[i][j] <= 1:
                    raise ValueError("kernel entries must lie in [0, 1]")

    @classmethod
    def constant(cls, n: int, p) -> StepKernel:
        return cls(n, tuple(tuple(Fraction(p) for _ in range(n)) for _ in range(n)))

    @classmethod
    def from_upper(cls, n: int, values: Sequence) -> StepKernel:
        """Fill the n(n+1)/2 upper-triangle entries (diagonal included) row by row."""
        m = [[Fraction(0)] * n for _ in range(n)]
        it = iter(values)
        for i in range(n):
            for j in range(i, n):
                m[i][j] = m[j][i] = Fraction(next(it))
        return cls(n, tuple(map(tuple, m)))

    def blow_up(self, k: int) -> StepKernel:
        """The same stepfunction on a k-times finer grid of blocks."""
        nk = self.n * k
        return StepKernel(nk, tuple(tuple(self.entries[i // k][j // k] for j in range(nk)) for i in range(nk)))

    def permuted(self, perm: Sequence[int]) -> StepKernel:
        return StepKernel(self.n, tuple(tuple(self.entries[perm[i]][perm[j]] for j in range(self.n)) for i in range(self.n)))

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.entries])

    def to_dict(self) -> dict:
        return {"n": self.n, "entries": [format_rational(x) for r in self.entries for x in r]}

    @classmethod
    def from_dict(cls, doc: dict) -> StepKernel:
        n = int(doc["n"])
        vals = [parse_rational(x) for x in doc["entries"]]
        if len(vals) != n * n:
            raise ValueError("kernel file needs n*n row-major entries")
        return cls(n, tuple(tuple(vals[i * n:(i + 1) * n]) for i in range(n)))

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def read(cls, path) -> StepKernel:
        return cls.from_dict(json.loads(Path(path).read_text()))


def p_eval(f: Graph, kernel: StepKernel) -> Fraction:
    """n^-|F| sum over phi: V(F) -> [n] of prod_{ij in E(F)} M[phi(i)][phi(j)]."""
    n = kernel.n
    den = 1
    for r in kernel.entries:
        for x in r:
            den = lcm(den, x.denominator)
    ints = [[int(x * den) for x in r] for r in kernel.entries]
    edges = f.edges()
    total = 0
    for phi in itertools.product(range(n), repeat=f.n):
        term = 1
        for i, j in edges:
            term *= ints[phi[i]][phi[j]]
            if not term:
                break
        total += term
    return Fraction(total, n**f.n * den ** len(edges))


def t_kernel(fs: GraphVector, kernel: StepKernel) -> tuple[Fraction, ...]:
    return tuple(p_eval(f, kernel) for f in fs)


def p_eval_float(f: Graph, kernels: np.ndarray) -> np.ndarray:
    """Vectorised float version over a stack of kernels ``(N, n, n)``."""
    n = kernels.shape[1]
    edges = f.edges()
    total = np.zeros(kernels.shape[0])
    for phi in itertools.product(range(n), repeat=f.n):
        term = np.ones(kernels.shape[0])
        for i, j in edges:
            term = term * kernels[:, phi[i], phi[j]]
        total += term
    return total / n**f.n


@dataclass
class ZonotopeSample:
    fs: GraphVector
    n: int
    kernels: list[StepKernel]
    points: list[tuple[Fraction, ...]]
    seed: int
    meta: dict = field(default_factory=dict)

    def float_points(self) -> np.ndarray:
        return np.array([[float(x) for x in p] for p in self.points])

    def to_csv(self) -> str:
        d = self.fs.dim
        head = [f"exact_{i}" for i in range(d)] + [f"float_{i}" for i in range(d)]
        lines = ["index," + ",".join(head)]
        for k, p in enumerate(self.points):
            lines.append(",".join([str(k)] + [format_rational(x) for x in p] + [repr(float(x)) for x in p]))
        return "\n".join(lines) + "\n"


def _random_kernels(n: int, count: int, seed: int, denominator: int = SAMPLE_DENOMINATOR):
    rng = np.random.default_rng(seed)
    free = n * (n + 1) // 2
    for _ in range(count):
        vals = rng.integers(0, denominator + 1, size=free)
        yield StepKernel.from_upper(n, [Fraction(int(v), denominator) for v in vals])


def zonotope_sample(fs: GraphVector, n: int, count: int, seed: int = 0) -> ZonotopeSample:
    """Corner kernels (all 0, all 1) followed by ``count`` random symmetric kernels.

    Draws are sequential from one generator, so a larger ``count`` with the
    same seed extends the smaller sample.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    kernels = [StepKernel.constant(n, 0), StepKernel.constant(n, 1)]
    kernels += list(_random_kernels(n, count, seed))
    points = [t_kernel(fs, k) for k in kernels]
    return ZonotopeSample(fs, n, kernels, points, seed, {"denominator": SAMPLE_DENOMINATOR})


def check_zonotope_in_polytope(fs: GraphVector, kernel_size: int, host_n: int, count: int, seed: int = 0) -> dict:
    poly = build_polytope(fs, host_n)
    sample = zonotope_sample(fs, kernel_size, count, seed)
    failures = []
    for kern, pt in zip(sample.kernels, sample.points):
        m = membership(pt, poly.hull)
        if not m.inside:
            failures.append(
                {
                    "kernel": kern.to_dict(),
                    "point": [format_rational(x) for x in pt],
                    "normal": [format_rational(x) for x in m.normal],
                    "offset": format_rational(m.offset),
                }
            )
    inst = {
        "vector": str(fs),
        "kernel_size": kernel_size,
        "host_n": host_n,
        "points": len(sample.points),
        "seed": seed,
        "failures": len(failures),
        "ok": not failures,
    }
    return report("curvy zonotope points lie in P_{F;n}", [inst], failures)


def full_dimensional_witness(fs: GraphVector, kernel_size: int = 2, count: int = 100, seed: int = 0) -> dict:
    """Affine rank of sampled zonotope points and an explicit d-simplex among them.

    The simplex volume is a concrete positive lower bound for every P_{F;n}.
    """
    sample = zonotope_sample(fs, kernel_size, count, seed)
    pts = sample.points
    d = fs.dim
    r = affine_rank(pts)
    out = {"vector": str(fs), "kernel_size": kernel_size, "count": len(pts), "seed": seed, "affine_rank": r, "dim": d}
    if r == d:
        idx = independent_subset(pts, d + 1)
        simplex = [pts[i] for i in idx]
        out["simplex"] = [[format_rational(x) for x in p] for p in simplex]
        out["simplex_kernels"] = [sample.kernels[i].to_dict() for i in idx]
        vol = simplex_volume(simplex)
        out["volume_lower_bound"] = format_rational(vol)
        out["volume_lower_bound_estimate"] = float(vol)
    out["ok"] = r == d
    return out


def zonotope_hull_volume(fs: GraphVector, kernel_size: int, count: int, seed: int = 0, host_n: int | None = None) -> dict:
    """Volume of the hull of sampled zonotope points (exact for d <= 3).

    When the kernel has fewer free entries than there are coordinates the
    zonotope itself is a null set; ``zonotope_volume`` is then reported as 0
    next to the (possibly positive) hull volume.
    """
    sample = zonotope_sample(fs, kernel_size, count, seed)
    hull = extreme_points(sample.points)
    out = {"vector": str(fs), "kernel_size": kernel_size, "count": count, "seed": seed, "hull_vertices": len(hull)}
    # the image of n(n+1)/2 parameters under a polynomial map has measure
    # zero in R^d when there are fewer parameters than coordinates, even
    # though the hull of its points can be full-dimensional
    params = kernel_size * (kernel_size + 1) // 2
    out["free_parameters"] = params
    out["image_dimension_deficient"] = params < fs.dim
    if params < fs.dim:
        out["zonotope_volume"] = "0/1"
    if fs.dim <= 3:
        vol = exact_volume(hull)
        out["volume"] = format_rational(vol)
        out["volume_estimate"] = float(vol)
    else:
        from .geometry.volume import bounding_box, hull_oracle, monte_carlo_volume

        est = monte_carlo_volume(hull_oracle(hull), bounding_box(hull), 200_000, seed)
        out["volume_estimate"] = est.estimate
        out["volume_stderr"] = est.stderr
    if host_n is not None and fs.dim <= 3:
        pv = exact_volume(build_polytope(fs, host_n).hull)
        out["host_n"] = host_n
        out["polytope_volume"] = format_rational(pv)
        out["polytope_volume_estimate"] = float(pv)
    return out


# random graphs from G(m, W_M) ---------------------------------------------------


def sample_kernel_graphs(kernel: StepKernel, m: int, count: int, seed: int = 0) -> np.ndarray:
    """Adjacency matrices ``(count, m, m)`` from the two-stage model:
    uniform labels X_i, then edge ij independently with probability W(X_i, X_j)."""
    rng = np.random.default_rng(seed)
    w = kernel.as_float()
    x = rng.random((count, m))
    block = np.minimum((x * kernel.n).astype(int), kernel.n - 1)
    prob = w[block[:, :, None], block[:, None, :]]
    u = rng.random((count, m, m))
    upper = np.triu(u < prob, 1)
    return (upper | upper.transpose(0, 2, 1)).astype(np.int64)


def _graph_counts(adj: np.ndarray, name: str) -> np.ndarray:
    deg = adj.sum(axis=2)
    edges = deg.sum(axis=1) // 2
    if name == "K2":
        return edges
    if name == "P3":
        return (deg * (deg - 1) // 2).sum(axis=1)
    a2 = adj @ adj
    if name == "K3":
        return np.einsum("kij,kji->k", a2, adj) // 6
    if name == "C4":
        tr4 = np.einsum("kij,kji->k", a2, a2)
        return (tr4 - 2 * (deg**2).sum(axis=1) + 2 * edges) // 8
    raise ValueError(f"no closed-form counter for {name}")


def expectation_check(f: Graph, kernel: StepKernel, m: int = 20, count: int = 20_000, seed: int = 0) -> dict:
    """Empirical mean of t(F, G), G ~ G(m, W_M), against t(F, W_M).

    The expectation is exact for every m >= |F| (labels are i.i.d.), so no
    finite-size bias is expected; the band is purely statistical.
    """
    from .graphs import count_in_complete

    name = f.name
    adj = sample_kernel_graphs(kernel, m, count, seed)
    dens = _graph_counts(adj, name) / count_in_complete(f, m)
    exact = p_eval(f, kernel)
    target = float(exact)
    mean = float(dens.mean())
    se = float(dens.std(ddof=1) / np.sqrt(count))
    return {
        "pattern": name,
        "m": m,
        "count": count,
        "mean_estimate": mean,
        "mean_stderr": se,
        "limit": format_rational(exact),
        "limit_estimate": target,
        "z_score_estimate": (mean - target) / se if se else 0.0,
        "ok": abs(mean - target) <= 4 * se,
    }
