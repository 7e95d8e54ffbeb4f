"""scikit-learn style wrappers over the functional core.

These give the usual ``fit`` / ``transform`` / ``predict`` surface (and
``get_params`` / ``set_params`` through ``BaseEstimator``) so that
statistics vectors can be dropped into pipelines. Exact answers stay in
the functional API; the estimators return float arrays except where noted.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .geometry.hull import extreme_points, membership
from .graphs import DENSITY, KINDS, Graph, GraphVector, stat_vector
from .polytope import build_polytope
from .zonotope import zonotope_sample


def check_graph(g) -> Graph:
    """Accept a Graph, a graph6 string or a square 0/1 adjacency matrix."""
    if isinstance(g, Graph):
        return g
    if isinstance(g, (str, bytes)):
        return Graph.from_graph6(g.decode() if isinstance(g, bytes) else g)
    a = np.asarray(g)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"adjacency matrix must be square, got shape {a.shape}")
    if not np.array_equal(a, a.T):
        raise ValueError("adjacency matrix must be symmetric")
    if np.any(np.diag(a)):
        raise ValueError("adjacency matrix must have a zero diagonal")
    if not np.isin(a, (0, 1)).all():
        raise ValueError("adjacency matrix entries must be 0 or 1")
    n = a.shape[0]
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n) if a[i, j]])


def check_graphs(X: Iterable) -> list[Graph]:
    graphs = [check_graph(g) for g in X]
    if not graphs:
        raise ValueError("need at least one graph")
    return graphs


def check_vector(patterns) -> GraphVector:
    if isinstance(patterns, GraphVector):
        return patterns
    if isinstance(patterns, str):
        return GraphVector.parse(patterns)
    return GraphVector(tuple(check_graph(p) if not isinstance(p, Graph) else p for p in patterns))


def check_points(X, dim: int) -> list[tuple[Fraction, ...]]:
    """Rows of X as exact points; floats are converted exactly (no rounding)."""
    rows = [tuple(Fraction(x) for x in row) for row in X]
    if any(len(r) != dim for r in rows):
        raise ValueError(f"points must have {dim} coordinates")
    return rows


class SubgraphStatisticsTransformer(TransformerMixin, BaseEstimator):
    """Graphs to statistics vectors ``t(F, G)`` (or raw counts for ``kind='lattice'``)."""

    def __init__(self, patterns="K2,K3", kind: str = DENSITY):
        self.patterns = patterns
        self.kind = kind

    def fit(self, X=None, y=None):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        self.vector_ = check_vector(self.patterns)
        self.n_features_out_ = self.vector_.dim
        return self

    def transform_exact(self, X) -> list[tuple[Fraction, ...]]:
        check_is_fitted(self, "vector_")
        return [stat_vector(self.vector_, g, self.kind).values for g in check_graphs(X)]

    def transform(self, X) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.transform_exact(X)], dtype=float)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "vector_")
        return np.array([f"t_{label}" for label in self.vector_.labels()], dtype=object)


class StatisticsPolytopeEstimator(BaseEstimator):
    """Convex hull of statistics vectors; ``predict`` is exact membership.

    ``fit(X)`` with graphs takes the hull of their statistics; ``fit()``
    without data builds the exhaustive polytope P_{F;n}.
    """

    def __init__(self, patterns="K2,K3", n: int | None = None, kind: str = DENSITY):
        self.patterns = patterns
        self.n = n
        self.kind = kind

    def fit(self, X=None, y=None):
        fs = check_vector(self.patterns)
        if X is None:
            if self.n is None:
                raise ValueError("either graphs or a host size n is required")
            poly = build_polytope(fs, self.n, self.kind)
            self.hull_ = poly.hull
        else:
            pts = [stat_vector(fs, g, self.kind).values for g in check_graphs(X)]
            self.hull_ = extreme_points(pts)
        self.vector_ = fs
        self.vertices_ = np.array([[float(x) for x in v] for v in self.hull_.vertices], dtype=float)
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "hull_")
        pts = check_points(X, self.vector_.dim)
        return np.array([membership(p, self.hull_).inside for p in pts], dtype=bool)

    def score(self, X, y=None) -> float:
        """Fraction of points inside the hull."""
        return float(np.mean(self.predict(X)))


class CurvyZonotopeSampler(BaseEstimator):
    """Seeded samples ``t(F, W_M)`` over random stepfunction kernels."""

    def __init__(self, patterns="K3,C4,K4-e", kernel_size: int = 2, count: int = 100, seed: int = 0):
        self.patterns = patterns
        self.kernel_size = kernel_size
        self.count = count
        self.seed = seed

    def fit(self, X=None, y=None):
        self.sample_ = zonotope_sample(check_vector(self.patterns), self.kernel_size, self.count, self.seed)
        self.points_ = self.sample_.float_points()
        return self

    def sample(self) -> np.ndarray:
        return self.fit().points_
