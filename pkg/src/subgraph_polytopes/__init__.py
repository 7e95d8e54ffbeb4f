"""Exact polytopes of subgraph statistics.

The functional core lives in the submodules (``graphs``, ``geometry``,
``polytope``, ``spine``, ``zonotope``, ``certificates``, ``limits``);
``estimators`` wraps it in a scikit-learn style API and ``cli`` exposes
it on the command line.
"""

from .graphs import Graph, GraphVector, stat_vector
from .polytope import SubgraphPolytope, build_polytope

__version__ = "0.1.0"

__all__ = ["Graph", "GraphVector", "SubgraphPolytope", "build_polytope", "stat_vector", "__version__"]
