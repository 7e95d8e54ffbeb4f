"""Small labeled graphs, exhaustive enumeration and exact subgraph counting.

Graphs are stored as a tuple of neighbourhood bitmasks, one per vertex.
Everything here is exact: counts are Python ints and densities are
``fractions.Fraction``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Iterator, Sequence

from .exceptions import CapacityError, HypothesisError, PatternParseError

MAX_PATTERN_ORDER = 10
MAX_ENUMERATION_ORDER = 7
MAX_AUTOMORPHISM_ORDER = 8

LATTICE = "lattice"
DENSITY = "density"
KINDS = (LATTICE, DENSITY)


def pair_index(n: int) -> list[tuple[int, int]]:
    """Vertex pairs ``(i, j)``, ``i < j``, in lexicographic order.

    Bit ``k`` of an edge mask refers to ``pair_index(n)[k]``.
    """
    return list(itertools.combinations(range(n), 2))


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_PATTERN_ORDER:
            raise CapacityError(f"graphs must have 1..{MAX_PATTERN_ORDER} vertices, got {self.n}")
        if len(self.adj) != self.n:
            raise ValueError("adjacency length does not match vertex count")
        full = (1 << self.n) - 1
        for i, row in enumerate(self.adj):
            if row & ~full or row >> i & 1:
                raise ValueError(f"invalid adjacency row for vertex {i}")
            for j in range(self.n):
                if row >> j & 1 and not self.adj[j] >> i & 1:
                    raise ValueError("adjacency is not symmetric")

    # construction -----------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], name: str = "") -> Graph:
        if not 1 <= n <= MAX_PATTERN_ORDER:
            raise CapacityError(f"graphs must have 1..{MAX_PATTERN_ORDER} vertices, got {n}")
        adj = [0] * n
        for i, j in edges:
            if i == j:
                raise ValueError("loops are not allowed")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for {n} vertices")
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return cls(n, tuple(adj), name)

    @classmethod
    def from_edge_mask(cls, n: int, mask: int) -> Graph:
        pairs = pair_index(n)
        return cls.from_edges(n, (pairs[k] for k in range(len(pairs)) if mask >> k & 1))

    @classmethod
    def from_graph6(cls, text: str) -> Graph:
        return from_graph6(text)

    # queries ----------------------------------------------------------------

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.adj[i] >> j & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in pair_index(self.n) if self.adj[i] >> j & 1]

    @property
    def num_edges(self) -> int:
        return sum(bin(row).count("1") for row in self.adj) // 2

    def degree(self, v: int) -> int:
        return bin(self.adj[v]).count("1")

    @property
    def edge_mask(self) -> int:
        mask = 0
        for k, (i, j) in enumerate(pair_index(self.n)):
            if self.adj[i] >> j & 1:
                mask |= 1 << k
        return mask

    def isolated_vertices(self) -> list[int]:
        return [v for v in range(self.n) if self.adj[v] == 0]

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return Graph.from_edges(self.n, ((perm[i], perm[j]) for i, j in self.edges()))

    def induced(self, vertices: Sequence[int]) -> Graph:
        index = {v: k for k, v in enumerate(vertices)}
        return Graph.from_edges(
            len(vertices),
            ((index[i], index[j]) for i, j in self.edges() if i in index and j in index),
        )

    def add_isolated(self, count: int) -> Graph:
        return Graph.from_edges(self.n + count, self.edges(), self.name and f"{self.name}+{count}K1")

    def to_graph6(self) -> str:
        return to_graph6(self)

    def label(self) -> str:
        return self.name or self.to_graph6()

    def __repr__(self):
        return f"Graph({self.label()!r}, n={self.n}, m={self.num_edges})"


# graph6 ---------------------------------------------------------------------


def to_graph6(g: Graph) -> str:
    """Encode ``g`` in graph6 (upper triangle, column by column)."""
    bits = [1 if g.has_edge(i, j) else 0 for j in range(1, g.n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    out = [chr(63 + g.n)]
    for k in range(0, len(bits), 6):
        value = 0
        for b in bits[k:k + 6]:
            value = value << 1 | b
        out.append(chr(63 + value))
    return "".join(out)


def from_graph6(text: str) -> Graph:
    text = text.strip()
    if text.startswith(">>graph6<<"):
        text = text[10:]
    if not text:
        raise PatternParseError("empty graph6 string", text, 0)
    for pos, ch in enumerate(text):
        if not 63 <= ord(ch) <= 126:
            raise PatternParseError("invalid graph6 character", text, pos)
    n = ord(text[0]) - 63
    if n > 62:
        raise CapacityError("graph6 large-order prefix is not supported")
    need = n * (n - 1) // 2
    data = text[1:]
    if len(data) != (need + 5) // 6:
        raise PatternParseError("graph6 payload has wrong length", text, 1)
    bits = []
    for ch in data:
        value = ord(ch) - 63
        bits.extend((value >> s) & 1 for s in range(5, -1, -1))
    pairs = [(i, j) for j in range(1, n) for i in range(j)]
    return Graph.from_edges(n, (p for p, b in zip(pairs, bits) if b))


# named graphs ---------------------------------------------------------------


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, pair_index(n), f"K{n}")


def empty_graph(n: int) -> Graph:
    return Graph.from_edges(n, (), f"E{n}")


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycles need at least 3 vertices")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)), f"C{n}")


def path_graph(n: int) -> Graph:
    """Path on ``n`` vertices (``n - 1`` edges)."""
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)), f"P{n}")


def complete_minus_edge(n: int) -> Graph:
    return Graph.from_edges(n, pair_index(n)[1:], f"K{n}-e")


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, ((i, a + j) for i in range(a) for j in range(b)), f"K{a},{b}")


def turan_graph(k: int, n: int) -> Graph:
    """Complete ``k``-partite graph on ``n`` vertices with balanced parts."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    part = [v % k for v in range(n)]
    return Graph.from_edges(
        n, ((i, j) for i, j in pair_index(n) if part[i] != part[j]), f"T({k},{n})"
    )


_SHORTHAND = re.compile(r"K(\d+)-e|K(\d+),(\d+)|K(\d+)|C(\d+)|P(\d+)|E(\d+)")


def parse_pattern(text: str) -> Graph:
    """Parse one shorthand (``K4``, ``C5``, ``P3``, ``K4-e``, ``K2,3``, ``E3``)
    or a graph6 string prefixed by ``g6:``."""
    token = text.strip()
    if token.startswith("g6:"):
        return from_graph6(token[3:])
    m = _SHORTHAND.fullmatch(token)
    if not m:
        raise PatternParseError("unknown pattern shorthand", text, 0)
    minus, a, b, kn, cn, pn, en = m.groups()
    if minus:
        return complete_minus_edge(int(minus))
    if a:
        return complete_bipartite(int(a), int(b))
    if kn:
        return complete_graph(int(kn))
    if cn:
        return cycle_graph(int(cn))
    if pn:
        return path_graph(int(pn))
    return empty_graph(int(en))


def parse_pattern_list(text: str) -> list[Graph]:
    """Comma separated shorthands; a bare integer continues ``K<a>,<b>``."""
    pieces = text.split(",")
    tokens: list[tuple[str, int]] = []
    pos = 0
    for piece in pieces:
        if piece.strip().isdigit() and tokens and re.fullmatch(r"\s*K\d+\s*", tokens[-1][0]):
            prev, start = tokens.pop()
            tokens.append((prev + "," + piece, start))
        else:
            tokens.append((piece, pos))
        pos += len(piece) + 1
    graphs = []
    for token, start in tokens:
        if not token.strip():
            raise PatternParseError("empty pattern", text, start)
        try:
            graphs.append(parse_pattern(token))
        except PatternParseError as exc:
            raise PatternParseError("unknown pattern shorthand", text, start + exc.position) from None
    return graphs


# counting -------------------------------------------------------------------


def _search_order(f: Graph) -> list[int]:
    # connected-first ordering so every later vertex has an earlier neighbour when possible
    remaining = set(range(f.n))
    order: list[int] = []
    while remaining:
        start = max(remaining, key=lambda v: (f.degree(v), -v))
        order.append(start)
        remaining.discard(start)
        while True:
            frontier = [v for v in remaining if any(f.has_edge(v, u) for u in order)]
            if not frontier:
                break
            nxt = max(frontier, key=lambda v: (sum(f.has_edge(v, u) for u in order), f.degree(v), -v))
            order.append(nxt)
            remaining.discard(nxt)
    return order


def count_embeddings(f: Graph, g: Graph) -> int:
    """Number of injective maps V(f) -> V(g) sending edges to edges."""
    if f.n > g.n:
        return 0
    order = _search_order(f)
    back = [[order.index(u) for u in order[:k] if f.has_edge(order[k], u)] for k in range(f.n)]
    need = [f.degree(v) for v in order]
    deg_g = [g.degree(v) for v in range(g.n)]
    full = (1 << g.n) - 1
    image = [0] * f.n

    def extend(k: int, used: int) -> int:
        if k == f.n:
            return 1
        cand = full & ~used
        for idx in back[k]:
            cand &= g.adj[image[idx]]
        total = 0
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            if deg_g[v] < need[k]:
                continue
            image[k] = v
            total += extend(k + 1, used | low)
        return total

    return extend(0, 0)


@lru_cache(maxsize=None)
def automorphism_count(f: Graph) -> int:
    """|Aut(f)| by backtracking over adjacency-preserving bijections."""
    if f.n > MAX_AUTOMORPHISM_ORDER:
        raise CapacityError(f"automorphism search supports at most {MAX_AUTOMORPHISM_ORDER} vertices")
    return count_embeddings(f, f)


def count_subgraphs(f: Graph, g: Graph) -> int:
    """t^L(f, g): number of subgraphs of ``g`` isomorphic to ``f``."""
    if f.n > g.n:
        return 0
    return count_embeddings(f, g) // automorphism_count(f)


def count_in_complete(f: Graph, m: int) -> int:
    """t^L(f, K_m) = |f|! / |Aut f| * C(m, |f|)."""
    if f.n > m:
        return 0
    return factorial(f.n) // automorphism_count(f) * comb(m, f.n)


def density(f: Graph, g: Graph) -> Fraction:
    """t(f, g) = t^L(f, g) / t^L(f, K_|g|), and 0 when f has more vertices."""
    total = count_in_complete(f, g.n)
    if total == 0:
        return Fraction(0)
    return Fraction(count_subgraphs(f, g), total)


def is_isomorphic(a: Graph, b: Graph) -> bool:
    return a.n == b.n and a.num_edges == b.num_edges and count_embeddings(a, b) > 0


def is_subgraph(a: Graph, b: Graph) -> bool:
    """Whether ``b`` contains a (not necessarily induced) copy of ``a``."""
    return a.n <= b.n and a.num_edges <= b.num_edges and count_embeddings(a, b) > 0


def enumerate_labeled_graphs(n: int) -> Iterator[Graph]:
    """All 2^(n(n-1)/2) labeled graphs on ``n`` vertices, ordered by edge mask."""
    if not 1 <= n <= MAX_ENUMERATION_ORDER:
        raise CapacityError(f"exhaustive enumeration supports 1..{MAX_ENUMERATION_ORDER} vertices, got {n}")
    for mask in range(1 << (n * (n - 1) // 2)):
        yield Graph.from_edge_mask(n, mask)


# vectors of patterns ----------------------------------------------------------


@dataclass(frozen=True)
class GraphVector:
    """Ordered tuple of pairwise non-isomorphic patterns, each with an edge."""

    patterns: tuple[Graph, ...]
    allow_isolated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(self.patterns))
        if not self.patterns:
            raise ValueError("a graph vector needs at least one pattern")
        for f in self.patterns:
            if f.num_edges == 0:
                raise ValueError(f"pattern {f.label()} has no edges")
            if f.isolated_vertices() and not self.allow_isolated:
                raise ValueError(f"pattern {f.label()} has isolated vertices")
        for a, b in itertools.combinations(self.patterns, 2):
            if is_isomorphic(a, b):
                raise ValueError(f"patterns {a.label()} and {b.label()} are isomorphic")

    @classmethod
    def parse(cls, text: str, allow_isolated: bool = False) -> GraphVector:
        return cls(tuple(parse_pattern_list(text)), allow_isolated)

    @property
    def dim(self) -> int:
        return len(self.patterns)

    @property
    def edge_counts(self) -> tuple[int, ...]:
        return tuple(f.num_edges for f in self.patterns)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(f.n for f in self.patterns)

    @property
    def max_order(self) -> int:
        return max(self.orders)

    def labels(self) -> list[str]:
        return [f.label() for f in self.patterns]

    def __len__(self):
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def __str__(self):
        return ",".join(self.labels())


def pad_to_order(fs: GraphVector, order: int | None = None) -> GraphVector:
    """Add isolated vertices so every pattern has the same order.

    Only for deliberate use with the equal-order Ehrhart comparison.
    """
    order = order or fs.max_order
    if order < fs.max_order:
        raise HypothesisError("cannot pad patterns to a smaller order")
    return GraphVector(tuple(f.add_isolated(order - f.n) if f.n < order else f for f in fs), allow_isolated=True)


@dataclass(frozen=True)
class StatVector:
    values: tuple[Fraction, ...]
    kind: str
    witness: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        vals = tuple(Fraction(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.kind == DENSITY and any(not 0 <= v <= 1 for v in vals):
            raise ValueError("density statistics must lie in [0, 1]")
        if self.kind == LATTICE and any(v < 0 or v.denominator != 1 for v in vals):
            raise ValueError("lattice statistics must be non-negative integers")

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def stat_vector(fs: GraphVector | Sequence[Graph], g: Graph, kind: str = DENSITY) -> StatVector:
    patterns = fs.patterns if isinstance(fs, GraphVector) else tuple(fs)
    if kind == LATTICE:
        values = tuple(Fraction(count_subgraphs(f, g)) for f in patterns)
    elif kind == DENSITY:
        values = tuple(density(f, g) for f in patterns)
    else:
        raise ValueError(f"kind must be one of {KINDS}")
    return StatVector(values, kind, g.to_graph6())
