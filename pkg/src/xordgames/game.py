"""Labeled game graphs: vertices are questions, edges are jointly measurable
pairs, and each edge carries either a color ``i`` (winning constraint
``a + b = i mod d``, i.e. ``b = pi_i(a)``) or is gray (commutation only).

Also holds the plain-text game file format::

    xordgame <d> <n>
    bipartite <k>          # optional: vertices 0..k-1 vs k..n-1
    edge <u> <v> <c>       # c in 0..d-1
    edge <u> <v> gray
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgument, InvalidGame, InvalidParameter, ParseError, ResourceLimit
from .perms import Permutation, ld_perm

GRAY = None


def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class LabeledGameGraph:
    """An XOR-d game ``(G, K)``.

    ``edges`` is a sorted tuple of ``(u, v, label)`` with ``u < v``; label is
    a color index or ``GRAY`` (None).  ``bipartition``, when present, is
    ``(left, right)`` and every edge must cross it.  The input distribution
    is uniform over colored edges.
    """

    n: int
    d: int
    edges: tuple[tuple[int, int, int | None], ...]
    bipartition: tuple[frozenset, frozenset] | None = None
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise InvalidParameter(f"vertex count must be a nonnegative integer, got {self.n!r}")
        if int(self.d) != self.d or self.d < 1:
            raise InvalidParameter(f"outcome count must be a positive integer, got {self.d!r}")
        index = {}
        norm = []
        for e in self.edges:
            u, v, c = int(e[0]), int(e[1]), e[2]
            if u == v:
                raise InvalidArgument(f"loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidArgument(f"edge ({u}, {v}) out of range for n={self.n}")
            key = _edge_key(u, v)
            if key in index:
                raise InvalidArgument(f"duplicate edge {key}")
            if c is not GRAY:
                c = int(c)
                if not 0 <= c < self.d:
                    raise InvalidArgument(f"color {c} out of range for d={self.d}")
            index[key] = c
            norm.append((key[0], key[1], c))
        norm.sort(key=lambda e: (e[0], e[1]))
        object.__setattr__(self, "edges", tuple(norm))
        object.__setattr__(self, "_index", index)
        if self.bipartition is not None:
            left, right = (frozenset(int(x) for x in s) for s in self.bipartition)
            if left & right or (left | right) != frozenset(range(self.n)):
                raise InvalidArgument("bipartition must split the vertex set")
            for u, v, _ in norm:
                if (u in left) == (v in left):
                    raise InvalidArgument(f"edge ({u}, {v}) does not cross the bipartition")
            object.__setattr__(self, "bipartition", (left, right))

    # construction helpers
    @classmethod
    def from_edges(cls, n, d, edges, bipartition=None) -> "LabeledGameGraph":
        return cls(n, d, tuple(tuple(e) for e in edges), bipartition)

    @classmethod
    def single_color(cls, n, pairs, d=2, color=1, bipartition=None) -> "LabeledGameGraph":
        """Every edge in ``pairs`` gets the same color (default: d=2 anti-correlation)."""
        return cls(n, d, tuple((u, v, color) for u, v in pairs), bipartition)

    def with_labels(self, labels: Sequence) -> "LabeledGameGraph":
        """Same graph with new labels, given in edge order."""
        if len(labels) != len(self.edges):
            raise InvalidArgument("label count does not match edge count")
        return LabeledGameGraph(self.n, self.d,
                                tuple((u, v, c) for (u, v, _), c in zip(self.edges, labels)),
                                self.bipartition)

    def relabel_vertices(self, perm: Sequence[int]) -> "LabeledGameGraph":
        """Vertex ``x`` becomes ``perm[x]``."""
        bip = None
        if self.bipartition is not None:
            bip = tuple(frozenset(perm[x] for x in s) for s in self.bipartition)
        return LabeledGameGraph(self.n, self.d,
                                tuple((perm[u], perm[v], c) for u, v, c in self.edges), bip)

    # queries
    def label(self, u: int, v: int):
        """Label of edge {u, v}; KeyError if absent."""
        return self._index[_edge_key(u, v)]

    def has_edge(self, u: int, v: int) -> bool:
        return _edge_key(u, v) in self._index

    def perm(self, u: int, v: int) -> Permutation:
        c = self.label(u, v)
        if c is GRAY:
            raise InvalidArgument(f"edge ({u}, {v}) is gray")
        return ld_perm(c, self.d)

    @property
    def colored_edges(self) -> list[tuple[int, int, int]]:
        return [e for e in self.edges if e[2] is not GRAY]

    @property
    def gray_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v, c in self.edges if c is GRAY]

    @property
    def colored_edge_count(self) -> int:
        return sum(1 for e in self.edges if e[2] is not GRAY)

    @property
    def labels(self) -> tuple:
        return tuple(c for _, _, c in self.edges)

    def is_total(self) -> bool:
        return all(c is not GRAY for _, _, c in self.edges)

    def pairs(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v, _ in self.edges]

    def commutation_pairs(self) -> list[tuple[int, int]]:
        """Edges of the commutation graph: every edge plus, for Bell games, every
        Alice/Bob pair."""
        pairs = set(self._index)
        if self.bipartition is not None:
            left, right = self.bipartition
            pairs.update(_edge_key(u, v) for u in left for v in right)
        return sorted(pairs)

    def colored_subgraph(self) -> "LabeledGameGraph":
        return LabeledGameGraph(self.n, self.d, tuple(self.colored_edges), self.bipartition)

    def neighbors(self, colored_only=False) -> list[list[int]]:
        adj = [[] for _ in range(self.n)]
        for u, v, c in self.edges:
            if colored_only and c is GRAY:
                continue
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def is_connected(self, colored_only=False) -> bool:
        if self.n == 0:
            return True
        adj = self.neighbors(colored_only)
        seen, stack = {0}, [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def require_colored(self):
        if self.colored_edge_count == 0:
            raise InvalidGame("game has no colored edge")

    def __str__(self):
        return format_game(self)


def evaluate_assignment(g: LabeledGameGraph, values: Sequence[int]) -> tuple[int, int]:
    """Return ``(satisfied, contradictions)`` over the colored edges."""
    if len(values) != g.n:
        raise InvalidArgument(f"assignment has length {len(values)}, expected {g.n}")
    sat = 0
    total = 0
    for u, v, c in g.edges:
        if c is GRAY:
            continue
        total += 1
        if (values[u] + values[v]) % g.d == c:
            sat += 1
    return sat, total - sat


def count_consistent_assignments(g: LabeledGameGraph, limit: int = 2_000_000) -> int:
    """Number of assignments with zero contradictions, by plain enumeration."""
    if g.d ** g.n > limit:
        raise ResourceLimit(f"{g.d}^{g.n} assignments exceed the enumeration limit")
    return sum(1 for vals in itertools.product(range(g.d), repeat=g.n)
               if evaluate_assignment(g, vals)[1] == 0)


@dataclass(frozen=True)
class SuperQuantumBox:
    """Conditional distributions ``P(a, b | x, y)`` on the colored edges."""

    d: int
    tables: dict  # (u, v) -> d x d array indexed [a_u, b_v]

    def marginal(self, x: int, context: tuple[int, int]) -> np.ndarray:
        t = self.tables[context]
        return t.sum(axis=1) if context[0] == x else t.sum(axis=0)

    def is_consistent(self, atol=1e-12) -> bool:
        """Every vertex marginal is independent of the edge it is read from,
        and every table is a probability distribution."""
        margins: dict[int, np.ndarray] = {}
        for (u, v), t in self.tables.items():
            if t.min() < -atol or abs(t.sum() - 1) > atol:
                return False
            for x in (u, v):
                m = self.marginal(x, (u, v))
                if x in margins and not np.allclose(margins[x], m, atol=atol):
                    return False
                margins.setdefault(x, m)
        return True


def super_quantum_value(g: LabeledGameGraph) -> tuple[Fraction, SuperQuantumBox]:
    """Unnormalized super-quantum value and the maximally correlated box attaining it."""
    g.require_colored()
    d = g.d
    tables = {}
    for u, v, c in g.colored_edges:
        t = np.zeros((d, d))
        for a in range(d):
            t[a, (c - a) % d] = 1.0 / d
        tables[(u, v)] = t
    box = SuperQuantumBox(d, tables)
    # each colored edge wins with d outcomes of probability 1/d
    value = sum((Fraction(1, d) for _ in g.colored_edges for _a in range(d)), Fraction(0))
    return value, box


# ---------------------------------------------------------------- file format

def parse_game(text: str) -> LabeledGameGraph:
    header = None
    bip_k = None
    edges = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        col = raw.find(tok[0]) + 1
        if header is None:
            if tok[0] != "xordgame" or len(tok) != 3:
                raise ParseError("expected header 'xordgame <d> <n>'", lineno, col)
            try:
                d, n = int(tok[1]), int(tok[2])
            except ValueError:
                raise ParseError("d and n must be integers", lineno, col) from None
            if d < 1 or n < 0:
                raise ParseError("d must be >= 1 and n >= 0", lineno, col)
            header = (d, n)
            continue
        d, n = header
        if tok[0] == "bipartite":
            if bip_k is not None or edges:
                raise ParseError("'bipartite' must appear once, before any edge", lineno, col)
            if len(tok) != 2 or not tok[1].lstrip("-").isdigit() or not 0 <= int(tok[1]) <= n:
                raise ParseError("expected 'bipartite <k>' with 0 <= k <= n", lineno, col)
            bip_k = int(tok[1])
        elif tok[0] == "edge":
            if len(tok) == 3 and d == 1:
                tok = tok + ["0"]
            if len(tok) != 4:
                raise ParseError("expected 'edge <u> <v> <color|gray>'", lineno, col)
            try:
                u, v = int(tok[1]), int(tok[2])
            except ValueError:
                raise ParseError("vertex indices must be integers", lineno, raw.find(tok[1]) + 1) from None
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(f"vertex out of range 0..{n - 1}", lineno, raw.find(tok[1]) + 1)
            if u == v:
                raise ParseError(f"loop at vertex {u}", lineno, col)
            key = _edge_key(u, v)
            if key in seen:
                raise ParseError(f"duplicate edge {key} (first on line {seen[key]})", lineno, col)
            seen[key] = lineno
            lab_col = raw.rfind(tok[3]) + 1
            if tok[3] == "gray":
                c = GRAY
            else:
                try:
                    c = int(tok[3])
                except ValueError:
                    raise ParseError(f"bad label {tok[3]!r}", lineno, lab_col) from None
                if not 0 <= c < d:
                    raise ParseError(f"color {c} out of range 0..{d - 1}", lineno, lab_col)
            if bip_k is not None and (u < bip_k) == (v < bip_k):
                raise ParseError(f"edge ({u}, {v}) does not cross the bipartition", lineno, col)
            edges.append((u, v, c))
        else:
            raise ParseError(f"unknown record {tok[0]!r}", lineno, col)
    if header is None:
        raise ParseError("missing 'xordgame' header", 1, 1)
    d, n = header
    bip = None
    if bip_k is not None:
        bip = (frozenset(range(bip_k)), frozenset(range(bip_k, n)))
    return LabeledGameGraph(n, d, tuple(edges), bip)


def format_game(g: LabeledGameGraph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend("# " + c for c in comment.splitlines())
    lines.append(f"xordgame {g.d} {g.n}")
    if g.bipartition is not None:
        left, _ = g.bipartition
        if left != frozenset(range(len(left))):
            raise InvalidArgument("file format needs Alice's vertices to be 0..k-1")
        lines.append(f"bipartite {len(left)}")
    for u, v, c in g.edges:
        if g.d == 1 and c is not GRAY:
            lines.append(f"edge {u} {v}")
        else:
            lines.append(f"edge {u} {v} {'gray' if c is GRAY else c}")
    return "\n".join(lines) + "\n"


def read_game(path) -> LabeledGameGraph:
    return parse_game(Path(path).read_text())


def write_game(g: LabeledGameGraph, path, comment=None) -> None:
    Path(path).write_text(format_game(g, comment))


# ---------------------------------------------------------------- small builders

def cycle_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, (i + 1) % n) for i in range(n)]


def complete_pairs(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def complete_bipartite_pairs(s: int, t: int) -> list[tuple[int, int]]:
    return [(u, s + v) for u in range(s) for v in range(t)]


def chsh() -> LabeledGameGraph:
    """CHSH: Alice 0,1 and Bob 2,3, anti-correlation only on (1, 3)."""
    return LabeledGameGraph.from_edges(
        4, 2, [(0, 2, 0), (0, 3, 0), (1, 2, 0), (1, 3, 1)],
        bipartition=({0, 1}, {2, 3}))


def chained_bell(m: int, d: int = 2) -> LabeledGameGraph:
    """Braunstein-Caves chain with ``m`` settings per party: a colored 2m-cycle
    alternating between the parties, closed with one anti-correlated link; the
    remaining Alice/Bob pairs are gray."""
    # Alice 0..m-1, Bob m..2m-1; cycle a0 b0 a1 b1 ... a_{m-1} b_{m-1} a0
    colored = {}
    for k in range(m):
        colored[_edge_key(k, m + k)] = 0
        colored[_edge_key(m + k, (k + 1) % m)] = 0
    colored[_edge_key(2 * m - 1, 0)] = 1
    edges = []
    for u in range(m):
        for v in range(m, 2 * m):
            edges.append((u, v, colored.get((u, v), GRAY)))
    return LabeledGameGraph.from_edges(2 * m, d, edges,
                                       bipartition=(set(range(m)), set(range(m, 2 * m))))
