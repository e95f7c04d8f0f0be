"""Switching equivalence of labeled game graphs.

Switching vertex ``v`` with ``sigma`` relabels the outcomes of ``v``.  Read
from ``v``'s side an incident constraint ``pi`` becomes ``pi o sigma``; for
the shifts ``sigma_k(a) = a + k`` this turns color ``c`` into ``c - k``.
Switchings at different vertices commute, so a sequence of shift switchings
is a vector ``t`` over Z_d acting by ``c_uv -> c_uv - t_u - t_v``.

Two games are equivalent when a vertex bijection plus switchings maps one
onto the other.  Equivalence is decided two independent ways: by
isomorphism of the permutation cover ``KG`` and by comparing canonical
orbit representatives.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidArgument, ResourceLimit, Unsupported
from .game import GRAY, LabeledGameGraph, count_consistent_assignments
from .graphs import (adjacency, canonical_labelings, connected_components,
                     find_isomorphism)
from .perms import Permutation, ld_index, ld_perm, shift_perm


@dataclass(frozen=True)
class SwitchOp:
    vertex: int
    sigma: Permutation

    @classmethod
    def shift(cls, vertex: int, k: int, d: int) -> "SwitchOp":
        return cls(vertex, shift_perm(k, d))


def switch(g: LabeledGameGraph, op: SwitchOp) -> LabeledGameGraph:
    """Apply ``s(v, sigma)``: every colored edge at ``v`` gets ``pi o sigma``
    (read from ``v``); gray edges are untouched."""
    v = op.vertex
    if not 0 <= v < g.n:
        raise InvalidArgument(f"vertex {v} out of range for n={g.n}")
    if op.sigma.d != g.d:
        raise InvalidArgument("switching permutation acts on the wrong outcome set")
    new = []
    for a, b, c in g.edges:
        if c is not GRAY and v in (a, b):
            p = ld_perm(c, g.d) @ op.sigma
            c2 = ld_index(p)
            if c2 is None:
                raise Unsupported(f"switching by {op.sigma} leaves the XOR-d class on edge ({a}, {b})")
            c = c2
        new.append((a, b, c))
    return LabeledGameGraph(g.n, g.d, tuple(new), g.bipartition)


def switch_by_shifts(g: LabeledGameGraph, t: Sequence[int]) -> LabeledGameGraph:
    """Switch every vertex ``v`` by ``sigma_{t[v]}`` at once."""
    if len(t) != g.n:
        raise InvalidArgument("shift vector length must equal n")
    d = g.d
    return LabeledGameGraph(g.n, d, tuple(
        (u, v, c if c is GRAY else (c - t[u] - t[v]) % d) for u, v, c in g.edges), g.bipartition)


# ---------------------------------------------------------------- KG cover

@dataclass(frozen=True)
class KGGraph:
    """Permutation cover: vertex ``(i, s)`` has index ``i * d + s``; ``(i, s)``
    and ``(j, t)`` are adjacent iff ``{i, j}`` is colored and ``pi_ij(s) = t``."""

    base: LabeledGameGraph
    edges: tuple[tuple[int, int], ...]

    @property
    def d(self) -> int:
        return self.base.d

    @property
    def n_vertices(self) -> int:
        return self.base.n * self.base.d

    def vertex(self, index: int) -> tuple[int, int]:
        return divmod(index, self.d)

    def index(self, i: int, s: int) -> int:
        return i * self.d + s

    def adjacency(self) -> list[list[int]]:
        return adjacency(self.n_vertices, self.edges)

    def neighbors(self) -> list[list[int]]:
        nb = [[] for _ in range(self.n_vertices)]
        for a, b in self.edges:
            nb[a].append(b)
            nb[b].append(a)
        return nb

    def components(self) -> list[list[int]]:
        return connected_components(self.n_vertices, self.neighbors())

    def to_game(self) -> LabeledGameGraph:
        """The cover as a plain graph (d=1, every edge color 0)."""
        return LabeledGameGraph(self.n_vertices, 1, tuple((a, b, 0) for a, b in self.edges))


def build_kg(g: LabeledGameGraph) -> KGGraph:
    d = g.d
    edges = []
    for i, j, c in g.colored_edges:
        for s in range(d):
            edges.append((i * d + s, j * d + (c - s) % d))
    edges.sort()
    return KGGraph(g, tuple(edges))


def assignment_number(g: LabeledGameGraph) -> int:
    """Number of components of KG isomorphic to G (= consistent assignments)."""
    if not g.is_total():
        raise InvalidArgument("assignment number is defined for games without gray edges")
    if not g.is_connected():
        raise Unsupported("assignment number needs a connected graph")
    kg = build_kg(g)
    base_adj = adjacency(g.n, g.pairs())
    count = 0
    for comp in kg.components():
        if len(comp) != g.n:
            continue
        pos = {v: k for k, v in enumerate(comp)}
        sub = [(pos[a], pos[b]) for a, b in kg.edges if a in pos]
        if find_isomorphism(g.n, base_adj, g.n, adjacency(g.n, sub)) is not None:
            count += 1
    brute = count_consistent_assignments(g)
    if brute != count:
        raise AssertionError(f"KG component count {count} disagrees with brute force {brute}")
    return count


# ---------------------------------------------------------------- canonical forms

def _structure_adjacency(g: LabeledGameGraph):
    """Edge-typed commutation graph: 1 = colored, 2 = gray (explicit or implied
    by the bipartition)."""
    adj = [[0] * g.n for _ in range(g.n)]
    for u, v in g.commutation_pairs():
        adj[u][v] = adj[v][u] = 2
    for u, v, c in g.colored_edges:
        adj[u][v] = adj[v][u] = 1
    return adj


def units(d: int) -> list[int]:
    """Multipliers ``u`` with ``gcd(u, d) = 1``; ``a -> u a`` maps L_d onto itself."""
    return [u for u in range(1, d) if math.gcd(u, d) == 1] if d > 1 else [0]


def _normalize_switching(n, d, colored, scale):
    """Switching normal form of a colored edge list on a fixed vertex order.

    ``colored`` is a sorted list of ``(u, v, c)``.  Per colored component a
    BFS tree from the smallest vertex is switched to color 0; the remaining
    freedom (the root shift, and the outcome scaling when ``scale`` is set)
    is fixed by taking the lexicographically smallest color sequence.
    Returns ``(colors, mult)`` with ``colors`` in edge order and the
    per-vertex multiplier that was used.
    """
    nb = [[] for _ in range(n)]
    for k, (u, v, c) in enumerate(colored):
        nb[u].append((v, k))
        nb[v].append((u, k))
    for lst in nb:
        lst.sort()
    out = [0] * len(colored)
    mult = [1] * n
    seen = [False] * n
    mults = units(d) if scale else [1]
    for root in range(n):
        if seen[root]:
            continue
        order, parent = [root], {root: None}
        seen[root] = True
        q = 0
        while q < len(order):
            u = order[q]
            q += 1
            for w, k in nb[u]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = (u, k)
                    order.append(w)
        comp_edges = sorted({k for u in order for _, k in nb[u]})
        if not comp_edges:
            continue
        best = None
        for m in mults:
            base = {k: (m * colored[k][2]) % d for k in comp_edges}
            for s in range(d):
                t = {root: s}
                for w in order[1:]:
                    u, k = parent[w]
                    t[w] = (base[k] - t[u]) % d
                vals = tuple((base[k] - t[colored[k][0]] - t[colored[k][1]]) % d for k in comp_edges)
                if best is None or vals < best[0]:
                    best = (vals, m)
        vals, m = best
        for k, val in zip(comp_edges, vals):
            out[k] = val
        for w in order:
            mult[w] = m
    return out, mult


@dataclass(frozen=True)
class CanonicalWitness:
    encoding: bytes
    order: tuple[int, ...]       # order[i] = original vertex at canonical position i


def canonical_witness(g: LabeledGameGraph, scale: bool = True,
                      max_leaves: int = 200_000) -> CanonicalWitness:
    """Canonical orbit representative and the vertex order that reaches it."""
    if g.n > 10 or g.d > 4:
        raise ResourceLimit("canonical forms are limited to n <= 10 and d <= 4")
    adj = _structure_adjacency(g)
    _, orders = canonical_labelings(g.n, adj, max_leaves=max_leaves)
    n, d = g.n, g.d
    best = None
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for order in orders:
        pos = [0] * n
        for i, v in enumerate(order):
            pos[v] = i
        colored = sorted((min(pos[u], pos[v]), max(pos[u], pos[v]), c) for u, v, c in g.colored_edges)
        vals, _ = _normalize_switching(n, d, colored, scale)
        color_at = {(u, v): val for (u, v, _), val in zip(colored, vals)}
        code = bytes(0 if adj[order[i]][order[j]] == 0 else
                     1 if adj[order[i]][order[j]] == 2 else
                     2 + color_at[(i, j)] for i, j in pairs)
        if best is None or code < best[0]:
            best = (code, tuple(order))
    return CanonicalWitness(bytes([n, d]) + best[0], best[1])


def canonical_form(g: LabeledGameGraph, scale: bool = True, max_leaves: int = 200_000) -> bytes:
    """Byte string equal for two games iff they are equivalent.

    The orbit is taken under vertex permutations, shift switchings and, with
    ``scale`` (the default), a unit rescaling ``a -> u a`` of the outcomes on
    each colored component, which is itself a product of switchings and
    keeps every label in L_d.
    """
    return canonical_witness(g, scale, max_leaves).encoding


def canonical_id(g: LabeledGameGraph) -> str:
    return canonical_form(g).hex()


def _has_commutation_only_pairs(g: LabeledGameGraph) -> bool:
    return len(g.commutation_pairs()) != g.colored_edge_count


def equivalent_by_kg(g1: LabeledGameGraph, g2: LabeledGameGraph) -> bool:
    k1, k2 = build_kg(g1), build_kg(g2)
    return find_isomorphism(k1.n_vertices, k1.adjacency(), k2.n_vertices, k2.adjacency()) is not None


def equivalent(g1: LabeledGameGraph, g2: LabeledGameGraph) -> bool:
    """KG isomorphism for total games; canonical orbit comparison otherwise."""
    if g1.d != g2.d:
        raise InvalidArgument("games have different outcome counts")
    if g1.n != g2.n or g1.colored_edge_count != g2.colored_edge_count:
        return False
    if _has_commutation_only_pairs(g1) or _has_commutation_only_pairs(g2):
        return canonical_form(g1) == canonical_form(g2)
    return equivalent_by_kg(g1, g2)


def scale_outcomes(g: LabeledGameGraph, mult: Sequence[int]) -> LabeledGameGraph:
    """Relabel outcomes ``a -> mult[v] a`` at every vertex; colored edges need
    equal multipliers at both ends and their color is scaled."""
    d = g.d
    new = []
    for u, v, c in g.edges:
        if c is not GRAY:
            if mult[u] % d != mult[v] % d:
                raise InvalidArgument(f"unequal multipliers across colored edge ({u}, {v})")
            c = (mult[u] * c) % d
        new.append((u, v, c))
    return LabeledGameGraph(g.n, d, tuple(new), g.bipartition)


@dataclass(frozen=True)
class EquivalenceWitness:
    """``g2 == relabel(switch(scale(g1)), vertex_map)``: first rescale outcomes
    per vertex, then apply the shift switchings in order, then move vertex
    ``v`` to ``vertex_map[v]``."""

    vertex_map: tuple[int, ...]
    multipliers: tuple[int, ...]
    ops: tuple[SwitchOp, ...]

    def apply(self, g: LabeledGameGraph) -> LabeledGameGraph:
        h = scale_outcomes(g, self.multipliers)
        for op in self.ops:
            h = switch(h, op)
        return h.relabel_vertices(self.vertex_map)


def _same_game(a: LabeledGameGraph, b: LabeledGameGraph) -> bool:
    bip = lambda g: None if g.bipartition is None else frozenset(g.bipartition)
    return a.n == b.n and a.d == b.d and a.edges == b.edges and bip(a) == bip(b)


def equivalence_witness(g1: LabeledGameGraph, g2: LabeledGameGraph) -> EquivalenceWitness | None:
    """A vertex map, outcome rescaling and shift sequence taking ``g1`` to ``g2``, or None."""
    if g1.d != g2.d or g1.n != g2.n:
        return None
    w1, w2 = canonical_witness(g1), canonical_witness(g2)
    if w1.encoding != w2.encoding:
        return None
    n, d = g1.n, g1.d
    pos1 = [0] * n
    for i, v in enumerate(w1.order):
        pos1[v] = i
    vertex_map = tuple(w2.order[pos1[v]] for v in range(n))
    target = {(u, v): c for u, v, c in g2.edges}
    comps = [c for c in connected_components(n, g1.neighbors(colored_only=True)) if len(c) > 1]
    for choice in itertools.product(units(d), repeat=len(comps)):
        mult = [1] * n
        for comp, m in zip(comps, choice):
            for v in comp:
                mult[v] = m
        h = scale_outcomes(g1, mult).relabel_vertices(vertex_map)
        t = _solve_shifts(h, target)
        if t is None:
            continue
        ops = tuple(SwitchOp.shift(v, t[vertex_map[v]], d) for v in range(n) if t[vertex_map[v]])
        wit = EquivalenceWitness(vertex_map, tuple(mult), ops)
        if _same_game(wit.apply(g1), g2):
            return wit
    return None


def _solve_shifts(h, target):
    """Shift vector ``t`` with ``c - t_u - t_v = target`` on every colored edge of ``h``."""
    n, d = h.n, h.d
    nb = [[] for _ in range(n)]
    for u, v, c in h.colored_edges:
        if target.get((u, v), GRAY) is GRAY:
            return None
        need = (c - target[(u, v)]) % d  # t_u + t_v
        nb[u].append((v, need))
        nb[v].append((u, need))
    t = [0] * n
    done = [False] * n
    for root in range(n):
        if done[root]:
            continue
        found = None
        for s in range(d):
            tt = {root: s}
            stack, ok = [root], True
            while stack and ok:
                u = stack.pop()
                for w, need in nb[u]:
                    val = (need - tt[u]) % d
                    if w not in tt:
                        tt[w] = val
                        stack.append(w)
                    elif tt[w] != val:
                        ok = False
                        break
            if ok:
                found = tt
                break
        if found is None:
            return None
        for w, val in found.items():
            t[w] = val
            done[w] = True
    return t


def random_equivalent(g: LabeledGameGraph, rng: random.Random, scale: bool = False) -> LabeledGameGraph:
    """A random member of the orbit of ``g``: random shifts (and optionally a
    random unit rescaling per colored component), then a random vertex
    permutation.  Bell games keep Alice on the low indices."""
    d = g.d
    h = g
    if scale:
        mult = [1] * g.n
        for comp in connected_components(g.n, g.neighbors(colored_only=True)):
            m = rng.choice(units(d))
            for v in comp:
                mult[v] = m
        h = scale_outcomes(h, mult)
    h = switch_by_shifts(h, [rng.randrange(d) for _ in range(g.n)])
    if h.bipartition is None:
        perm = list(range(g.n))
        rng.shuffle(perm)
    else:
        left, right = sorted(h.bipartition[0]), sorted(h.bipartition[1])
        if 0 in right:
            left, right = right, left
        lp, rp = list(range(len(left))), list(range(len(left), g.n))
        rng.shuffle(lp)
        rng.shuffle(rp)
        perm = [0] * g.n
        for v, x in zip(left, lp):
            perm[v] = x
        for v, x in zip(right, rp):
            perm[v] = x
    return h.relabel_vertices(perm)
