"""Small-graph algorithms: colour refinement, canonical labeling,
isomorphism search, simple cycles and maximal cliques.

Graphs are given as ``n`` plus an edge-typed adjacency: ``adj[u][v]`` is 0
for a non-edge and a positive integer edge type otherwise.  Everything here
is exact and meant for graphs with at most a few dozen vertices.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .errors import ResourceLimit


def adjacency(n: int, edges: Iterable, edge_type=None) -> list[list[int]]:
    """Adjacency matrix from ``(u, v)`` or ``(u, v, t)`` tuples (type defaults to 1)."""
    adj = [[0] * n for _ in range(n)]
    for e in edges:
        u, v = e[0], e[1]
        t = edge_type if edge_type is not None else (e[2] if len(e) > 2 else 1)
        adj[u][v] = adj[v][u] = t
    return adj


def _neighbor_lists(adj):
    return [[(w, t) for w, t in enumerate(row) if t] for row in adj]


def refine(nbrs, cells: list[list[int]]):
    """Refine an ordered partition until equitable.

    Returns ``(cells, trace)``.  Cells are split by the multiset of
    ``(cell index, edge type)`` of their neighbours, the pieces ordered by
    that signature, so the result and the trace are invariant under
    relabeling.
    """
    trace = []
    n = sum(len(c) for c in cells)
    cell_of = [0] * n
    while True:
        for i, c in enumerate(cells):
            for v in c:
                cell_of[v] = i
        out = []
        changed = False
        for c in cells:
            if len(c) == 1:
                out.append(c)
                continue
            groups: dict = {}
            for v in c:
                cnt: dict = {}
                for w, t in nbrs[v]:
                    k = (cell_of[w], t)
                    cnt[k] = cnt.get(k, 0) + 1
                groups.setdefault(tuple(sorted(cnt.items())), []).append(v)
            if len(groups) > 1:
                changed = True
                keys = sorted(groups)
                trace.append(tuple((k, len(groups[k])) for k in keys))
                out.extend(groups[k] for k in keys)
            else:
                out.append(c)
        cells = out
        if not changed:
            return cells, trace


def _initial_cells(n, vertex_colors):
    if vertex_colors is None:
        return [list(range(n))] if n else []
    by: dict = {}
    for v in range(n):
        by.setdefault(vertex_colors[v], []).append(v)
    return [by[k] for k in sorted(by)]


def _target(cells):
    best = None
    for i, c in enumerate(cells):
        if len(c) > 1 and (best is None or len(c) < len(cells[best])):
            best = i
    return best


def _individualize(cells, i, v):
    c = cells[i]
    return cells[:i] + [[v], [w for w in c if w != v]] + cells[i + 1:]


def canonical_labelings(n: int, adj: Sequence[Sequence[int]], vertex_colors=None,
                        max_leaves: int = 200_000):
    """Canonical certificate of an edge-typed graph and every ordering that attains it.

    Returns ``(certificate, orders)``; ``orders[k][i]`` is the original vertex
    placed at canonical position ``i``.  Two graphs are isomorphic iff their
    certificates are equal.  The list of orders is a coset of the
    automorphism group, so its length is at least ``|Aut|``; the search
    stops with ResourceLimit after ``max_leaves`` leaves.
    """
    nbrs = _neighbor_lists(adj)
    best_path = None
    best_cert = None
    orders: list[list[int]] = []
    leaves = 0

    def leaf_cert(order):
        head = tuple(vertex_colors[v] for v in order) if vertex_colors is not None else ()
        return head, tuple(adj[order[i]][order[j]] for i in range(n) for j in range(i + 1, n))

    def rec(cells, path):
        nonlocal best_path, best_cert, orders, leaves
        cells, tr = refine(nbrs, cells)
        path = path + [tuple(tr)]
        if best_path is not None:
            k = len(path)
            # prune on the invariant trace prefix
            if path > best_path[:k]:
                return
        i = _target(cells)
        if i is None:
            leaves += 1
            if leaves > max_leaves:
                raise ResourceLimit(f"canonical labeling exceeded {max_leaves} leaves")
            order = [c[0] for c in cells]
            key = (path, leaf_cert(order))
            cur = None if best_path is None else (best_path, best_cert)
            if cur is None or key < cur:
                best_path, best_cert = path, key[1]
                orders = [order]
            elif key == cur:
                orders.append(order)
            return
        for v in sorted(cells[i]):
            rec(_individualize(cells, i, v), path)

    rec(_initial_cells(n, vertex_colors), [])
    if n == 0:
        return ((), ()), [[]]
    return best_cert, orders


def canonical_certificate(n, adj, vertex_colors=None, max_leaves=200_000):
    return canonical_labelings(n, adj, vertex_colors, max_leaves)[0]


def find_isomorphism(n1: int, adj1, n2: int, adj2, colors1=None, colors2=None,
                     max_nodes: int = 1_000_000) -> list[int] | None:
    """Return a vertex map ``phi`` with ``adj2[phi[u]][phi[v]] == adj1[u][v]``, or None.

    Individualization-refinement backtracking: individualize one vertex of
    the first graph and try every candidate image in the matching cell of
    the second.
    """
    if n1 != n2:
        return None
    n = n1
    if sorted(map(sorted, adj1)) != sorted(map(sorted, adj2)):
        return None
    if (colors1 is None) != (colors2 is None):
        return None
    if colors1 is not None and sorted(colors1) != sorted(colors2):
        return None
    nb1, nb2 = _neighbor_lists(adj1), _neighbor_lists(adj2)
    nodes = 0

    def rec(c1, c2):
        nonlocal nodes
        nodes += 1
        if nodes > max_nodes:
            raise ResourceLimit(f"isomorphism search exceeded {max_nodes} nodes")
        c1, t1 = refine(nb1, c1)
        c2, t2 = refine(nb2, c2)
        if t1 != t2 or [len(c) for c in c1] != [len(c) for c in c2]:
            return None
        i = _target(c1)
        if i is None:
            phi = [0] * n
            for a, b in zip(c1, c2):
                phi[a[0]] = b[0]
            for u in range(n):
                for v in range(u + 1, n):
                    if adj1[u][v] != adj2[phi[u]][phi[v]]:
                        return None
            return phi
        v = c1[i][0]
        for w in c2[i]:
            r = rec(_individualize(c1, i, v), _individualize(c2, i, w))
            if r is not None:
                return r
        return None

    cells1 = _initial_cells(n, colors1)
    cells2 = _initial_cells(n, colors2)
    if colors1 is not None:
        if [colors1[c[0]] for c in cells1] != [colors2[c[0]] for c in cells2]:
            return None
    if [len(c) for c in cells1] != [len(c) for c in cells2]:
        return None
    if n == 0:
        return []
    return rec(cells1, cells2)


def connected_components(n: int, nbrs: Sequence[Sequence[int]]) -> list[list[int]]:
    """Components as sorted vertex lists, ordered by smallest vertex."""
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        comp, stack = [], [s]
        seen[s] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in nbrs[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def simple_cycles(n: int, nbrs: Sequence[Sequence[int]], limit: int = 100_000) -> list[tuple[int, ...]]:
    """All simple cycles (length >= 3) of an undirected graph.

    Each cycle starts at its smallest vertex and is oriented so that the
    second vertex is smaller than the last.
    """
    out = []
    nb = [sorted(x) for x in nbrs]
    for s in range(n):
        path = [s]
        on = [False] * n
        on[s] = True
        stack = [iter(w for w in nb[s] if w > s)]
        while stack:
            w = next(stack[-1], None)
            if w is None:
                stack.pop()
                on[path.pop()] = False
                continue
            if on[w]:
                continue
            path.append(w)
            on[w] = True
            if len(path) >= 3 and s in nb[w] and path[1] < w:
                out.append(tuple(path))
                if len(out) > limit:
                    raise ResourceLimit(f"more than {limit} simple cycles")
            stack.append(iter(x for x in nb[w] if x > s))
    return out


def maximal_cliques(n: int, nbrs: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Bron-Kerbosch with pivoting; cliques as sorted tuples, sorted lexicographically."""
    N = [set(x) for x in nbrs]
    out = []

    def bk(r, p, x):
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(p | x, key=lambda u: len(N[u] & p))
        for v in sorted(p - N[pivot]):
            bk(r | {v}, p & N[v], x & N[v])
            p = p - {v}
            x = x | {v}

    if n:
        bk(set(), set(range(n)), set())
    return sorted(out)


def is_bipartite(n: int, nbrs) -> bool:
    side = [-1] * n
    for s in range(n):
        if side[s] >= 0:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for w in nbrs[u]:
                if side[w] < 0:
                    side[w] = 1 - side[u]
                    stack.append(w)
                elif side[w] == side[u]:
                    return False
    return True
