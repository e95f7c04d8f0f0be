"""Classical values, cycle classification and edge bipartization.

The classical value is the best deterministic assignment.  Everything here
is exact; the exhaustive searches are vectorized over blocks of
assignments (or bipartitions) rather than pruned one at a time.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, ResourceLimit
from .game import GRAY, LabeledGameGraph, evaluate_assignment
from .graphs import is_bipartite, simple_cycles
from .perms import Permutation, ld_perm

DEFAULT_BUDGET = 1 << 21
_BLOCK = 1 << 15


@dataclass(frozen=True)
class ClassicalReport:
    beta_c: int
    gamma_c: int
    omega_c: Fraction
    witness: tuple[int, ...]

    @property
    def edges(self) -> int:
        return self.beta_c + self.gamma_c


def _digits(idx: np.ndarray, n: int, d: int) -> np.ndarray:
    """Mixed-radix digits, vertex 0 most significant; shape (len(idx), n)."""
    out = np.empty((idx.size, n), dtype=np.int64)
    rem = idx.copy()
    for k in range(n - 1, -1, -1):
        out[:, k] = rem % d
        rem //= d
    return out


def _edge_arrays(g):
    ce = g.colored_edges
    u = np.array([e[0] for e in ce], dtype=np.int64)
    v = np.array([e[1] for e in ce], dtype=np.int64)
    c = np.array([e[2] for e in ce], dtype=np.int64)
    return u, v, c


def classical_value(g: LabeledGameGraph, budget: int = DEFAULT_BUDGET) -> ClassicalReport:
    """Exact minimum number of violated colored edges over all ``d^n`` assignments.

    Gray edges carry no constraint and are ignored.  The first assignment
    in mixed-radix order attaining the minimum is the witness.  For ``d = 2``
    the global flip ``a -> a + 1`` preserves every constraint, so only
    assignments with vertex 0 at 0 are scanned.
    """
    g.require_colored()
    n, d = g.n, g.d
    total = d ** n
    if total > budget:
        raise ResourceLimit(f"{d}^{n} = {total} assignments exceed the budget {budget}")
    u, v, c = _edge_arrays(g)
    m = len(c)
    # d = 2: flipping every outcome leaves each constraint unchanged
    span = total // 2 if d == 2 else total
    best, best_idx = m + 1, 0
    for start in range(0, span, _BLOCK):
        idx = np.arange(start, min(span, start + _BLOCK), dtype=np.int64)
        x = _digits(idx, n, d)
        bad = ((x[:, u] + x[:, v]) % d != c).sum(axis=1)
        k = int(np.argmin(bad))
        if bad[k] < best:
            best, best_idx = int(bad[k]), int(idx[k])
            if best == 0:
                break
    witness = tuple(int(a) for a in _digits(np.array([best_idx]), n, d)[0])
    assert evaluate_assignment(g, witness)[1] == best
    return ClassicalReport(best, m - best, Fraction(m - best, m), witness)


def beta_c_batch(base: LabeledGameGraph, labels: np.ndarray, budget: int = DEFAULT_BUDGET,
                 block: int = 256) -> np.ndarray:
    """``beta_C`` for many colorings of one graph at once.

    ``labels`` has one row per coloring, one column per edge of ``base``
    (in ``base.edges`` order, every edge colored).
    """
    n, d = base.n, base.d
    if d ** n > budget:
        raise ResourceLimit(f"{d}^{n} assignments exceed the budget {budget}")
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 2 or labels.shape[1] != len(base.edges):
        raise InvalidArgument("labels must have one column per edge")
    u = np.array([e[0] for e in base.edges])
    v = np.array([e[1] for e in base.edges])
    sums = (lambda x: (x[:, u] + x[:, v]) % d)(_digits(np.arange(d ** n), n, d))  # (A, E)
    out = np.empty(labels.shape[0], dtype=np.int64)
    for s in range(0, labels.shape[0], block):
        lab = labels[s:s + block]
        bad = (sums[None, :, :] != lab[:, None, :]).sum(axis=2)
        out[s:s + block] = bad.min(axis=1)
    return out


# ---------------------------------------------------------------- cycles

def cycle_perm(g: LabeledGameGraph, cycle: Sequence[int]) -> tuple[Permutation, int]:
    """Composite of the edge permutations around ``cycle`` and its fixed-point count.

    Starting at ``cycle[0]`` the permutations of ``(c0,c1), (c1,c2), ...,
    (c_{k-1},c0)`` are applied in that order.  A fixed point is an outcome at
    ``c0`` that extends consistently around the whole cycle.
    """
    cyc = [int(x) for x in cycle]
    k = len(cyc)
    if k < 3 or len(set(cyc)) != k:
        raise InvalidArgument("a cycle needs at least 3 distinct vertices")
    p = Permutation.identity(g.d)
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        if not (0 <= a < g.n and 0 <= b < g.n) or not g.has_edge(a, b) or g.label(a, b) is GRAY:
            raise InvalidArgument(f"({a}, {b}) is not a colored edge")
        p = ld_perm(g.label(a, b), g.d) @ p
    return p, p.fixed_point_count()


@dataclass(frozen=True)
class CycleEntry:
    vertices: tuple[int, ...]
    perm: Permutation
    fixed_points: int


@dataclass(frozen=True)
class CycleReport:
    cycles: tuple[CycleEntry, ...]
    xi_good: int
    xi_bad: int
    xi_ugly: int
    d: int

    def kind(self, entry: CycleEntry) -> str:
        if entry.fixed_points == self.d:
            return "good"
        return "bad" if entry.fixed_points == 0 else "ugly"


def classify_cycles(g: LabeledGameGraph, limit: int = 100_000) -> CycleReport:
    """Every simple cycle of the colored subgraph, sorted into good/bad/ugly."""
    d = g.d
    nb = g.neighbors(colored_only=True)
    entries = []
    good = bad = ugly = 0
    for cyc in simple_cycles(g.n, nb, limit):
        p, fp = cycle_perm(g, cyc)
        entries.append(CycleEntry(cyc, p, fp))
        if fp == d:
            good += 1
        elif fp == 0:
            bad += 1
        else:
            ugly += 1
    if g.bipartition is not None or is_bipartite(g.n, nb):
        # even cycles compose to a shift: 0 or d fixed points
        assert ugly == 0, "ugly cycle in a bipartite XOR-d game"
    return CycleReport(tuple(entries), good, bad, ugly, d)


def contradiction_bounds(g: LabeledGameGraph, report: CycleReport | None = None) -> tuple[int, int]:
    """``(xi_b, xi_b)`` without ugly cycles, else ``(xi_b, xi_b + xi_u - 1)``."""
    r = report if report is not None else classify_cycles(g)
    if r.xi_ugly == 0:
        return r.xi_bad, r.xi_bad
    return r.xi_bad, r.xi_bad + r.xi_ugly - 1


@dataclass(frozen=True)
class BoundCheck:
    lower: int
    upper: int
    beta_c: int

    @property
    def holds(self) -> bool:
        return self.lower <= self.beta_c <= self.upper


def check_contradiction_bounds(g: LabeledGameGraph) -> BoundCheck:
    lo, hi = contradiction_bounds(g)
    return BoundCheck(lo, hi, classical_value(g).beta_c)


# ---------------------------------------------------------------- bipartization

def edge_bipartization(g: LabeledGameGraph, max_n: int = 20) -> tuple[int, list[tuple[int, int]]]:
    """Fewest edges whose removal leaves a bipartite graph, via exact max-cut.

    Labels are ignored.  This equals ``beta_C`` for the single-color
    ``d = 2`` anti-correlation game; for single-color games with ``d >= 3``
    it is only an upper bound.
    Returns ``(beta2, removed)`` with ``removed`` the uncut edges of the
    first optimal split (vertex ``n-1`` fixed on side 0).
    """
    n = g.n
    if n > max_n:
        raise ResourceLimit(f"bipartization is exhaustive and limited to n <= {max_n}")
    pairs = g.pairs()
    if not pairs:
        return 0, []
    u = np.array([p[0] for p in pairs])
    v = np.array([p[1] for p in pairs])
    m = len(pairs)
    span = 1 << max(n - 1, 0)
    best, best_mask = m + 1, 0
    bits = np.arange(n, dtype=np.int64)
    for start in range(0, span, _BLOCK):
        idx = np.arange(start, min(span, start + _BLOCK), dtype=np.int64)
        side = (idx[:, None] >> bits) & 1
        uncut = (side[:, u] == side[:, v]).sum(axis=1)
        k = int(np.argmin(uncut))
        if uncut[k] < best:
            best, best_mask = int(uncut[k]), int(idx[k])
    side = [(best_mask >> i) & 1 for i in range(n)]
    removed = [(a, b) for a, b in pairs if side[a] == side[b]]
    return best, removed
