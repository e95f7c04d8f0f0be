"""Quantum-side bounds: the orthogonality graph with its weighted theta, and
the almost-quantum (level 1+AB) moment-matrix relaxation.

Projectors are written as letters ``(x, a)``: observable ``x`` with outcome
``a``.  Moment matrices use the reduced outcome set ``a < d - 1``; the last
outcome is recovered from completeness, which makes the normalization
constraints implicit.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .classical import classical_value
from .errors import ResourceLimit
from .game import LabeledGameGraph
from .graphs import maximal_cliques
from .sdp import LmiProblem, SdpOptions, Status, lovasz_theta, solve_lmi


def commutation_matrix(g: LabeledGameGraph) -> list[list[bool]]:
    adj = [[False] * g.n for _ in range(g.n)]
    for u, v in g.commutation_pairs():
        adj[u][v] = adj[v][u] = True
    return adj


# ---------------------------------------------------------------- orthogonality graph

@dataclass(frozen=True)
class Event:
    clique: int
    outcomes: tuple[int, ...]
    observables: tuple[int, ...]

    def value(self, x: int):
        return self.outcomes[self.observables.index(x)] if x in self.observables else None


@dataclass(frozen=True)
class OrthogonalityGraph:
    cliques: tuple[tuple[int, ...], ...]
    events: tuple[Event, ...]
    edges: tuple[tuple[int, int], ...]
    weights: tuple[Fraction, ...]

    @property
    def size(self) -> int:
        return len(self.events)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.size, self.size), dtype=np.int8)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        return a

    def weight_array(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])

    def assignment_weight(self, values) -> Fraction:
        """Weight of the events agreeing with a deterministic assignment."""
        return sum((w for e, w in zip(self.events, self.weights)
                    if all(values[x] == a for x, a in zip(e.observables, e.outcomes))), Fraction(0))


def build_orthogonality_graph(g: LabeledGameGraph, max_events: int = 4096) -> OrthogonalityGraph:
    """Events of every maximal clique of the commutation graph, exclusive when
    they give one observable two outcomes.  Each colored edge puts weight 1
    on every satisfying event of its lexicographically smallest covering clique."""
    g.require_colored()
    d = g.d
    comm = commutation_matrix(g)
    nb = [[w for w in range(g.n) if comm[v][w]] for v in range(g.n)]
    cliques = maximal_cliques(g.n, nb)
    total = sum(d ** len(c) for c in cliques)
    if total > max_events:
        raise ResourceLimit(f"orthogonality graph would have {total} events")
    events = []
    for ci, c in enumerate(cliques):
        for out in itertools.product(range(d), repeat=len(c)):
            events.append(Event(ci, out, c))
    weights = [Fraction(0)] * len(events)
    start = np.cumsum([0] + [d ** len(c) for c in cliques])
    for u, v, col in g.colored_edges:
        ci = next(i for i, c in enumerate(cliques) if u in c and v in c)
        for k in range(start[ci], start[ci + 1]):
            e = events[k]
            if (e.value(u) + e.value(v)) % d == col:
                weights[k] += 1
    edges = []
    for i in range(len(events)):
        ei = events[i]
        for j in range(i + 1, len(events)):
            ej = events[j]
            for x, a in zip(ei.observables, ei.outcomes):
                b = ej.value(x)
                if b is not None and b != a:
                    edges.append((i, j))
                    break
    return OrthogonalityGraph(tuple(cliques), tuple(events), tuple(edges), tuple(weights))


def max_weight_independent_set(adj: np.ndarray, weights) -> tuple[float, list[int]]:
    """Exact maximum-weight independent set by branch and bound.

    Zero-weight vertices are dropped.  The bound is a greedy partition of
    the candidates into cliques, each contributing its heaviest vertex.
    """
    w = [float(x) for x in weights]
    keep = [v for v in range(len(w)) if w[v] > 0]
    idx = {v: k for k, v in enumerate(keep)}
    n = len(keep)
    nbr = [0] * n
    for a in range(n):
        for b in range(n):
            if a != b and adj[keep[a]][keep[b]]:
                nbr[a] |= 1 << b
    ww = [w[v] for v in keep]
    order = sorted(range(n), key=lambda v: -ww[v])
    best = [0.0, []]

    def bound(cand):
        total = 0.0
        rest = cand
        while rest:
            # heaviest remaining vertex opens a clique; absorb its common neighbours
            v = next(u for u in order if rest >> u & 1)
            top = ww[v]
            clique = 1 << v
            common = rest & nbr[v]
            while common:
                u = next(x for x in order if common >> x & 1)
                clique |= 1 << u
                common &= nbr[u]
            rest &= ~clique
            total += top
        return total

    def rec(cand, cur, chosen):
        if cur > best[0] + 1e-12:
            best[0], best[1] = cur, list(chosen)
        if not cand or cur + bound(cand) <= best[0] + 1e-12:
            return
        v = next(u for u in order if cand >> u & 1)
        chosen.append(v)
        rec(cand & ~nbr[v] & ~(1 << v), cur + ww[v], chosen)
        chosen.pop()
        rec(cand & ~(1 << v), cur, chosen)

    rec((1 << n) - 1, 0.0, [])
    return best[0], sorted(keep[v] for v in best[1])


@dataclass(frozen=True)
class ThetaReport:
    value: float
    status: Status
    gap: float
    iterations: int
    events: int


def theta_upper_bound(g: LabeledGameGraph, opts: SdpOptions | None = None) -> ThetaReport:
    """Weighted Lovasz theta of the orthogonality graph."""
    og = build_orthogonality_graph(g)
    w = og.weight_array()
    if int((w > 0).sum()) > (opts or SdpOptions()).max_dim:
        raise ResourceLimit(f"{int((w > 0).sum())} weighted events exceed the SDP dimension limit")
    r = lovasz_theta(og.adjacency(), w, opts)
    return ThetaReport(r.value, r.status, r.gap, r.iterations, og.size)


# ---------------------------------------------------------------- moment matrix

def _reduce(word, comm):
    """Merge repeated letters of one observable separated only by commuting
    letters: equal outcomes collapse, different outcomes give None (zero)."""
    w = list(word)
    changed = True
    while changed:
        changed = False
        for i in range(len(w)):
            for j in range(i + 1, len(w)):
                if w[j][0] == w[i][0]:
                    if all(comm[w[k][0]][w[i][0]] for k in range(i + 1, j)):
                        if w[j][1] != w[i][1]:
                            return None
                        del w[j]
                        changed = True
                    break
            if changed:
                break
    return tuple(w)


def _lex_normal(word, comm):
    """Lexicographically least word equal to ``word`` up to swapping adjacent commuting letters."""
    w = list(word)
    out = []
    while w:
        best = None
        for j in range(len(w)):
            if all(comm[w[k][0]][w[j][0]] for k in range(j)):
                if best is None or w[j] < w[best]:
                    best = j
        out.append(w.pop(best))
    return tuple(out)


def canonical_word(word, comm):
    """Representative of the moment ``<word>``; None when it vanishes.  A word
    and its reverse share a representative (real symmetric moment matrix)."""
    r = _reduce(word, comm)
    if r is None:
        return None
    return min(_lex_normal(r, comm), _lex_normal(r[::-1], comm))


@dataclass
class MomentMatrixIndex:
    """Row labels ``[()] + [(x, a)] + [(x, a)(y, b)]`` over commuting pairs,
    reduced outcomes ``a, b < d - 1``; ``entry[i][j]`` is the canonical word of
    ``reverse(w_i) w_j``."""

    g: LabeledGameGraph
    words: list
    comm: list
    entry: list = field(repr=False)
    moments: dict = field(repr=False)   # canonical word -> variable index

    @property
    def dim(self) -> int:
        return len(self.words)

    def moment(self, word):
        """``(kind, value)``: ``('const', c)`` or ``('var', k)``."""
        w = canonical_word(word, self.comm)
        if w is None:
            return ("const", 0.0)
        if w == ():
            return ("const", 1.0)
        return ("var", self.moments[w])


def build_moment_index(g: LabeledGameGraph, max_dim: int = 200) -> MomentMatrixIndex:
    d = g.d
    comm = commutation_matrix(g)
    pairs = g.commutation_pairs()
    dim = 1 + g.n * (d - 1) + len(pairs) * (d - 1) ** 2
    if dim > max_dim:
        raise ResourceLimit(f"moment matrix of side {dim} exceeds {max_dim}")
    words = [()]
    words += [((x, a),) for x in range(g.n) for a in range(d - 1)]
    words += [((u, a), (v, b)) for u, v in pairs for a in range(d - 1) for b in range(d - 1)]
    m = len(words)
    entry = [[None] * m for _ in range(m)]
    moments: dict = {}
    for i in range(m):
        ri = tuple(reversed(words[i]))
        for j in range(i, m):
            w = canonical_word(ri + words[j], comm)
            entry[i][j] = entry[j][i] = w
            if w is not None and w != () and w not in moments:
                moments[w] = len(moments)
    return MomentMatrixIndex(g, words, comm, entry, moments)


def _objective(idx: MomentMatrixIndex):
    """Game value as ``c0 + c.x`` in the moment variables."""
    d = idx.g.d
    c = np.zeros(len(idx.moments))
    c0 = 0.0

    def add(word, coef):
        nonlocal c0
        kind, val = idx.moment(word)
        if kind == "const":
            c0 += coef * val
        else:
            c[val] += coef

    last = d - 1
    for x, y, col in idx.g.colored_edges:
        for a in range(d):
            b = (col - a) % d
            # P(a, b) with the last outcome eliminated by completeness
            if a < last and b < last:
                add(((x, a), (y, b)), 1)
            elif a < last:
                add(((x, a),), 1)
                for bb in range(last):
                    add(((x, a), (y, bb)), -1)
            elif b < last:
                add(((y, b),), 1)
                for aa in range(last):
                    add(((x, aa), (y, b)), -1)
            else:
                c0 += 1
                for aa in range(last):
                    add(((x, aa),), -1)
                for bb in range(last):
                    add(((y, bb),), -1)
                for aa in range(last):
                    for bb in range(last):
                        add(((x, aa), (y, bb)), 1)
    return c0, c


def moment_lmi(idx: MomentMatrixIndex) -> LmiProblem:
    m = idx.dim
    K = len(idx.moments)
    rows = [[] for _ in range(K)]
    cols = [[] for _ in range(K)]
    f0r, f0c = [], []
    for i in range(m):
        for j in range(m):
            w = idx.entry[i][j]
            if w is None:
                continue
            if w == ():
                f0r.append(i)
                f0c.append(j)
            else:
                k = idx.moments[w]
                rows[k].append(i)
                cols[k].append(j)
    F0 = sp.csr_matrix((np.ones(len(f0r)), (f0r, f0c)), shape=(m, m))
    F = [sp.csr_matrix((np.ones(len(rows[k])), (rows[k], cols[k])), shape=(m, m)) for k in range(K)]
    c0, c = _objective(idx)
    return LmiProblem(m, F0, F, c, c0)


@dataclass(frozen=True)
class AqReport:
    value: float
    status: Status
    gap: float
    iterations: int
    dim: int
    moments: int


def almost_quantum_value(g: LabeledGameGraph, opts: SdpOptions | None = None) -> AqReport:
    """Unnormalized level-1+AB value; the returned number is the certified bound
    from the primal-feasible side of the solver."""
    g.require_colored()
    opts = opts or SdpOptions()
    idx = build_moment_index(g, opts.max_dim)
    sol = solve_lmi(moment_lmi(idx), opts)
    return AqReport(sol.value, sol.status, sol.gap, sol.sdp.iterations, idx.dim, len(idx.moments))


def classical_moment_vector(idx: MomentMatrixIndex, values) -> np.ndarray:
    """Moments of a deterministic strategy: ``<w> = prod [values[x] == a]``."""
    x = np.zeros(len(idx.moments))
    for w, k in idx.moments.items():
        x[k] = float(all(values[o] == a for o, a in w))
    return x


def check_classical_embedding(g: LabeledGameGraph, values=None) -> tuple[float, float, float]:
    """Embed a deterministic strategy as a rank-one moment matrix.

    Returns ``(objective, gamma_c_of_strategy, min_eigenvalue)``: the
    objective of the embedded point, the satisfied-edge count of the
    strategy, and the smallest eigenvalue of ``F(x)``.  Also checks that
    ``F(x)`` equals ``v v^T`` for the word-value vector ``v``.
    """
    if values is None:
        values = classical_value(g).witness
    idx = build_moment_index(g)
    lmi = moment_lmi(idx)
    x = classical_moment_vector(idx, values)
    F = lmi.F0.toarray() + sum(xk * fk.toarray() for xk, fk in zip(x, lmi.F))
    v = np.array([float(all(values[o] == a for o, a in w)) for w in idx.words])
    if not np.allclose(F, np.outer(v, v)):
        raise AssertionError("deterministic moments do not form the rank-one matrix")
    obj = lmi.c0 + float(lmi.c @ x)
    sat = sum(1 for u, w, c in g.colored_edges if (values[u] + values[w]) % g.d == c)
    return obj, float(sat), float(np.linalg.eigvalsh(F)[0])


# ---------------------------------------------------------------- screening

def is_prime(d: int) -> bool:
    return d >= 2 and all(d % p for p in range(2, math.isqrt(d) + 1))


def is_chsh3_class(g: LabeledGameGraph) -> bool:
    """Two-party ``d = 3`` game on the full 2x2 question set."""
    if g.d != 3 or g.bipartition is None:
        return False
    left, right = g.bipartition
    return len(left) == 2 and len(right) == 2 and g.colored_edge_count == 4


@dataclass(frozen=True)
class ScreenReport:
    beta_c: int
    gamma_c: int
    edges: int
    gamma_aq: float | None
    verdict: str
    notes: tuple[str, ...] = ()


CLASSICAL_WIN = "classically winnable"
CERTIFIED = "no pseudo-telepathy, certified numerically"
BY_THEOREM = "no pseudo-telepathy by theorem (numerics inconclusive)"
INCONCLUSIVE = "inconclusive"


def pseudo_telepathy_screen(g: LabeledGameGraph, opts: SdpOptions | None = None,
                            slack: float = 1e-6) -> ScreenReport:
    cr = classical_value(g)
    m = cr.edges
    notes = []
    if not is_prime(g.d):
        notes.append(f"d={g.d} is not prime")
    if is_chsh3_class(g):
        notes.append("CHSH-3 class: qutrit value may lie strictly below the relaxation")
    if cr.beta_c == 0:
        return ScreenReport(0, m, m, None, CLASSICAL_WIN, tuple(notes))
    aq = almost_quantum_value(g, opts)
    if aq.status is Status.OPTIMAL and aq.value < m - slack:
        verdict = CERTIFIED
    elif g.bipartition is not None and is_prime(g.d):
        verdict = BY_THEOREM
    else:
        verdict = INCONCLUSIVE
    return ScreenReport(cr.beta_c, cr.gamma_c, m, aq.value, verdict, tuple(notes))
