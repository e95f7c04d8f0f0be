"""Independent reference computations for the test-suite.

Nothing here calls into the package beyond the game container itself;
each routine is the slowest obvious way to get the answer.
"""
import itertools
import math

import numpy as np
from hypothesis import strategies as st

from xordgames.game import GRAY, LabeledGameGraph


def brute_beta(g):
    """Minimum number of violated colored edges, pure Python."""
    best = None
    ce = [(u, v, c) for u, v, c in g.edges if c is not GRAY]
    for vals in itertools.product(range(g.d), repeat=g.n):
        bad = sum(1 for u, v, c in ce if (vals[u] + vals[v]) % g.d != c)
        best = bad if best is None else min(best, bad)
    return best


def cycle_assignment_count(g, cycle):
    """Outcomes at cycle[0] that propagate consistently around the cycle."""
    lab = {}
    for u, v, c in g.edges:
        lab[(u, v)] = lab[(v, u)] = c
    count = 0
    for a0 in range(g.d):
        a = a0
        for x, y in zip(cycle, list(cycle[1:]) + [cycle[0]]):
            a = (lab[(x, y)] - a) % g.d
        count += a == a0
    return count


def colored_components(g):
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, c in g.edges:
        if c is not GRAY:
            parent[find(u)] = find(v)
    return [find(v) for v in range(g.n)]


def orbit_equivalent(g1, g2):
    """Search every vertex map, per-component unit and shift vector."""
    if (g1.n, g1.d, len(g1.edges)) != (g2.n, g2.d, len(g2.edges)):
        return False
    n, d = g1.n, g1.d
    target = {}
    for u, v, c in g2.edges:
        target[(min(u, v), max(u, v))] = -1 if c is GRAY else c
    comp = colored_components(g1)
    roots = sorted(set(comp))
    units = [u for u in range(1, d) if math.gcd(u, d) == 1] or [1]
    shifts = np.array(list(itertools.product(range(d), repeat=n)), dtype=np.int64)
    for perm in itertools.permutations(range(n)):
        rows = []
        ok = True
        for u, v, c in g1.edges:
            key = (min(perm[u], perm[v]), max(perm[u], perm[v]))
            if key not in target or (c is GRAY) != (target[key] == -1):
                ok = False
                break
            rows.append((u, v, c, target[key]))
        if not ok:
            continue
        colored = [r for r in rows if r[2] is not GRAY]
        if not colored:
            return True
        for mult in itertools.product(units, repeat=len(roots)):
            m = {r: k for r, k in zip(roots, mult)}
            good = np.ones(len(shifts), dtype=bool)
            for u, v, c, t in colored:
                # outcome a at u becomes m*a + s_u; constraint c -> m*c + s_u + s_v
                good &= (m[comp[u]] * c + shifts[:, u] + shifts[:, v]) % d == t
            if good.any():
                return True
    return False


def chsh_grid_value(steps=361):
    """Best CHSH score with real projective qubit measurements on the
    maximally entangled state, by grid search over measurement angles.

    For real observables at angles x and y the correlation is cos(2(x - y)),
    so the score is a lower bound on the quantum value of the game.
    """
    ang = np.linspace(0, np.pi, steps)
    best = 0.0
    # Alice fixed at 0 and a1 by symmetry; Bob searched on the grid
    for a1 in ang:
        b = ang[:, None]
        b2 = ang[None, :]
        e = lambda x, y: np.cos(2 * (x - y))
        s = e(0.0, b) + e(0.0, b2) + e(a1, b) - e(a1, b2)
        best = max(best, float(s.max()))
    return 2.0 + best / 2.0


def pentagon_lower_bound():
    """Lovasz umbrella for C_5: a feasible orthonormal representation.

    Unit vectors u_i with u_i orthogonal to u_{i+1} and a unit handle c;
    any such system gives theta(C_5) >= sum_i (c . u_i)^2 = sqrt(5).
    """
    cos_t = (1 / 5 ** 0.25)
    sin_t = math.sqrt(1 - cos_t ** 2)
    u = np.array([[sin_t * math.cos(4 * math.pi * i / 5), sin_t * math.sin(4 * math.pi * i / 5), cos_t]
                  for i in range(5)])
    c = np.array([0.0, 0.0, 1.0])
    gram = u @ u.T
    for i in range(5):
        j = (i + 1) % 5
        assert abs(gram[i, j]) < 1e-12, "pentagon vectors of adjacent vertices must be orthogonal"
    return float(((u @ c) ** 2).sum())


@st.composite
def games(draw, n_min=3, n_max=7, ds=(2, 3), gray=False, connected=False, max_edges=None):
    n = draw(st.integers(n_min, n_max))
    d = draw(st.sampled_from(ds))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = []
    if connected:
        order = draw(st.permutations(range(n)))
        for k in range(1, n):
            j = draw(st.integers(0, k - 1))
            a, b = order[k], order[j]
            chosen.append((min(a, b), max(a, b)))
    rest = [p for p in pairs if p not in chosen]
    extra = draw(st.lists(st.sampled_from(rest), unique=True, max_size=len(rest))) if rest else []
    chosen += extra
    if max_edges is not None:
        chosen = chosen[:max(max_edges, n - 1 if connected else 0)]
    if not chosen:
        chosen = [(0, 1)]
    labels = st.integers(0, d - 1)
    if gray:
        labels = st.one_of(labels, st.just(GRAY))
    edges = [(u, v, draw(labels)) for u, v in sorted(chosen)]
    if all(c is GRAY for _, _, c in edges):
        u, v, _ = edges[0]
        edges[0] = (u, v, 0)
    return LabeledGameGraph.from_edges(n, d, edges)
