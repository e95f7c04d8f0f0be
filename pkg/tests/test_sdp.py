import math

import networkx as nx
import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from oracles import pentagon_lower_bound
from xordgames.errors import InvalidArgument, ResourceLimit
from xordgames.sdp import (SdpOptions, SdpProblem, Status, dump_sdp, load_sdp, lovasz_theta, solve,
                           solve_lmi, theta_lmi, theta_sdp)

PROPS = settings(max_examples=200, deadline=None, derandomize=True)


def cycle_adj(n):
    a = np.zeros((n, n), dtype=int)
    for i in range(n):
        a[i, (i + 1) % n] = a[(i + 1) % n, i] = 1
    return a


def adj_of(n, edges):
    a = np.zeros((n, n), dtype=int)
    for u, v in edges:
        a[u, v] = a[v, u] = 1
    return a


@st.composite
def graphs(draw, n_min=1, n_max=8):
    n = draw(st.integers(n_min, n_max))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return n, [p for p, keep in zip(pairs, mask) if keep]


@pytest.mark.parametrize("m", range(1, 9))
def test_theta_complete_and_empty(m):
    full = np.ones((m, m), dtype=int) - np.eye(m, dtype=int)
    empty = np.zeros((m, m), dtype=int)
    assert abs(lovasz_theta(full).value - 1) < 1e-6
    assert abs(lovasz_theta(empty).value - m) < 1e-6
    # both formulations, independently of the dispatch
    assert abs(solve(theta_sdp(full)).dual_value - 1) < 1e-6
    assert abs(solve_lmi(theta_lmi(empty)).value - m) < 1e-6


def test_theta_pentagon():
    lb = pentagon_lower_bound()
    assert abs(lb - math.sqrt(5)) < 1e-12
    for r in (lovasz_theta(cycle_adj(5)), ):
        assert r.status is Status.OPTIMAL
        assert abs(r.value - math.sqrt(5)) < 1e-5
        assert r.value >= lb - 1e-6
    sol = solve(theta_sdp(cycle_adj(5)))
    assert abs(sol.dual_value - math.sqrt(5)) < 1e-5
    assert abs(solve_lmi(theta_lmi(cycle_adj(5))).value - math.sqrt(5)) < 1e-5


def test_theta_odd_cycles_closed_form():
    # theta(C_n) = n cos(pi/n) / (1 + cos(pi/n)) for odd n
    for n in (5, 7, 9):
        c = math.cos(math.pi / n)
        assert abs(lovasz_theta(cycle_adj(n)).value - n * c / (1 + c)) < 1e-5


def test_solution_certificates():
    p = theta_sdp(cycle_adj(7))
    sol = solve(p)
    assert sol.optimal
    assert np.linalg.eigvalsh(sol.X)[0] > -1e-8
    assert np.linalg.eigvalsh(sol.Z)[0] > -1e-8
    assert abs(sol.primal_value - sol.dual_value) < 1e-6
    resid = p.stacked() @ sol.X.ravel() - p.rhs()
    assert np.abs(resid).max() < 1e-7


def test_redundant_constraints_removed():
    p = theta_sdp(cycle_adj(5))
    p.add(2 * sp.identity(5), 2.0)
    sol = solve(p)
    assert sol.removed == [p.n_constraints - 1] or len(sol.removed) == 1
    assert abs(sol.dual_value - math.sqrt(5)) < 1e-5


def test_inconsistent_constraints_infeasible():
    p = SdpProblem(2, np.eye(2))
    p.add(np.eye(2), 1.0)
    p.add(2 * np.eye(2), 3.0)
    assert solve(p).status is Status.INFEASIBLE


def test_psd_infeasible():
    # tr X = -1 has no psd solution
    p = SdpProblem(3, np.eye(3))
    p.add(np.eye(3), -1.0)
    assert solve(p).status is Status.INFEASIBLE


def test_iteration_cap():
    sol = solve(theta_sdp(cycle_adj(7)), SdpOptions(max_iter=2))
    assert sol.status is Status.MAX_ITERATIONS


def test_validation():
    with pytest.raises(InvalidArgument):
        SdpProblem(2, np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(InvalidArgument):
        theta_sdp(cycle_adj(3), [1, -1, 1])
    with pytest.raises(ResourceLimit):
        solve(theta_sdp(np.zeros((5, 5))), SdpOptions(max_dim=4))


def test_dump_roundtrip():
    p = theta_sdp(cycle_adj(5), [1, 2, 3, 0.5, 1])
    q = load_sdp(dump_sdp(p))
    assert q.dim == p.dim and q.n_constraints == p.n_constraints
    assert dump_sdp(q) == dump_sdp(p)
    assert abs(solve(q).dual_value - solve(p).dual_value) < 1e-9


@PROPS
@given(graphs())
def test_theta_sandwich(gr):
    n, edges = gr
    g = nx.empty_graph(n)
    g.add_edges_from(edges)
    alpha = max(len(c) for c in nx.find_cliques(nx.complement(g)))
    clique_cover = min(k for k in range(1, n + 1)
                       if nx.algorithms.coloring.greedy_color(nx.complement(g)) is not None
                       and _colorable(nx.complement(g), k))
    t = lovasz_theta(adj_of(n, edges))
    tc = lovasz_theta(1 - adj_of(n, edges) - np.eye(n, dtype=int))
    assert t.status is Status.OPTIMAL and tc.status is Status.OPTIMAL
    assert alpha - 1e-6 <= t.value <= clique_cover + 1e-6
    assert t.value * tc.value >= n - 1e-5


def _colorable(g, k):
    # exact k-coloring by backtracking, vertices in degree order
    order = sorted(g.nodes, key=lambda v: -g.degree(v))
    col = {}

    def rec(i):
        if i == len(order):
            return True
        v = order[i]
        used = {col[u] for u in g[v] if u in col}
        for c in range(k):
            if c not in used:
                col[v] = c
                if rec(i + 1):
                    return True
                del col[v]
        return False

    return rec(0)


@PROPS
@given(graphs(n_max=7), st.lists(st.integers(0, 4), min_size=7, max_size=7))
def test_formulations_agree(gr, w):
    n, edges = gr
    a = adj_of(n, edges)
    w = np.array(w[:n], dtype=float) + 0.5
    s1 = solve(theta_sdp(a, w))
    s2 = solve_lmi(theta_lmi(a, w))
    assert s1.optimal and s2.status is Status.OPTIMAL
    assert abs(s1.dual_value - s2.value) < 1e-5 * (1 + s1.dual_value)


@settings(max_examples=40, deadline=None, derandomize=True)
@given(graphs(n_max=7))
def test_theta_against_cvxpy(gr):
    cp = pytest.importorskip("cvxpy")
    n, edges = gr
    X = cp.Variable((n, n), symmetric=True)
    cons = [X >> 0, cp.trace(X) == 1] + [X[u, v] == 0 for u, v in edges]
    ref = cp.Problem(cp.Maximize(cp.sum(X)), cons).solve(solver="CLARABEL")
    assert abs(lovasz_theta(adj_of(n, edges)).value - ref) < 1e-5 * (1 + ref)
