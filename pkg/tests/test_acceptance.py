"""Acceptance criteria, one test each; a pass/fail line per criterion is
printed in the terminal summary (and by running this file directly)."""
import math
import time

import numpy as np
import pytest

import test_classical
import test_equivalence
import test_game
import test_quantum
from acceptance_log import criterion
from oracles import chsh_grid_value, pentagon_lower_bound
from xordgames.classical import classical_value
from xordgames.game import LabeledGameGraph, chsh, complete_bipartite_pairs, complete_pairs, cycle_pairs
from xordgames.perms import count_p1p2_structures
from xordgames.quantum import almost_quantum_value, is_prime, pseudo_telepathy_screen
from xordgames.sdp import Status, lovasz_theta
from xordgames.survey import ALL_LD, SurveySpec, census, enum_graphs, enum_labelings, run_survey

TOL = 1e-3


def dashed(n, pairs):
    return LabeledGameGraph.single_color(n, pairs, 2, 1)


@pytest.fixture(scope="module")
def surveys():
    out = {}
    for n in (5, 6, 7):
        t0 = time.time()
        res = run_survey(SurveySpec((n,)))
        out[n] = (res, time.time() - t0)
    return out


def test_criterion_01_ld_characterization():
    with criterion(1, "L_d characterization d=3,5,7") as notes:
        t0 = time.time()
        for d, expected in ((3, 3), (5, 15), (7, 105)):
            mf, mb, relabel = count_p1p2_structures(d)
            notes.append(f"M_{d}={mb}")
            assert mf == mb == expected
            if d in (3, 5):
                assert relabel, f"a P1/P2 set for d={d} is not a relabeling of L_d"
        assert time.time() - t0 < 60


def test_criterion_02_c5():
    with criterion(2, "C_5 single dashed color") as notes:
        t0 = time.time()
        g = dashed(5, cycle_pairs(5))
        cr = classical_value(g)
        aq = almost_quantum_value(g)
        notes.append(f"beta_c={cr.beta_c} gamma_aq={aq.value:.6f}")
        assert (cr.beta_c, cr.gamma_c) == (1, 4)
        assert abs(aq.value - 4.472) <= TOL
        assert time.time() - t0 < 10


def test_criterion_03_k5():
    with criterion(3, "K_5 single dashed color") as notes:
        t0 = time.time()
        g = dashed(5, complete_pairs(5))
        cr = classical_value(g)
        aq = almost_quantum_value(g)
        notes.append(f"beta_c={cr.beta_c} gamma_aq={aq.value:.6f}")
        assert (cr.beta_c, cr.gamma_c) == (4, 6)
        assert abs(aq.value - 6.25) <= TOL
        assert time.time() - t0 < 30


def test_criterion_04_graph_census():
    with criterion(4, "graph census n=6,7") as notes:
        t0 = time.time()
        c6, c7 = len(enum_graphs(6)), len(enum_graphs(7))
        notes.append(f"n=6: {c6}, n=7: {c7}")
        assert (c6, c7) == (61, 507)
        assert time.time() - t0 < 120


def test_criterion_05_single_color_surveys(surveys):
    with criterion(5, "single-color surveys n=6,7") as notes:
        (r6, t6), (r7, t7) = surveys[6], surveys[7]
        gaps7 = sorted(r.gap for r in r7.rows if r.gap is not None and r.gap > 1e-4)
        quarter = sum(1 for x in gaps7 if abs(x - 0.25) <= TOL)
        notes.append(f"surveys took {t6 + t7:.0f} s")
        notes.append(f"n=6 flagged {r6.summary.flagged}/{r6.summary.total}")
        notes.append(f"n=7 flagged {r7.summary.flagged}/{r7.summary.total}")
        notes.append(f"n=7 gaps at 0.25: {quarter}")
        notes.append("smallest n=7 gaps " + ", ".join(f"{x:.4g}" for x in gaps7[:3]))
        assert r6.summary.errors == r7.summary.errors == 0
        assert t6 + t7 < 2 * 3600
        assert (r6.summary.flagged, r6.summary.total) == (4, 61)
        assert (r7.summary.flagged, r7.summary.total) == (54, 507)
        assert quarter == 4


def test_criterion_06_k33_census():
    with criterion(6, "K_{3,3} XOR-3 census") as notes:
        t0 = time.time()
        cen = census(6, complete_bipartite_pairs(3, 3), 3)
        counts = [cen[b] for b in range(4)]
        notes.append("/".join(map(str, counts)))
        assert counts == [243, 4374, 14580, 486]
        assert sum(cen.values()) == 3 ** 9
        pct = [100 * c / 3 ** 9 for c in counts]
        for got, ref in zip(pct, (1.23, 22.22, 74.07, 2.5)):
            assert abs(got - ref) <= 0.05
        assert time.time() - t0 < 300


def test_criterion_07_c6_classes():
    with criterion(7, "C_6 XOR-3 equivalence classes") as notes:
        t0 = time.time()
        classes = enum_labelings(6, cycle_pairs(6), 3, ALL_LD, class_sizes=True)
        notes.append(f"{len(classes)} classes, sizes {sorted(c.size for c in classes)}")
        assert len(classes) == 2
        assert time.time() - t0 < 60


def test_criterion_08_sdp_validation():
    with criterion(8, "SDP solver validation") as notes:
        t0 = time.time()
        for m in range(1, 9):
            full = np.ones((m, m), dtype=int) - np.eye(m, dtype=int)
            assert abs(lovasz_theta(full).value - 1) < 1e-6
            assert abs(lovasz_theta(np.zeros((m, m), dtype=int)).value - m) < 1e-6
        c5 = np.zeros((5, 5), dtype=int)
        for i in range(5):
            c5[i, (i + 1) % 5] = c5[(i + 1) % 5, i] = 1
        r = lovasz_theta(c5)
        lb = pentagon_lower_bound()
        notes.append(f"theta(C_5)={r.value:.8f} umbrella={lb:.8f}")
        assert r.status is Status.OPTIMAL
        assert abs(r.value - math.sqrt(5)) <= 1e-5
        assert lb <= r.value + 1e-6
        assert time.time() - t0 < 10


SUITES = [
    ("switching invariance of beta_c", test_equivalence.test_switching_invariance_of_beta),
    ("switching invariance and ordering of gamma_aq", test_quantum.test_value_ordering_and_switching_invariance),
    ("KG isomorphism vs orbit search", test_equivalence.test_equivalence_agrees_with_orbit_search),
    ("KG isomorphism vs orbit search, cyclic graphs", test_equivalence.test_relabelings_of_cyclic_graphs),
    ("cycle fixed points vs propagation", test_classical.test_cycle_fixed_points_match_propagation),
    ("xi bounds on beta_c", test_classical.test_contradiction_bounds),
    ("alpha_w(Gamma) = gamma_c", test_quantum.test_independence_number_is_classical_value),
    ("super-quantum box consistency", test_game.test_super_quantum_box),
]


def test_criterion_09_property_suites():
    with criterion(9, "property suites") as notes:
        failed = []
        for name, fn in SUITES:
            try:
                fn()
                notes.append(f"{name}: ok")
            except AssertionError as exc:
                first = str(exc).strip().splitlines()[0]
                notes.append(f"{name}: VIOLATED ({first})")
                failed.append(name)
        assert not failed, "violated: " + ", ".join(failed)


def test_criterion_10_pseudo_telepathy_screen(surveys):
    with criterion(10, "pseudo-telepathy screen") as notes:
        rows = [r for n in (5, 6, 7) for r in surveys[n][0].rows]
        bad = [r.canonical_id for r in rows
               if r.beta_c and r.gamma_aq is not None and r.gamma_aq >= r.colored - 1e-6]
        # XOR-3 two-party instances: every K_{3,3} class
        k33 = enum_labelings(6, complete_bipartite_pairs(3, 3), 3, ALL_LD, bipartition=({0, 1, 2}, {3, 4, 5}))
        screened = len(rows)
        for cls in k33:
            assert is_prime(cls.game.d)
            s = pseudo_telepathy_screen(cls.game)
            screened += 1
            if s.beta_c and s.gamma_aq is not None and s.gamma_aq >= s.edges - 1e-6:
                bad.append(cls.canonical.hex())
        notes.append(f"{screened} instances screened, {len(bad)} candidates")
        assert not bad


def test_criterion_11_chsh():
    with criterion(11, "CHSH") as notes:
        t0 = time.time()
        g = chsh()
        cr = classical_value(g)
        aq = almost_quantum_value(g)
        grid = chsh_grid_value()
        notes.append(f"gamma_c={cr.gamma_c}/4 gamma_aq={aq.value:.6f} grid={grid:.6f}")
        assert (cr.beta_c, cr.gamma_c) == (1, 3)
        assert abs(aq.value - 3.41421) <= TOL
        assert grid <= aq.value + 1e-6
        assert abs(grid - aq.value) <= TOL
        assert time.time() - t0 < 10


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
