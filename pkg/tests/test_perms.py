import itertools

import pytest
from hypothesis import given, settings, strategies as st

from xordgames.errors import InvalidParameter, Unsupported
from xordgames.perms import (Permutation, count_p1p2_structures, ld_perm, make_ld, md_formula,
                             p1p2_sets, verify_p1p2)

PROPS = settings(max_examples=200, deadline=None, derandomize=True)


def involutions_one_fixed(d):
    # oracle: filter all permutations directly
    out = 0
    for m in itertools.permutations(range(d)):
        if all(m[m[a]] == a for a in range(d)) and sum(m[a] == a for a in range(d)) == 1:
            out += 1
    return out


@pytest.mark.parametrize("d,expected", [(3, 3), (5, 15), (7, 105)])
def test_md_counts(d, expected):
    assert md_formula(d) == expected
    assert involutions_one_fixed(d) == expected


@pytest.mark.parametrize("d", [3, 5])
def test_p1p2_sets_are_relabelings(d):
    mf, mb, all_relabel = count_p1p2_structures(d)
    assert mf == mb
    assert all_relabel


def test_even_d_rejected():
    with pytest.raises(Unsupported):
        count_p1p2_structures(4)


def test_even_d_has_other_structures():
    # d=4 admits P1/P2 sets that are not conjugate to L_4
    ld = make_ld(4)
    conj = {ld.relabel(Permutation(r)).as_frozenset() for r in itertools.permutations(range(4))}
    assert any(s.as_frozenset() not in conj for s in p1p2_sets(4))


def test_ld_values():
    assert ld_perm(0, 3).map == (0, 2, 1)
    assert ld_perm(1, 3).map == (1, 0, 2)
    assert str(ld_perm(2, 3)) == "(02)"
    with pytest.raises(InvalidParameter):
        make_ld(0)


def test_verify_reports_witness():
    bad = [Permutation((1, 2, 0)), ld_perm(1, 3), ld_perm(2, 3)]
    rep = verify_p1p2(bad)
    assert not rep and rep.violated == "P1" and rep.witness == 0
    rep = verify_p1p2([ld_perm(0, 3), ld_perm(0, 3), ld_perm(2, 3)])
    assert rep.violated == "P2" and rep.witness[0] == "repeated"


@PROPS
@given(st.integers(2, 9))
def test_ld_satisfies_p1p2(d):
    rep = verify_p1p2(make_ld(d))
    assert rep.ok and rep.p1 and rep.p2


@PROPS
@given(st.integers(2, 7), st.data())
def test_ld_composition_is_shift(d, data):
    i = data.draw(st.integers(0, d - 1))
    j = data.draw(st.integers(0, d - 1))
    a = data.draw(st.integers(0, d - 1))
    # pi_i after pi_j adds i - j
    assert (ld_perm(i, d) @ ld_perm(j, d))(a) == (a + i - j) % d


@PROPS
@given(st.permutations(list(range(5))))
def test_relabeling_preserves_p1p2(r):
    assert verify_p1p2(make_ld(5).relabel(Permutation(tuple(r)))).ok
