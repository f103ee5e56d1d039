import pytest
from hypothesis import given, settings, strategies as st

from dualmatrix import numerics as nx
from dualmatrix.core import (EARLY_INFEASIBLE, GainViolated, check_invariants, choose_pivot,
                             choose_s, gain_bound, init_state, standard_step, valuation,
                             vertices)
from dualmatrix.numerics import Q

WORKED = [(0, (1, 0)), (1, (0, 1))]


def test_init_identity():
    st_ = init_state(WORKED)
    assert st_.V == nx.identity(2)
    assert st_.d == [1, 1]
    assert st_.abs_det_c == 1
    assert st_.origin.vertices == [[1, 0], [0, 1]]
    assert valuation(st_) == 1


def test_init_scaled_and_skewed():
    st_ = init_state([(0, (2, 0)), (1, (0, 3))])
    assert st_.V == nx.matrix([["1/2", 0], [0, "1/3"]])
    assert st_.u == [2, 3] and st_.d == [1, 1] and st_.abs_det_c == 6
    assert init_state([(0, (1, 1)), (1, (0, 1))]).d == [1, 1]


def test_vertices_on_identity():
    vs, vbar, center = vertices(init_state(WORKED))
    assert vs == [[1, 0], [0, 1]]
    assert vbar == [1, 1]
    assert center == [Q(1, 3), Q(1, 3)]


def test_choose_pivot():
    st_ = init_state(WORKED)
    assert choose_pivot(st_, (1, -2)) == 0
    assert choose_pivot(st_, (-1, -1)) is EARLY_INFEASIBLE
    assert choose_pivot(st_, (2, 2)) == 0


def test_choose_s_and_gain_bound():
    assert choose_s(5) == 4 and choose_s(2) == 2 and choose_s(3) == 2
    assert gain_bound(2, 2) == Q(5, 4)
    assert gain_bound(3, 2) == Q(9, 8)
    assert gain_bound(4, 3) == Q(256, 243)


def test_worked_step():
    st_ = init_state(WORKED)
    new, rep = standard_step(st_, 2, (1, -2), 0, 2)
    assert rep.t == 3
    assert new.B[0][2] == Q(1, 3)
    assert rep.delta == [Q(3, 4), Q(3, 2)]
    assert new.d == [Q(3, 4), Q(3, 2)]
    assert rep.lam == Q(3, 2)
    assert new.abs_det_c == Q(4, 3)
    assert new.V == nx.matrix([["3/4", "1/2"], [0, 1]])
    assert new.C() == nx.matrix([["4/3", "-2/3"], [0, 1]])
    assert valuation(new) == Q(3, 2)
    vs, vbar, _ = vertices(new)
    assert vs == [[1, 0], [Q(1, 3), Q(2, 3)]]
    assert vbar == [Q(4, 3), Q(2, 3)]
    check_invariants(new)
    # input state untouched
    assert st_.B[0] == {0: 1} and st_.V == nx.identity(2)


def test_two_steps_multiply_gains():
    st_ = init_state(WORKED)
    s1, r1 = standard_step(st_, 2, (1, -2), 0, 2)
    a = (-1, 1)  # violated at vbar = (4/3, 2/3), positive at v_2
    j = choose_pivot(s1, a)
    s2, r2 = standard_step(s1, 3, a, j, 2)
    assert valuation(s2) == r1.lam * r2.lam
    check_invariants(s2)


def test_step_rejects_nonpositive_pivot():
    with pytest.raises(ValueError):
        standard_step(init_state(WORKED), 2, (-1, 0), 0, 2)


def test_rounded_step_keeps_identity_exact():
    st_ = init_state([(0, (3, 1, 0)), (1, (0, 2, 1)), (2, (1, 0, 5))])
    a = (1, -7, 3)
    j = choose_pivot(st_, a)
    new, rep = standard_step(st_, 3, a, j, 2, round_bits=3)
    check_invariants(new)
    assert rep.lam >= gain_bound(3, 2)


def test_rounded_step_raises_when_gain_lost():
    st_ = init_state(WORKED)
    # a = (1, -1) meets the bound 5/4 exactly; one bit turns t = 3 into 4
    assert standard_step(st_, 2, (1, -1), 0, 2)[1].lam == gain_bound(2, 2)
    with pytest.raises(GainViolated):
        standard_step(st_, 2, (1, -1), 0, 2, round_bits=1)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=1, max_size=4),
       st.sampled_from([2, 3, 4]))
def test_random_steps_preserve_invariants(cuts, s):
    st_ = init_state([(0, (1, 0, 0)), (1, (0, 1, 0)), (2, (0, 0, 1))])
    for k, a in enumerate(cuts):
        if nx.dot(a, vertices(st_)[1]) > 0:
            continue  # only violated cuts carry the gain guarantee
        j = choose_pivot(st_, a)
        if j is EARLY_INFEASIBLE:
            return
        before = valuation(st_)
        new, rep = standard_step(st_, 10 + k, a, j, s)
        check_invariants(new)
        for dk_new, dk, dl in zip(new.d, st_.d, rep.delta):
            assert dk_new / dk == dl
        assert valuation(new) == before * rep.lam
        assert rep.lam >= gain_bound(3, s)
        st_ = new
