import pytest

from dualmatrix import numerics as nx
from dualmatrix.core import check_invariants, init_state, refresh, valuation, vertices
from dualmatrix.deviations import (DegenerateOrigin, annul, build_context, edge_context,
                                   increment, long_edge_trigger, reenclose, sparsify_row)
from dualmatrix.numerics import Q

ORIGIN2 = [[Q(1), Q(0)], [Q(0), Q(1)]]


def test_edge_context_worked_values():
    M, spread, tp, td, h = edge_context((0, 4), (0, 5), ORIGIN2, (1, 1), 2)
    assert (M, spread, tp, td) == (4, 4, 4, Q(3, 32))
    assert h == [Q(3, 8), 0]


def test_edge_context_clamps():
    # w.v_j = M + spread gives t' = 1
    *_, td, h = edge_context((0, 4), (0, 2), ORIGIN2, (1, 1), 2)
    assert td == 0 and h == [0, 0]
    *_, td, _ = edge_context((0, 4), (0, Q(1, 2)), ORIGIN2, (1, 1), 2)
    assert td == 0


def test_edge_context_degenerate_origin():
    with pytest.raises(DegenerateOrigin):
        edge_context((1, 1), (0, 5), [[Q(1), Q(0)], [Q(0), Q(1)]], (1, 1), 1)


def test_trigger():
    st_ = init_state([(0, (1, 0)), (1, (0, 1))])
    assert long_edge_trigger(st_, 6) is None
    big = init_state([(0, (1, 0)), (1, (2 ** 30, 1))])
    assert long_edge_trigger(big, 6, 4) == (0, 1)
    with pytest.raises(ValueError):
        long_edge_trigger(st_, 6, 0)


def test_trigger_tie_goes_to_smallest_pair():
    # identity in 3-D: every edge has length sqrt(2); L = 0 makes the gate open
    st_ = init_state([(0, (1, 0, 0)), (1, (0, 1, 0)), (2, (0, 0, 1))])
    assert long_edge_trigger(st_, 0, 1) == (0, 1)


def long_edge_state():
    """A hand-built state whose simplex has a long edge far outside the origin."""
    rows = {0: (1, 0, 0), 1: (0, 1, 0), 2: (0, 0, 1), 4: (-1, 1, 0),
            5: (0, 1, -1), 6: (0, -1, 1)}
    st_ = init_state([(k, rows[k]) for k in range(3)])
    new = st_.copy()
    new.rows.update({k: tuple(map(Q, r)) for k, r in rows.items()})
    new.B = [{0: Q(7, 4), 6: Q(8)}, {1: Q(1), 4: Q(1), 2: Q(2021)},
             {2: Q(1), 0: Q(1), 5: Q(1)}]
    return refresh(new)


def test_reenclose_gains_on_long_edge():
    st_ = long_edge_state()
    check_invariants(st_)
    vs = vertices(st_)[0]
    pair = max(((i, j) for i in range(3) for j in range(i + 1, 3)),
               key=lambda p: nx.norm2(nx.sub(vs[p[1]], vs[p[0]])))
    ctx = build_context(st_, *pair)
    assert max(ctx.t_prime, ctx.t_prime_rev) > 1
    inc_i = increment(st_, ctx.w, ctx.M, ctx.t_dev)
    inc_j = increment(st_, [-x for x in ctx.w], ctx.M_rev, ctx.t_dev_rev)
    assert all(v >= 0 for v in list(inc_i.values()) + list(inc_j.values()))
    before = valuation(st_)
    new, rep = reenclose(st_, ctx, 0)
    assert rep.accepted
    check_invariants(new)
    assert valuation(new) > before
    assert rep.lam == valuation(new) / before
    assert rep.note.startswith("claim_log2=")
    # the increments are exactly what was added to B
    for row, inc in ((ctx.i_edge, inc_i), (ctx.j_edge, inc_j)):
        for cid, v in inc.items():
            assert new.B[row].get(cid, 0) == st_.B[row].get(cid, 0) + v


def test_build_context_is_pure():
    st_ = long_edge_state()
    assert build_context(st_, 0, 1) == build_context(st_, 0, 1)


def test_reenclose_without_gain_is_rejected_and_state_kept():
    st_ = init_state([(0, (1, 0)), (1, (0, 1))])
    ctx = build_context(st_, 0, 1)
    assert ctx.t_dev == 0 and ctx.t_dev_rev == 0
    new, rep = reenclose(st_, ctx, 6)
    assert new is st_ and not rep.accepted and rep.lam == 1


def test_annul_worked_example():
    hist = annul([1, 2, 1], [[1, -1, 0], [0, 1, -1]])
    assert hist == [[1, 2, 1], [0, 3, 1], [0, 0, 4]]
    for b in hist:
        assert sum(b) == 4 and all(x >= 0 for x in b)


def test_sparsify_row_n1():
    A = {0: (Q(1),), 1: (Q(1),), 2: (Q(1),)}
    st_ = init_state([(0, A[0])])
    st_.rows.update(A)
    st_.B = [{0: Q(1), 1: Q(2), 2: Q(1)}]
    refresh(st_)
    C_before = st_.C()
    new = sparsify_row(st_, 0)
    assert new.C() == C_before
    assert len([v for v in new.B[0].values() if v]) <= 1
    assert all(v >= 0 for v in new.B[0].values())


def test_sparsify_noop_below_threshold():
    st_ = init_state([(0, (1, 0)), (1, (0, 1))])
    assert sparsify_row(st_, 0) is st_
