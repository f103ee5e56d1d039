import pytest

from dualmatrix.core import init_state, vertices
from dualmatrix.generate import gen
from dualmatrix.oracle import DenseOracle
from dualmatrix.problem import preprocess
from dualmatrix.reference import fm_feasible


def test_deterministic():
    assert gen("random", 3, 6, seed=4) == gen("random", 3, 6, seed=4)
    assert gen("random", 3, 6, seed=4) != gen("random", 3, 6, seed=5)


@pytest.mark.parametrize("seed", range(10))
def test_planted_kinds(seed):
    f = gen("feasible", 2, 5, seed=seed)
    assert f.m == 5 and fm_feasible(f).feasible
    i = gen("infeasible", 3, 6, seed=seed)
    assert i.m == 6 and not fm_feasible(i).feasible
    for s in (f, i):
        assert max(abs(x) for r in s.rows for x in r) <= 7


def test_infeasible_needs_room():
    with pytest.raises(ValueError):
        gen("infeasible", 3, 3)


def test_stress_edge_has_big_start_vertex():
    s = gen("stress-edge", 2, 4, bits=20, seed=0)
    st_ = init_state(DenseOracle(preprocess(s)).initial_basis())
    biggest = max(abs(x) for v in vertices(st_)[0] for x in v)
    assert biggest >= 2 ** 16


def test_bad_arguments():
    with pytest.raises(ValueError):
        gen("weird", 2, 2)
    with pytest.raises(ValueError):
        gen("random", 0, 2)
