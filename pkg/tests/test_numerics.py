from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dualmatrix import numerics as nx
from dualmatrix.numerics import Q

small = st.integers(-20, 20)
rat = st.fractions(min_value=-50, max_value=50, max_denominator=12)


def test_q_accepts_strings_ints_and_fractions():
    assert nx.q("3/4") == Q(3, 4)
    assert nx.q("0.25") == Q(1, 4)
    assert nx.q(-5) == Q(-5)
    assert nx.q(Fraction(2, 6)) == Q(1, 3)


def test_dot_and_norm():
    assert nx.dot([1, 2], [3, 4]) == 11
    assert nx.norm2(nx.vector(["1/2", "1/2"])) == Q(1, 2)
    with pytest.raises(ValueError):
        nx.dot([1], [1, 2])


def test_qsum_mixed_denominators():
    assert nx.qsum([Q(1, 3), Q(1, 6), Q(1, 2)]) == 1
    assert nx.qsum([]) == 0


def test_invert_and_det():
    m = nx.matrix([[2, 0], [0, 3]])
    assert nx.invert(m) == nx.matrix([["1/2", 0], [0, "1/3"]])
    assert nx.det(m) == 6
    assert nx.det([[0, 1], [1, 0]]) == -1
    with pytest.raises(nx.Singular):
        nx.invert([[1, 2], [2, 4]])


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_inverse_roundtrip(rows):
    m = nx.matrix(rows)
    if nx.det(m) == 0:
        assert nx.rank(m) < 3
        return
    assert nx.mat_mul(nx.invert(m), m) == nx.identity(3)
    assert nx.det(nx.invert(m)) * nx.det(m) == 1


@given(st.lists(st.lists(small, min_size=2, max_size=2), min_size=1, max_size=6))
def test_kernel_basis_annihilates(rows):
    F = nx.kernel_basis(rows)
    assert len(F) == len(rows) - nx.rank(rows)
    for f in F:
        assert nx.vec_mat(f, nx.matrix(rows)) == [0, 0]
    if F:
        assert nx.rank(F) == len(F)


def test_round_sig_half_even():
    assert nx.round_sig(Q(5, 2), 2) == 2  # 10.1b -> 10b
    assert nx.round_sig(Q(7, 2), 2) == 4  # 11.1b -> 100b
    assert nx.round_sig(Q(-3, 8), 1) == Q(-1, 2)
    assert nx.round_sig(0, 4) == 0
    with pytest.raises(ValueError):
        nx.round_sig(1, 0)


@given(rat.filter(lambda x: x != 0), st.integers(1, 40))
def test_round_sig_relative_error(x, bits):
    r = nx.round_sig(x, bits)
    assert abs(r - nx.q(x)) <= abs(nx.q(x)) / 2 ** bits


def test_log2_of_huge_values():
    assert nx.log2(Q(2) ** 5000) == pytest.approx(5000)
    assert nx.log2(Q(1, 2 ** 3000)) == pytest.approx(-3000)
    with pytest.raises(ValueError):
        nx.log2(0)


def test_fmt_and_parse_roundtrip():
    for x in (Q(3, 4), Q(-7), Q(0)):
        assert nx.parse_q(nx.fmt(x)) == x
    assert nx.fmt(Q(2)) == "2/1"
