"""Canonical signed-digit recoding and shift-add constant multiplication."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from moa_lab import InputDomainError, ScmNetwork, ScmTerm, csd_recode, eval_scm


def terms_of(constant: int) -> list[tuple[int, int]]:
    return [(t.shift, t.sign) for t in csd_recode(constant).terms]


def test_known_recodings():
    assert terms_of(0) == []
    assert terms_of(1) == [(0, 1)]
    assert terms_of(8) == [(3, 1)]
    assert terms_of(7) == [(0, -1), (3, 1)]      # 8 - 1
    assert terms_of(-6) == [(1, 1), (3, -1)]     # -8 + 2
    assert terms_of(23) == [(0, -1), (3, -1), (5, 1)]  # 32 - 8 - 1


@given(st.integers(min_value=-(2**31) + 1, max_value=2**31 - 1))
def test_recoding_reconstructs_the_constant(constant):
    net = csd_recode(constant)
    assert sum(t.sign << t.shift for t in net.terms) == constant


@given(st.integers(min_value=-(2**31) + 1, max_value=2**31 - 1))
def test_no_two_adjacent_nonzero_digits(constant):
    shifts = sorted(t.shift for t in csd_recode(constant).terms)
    assert all(b - a >= 2 for a, b in zip(shifts, shifts[1:]))


def test_adjacency_holds_across_a_dense_range():
    for constant in range(-4096, 4096):
        shifts = sorted(t.shift for t in csd_recode(constant).terms)
        assert all(b - a >= 2 for a, b in zip(shifts, shifts[1:])), constant


def test_never_more_digits_than_plain_binary():
    for constant in range(4096):
        assert len(csd_recode(constant).terms) <= bin(constant).count("1")


def test_adder_count_is_terms_minus_one():
    assert csd_recode(0).adder_count == 0
    assert csd_recode(8).adder_count == 0
    assert csd_recode(7).adder_count == 1
    assert csd_recode(23).adder_count == 2


def test_zero_constant_is_eliminated():
    assert csd_recode(0).is_eliminated
    assert not csd_recode(8).is_eliminated


@given(
    st.integers(min_value=-(2**20), max_value=2**20),
    st.integers(min_value=-(2**30), max_value=2**30),
)
def test_shift_add_equals_native_product(constant, x):
    assert eval_scm(csd_recode(constant), x) == constant * x


def test_eval_known_value():
    assert eval_scm(csd_recode(7), 13) == 91


def test_constant_width_guard():
    with pytest.raises(InputDomainError):
        csd_recode(2**31)
    with pytest.raises(InputDomainError):
        csd_recode(-(2**31))


def test_product_overflow_guard():
    net = csd_recode(2**30)
    with pytest.raises(InputDomainError):
        eval_scm(net, 2**34)


def test_term_validation():
    with pytest.raises(InputDomainError):
        ScmTerm(-1, 1)
    with pytest.raises(InputDomainError):
        ScmTerm(2, 0)


def test_network_is_hashable_and_frozen():
    net = csd_recode(7)
    assert net == ScmNetwork(7, net.terms)
    assert hash(net) == hash(ScmNetwork(7, net.terms))
