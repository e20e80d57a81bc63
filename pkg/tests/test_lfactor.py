from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apacket.halfint import HalfInt
from apacket.lfactor import (
    ONE,
    LFormalProduct,
    LTerm,
    RG,
    contribution_table,
    order_at,
    pair_normalizer,
    pair_normalizer_order,
    pole_order_of_term,
    r_of_psi,
    rg_term,
    shahidi_shifts,
    steinberg_pair,
    target_params,
)
from apacket.params import CuspidalLabel, JordanBlock, PsiParameter, block_from_ab

from conftest import RHO, SIGMA, psis

h = HalfInt


def L(shift, e=1, rho=RHO, rho2=RHO):
    return LFormalProduct([(LTerm(rho, rho2, h(shift)), e)])


def test_shahidi_examples():
    assert shahidi_shifts(2, 4) == [h(1), h(2)]
    assert shahidi_shifts(1, 1) == [h(0)]
    assert shahidi_shifts(3, 1) == [h(1)]


def test_pole_rule_examples():
    assert pole_order_of_term(RHO, RHO, h(-1), h(1)) == 1
    assert pole_order_of_term(RHO, RHO, h(2), h(1)) == 0
    assert pole_order_of_term(RHO, SIGMA, h(-1), h(1)) == 0


def test_formal_product_algebra():
    p = L(1) * L(2, -1)
    assert (p / p).is_one()
    assert p * p.inverse() == ONE
    assert L(1) * L(1) == LFormalProduct([(LTerm(RHO, RHO, h(1)), 2)])
    assert (rg_term(RHO) * L(0)).without_rg() == L(0)


def test_r_of_psi_examples():
    psi = PsiParameter((block_from_ab(RHO, 1, 3),))
    assert r_of_psi(psi, RHO, 1) == L(-1) * L(2, -1) * rg_term(RHO)
    assert r_of_psi(PsiParameter(()), RHO, 1) == rg_term(RHO)
    psi = PsiParameter((block_from_ab(RHO, 5, 3),))
    want = rg_term(RHO)
    for k in range(5):
        want = want * L(-1 + k) * L(2 + k, -1)
    assert r_of_psi(psi, RHO, 5) == want


def test_order_examples():
    r = r_of_psi(PsiParameter((block_from_ab(RHO, 1, 3),)), RHO, 1)
    assert order_at(r, 1).order == -1
    r = r_of_psi(PsiParameter((block_from_ab(RHO, 5, 1),)), RHO, 3)
    assert order_at(r, 1).order == 0
    assert order_at(ONE, h("5/2")).order == 0


def test_order_at_zero_is_an_interval():
    res = order_at(rg_term(RHO), 0)
    assert (res.lo, res.hi) == (-1, 0)
    assert not res.exact
    with pytest.raises(ValueError):
        res.order


def test_table_examples():
    assert contribution_table(block_from_ab(RHO, 1, 3), 1, 3)
    assert contribution_table(block_from_ab(RHO, 5, 3), 5, 3)
    assert not contribution_table(block_from_ab(RHO, 5, 1), 1, 3)
    assert not contribution_table(block_from_ab(SIGMA, 1, 3), 1, 3, RHO)
    with pytest.raises(ValueError):
        contribution_table(block_from_ab(RHO, 1, 1), 1, 1)


def test_target_params():
    tp = target_params(5, 3)
    assert (tp.A0, tp.B0, tp.zeta0, tp.s0) == (h(3), h(1), 1, h(1))
    assert target_params(1, 3).zeta0 == -1


def test_pair_normalizer_examples():
    assert pair_normalizer_order(2, 0, 2, 1).std_pole == 1
    res = pair_normalizer_order(3, 2, 2, 0)
    assert res.std_pole == 0 and res.normalized_holomorphic
    assert pair_normalizer_order(1, 1, 5, 3).std_pole == 0


def _unfactored_order(a0, a, b, s0):
    """Order at s0 of L(St(a0) x St(a), s - (b-1)/2) / L(..., s + (b+1)/2), rho0 = rho."""
    ks = [Fraction(a + a0, 2) - 1 - j for j in range(min(a, a0))]
    poles = sum(1 for k in ks if s0 + k - Fraction(b - 1, 2) == 0)
    zeros = sum(1 for k in ks if s0 + k + Fraction(b + 1, 2) == 0)
    return zeros - poles


@given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 12), st.integers(0, 8))
def test_shahidi_factorization_matches_unfactored(a0, a, b, s2):
    s0 = Fraction(s2, 2)
    blk = block_from_ab(RHO, a, b)
    got = order_at(r_of_psi([blk], RHO, a0, with_rg=False), HalfInt(s0)).order
    assert got == _unfactored_order(a0, a, b, s0)


@given(psis(max_blocks=5, max_A=8), st.integers(1, 12), st.integers(1, 10))
@settings(max_examples=200)
def test_r_has_no_zero_for_positive_s0(psi, a0, s2):
    for rho0 in (RHO, SIGMA):
        assert order_at(r_of_psi(psi, rho0, a0), HalfInt.from_twice(s2)).order <= 0


@given(*(st.integers(0, 16) for _ in range(4)))
def test_pair_pole_is_at_most_simple(x, y, z, w):
    A0p, B0p = sorted((h.from_twice(x), h.from_twice(y)), reverse=True)
    A, B = sorted((h.from_twice(z), h.from_twice(w)), reverse=True)
    assert pair_normalizer_order(A0p, B0p, A, B).std_pole in (0, 1)


def test_steinberg_pair_is_symmetric_in_lengths():
    for a0 in range(1, 7):
        for a in range(1, 7):
            x = steinberg_pair(RHO, a0, RHO, a, h("1/2"))
            y = steinberg_pair(RHO, a, RHO, a0, h("1/2"))
            assert x == y
