import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apacket.halfint import HalfInt
from apacket.packet import (
    CUSPIDAL,
    HOLE,
    TWO_SUBMODULES,
    PacketPoint,
    block_candidates,
    center_product,
    elementary_classify,
    enumerate_packet,
    epsilon_of,
    epsilons,
    jac_psi_descent,
    jac_support_check,
    restriction_discrete_step,
)
from apacket.params import (
    GroupType,
    JordanBlock,
    ParameterError,
    PsiParameter,
    block_from_ab,
    build_dominant,
    ell,
    good_parity,
    is_discrete_diagonal,
)

from conftest import RHO, psis

h = HalfInt


def psi_ab(*pairs, hasse=1):
    return PsiParameter(tuple(block_from_ab(RHO, a, b) for a, b in pairs), GroupType(hasse))


def test_epsilon_examples():
    assert epsilon_of(block_from_ab(RHO, 3, 2), 0, -1) == -1
    assert epsilon_of(block_from_ab(RHO, 4, 4), 2, 1) == 1
    for eta in (1, -1):
        assert epsilon_of(block_from_ab(RHO, 1, 1), 0, eta) == eta


def test_point_invariants():
    psi = psi_ab((2, 2))
    PacketPoint((1,), (1,)).validate(psi)
    with pytest.raises(ParameterError):
        PacketPoint((1,), (-1,)).validate(psi)
    with pytest.raises(ParameterError):
        PacketPoint((2,), (1,)).validate(psi)
    with pytest.raises(ParameterError):
        PacketPoint((0, 0), (1, 1)).validate(psi)


def test_enumerate_examples():
    pts = enumerate_packet(psi_ab((1, 1), (3, 1)))
    assert [p.point.eta for p in pts] == [(1, 1), (-1, -1)]
    pts = enumerate_packet(psi_ab((2, 2)))
    assert [(p.point.t, p.point.eta) for p in pts] == [((1,), (1,))]
    assert len(enumerate_packet(psi_ab())) == 1
    assert len(enumerate_packet(psi_ab(hasse=-1))) == 0


def test_enumerate_rejects_non_discrete():
    with pytest.raises(ParameterError):
        enumerate_packet(psi_ab((3, 1), (1, 3)))


def _discrete(psi):
    return is_discrete_diagonal(psi)


@given(psis(max_blocks=4, max_A=3).filter(_discrete))
@settings(max_examples=60)
def test_enumerated_points_are_valid(psi):
    for entry in enumerate_packet(psi):
        entry.point.validate(psi)
        assert center_product(psi, entry.point) == psi.group.hasse_sign


@given(psis(max_blocks=4, max_A=3).filter(_discrete))
@settings(max_examples=60)
def test_enumeration_is_the_center_filter(psi):
    total = 1
    for b in psi.blocks:
        total *= len(block_candidates(b))
    both = len(enumerate_packet(psi)) + len(enumerate_packet(
        PsiParameter(psi.blocks, GroupType(-psi.group.hasse_sign))))
    assert both == total


def test_elementary_examples():
    psi = psi_ab((2, 1), (4, 1))
    assert elementary_classify(psi, PacketPoint((0, 0), (-1, 1))).tag == CUSPIDAL
    case = elementary_classify(psi_ab((4, 1)), PacketPoint((0,), (1,)))
    assert case.tag == HOLE and case.psi_prime.blocks == (block_from_ab(RHO, 2, 1),)
    case = elementary_classify(psi, PacketPoint((0, 0), (1, 1)))
    assert case.tag == TWO_SUBMODULES and len(case.psi_prime) == 0
    assert case.ambiguity is not None
    with pytest.raises(ParameterError):
        elementary_classify(psi_ab((3, 2)), PacketPoint((0,), (1,)))


def test_restriction_t0_example():
    step = restriction_discrete_step(psi_ab((5, 3)), PacketPoint((0,), (-1,)), 0)
    assert step.psi_prime.blocks == tuple(block_from_ab(RHO, c, 1) for c in (3, 5, 7))
    # eta'(c) = eta * (-1)^((c-3)/2)
    assert step.point_prime.eta == (-1, 1, -1)
    assert step.segment is None


def test_restriction_tpos_examples():
    step = restriction_discrete_step(psi_ab((5, 3)), PacketPoint((1,), (1,)), 0)
    assert step.psi_prime.blocks == (block_from_ab(RHO, 5, 1),)
    assert step.point_prime.t == (0,)
    assert step.segment == (RHO, h(1), h(-3))
    step = restriction_discrete_step(psi_ab((2, 2)), PacketPoint((1,), (1,)), 0)
    assert len(step.psi_prime) == 0 and step.segment == (RHO, h(0), h(-1))
    with pytest.raises(ParameterError):
        restriction_discrete_step(psi_ab((3, 1)), PacketPoint((0,), (1,)), 0)


@given(psis(max_blocks=4, max_A=4).filter(_discrete), st.data())
@settings(max_examples=80)
def test_restriction_preserves_center(psi, data):
    positions = [i for i, b in enumerate(psi.blocks) if b.inf > 1]
    if not positions:
        return
    pos = data.draw(st.sampled_from(positions))
    cands = [data.draw(st.sampled_from(block_candidates(b))) for b in psi.blocks]
    point = PacketPoint([c[0] for c in cands], [c[1] for c in cands])
    blk = psi[pos]
    if point.t[pos] > 0 and blk.inf == 2 and point.eta[pos] < 0:
        return
    step = restriction_discrete_step(psi, point, pos)
    assert center_product(psi, point) == center_product(step.psi_prime, step.point_prime)
    # a block with inf = 2 and t > 0 is deleted, which lowers ell by 1
    drop = blk.inf - 1 if point.t[pos] == 0 else min(2, blk.inf - 1)
    assert ell(psi) - ell(step.psi_prime) == drop


def test_jac_descent_examples():
    big = PsiParameter((JordanBlock(RHO, h(3), h(2)),))
    small = PsiParameter((JordanBlock(RHO, h(1), h(0)),))
    steps = jac_psi_descent(big, small, (2,))
    assert [s.exponents for s in steps] == [(h(2), h(3)), (h(1), h(2))]
    assert jac_psi_descent(small, small, (0,)) == []
    with pytest.raises(ParameterError):
        jac_psi_descent(small, big, (0,))


def test_jac_descent_processes_blocks_in_order():
    psi = psi_ab((1, 1), (3, 1))
    dom = build_dominant(psi, 2)
    steps = jac_psi_descent(dom.psi_big, psi, dom.shifts)
    assert [s.pos for s in steps] == sorted(s.pos for s in steps)


def test_jac_support_examples():
    one = PsiParameter((JordanBlock(RHO, h(2), h(1)),))
    assert jac_support_check(one, RHO, 1, 1, 2)
    assert not jac_support_check(one, RHO, 1, 1, 3)
    two = PsiParameter((JordanBlock(RHO, h(2), h(1)), JordanBlock(RHO, h(4), h(3))))
    assert jac_support_check(two, RHO, 1, 1, 4)
    with pytest.raises(ParameterError):
        jac_support_check(one, RHO, 1, 0, 2)


@given(psis(max_blocks=3, max_A=4), psis(max_blocks=2, max_A=4), st.integers(1, 8), st.integers(0, 6))
@settings(max_examples=100)
def test_jac_support_monotone(p, q, B2, extra):
    B = HalfInt.from_twice(B2)
    A = B + extra
    big = list(p.blocks) + list(q.blocks)
    if jac_support_check(p, RHO, 1, B, A):
        assert jac_support_check(PsiParameter(big, check_order=False), RHO, 1, B, A)
