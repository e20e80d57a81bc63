import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from apacket.halfint import HalfInt
from apacket.multiseg import (
    GLObject,
    LadderMatrix,
    Segment,
    Z_of_block,
    apply_chain,
    decoupage_count,
    jac_left,
    jac_right,
    jac_theta_chain,
    linked,
    pi_gl,
    raise_block,
    raise_hypotheses,
    single_row,
    speh_matrix,
    unlinked_product_irreducible,
)
from apacket.params import JordanBlock, PsiParameter, canonical_order

from conftest import RHO, blocks

h = HalfInt


def seg(a, b):
    return Segment(RHO, h(a), h(b))


def test_linked_examples():
    assert linked(seg(0, 2), seg(1, 3))
    assert not linked(seg(0, 3), seg(1, 2))
    assert not linked(seg(0, 1), seg(3, 4))
    assert linked(seg(0, 1), seg(2, 3))


def test_speh_examples():
    assert speh_matrix(RHO, 2, 2).rows == ((h(0), h(1)), (h(-1), h(0)))
    assert speh_matrix(RHO, 1, 1).rows == ((h(0), h(0)),)
    m = speh_matrix(RHO, 3, 1)
    assert m.rows == ((h(1), h(1)), (h(0), h(0)), (h(-1), h(-1)))


def test_z_examples():
    assert Z_of_block(JordanBlock(RHO, h(0), h(0))).rows == ((h(0), h(0)),)
    assert Z_of_block(JordanBlock(RHO, h(1), h(0))).rows == ((h(0), h(-1)), (h(1), h(0)))
    assert Z_of_block(JordanBlock(RHO, h(1), h(1), -1)).rows == ((h(-1), h(1)),)


@given(blocks(max_A=5))
def test_ladders_are_valid(blk):
    assert Z_of_block(blk).is_valid()
    assert speh_matrix(RHO, blk.a, blk.b).is_valid()
    assert Z_of_block(blk).size() == blk.a * blk.b


def test_jac_left_examples():
    z = pi_gl([JordanBlock(RHO, h(1), h(0))])
    out = jac_left(z, RHO, 0)
    assert len(out) == 1
    (res,) = out
    assert res.factors[0].rows == ((h(-1), h(-1)), (h(1), h(0)))
    assert not jac_left(z, RHO, 5)
    w = pi_gl([JordanBlock(RHO, h(1), h(1), -1)])
    (res,) = jac_left(w, RHO, -1)
    assert res.factors[0].rows == ((h(0), h(1)),)


def _all_ladders(max_A=3):
    out = []
    for A2 in range(0, 2 * max_A + 1):
        for B2 in range(A2 % 2, A2 + 1, 2):
            for z in (1, -1):
                out.append(Z_of_block(JordanBlock(RHO, h.from_twice(A2), h.from_twice(B2), z)))
    return out


def test_left_and_right_commute_exhaustive():
    for lad in _all_ladders(3):
        obj = GLObject((lad,))
        xs = {s for s, _ in lad.rows} | {e for _, e in lad.rows}
        for x in xs:
            a = apply_chain(obj, RHO, [("g", x), ("d", -x)])
            b = apply_chain(obj, RHO, [("d", -x), ("g", x)])
            assert a == b, (lad, x)


def test_theta_chain_example():
    # the chain runs over B+1, ..., A+1 of the lowered block (A=1, B=0)
    big = pi_gl([JordanBlock(RHO, h(2), h(1))])
    out = jac_theta_chain(big, RHO, 1, 1, 2)
    assert decoupage_count(out) == 1
    assert list(out) == [pi_gl([JordanBlock(RHO, h(1), h(0))])]
    assert decoupage_count(jac_theta_chain(big, RHO, 1, 2, 3)) == 0


def test_theta_chain_trivial_cases():
    obj = pi_gl([JordanBlock(RHO, h(2), h(1))])
    assert apply_chain(obj, RHO, []) == {obj: 1}
    assert decoupage_count(jac_theta_chain(obj, RHO, 1, 7, 8)) == 0


def test_unlinked_examples():
    assert unlinked_product_irreducible(single_row(RHO, 2, 3), single_row(RHO, 5, 6))
    assert not unlinked_product_irreducible(single_row(RHO, 0, 2), single_row(RHO, 1, 3))
    assert unlinked_product_irreducible(single_row(RHO, 0, 3), single_row(RHO, 1, 2))


@given(st.lists(blocks(max_A=5, labels=(RHO,)), min_size=1, max_size=4), st.data())
@settings(max_examples=150)
def test_raise_then_theta_chain_descends(blks, data):
    psi = PsiParameter(canonical_order(blks), check_order=False)
    pos = data.draw(st.sampled_from(range(len(psi))))
    if not raise_hypotheses(psi, pos):
        return
    blk = psi[pos]
    raised = raise_block(psi, pos)
    z = blk.zeta
    out = jac_theta_chain(pi_gl(raised), RHO, z, z * (blk.B + 1), z * (blk.A + 1))
    assert decoupage_count(out) == 1
    assert list(out) == [pi_gl(psi)]
