import random

import pytest
from hypothesis import strategies as st

from apacket.halfint import HalfInt
from apacket.params import ORTH, SYMP, CuspidalLabel, GroupType, JordanBlock, PsiParameter, canonical_order

RHO = CuspidalLabel("rho", 1, ORTH)
SIGMA = CuspidalLabel("sigma", 2, SYMP)


@st.composite
def blocks(draw, max_A=6, labels=(RHO, SIGMA)):
    rho = draw(st.sampled_from(labels))
    A2 = draw(st.integers(0, 2 * max_A))
    B2 = draw(st.integers(0, A2).filter(lambda b: (A2 - b) % 2 == 0))
    zeta = draw(st.sampled_from((1, -1)))
    return JordanBlock(rho, HalfInt.from_twice(A2), HalfInt.from_twice(B2), zeta)


@st.composite
def psis(draw, max_blocks=4, max_A=6, labels=(RHO, SIGMA)):
    blks = draw(st.lists(blocks(max_A, labels), max_size=max_blocks))
    group = GroupType(draw(st.sampled_from((1, -1))), "sym2", draw(st.sampled_from((ORTH, SYMP))))
    return PsiParameter(canonical_order(blks), group)


@pytest.fixture
def rng():
    return random.Random(12345)
