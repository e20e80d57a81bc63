"""Random parameters and targets for sweeps and property tests."""

from __future__ import annotations

import random
from typing import Optional

from .halfint import HalfInt
from .packet import PacketPoint, block_candidates, center_product, enumerate_packet
from .params import (
    KINDS,
    ORTH,
    SYMP,
    CuspidalLabel,
    GroupType,
    PsiParameter,
    block_from_ab,
    canonical_order,
    good_parity,
    is_discrete_diagonal,
)
from .reduce import Target

LABELS = (CuspidalLabel("rho", 1, ORTH), CuspidalLabel("sigma", 2, SYMP))


def random_group(rng: random.Random) -> GroupType:
    return GroupType(rng.choice((1, -1)), rng.choice(("sym2", "wedge2")), rng.choice(KINDS))


def random_psi(rng: random.Random, max_blocks: int = 5, max_A: int = 6,
               labels=LABELS, group: Optional[GroupType] = None) -> PsiParameter:
    """Good-parity parameter in canonical order with A <= max_A."""
    group = group or random_group(rng)
    n = rng.randint(0, max_blocks)
    blocks = []
    while len(blocks) < n:
        rho = rng.choice(labels)
        a = rng.randint(1, 2 * max_A + 1)
        b = rng.randint(1, 2 * max_A + 2 - a)
        blk = block_from_ab(rho, a, b)
        if blk.A <= max_A and good_parity(blk, group):
            blocks.append(blk)
    return PsiParameter(canonical_order(blocks), group)


def random_point(rng: random.Random, psi: PsiParameter) -> PacketPoint:
    """A packet point when the diagonal is discrete, otherwise any candidates."""
    if is_discrete_diagonal(psi) and len(psi) <= 6:
        entries = enumerate_packet(psi)
        if entries:
            return rng.choice(entries).point
    picks = [rng.choice(block_candidates(b)) for b in psi.blocks]
    return PacketPoint([p[0] for p in picks], [p[1] for p in picks])


def random_target(rng: random.Random, max_blocks: int = 5, max_A: int = 6,
                  max_a0: int = 9, max_s0_twice: int = 7, allow_zero: bool = False) -> Target:
    psi = random_psi(rng, max_blocks, max_A)
    point = random_point(rng, psi)
    rho0 = rng.choice(LABELS)
    a0 = rng.randint(1, max_a0)
    s0 = HalfInt.from_twice(rng.randint(0 if allow_zero else 1, max_s0_twice))
    return Target(psi, point, rho0, a0, s0)


def consistent_hasse(psi: PsiParameter, point: PacketPoint) -> PsiParameter:
    """Same blocks with the Hasse sign that makes ``point`` lie in the packet."""
    group = GroupType(center_product(psi, point), psi.group.rG_kind, psi.group.star_kind)
    return PsiParameter(psi.blocks, group)
