"""Packet points (t, eta), sign characters and the parameter-level descents."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .halfint import HalfInt, hi
from .params import (
    CuspidalLabel,
    JordanBlock,
    ParameterError,
    PsiParameter,
    block_from_ab,
    dominates,
    ell,
    is_discrete_diagonal,
)


@dataclass(frozen=True)
class PacketPoint:
    """Per-position labels t (nonneg int) and eta (+1/-1).

    Entries may be ``None`` when unknown; the reduction engine uses such
    partial points. Everything in this module expects complete points.
    """

    t: tuple = ()
    eta: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(self.t))
        object.__setattr__(self, "eta", tuple(self.eta))
        if len(self.t) != len(self.eta):
            raise ParameterError("t and eta must have the same length")

    def __len__(self):
        return len(self.t)

    @property
    def is_complete(self) -> bool:
        return None not in self.t and None not in self.eta

    def validate(self, psi: PsiParameter) -> None:
        """Check ranges and the eta=+ forcing wherever entries are known."""
        if len(self) != len(psi):
            raise ParameterError(f"point has {len(self)} entries, parameter has {len(psi)} blocks")
        for i, blk in enumerate(psi.blocks):
            t, e = self.t[i], self.eta[i]
            if e is not None and e not in (1, -1):
                raise ParameterError(f"eta[{i}] must be a sign")
            if t is None:
                continue
            if not 0 <= t <= blk.inf // 2:
                raise ParameterError(f"t[{i}]={t} outside [0, {blk.inf // 2}]")
            if 2 * t == blk.inf and e == -1:
                raise ParameterError(f"eta[{i}] must be + when t = inf/2")

    def splice(self, pos: int, t_new: Sequence, eta_new: Sequence, width: int = 1) -> "PacketPoint":
        """Replace ``width`` entries starting at pos by the given lists."""
        return PacketPoint(self.t[:pos] + tuple(t_new) + self.t[pos + width:],
                           self.eta[:pos] + tuple(eta_new) + self.eta[pos + width:])

    def drop(self, positions) -> "PacketPoint":
        keep = [i for i in range(len(self)) if i not in set(positions)]
        return PacketPoint([self.t[i] for i in keep], [self.eta[i] for i in keep])

    def __str__(self):
        def s(e):
            return "?" if e is None else ("+" if e > 0 else "-")
        parts = [f"{'?' if t is None else t}{s(e)}" for t, e in zip(self.t, self.eta)]
        return "[" + " ".join(parts) + "]"


def epsilon_of(block: JordanBlock, t: int, eta: int) -> int:
    n = block.inf
    return (eta ** n) * (-1) ** (n // 2 + t)


def epsilons(psi: PsiParameter, point: PacketPoint) -> tuple:
    return tuple(epsilon_of(b, t, e) for b, t, e in zip(psi.blocks, point.t, point.eta))


def center_product(psi: PsiParameter, point: PacketPoint) -> int:
    prod = 1
    for e in epsilons(psi, point):
        prod *= e
    return prod


def epsilon_s_psi(psi: PsiParameter, point: PacketPoint) -> int:
    prod = 1
    for blk, e in zip(psi.blocks, epsilons(psi, point)):
        prod *= e ** (blk.b - 1)
    return prod


def block_candidates(block: JordanBlock) -> list:
    """(t, eta) pairs allowed on one block, in enumeration order."""
    out = []
    for t in range(block.inf // 2 + 1):
        for e in (1, -1):
            if 2 * t == block.inf and e == -1:
                continue
            out.append((t, e))
    return out


@dataclass(frozen=True)
class PacketEntry:
    point: PacketPoint
    epsilons: tuple
    center: int
    epsilon_s_psi: int


def enumerate_packet(psi: PsiParameter) -> list:
    """All (t, eta) whose sign character restricts to the Hasse sign on the center.

    Points come in lexicographic order over positions, each position running
    through t ascending with eta=+ before eta=-.
    """
    if not is_discrete_diagonal(psi):
        raise ParameterError(
            "restriction to the diagonal has multiplicity; enumerate a dominating "
            "parameter (build_dominant) and descend instead"
        )
    out = []
    for combo in itertools.product(*(block_candidates(b) for b in psi.blocks)):
        point = PacketPoint([c[0] for c in combo], [c[1] for c in combo])
        eps = epsilons(psi, point)
        center = 1
        for e in eps:
            center *= e
        if center != psi.group.hasse_sign:
            continue
        out.append(PacketEntry(point, eps, center, epsilon_s_psi(psi, point)))
    return out


def count_packet(psi: PsiParameter) -> int:
    return len(enumerate_packet(psi))


# -- elementary parameters ---------------------------------------------------

CUSPIDAL = "Cuspidal"
HOLE = "Hole"
TWO_SUBMODULES = "TwoSubmodules"


@dataclass(frozen=True)
class ElementaryCase:
    tag: str
    pos: Optional[int]
    psi_prime: Optional[PsiParameter]
    point_prime: Optional[PacketPoint]
    segment: Optional[tuple]           # (rho, from, to) exponents of the inducing segment
    applicable: tuple = ()              # every tag whose hypotheses hold
    ambiguity: Optional[tuple] = None   # the two submodules, left unresolved


def _flat_block(rho: CuspidalLabel, sup: int, side: int) -> JordanBlock:
    return block_from_ab(rho, sup, 1) if side > 0 else block_from_ab(rho, 1, sup)


def elementary_classify(psi: PsiParameter, point: PacketPoint) -> ElementaryCase:
    """Split an elementary parameter into the cuspidal, hole and two-submodule cases.

    The hole and two-submodule cases can hold simultaneously; the two-submodule
    case is then reported as the primary tag and both appear in ``applicable``.
    """
    if ell(psi) > 0:
        raise ParameterError("parameter is not elementary (ell > 0)")
    if not is_discrete_diagonal(psi):
        raise ParameterError("restriction to the diagonal must be multiplicity free")
    point.validate(psi)
    if any(t != 0 for t in point.t):
        raise ParameterError("elementary parameters force t = 0")
    where = {(b.rho, b.sup): i for i, b in enumerate(psi.blocks)}
    eta = point.eta

    hole = None
    for i, blk in enumerate(psi.blocks):
        if (blk.sup > 2 and (blk.rho, blk.sup - 2) not in where) or (blk.sup == 2 and eta[i] == 1):
            hole = i
            break

    pair = None
    order = sorted(range(len(psi)), key=lambda i: (psi[i].rho.id, psi[i].sup))
    for i in order:
        blk = psi[i]
        j = where.get((blk.rho, blk.sup - 2))
        if blk.sup <= 2 or j is None or eta[i] != eta[j]:
            continue
        # the chain below must be complete
        if all((blk.rho, s) in where for s in range(blk.sup - 4, 0, -2)):
            pair = (i, j)
            break

    cusp = hole is None and pair is None
    applicable = tuple(tag for tag, ok in ((CUSPIDAL, cusp), (TWO_SUBMODULES, pair is not None),
                                           (HOLE, hole is not None)) if ok)
    if cusp:
        return ElementaryCase(CUSPIDAL, None, None, None, None, applicable)
    if pair is not None:
        i, j = pair
        hi_blk, lo_blk = psi[i], psi[j]
        psi_p = psi.replace_blocks([b for k, b in enumerate(psi.blocks) if k not in pair], check_order=False)
        seg = (hi_blk.rho, HalfInt.from_twice(hi_blk.a - hi_blk.b),
               -HalfInt.from_twice(lo_blk.a - lo_blk.b))
        return ElementaryCase(TWO_SUBMODULES, i, psi_p, point.drop(pair), seg, applicable,
                              ambiguity=("submodule-1", "submodule-2"))
    blk = psi[hole]
    new = [] if blk.sup == 2 else [_flat_block(blk.rho, blk.sup - 2, 1 if blk.a >= blk.b else -1)]
    psi_p = psi.replace_blocks(psi.blocks[:hole] + tuple(new) + psi.blocks[hole + 1:], check_order=False)
    pt = point.splice(hole, [0] * len(new), [eta[hole]] * len(new))
    seg = (blk.rho, HalfInt.from_twice(blk.a - blk.b), HalfInt.from_twice(blk.a - blk.b))
    return ElementaryCase(HOLE, hole, psi_p, pt, seg, applicable)


# -- the restriction step ------------------------------------------------------

@dataclass(frozen=True)
class RestrictionStep:
    psi_prime: PsiParameter
    point_prime: PacketPoint
    segment: Optional[tuple]   # (rho, from, to), absent when t = 0


def restriction_discrete_step(psi: PsiParameter, point: PacketPoint, pos: int) -> RestrictionStep:
    """One step of the recursion on ell for a parameter with discrete diagonal restriction.

    t = 0 replaces (rho,a,b) by the flat blocks sup(1, zeta c) for c in
    [|a-b|+1, a+b-1] step 2, with eta'(c) = eta * (-1)^((c-|a-b|-1)/2).
    t > 0 keeps sup, lowers inf by 2 and records the segment
    <zeta B, ..., -zeta A>.
    """
    if not is_discrete_diagonal(psi):
        raise ParameterError("restriction to the diagonal must be multiplicity free")
    point.validate(psi)
    blk = psi[pos]
    if blk.inf <= 1:
        raise ParameterError("inf(a,b) must exceed 1")
    t, eta = point.t[pos], point.eta[pos]
    side = 1 if blk.a >= blk.b else -1
    if t == 0:
        d = abs(blk.a - blk.b)
        cs = range(d + 1, blk.a + blk.b, 2)
        new = [_flat_block(blk.rho, c, side) for c in cs]
        etas = [eta * (-1) ** ((c - d - 1) // 2) for c in cs]
        psi_p = psi.replace_blocks(psi.blocks[:pos] + tuple(new) + psi.blocks[pos + 1:], check_order=False)
        return RestrictionStep(psi_p, point.splice(pos, [0] * len(new), etas), None)
    seg = (blk.rho, blk.zeta * blk.B, -blk.zeta * blk.A)
    if blk.inf == 2:
        if eta != 1:
            raise ParameterError("deleting a block with inf = 2 needs eta = +")
        psi_p = psi.replace_blocks(psi.blocks[:pos] + psi.blocks[pos + 1:], check_order=False)
        return RestrictionStep(psi_p, point.splice(pos, [], []), seg)
    new = JordanBlock(blk.rho, blk.A - 1, blk.B + 1, blk.zeta)
    psi_p = psi.replace_blocks(psi.blocks[:pos] + (new,) + psi.blocks[pos + 1:], check_order=False)
    return RestrictionStep(psi_p, point.splice(pos, [t - 1], [eta]), seg)


# -- descent from a dominating parameter ----------------------------------------

@dataclass(frozen=True)
class JacStep:
    pos: int
    rho: CuspidalLabel
    zeta: int
    j: int
    exponents: tuple   # zeta(B+j), ..., zeta(A+j)

    def __str__(self):
        return f"Jac_{{{','.join(str(x) for x in self.exponents)}}}"


def jac_psi_descent(psi_big: PsiParameter, psi: PsiParameter, shifts: Sequence[int]) -> list:
    """The schedule of Jacquet functors taking Pi(psi_big) to Pi(psi).

    Blocks are lowered starting from the first one in the order; inside a
    block j runs from T down to 1 and contributes Jac_{zeta(B+j),...,zeta(A+j)}.
    """
    if not dominates(psi_big, psi):
        raise ParameterError("psi_big does not dominate psi")
    if len(shifts) != len(psi):
        raise ParameterError("one shift per block expected")
    steps = []
    for pos, (big, blk, T) in enumerate(zip(psi_big.blocks, psi.blocks, shifts)):
        if big != blk.shifted(T):
            raise ParameterError(f"block {pos}: shift {T} does not map {blk} to {big}")
        for j in range(T, 0, -1):
            exps = tuple(blk.zeta * (blk.B + j + k) for k in range(int(blk.A - blk.B) + 1))
            steps.append(JacStep(pos, blk.rho, blk.zeta, j, exps))
    return steps


def jac_support_check(psi: PsiParameter, rho: CuspidalLabel, zeta: int, B, A) -> bool:
    """Necessary condition for Jac_{zeta B, ..., zeta A} to be nonzero on the packet.

    Looks for a chain of blocks (rho, A_i, B_i, zeta) with B_1 = B,
    B_i in ]B_{i-1}, A_{i-1}+1] and A_v >= A. False certifies vanishing.
    """
    B, A = hi(B), hi(A)
    if B == 0:
        raise ParameterError("B = 0 is excluded")
    cands = [b for b in psi.blocks if b.rho == rho and b.zeta == zeta]

    def search(last: JordanBlock, used: frozenset) -> bool:
        if last.A >= A:
            return True
        for k, nxt in enumerate(cands):
            if k not in used and last.B < nxt.B <= last.A + 1:
                if search(nxt, used | {k}):
                    return True
        return False

    return any(search(b, frozenset({k})) for k, b in enumerate(cands) if b.B == B)
