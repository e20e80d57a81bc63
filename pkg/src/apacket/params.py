"""Arthur parameters as ordered lists of Jordan blocks.

A block (rho, a, b) is stored as (rho, A, B, zeta) with
A = (a+b)/2 - 1, B = |a-b|/2 and zeta the sign of a-b (+ when a = b).
All quantities are exact half-integers.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .halfint import HalfInt, hi

ORTH = "orth"
SYMP = "symp"
KINDS = (ORTH, SYMP)
RG_KINDS = ("sym2", "wedge2")


class ParameterError(ValueError):
    """Raised when a parameter violates a structural precondition."""


def _check_sign(s) -> int:
    if s not in (1, -1):
        raise ParameterError(f"sign must be +1 or -1, got {s!r}")
    return int(s)


def sign_str(s: int) -> str:
    return "+" if s > 0 else "-"


@dataclass(frozen=True, order=True)
class CuspidalLabel:
    """An opaque cuspidal representation: id, dimension and self-dual kind."""

    id: str
    d_rho: int = 1
    kind: str = ORTH

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown self-dual kind {self.kind!r}")
        if self.d_rho < 1:
            raise ParameterError("d_rho must be positive")

    def __hash__(self):
        return hash(self.id)

    def __str__(self):
        return self.id


@dataclass(frozen=True)
class JordanBlock:
    rho: CuspidalLabel
    A: HalfInt
    B: HalfInt
    zeta: int = 1

    def __post_init__(self):
        A, B = hi(self.A), hi(self.B)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        zeta = _check_sign(self.zeta)
        if B < 0 or A < B:
            raise ParameterError(f"need A >= B >= 0, got A={A}, B={B}")
        if not (A - B).is_integral:
            raise ParameterError(f"A-B must be an integer, got A={A}, B={B}")
        if B == 0:
            # a = b, and then the sign is + by convention
            zeta = 1
        object.__setattr__(self, "zeta", zeta)

    @property
    def a(self) -> int:
        return int(self.A + self.B + 1) if self.zeta > 0 else int(self.A - self.B + 1)

    @property
    def b(self) -> int:
        return int(self.A - self.B + 1) if self.zeta > 0 else int(self.A + self.B + 1)

    @property
    def inf(self) -> int:
        return int(self.A - self.B + 1)

    @property
    def sup(self) -> int:
        return int(self.A + self.B + 1)

    @property
    def is_flat(self) -> bool:
        """A = B, i.e. one of a, b equals 1."""
        return self.A == self.B

    def with_AB(self, A, B) -> "JordanBlock":
        return JordanBlock(self.rho, hi(A), hi(B), self.zeta)

    def shifted(self, T: int) -> "JordanBlock":
        return JordanBlock(self.rho, self.A + T, self.B + T, self.zeta)

    def ab_str(self) -> str:
        return f"({self.rho},{self.a},{self.b})"

    def __str__(self):
        return f"({self.rho},A={self.A},B={self.B},{sign_str(self.zeta)})"


def block_from_ab(rho: CuspidalLabel, a: int, b: int) -> JordanBlock:
    if a < 1 or b < 1:
        raise ParameterError(f"a and b must be positive, got ({a},{b})")
    A = HalfInt.from_twice(a + b - 2)
    B = HalfInt.from_twice(abs(a - b))
    return JordanBlock(rho, A, B, 1 if a >= b else -1)


def block_to_ab(block: JordanBlock) -> tuple[int, int]:
    return block.a, block.b


@dataclass(frozen=True)
class GroupType:
    hasse_sign: int = 1
    rG_kind: str = "sym2"
    star_kind: str = ORTH

    def __post_init__(self):
        _check_sign(self.hasse_sign)
        if self.rG_kind not in RG_KINDS:
            raise ParameterError(f"unknown rG kind {self.rG_kind!r}")
        if self.star_kind not in KINDS:
            raise ParameterError(f"unknown group kind {self.star_kind!r}")


@dataclass(frozen=True)
class PsiParameter:
    """Ordered multiset of Jordan blocks plus group data.

    The order is part of the data. Construction checks that labels with the
    same id agree on dimension and kind; property (P) is checked by
    :func:`order_violations` and enforced when ``check_order`` is true.
    """

    blocks: tuple = ()
    group: GroupType = field(default_factory=GroupType)
    check_order: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        blocks = tuple(self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen = {}
        for blk in blocks:
            if not isinstance(blk, JordanBlock):
                raise ParameterError(f"not a JordanBlock: {blk!r}")
            prev = seen.setdefault(blk.rho.id, blk.rho)
            if prev != blk.rho:
                raise ParameterError(f"label {blk.rho.id!r} declared inconsistently")
        if self.check_order:
            bad = order_violations(blocks)
            if bad:
                i, j = bad[0]
                raise ParameterError(
                    f"order violates (P): block {blocks[i]} at {i} must come after {blocks[j]} at {j}"
                )

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, i):
        return self.blocks[i]

    def replace_blocks(self, blocks: Iterable[JordanBlock], check_order=True) -> "PsiParameter":
        return PsiParameter(tuple(blocks), self.group, check_order)

    def __str__(self):
        return "{" + ", ".join(b.ab_str() for b in self.blocks) + "}"


def order_violations(blocks: Sequence[JordanBlock]) -> list[tuple[int, int]]:
    """Pairs (i, j) with i < j where block i must come after block j."""
    bad = []
    for i, x in enumerate(blocks):
        for j in range(i + 1, len(blocks)):
            y = blocks[j]
            if x.rho == y.rho and x.zeta == y.zeta and x.A > y.A and x.B > y.B:
                bad.append((i, j))
    return bad


def satisfies_order(blocks: Sequence[JordanBlock]) -> bool:
    return not order_violations(blocks)


def _strong_key(blk: JordanBlock):
    return (blk.B, blk.A, blk.zeta)


def satisfies_strong_order(blocks: Sequence[JordanBlock]) -> bool:
    """The stricter order: per rho, sorted by (|a-b|, a+b) with the a<b copy first."""
    for i, x in enumerate(blocks):
        for y in blocks[i + 1:]:
            if x.rho == y.rho and _strong_key(x) > _strong_key(y):
                return False
    return True


def canonical_order(blocks: Iterable[JordanBlock]) -> tuple:
    """A deterministic order satisfying both (P) and the strong order."""
    return tuple(sorted(blocks, key=lambda b: (b.B, b.A, b.zeta, b.rho.id)))


def make_psi(blocks: Iterable[JordanBlock], group: GroupType | None = None, sort=False) -> PsiParameter:
    blocks = canonical_order(blocks) if sort else tuple(blocks)
    return PsiParameter(blocks, group or GroupType())


# -- parity -----------------------------------------------------------------

def sl2_kind(m: int) -> str:
    """[m] is orthogonal for m odd, symplectic for m even."""
    return ORTH if m % 2 else SYMP


def kind_product(*kinds: str) -> str:
    n_symp = sum(1 for k in kinds if k == SYMP)
    return SYMP if n_symp % 2 else ORTH


def good_parity(block: JordanBlock, group: GroupType) -> bool:
    return kind_product(block.rho.kind, sl2_kind(block.a), sl2_kind(block.b)) == group.star_kind


def psi_good_parity(psi: PsiParameter) -> bool:
    return all(good_parity(b, psi.group) for b in psi.blocks)


def bad_parity_blocks(psi: PsiParameter) -> list[int]:
    return [i for i, b in enumerate(psi.blocks) if not good_parity(b, psi.group)]


# -- restriction to the diagonal ----------------------------------------------

def restriction_to_diagonal(psi: PsiParameter) -> Counter:
    """Multiset of (rho, sup(a, b))."""
    return Counter((b.rho, b.sup) for b in psi.blocks)


def is_discrete_diagonal(psi: PsiParameter) -> bool:
    return all(n == 1 for n in restriction_to_diagonal(psi).values())


def has_multiplicity(psi: PsiParameter) -> bool:
    return any(n > 1 for n in Counter(psi.blocks).values())


# -- cuspidal support predicates -----------------------------------------------

@dataclass(frozen=True)
class SupportPredicates:
    discret: bool
    sans_trou: bool
    alterne: bool


def cuspidal_support_predicates(psi: PsiParameter, eps: Sequence[int]) -> SupportPredicates:
    """Predicates on a parameter trivial on the second SL(2).

    ``eps`` gives a sign per block position.
    """
    if len(eps) != len(psi):
        raise ParameterError("eps must give one sign per block")
    for blk in psi.blocks:
        if blk.b != 1:
            raise ParameterError(f"block {blk.ab_str()} has b != 1")
    pairs = [(blk.rho, blk.a) for blk in psi.blocks]
    discret = len(set(pairs)) == len(pairs)
    present = set(pairs)
    sans_trou = all(a <= 2 or (rho, a - 2) in present for rho, a in pairs)
    sign_at = {}
    for (rho, a), e in zip(pairs, eps):
        sign_at.setdefault((rho, a), set()).add(e)
    alterne = True
    for (rho, a), e in zip(pairs, eps):
        if a == 2 and e != -1:
            alterne = False
        below = sign_at.get((rho, a - 2))
        if below is not None and e in below:
            alterne = False
    return SupportPredicates(discret, sans_trou, alterne)


# -- measures ------------------------------------------------------------------

@dataclass(frozen=True)
class Measures:
    ell_plus: int
    ell_minus: int
    n_minus: int

    @property
    def ell(self) -> int:
        return self.ell_plus + self.ell_minus

    def __add__(self, other: "Measures") -> "Measures":
        return Measures(self.ell_plus + other.ell_plus,
                        self.ell_minus + other.ell_minus,
                        self.n_minus + other.n_minus)


def measures(psi: PsiParameter | Iterable[JordanBlock]) -> Measures:
    blocks = psi.blocks if isinstance(psi, PsiParameter) else tuple(psi)
    ell_plus = sum(b.inf - 1 for b in blocks if b.zeta > 0)
    ell_minus = sum(b.inf - 1 for b in blocks if b.zeta < 0)
    n_minus = sum(1 for b in blocks if b.zeta < 0)
    return Measures(ell_plus, ell_minus, n_minus)


def ell(psi) -> int:
    return measures(psi).ell


# -- dominance -------------------------------------------------------------

def dominates(psi_big: PsiParameter, psi: PsiParameter) -> bool:
    if len(psi_big) != len(psi):
        return False
    for big, small in zip(psi_big.blocks, psi.blocks):
        if big.rho != small.rho or big.inf != small.inf:
            return False
        if (big.a - big.b) * (small.a - small.b) < 0:
            return False
        if big.sup < small.sup:
            return False
    return True


@dataclass(frozen=True)
class Dominant:
    psi_big: PsiParameter
    shifts: tuple


def build_dominant(psi: PsiParameter, base_gap: int = 1) -> Dominant:
    """Shift each block by T, T strictly increasing along the order.

    Each T is the smallest multiple of ``base_gap`` above the previous T such
    that B+T exceeds A'+T' for every earlier block with the same rho. The
    shifted parameter then has discrete restriction to the diagonal.
    """
    if base_gap < 1:
        raise ParameterError("base_gap must be positive")
    bad = bad_parity_blocks(psi)
    if bad:
        raise ParameterError(f"bad parity at positions {bad}; no dominating discrete parameter")
    shifts = []
    shifted = []
    for blk in psi.blocks:
        T = 0 if not shifts else shifts[-1] + base_gap
        while any(p.rho == blk.rho and blk.B + T <= p.A for p in shifted):
            T += base_gap
        shifts.append(T)
        shifted.append(blk.shifted(T))
    return Dominant(psi.replace_blocks(shifted), tuple(shifts))
