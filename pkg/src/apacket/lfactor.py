"""Formal products of local L-factors and their orders at real points.

A product is a multiset of terms L(rho x rho', s + shift)^exponent. The only
analytic input is the pole rule: L(rho x rho', s) has a simple pole at s = 0
when rho' = rho and no other poles or zeros. Orders follow the usual sign
convention: negative means a pole.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional

from .halfint import HalfInt, hi
from .params import CuspidalLabel, JordanBlock, PsiParameter

# term kinds
PAIR = "pair"
RG = "rG"   # L(rho, r_G, 2s): may or may not have a pole at s = 0


@dataclass(frozen=True, order=True)
class LTerm:
    rho: CuspidalLabel
    rho2: CuspidalLabel
    shift: HalfInt
    kind: str = PAIR

    def __str__(self):
        if self.kind == RG:
            return f"L({self.rho},rG,2(s+{self.shift}))"
        sh = f"+{self.shift}" if self.shift >= 0 else f"{self.shift}"
        return f"L({self.rho}x{self.rho2},s{sh})"


class LFormalProduct:
    """A formal product prod L(...)^e, stored as term -> exponent."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Iterable] = None):
        c = {}
        items = terms.items() if isinstance(terms, dict) else (terms or ())
        for term, e in items:
            c[term] = c.get(term, 0) + e
        self._terms = {t: e for t, e in c.items() if e != 0}

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: (kv[0].kind, kv[0].rho.id, kv[0].rho2.id, kv[0].shift))

    def __mul__(self, other: "LFormalProduct") -> "LFormalProduct":
        return LFormalProduct(list(self._terms.items()) + list(other._terms.items()))

    def __truediv__(self, other: "LFormalProduct") -> "LFormalProduct":
        return self * other.inverse()

    def inverse(self) -> "LFormalProduct":
        return LFormalProduct({t: -e for t, e in self._terms.items()})

    def without_rg(self) -> "LFormalProduct":
        return LFormalProduct({t: e for t, e in self._terms.items() if t.kind != RG})

    def __eq__(self, other):
        if not isinstance(other, LFormalProduct):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def is_one(self) -> bool:
        return not self._terms

    def __repr__(self):
        return f"LFormalProduct({self})"

    def __str__(self):
        if not self._terms:
            return "1"
        return " * ".join(f"{t}^{e}" for t, e in self.items())


ONE = LFormalProduct()


def shahidi_shifts(a0: int, a: int) -> list:
    """k in [|a-a0|/2, (a+a0)/2[ with step 1."""
    lo = HalfInt.from_twice(abs(a - a0))
    return [lo + k for k in range(min(a, a0))]


def steinberg_pair(rho0: CuspidalLabel, a0: int, rho: CuspidalLabel, a: int, shift, exponent: int = 1) -> LFormalProduct:
    """L(St(rho0,a0) x St(rho,a), s + shift)^exponent, expanded."""
    shift = hi(shift)
    return LFormalProduct((LTerm(rho0, rho, shift + k), exponent) for k in shahidi_shifts(a0, a))


def rg_term(rho0: CuspidalLabel) -> LFormalProduct:
    """L(rho0, r_G, 2s) / L(rho0, r_G, 2s+1)."""
    return LFormalProduct([(LTerm(rho0, rho0, HalfInt(0), RG), 1),
                           (LTerm(rho0, rho0, HalfInt.from_twice(1), RG), -1)])


@lru_cache(maxsize=65536)
def block_factor(block: JordanBlock, rho0: CuspidalLabel, a0: int) -> LFormalProduct:
    """L(St(rho0,a0) x St(rho,a), s-(b-1)/2) / L(..., s+(b+1)/2) for one block."""
    num = HalfInt.from_twice(-(block.b - 1))
    den = HalfInt.from_twice(block.b + 1)
    return (steinberg_pair(rho0, a0, block.rho, block.a, num, 1)
            * steinberg_pair(rho0, a0, block.rho, block.a, den, -1))


def r_of_psi(psi: PsiParameter | Iterable[JordanBlock], rho0: CuspidalLabel, a0: int,
             with_rg: bool = True) -> LFormalProduct:
    blocks = psi.blocks if isinstance(psi, PsiParameter) else tuple(psi)
    out = rg_term(rho0) if with_rg else ONE
    for blk in blocks:
        out = out * block_factor(blk, rho0, a0)
    return out


def pole_order_of_term(rho, rho2, shift, s0) -> int:
    return 1 if rho == rho2 and hi(s0) + hi(shift) == 0 else 0


@dataclass(frozen=True)
class OrderResult:
    """Order at s0, as an interval [lo, hi] (exact when lo == hi)."""

    lo: int
    hi: int
    contributing_terms: tuple = field(default=())

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def order(self) -> int:
        if not self.exact:
            raise ValueError(f"order only known to lie in [{self.lo}, {self.hi}]")
        return self.lo

    def __str__(self):
        return str(self.lo) if self.exact else f"[{self.lo},{self.hi}]"


def order_at(prod: LFormalProduct, s0) -> OrderResult:
    s0 = hi(s0)
    fixed = 0
    lo_extra = hi_extra = 0
    contributing = []
    for term, e in prod._terms.items():
        if not pole_order_of_term(term.rho, term.rho2, term.shift, s0):
            continue
        contributing.append((term, e))
        if term.kind == RG:
            # a pole of order 0 or 1, undecided
            lo_extra += min(0, -e)
            hi_extra += max(0, -e)
        else:
            fixed -= e
    contributing.sort(key=lambda te: (te[0].kind, te[0].rho.id, te[0].shift))
    return OrderResult(fixed + lo_extra, fixed + hi_extra, tuple(contributing))


# -- the pole contribution table ------------------------------------------------

@dataclass(frozen=True)
class TargetParams:
    a0: int
    b0: int
    A0: HalfInt
    B0: HalfInt
    zeta0: int

    @property
    def s0(self) -> HalfInt:
        return HalfInt.from_twice(self.b0 - 1)


def target_params(a0: int, b0: int) -> TargetParams:
    """A0 = (a0+b0)/2 - 1, B0 = |a0-b0|/2, zeta0 = sign(a0-b0) (+ if equal)."""
    return TargetParams(a0, b0, HalfInt.from_twice(a0 + b0 - 2),
                        HalfInt.from_twice(abs(a0 - b0)), 1 if a0 >= b0 else -1)


def contribution_table(block: JordanBlock, a0: int, b0: int, rho0: Optional[CuspidalLabel] = None) -> bool:
    """Whether the block's factor of r(s, psi) has a pole at s0 = (b0-1)/2.

    Cells by (zeta, zeta0): (+,+) B <= B0 <= A0 <= A; (-,+) B <= A0 <= A;
    (-,-) B0 <= B <= A0 <= A; (+,-) never. A block only interacts with the
    target when A - A0 is an integer and the cuspidal labels agree.
    """
    if b0 < 2:
        raise ValueError("b0 must be at least 2")
    if rho0 is not None and block.rho != rho0:
        return False
    tp = target_params(a0, b0)
    A, B = block.A, block.B
    if not (A - tp.A0).is_integral:
        return False
    if block.zeta > 0 and tp.zeta0 > 0:
        return B <= tp.B0 <= tp.A0 <= A
    if block.zeta < 0 and tp.zeta0 > 0:
        return B <= tp.A0 <= A
    if block.zeta < 0 and tp.zeta0 < 0:
        return tp.B0 <= B <= tp.A0 <= A
    return False


# -- two-segment intertwining operators ------------------------------------------

@dataclass(frozen=True)
class PairNormalizer:
    std_pole: int
    normalized_holomorphic: bool
    normalizer_order: int
    normalized_order_bound: int


def pair_normalizer(A0p, B0p, A, B) -> LFormalProduct:
    """L(rho x rho, s + sup(A0'-A, B0'-B)) / L(rho x rho, s + A0' - B + 1)."""
    A0p, B0p, A, B = hi(A0p), hi(B0p), hi(A), hi(B)
    rho = CuspidalLabel("rho")
    num = max(A0p - A, B0p - B)
    return LFormalProduct([(LTerm(rho, rho, num), 1), (LTerm(rho, rho, A0p - B + 1), -1)])


def pair_normalizer_order(A0p, B0p, A, B) -> PairNormalizer:
    """Poles at s = 0 of the standard operator between the two ladders.

    ``std_pole`` is 1 iff B >= B0' and A >= A0' with at least one equality;
    ``normalized_holomorphic`` is the sufficient condition B0' >= B or
    A0' >= A. ``normalizer_order`` is the order at 0 of the normalizing
    quotient and ``normalized_order_bound`` the resulting lower bound
    -std_pole - normalizer_order on the normalized operator.
    """
    A0p, B0p, A, B = hi(A0p), hi(B0p), hi(A), hi(B)
    if B0p > A0p or B > A:
        raise ValueError("need B0' <= A0' and B <= A")
    std = int(B >= B0p and A >= A0p and (B == B0p or A == A0p))
    norm = order_at(pair_normalizer(A0p, B0p, A, B), 0).order
    return PairNormalizer(std, B0p >= B or A0p >= A, norm, -std - norm)
