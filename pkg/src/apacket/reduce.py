"""The certificate-producing reduction engine.

A target is (psi, point, rho0, a0, s0). Each step classifies the target,
transforms the parameter, records the GL-side ladders that appear in the
inclusion pi -> sigma x pi', and keeps a ledger of L-factor products whose
orders at s0 justify passing holomorphy of the normalized operator from the
child back to the parent.

The engine works on (t, eta) bookkeeping only. When a decision depends on
a label that the bookkeeping does not determine, the node lists one
alternative per admissible completion; every alternative must be certified.
A node therefore carries a list of steps, each with its own child.

Ledger entries come in two kinds. An ``identity`` entry asserts that a
formal product is exactly 1. An ``order`` entry asserts the order of a
product at s0. The role of an entry says how it enters the holomorphy
budget of the step: ``gain`` entries are factors multiplying the child's
normalized operator, ``pole`` entries bound the poles of a standard
intertwining operator between St(rho0,a0)|.|^-s and a ladder (their order
is <= 0). The budget of a step is the sum of the orders of these entries
and must be nonnegative.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Optional

from .halfint import HALF, HalfInt, hi
from .lfactor import (
    ONE,
    LFormalProduct,
    TargetParams,
    block_factor,
    contribution_table,
    order_at,
    r_of_psi,
    steinberg_pair,
    target_params,
)
from .multiseg import LadderMatrix, single_row, speh_matrix, staircase
from .packet import PacketPoint, block_candidates
from .params import (
    CuspidalLabel,
    JordanBlock,
    ParameterError,
    PsiParameter,
    measures,
)

BASE_TEMPERED = "BaseTempered"
BASE_S0_ZERO = "BaseS0Zero"
MULTIPLICITY = "Multiplicity"
ISOLE_T0 = "Isole_t0"
ISOLE_TPOS = "Isole_tpos"
CONSECUTIF = "Consecutif"
NONISOLE_1 = "NonIsole_1"
NONISOLE_2 = "NonIsole_2"
NONISOLE_3 = "NonIsole_3"
NONISOLE_SAME_SIGN = "NonIsoleSameSign"
BOTTOM_I = "BottomHalfInt_i"
BOTTOM_II = "BottomHalfInt_ii"
BOTTOM_III = "BottomInt_iii"
BOTTOM_FINAL = "BottomFinal"

CASE_TAGS = (
    BASE_TEMPERED, BASE_S0_ZERO, MULTIPLICITY, ISOLE_T0, ISOLE_TPOS, CONSECUTIF,
    NONISOLE_1, NONISOLE_2, NONISOLE_3, NONISOLE_SAME_SIGN, BOTTOM_I, BOTTOM_II,
    BOTTOM_III, BOTTOM_FINAL,
)
LEAF_TAGS = frozenset({BASE_TEMPERED, BASE_S0_ZERO})

IDENTITY = "identity"
ORDER = "order"
INTERVAL = "interval"
GAIN = "gain"
POLE = "pole"
INFO = "info"


class ReductionError(ParameterError):
    """A reduction case was applied outside its hypotheses."""


# -- targets ------------------------------------------------------------------

@dataclass(frozen=True)
class Target:
    psi: PsiParameter
    point: PacketPoint
    rho0: CuspidalLabel
    a0: int
    s0: HalfInt

    def __post_init__(self):
        object.__setattr__(self, "s0", hi(self.s0))
        if self.a0 < 1:
            raise ParameterError("a0 must be a positive integer")
        if self.s0 < 0:
            raise ParameterError("s0 must be >= 0")
        self.point.validate(self.psi)

    @property
    def b0(self) -> int:
        return self.s0.twice + 1

    @property
    def params(self) -> TargetParams:
        return target_params(self.a0, self.b0)

    @property
    def zeta0(self) -> int:
        return 1 if self.a0 >= self.b0 else -1

    @property
    def A0(self) -> HalfInt:
        return self.params.A0

    @property
    def B0(self) -> HalfInt:
        return self.params.B0

    def key(self) -> tuple:
        return (self.psi.blocks, self.psi.group, self.point.t, self.point.eta,
                self.rho0, self.a0, self.s0.twice)

    def text(self) -> str:
        blocks = " ".join(f"{b.rho.id}:{b.A}:{b.B}:{'+' if b.zeta > 0 else '-'}" for b in self.psi.blocks)
        return (f"psi=[{blocks}] point={self.point} rho0={self.rho0.id} "
                f"a0={self.a0} s0={self.s0}")

    def digest(self) -> str:
        return hashlib.sha1(self.text().encode()).hexdigest()[:12]

    def with_point(self, point: PacketPoint) -> "Target":
        return replace(self, point=point)

    def pin(self, pos: int, t=None, eta=None) -> "Target":
        ts, es = list(self.point.t), list(self.point.eta)
        if t is not None:
            ts[pos] = t
        if eta is not None:
            es[pos] = eta
        return self.with_point(PacketPoint(ts, es))

    def __str__(self):
        return f"{self.psi} {self.point} @ (rho0={self.rho0}, a0={self.a0}, s0={self.s0})"


def make_target(psi: PsiParameter, point: Optional[PacketPoint], rho0: CuspidalLabel, a0: int, s0) -> Target:
    if point is None:
        point = PacketPoint([None] * len(psi), [None] * len(psi))
    return Target(psi, point, rho0, a0, hi(s0))


# -- ledger and steps ------------------------------------------------------------

@dataclass(frozen=True)
class LedgerEntry:
    kind: str
    role: str
    label: str
    product: LFormalProduct
    expected: object   # int, or (lo, hi) for interval entries

    def actual(self, s0):
        if self.kind == IDENTITY:
            return 0 if self.product.is_one() else None
        res = order_at(self.product, s0)
        if self.kind == INTERVAL:
            return (res.lo, res.hi)
        return res.lo if res.exact else None

    def holds(self, s0) -> bool:
        return self.actual(s0) == self.expected

    def __str__(self):
        return f"{self.kind}/{self.role} {self.label}: expect {self.expected}"


@dataclass(frozen=True)
class ReductionStep:
    case_tag: str
    before: Target
    after: Optional[Target]
    segments: tuple = ()
    ledger: tuple = ()
    pos: tuple = ()
    extra: tuple = ()

    @property
    def is_leaf(self) -> bool:
        return self.after is None

    @property
    def budget(self) -> int:
        return sum(e.expected for e in self.ledger if e.role in (GAIN, POLE))

    def __str__(self):
        tail = "leaf" if self.after is None else str(self.after.psi)
        return f"{self.case_tag} {self.before.psi} -> {tail}"


@dataclass
class CertNode:
    target: Target
    steps: list = field(default_factory=list)
    children: list = field(default_factory=list)


@dataclass
class Certificate:
    root: Target
    tree: CertNode

    def nodes(self) -> list:
        """Distinct nodes, parents before children."""
        seen, out, stack = set(), [], [self.tree]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            out.append(node)
            stack.extend(c for c in reversed(node.children) if c is not None)
        return out

    @property
    def steps(self) -> list:
        return [s for n in self.nodes() for s in n.steps]

    def leaves(self) -> list:
        return [s for s in self.steps if s.is_leaf]

    def depth(self) -> int:
        memo = {}

        def d(node):
            if id(node) not in memo:
                memo[id(node)] = 1 + max((d(c) for c in node.children if c is not None), default=0)
            return memo[id(node)]
        return d(self.tree)


# -- small helpers ------------------------------------------------------------------

def eff_zeta(block: JordanBlock, zeta0: int) -> int:
    """Side of a block for the target: a non-flat block with a = b sits on side -zeta0."""
    if block.B == 0 and block.A > 0:
        return -zeta0
    return block.zeta


def is_tempered(psi: PsiParameter) -> bool:
    return all(b.b == 1 for b in psi.blocks)


def measure(target: Target) -> tuple:
    """Lexicographic induction measure; the zero tuple for tempered parameters.

    zeta0 = -: (n(psi,-), ell(psi,+), |Jord|); zeta0 = +: (ell(psi,+) +
    ell(psi,-), n(psi,-), |Jord|). The last component accounts for steps
    that only remove blocks.
    """
    psi = target.psi
    if is_tempered(psi):
        return (0, 0, 0)
    m = measures(psi)
    if target.zeta0 < 0:
        return (m.n_minus, m.ell_plus, len(psi))
    return (m.ell_plus + m.ell_minus, m.n_minus, len(psi))


def _cell(block: JordanBlock, target: Target) -> int:
    return int(contribution_table(block, target.a0, target.b0, target.rho0))


def _pair(target: Target, rho: CuspidalLabel, alpha: int, shift) -> LFormalProduct:
    return steinberg_pair(target.rho0, target.a0, rho, alpha, shift)


def row_normalizers(target: Target, rho: CuspidalLabel, start, end) -> tuple:
    """Shahidi normalizers (n1, n2) for one row sigma against St(rho0,a0).

    n1 belongs to St|.|^s x sigma -> sigma x St|.|^s and n2 to
    sigma x St|.|^-s -> St|.|^-s x sigma. A decreasing row is a twisted
    Steinberg St(alpha)|.|^c; an increasing row is a twisted character whose
    L-factor is the product over its exponents.
    """
    s, e = hi(start), hi(end)
    if s >= e:
        alpha = int(s - e) + 1
        c = HalfInt.from_twice((s.twice + e.twice) // 2)
        n1 = _pair(target, rho, alpha, -c) / _pair(target, rho, alpha, -c + 1)
        n2 = _pair(target, rho, alpha, c) / _pair(target, rho, alpha, c + 1)
    else:
        n1 = _pair(target, rho, 1, -e) / _pair(target, rho, 1, -s + 1)
        n2 = _pair(target, rho, 1, s) / _pair(target, rho, 1, e + 1)
    return n1, n2


def ladder_normalizers(target: Target, ladder: LadderMatrix) -> tuple:
    n1 = n2 = ONE
    for s, e in ladder.rows:
        a, b = row_normalizers(target, ladder.rho, s, e)
        n1, n2 = n1 * a, n2 * b
    return n1, n2


def _row_factor_keys(start, end) -> tuple:
    """(numerator, denominator) factor keys (alpha, shift) of n2 for one row."""
    s, e = hi(start), hi(end)
    if s >= e:
        alpha = int(s - e) + 1
        c = HalfInt.from_twice((s.twice + e.twice) // 2)
        return [(alpha, c)], [(alpha, c + 1)]
    xs = [s + k for k in range(int(e - s) + 1)]
    return [(1, x) for x in xs], [(1, x + 1) for x in xs]


def ladder_numerator(target: Target, ladder: LadderMatrix) -> LFormalProduct:
    """Numerator of n2 after cancelling whole Rankin-Selberg factors between rows.

    For a staircase of equal rows this is L(St(alpha) x St(a0), s + c) for
    the top row; its poles bound those of the standard operator.
    """
    num, den = Counter(), Counter()
    for s, e in ladder.rows:
        n, d = _row_factor_keys(s, e)
        num.update(n)
        den.update(d)
    out = ONE
    for (alpha, shift), k in (num - den).items():
        out = out * steinberg_pair(target.rho0, target.a0, ladder.rho, alpha, shift, k)
    return out


def r_ratio(target: Target, new_psi: PsiParameter) -> LFormalProduct:
    """r(s, new_psi) / r(s, psi), computed on the blocks that changed."""
    old = Counter(target.psi.blocks)
    new = Counter(new_psi.blocks)
    out = ONE
    for blk, n in (new - old).items():
        for _ in range(n):
            out = out * block_factor(blk, target.rho0, target.a0)
    for blk, n in (old - new).items():
        for _ in range(n):
            out = out / block_factor(blk, target.rho0, target.a0)
    return out


def _rebuild(target: Target, drop=(), change=None, add=()) -> Target:
    """New target: drop positions, replace some, append new (block, t, eta), then sort."""
    change = change or {}
    rows = []
    for i, blk in enumerate(target.psi.blocks):
        if i in drop:
            continue
        if i in change:
            rows.extend(change[i])
        else:
            rows.append((blk, target.point.t[i], target.point.eta[i]))
    rows.extend(add)
    rows.sort(key=lambda r: (r[0].B, r[0].A, r[0].zeta, r[0].rho.id))
    psi = target.psi.replace_blocks([r[0] for r in rows])
    point = PacketPoint([r[1] for r in rows], [r[2] for r in rows])
    return Target(psi, point, target.rho0, target.a0, target.s0)


def _entry(target: Target, product: LFormalProduct, label: str, role=GAIN, expected=0) -> LedgerEntry:
    return LedgerEntry(ORDER, role, label, product, expected)


def _known_t(target: Target, pos: int) -> int:
    t = target.point.t[pos]
    if t is None:
        raise ReductionError(f"t is unknown at position {pos}; pin it first")
    return t


def _known_eta(target: Target, pos: int) -> int:
    e = target.point.eta[pos]
    if e is None:
        raise ReductionError(f"eta is unknown at position {pos}; pin it first")
    return e


def _alternating(eta, k: int):
    return None if eta is None else eta * (-1) ** k


def _require(cond: bool, msg: str):
    if not cond:
        raise ReductionError(msg)


def _same_side(target: Target, blk: JordanBlock, z: int):
    """Positions of the other blocks with the same label and side."""
    z0 = target.zeta0
    return [j for j, b in enumerate(target.psi.blocks)
            if b is not blk and b.rho == blk.rho and eff_zeta(b, z0) == z]


def _in_between_flats(target: Target, pos: int) -> list:
    blk = target.psi[pos]
    z = eff_zeta(blk, target.zeta0)
    js = [j for j in _same_side(target, blk, z) if j != pos
          and blk.B < target.psi[j].B < blk.A]
    return sorted(js, key=lambda j: target.psi[j].B)


# -- base cases -----------------------------------------------------------------------

def base_step(target: Target) -> ReductionStep:
    if target.s0 == 0:
        r = r_of_psi(target.psi, target.rho0, target.a0)
        res = order_at(r, 0)
        entry = LedgerEntry(INTERVAL, INFO, "order of r(psi) at 0", r, (res.lo, res.hi))
        return ReductionStep(BASE_S0_ZERO, target, None, (), (entry,))
    _require(is_tempered(target.psi), "not a base case: psi is not tempered")
    r = r_of_psi(target.psi, target.rho0, target.a0)
    entry = _entry(target, r.inverse(), "1/r(psi)", GAIN, 0)
    return ReductionStep(BASE_TEMPERED, target, None, (), (entry,))


# -- multiplicity --------------------------------------------------------------------

def duplicate_pair(psi: PsiParameter):
    seen = {}
    for i, blk in enumerate(psi.blocks):
        if blk in seen:
            return seen[blk], i
        seen[blk] = i
    return None


def apply_multiplicity(target: Target) -> ReductionStep:
    pair = duplicate_pair(target.psi)
    _require(pair is not None, "no block has multiplicity >= 2")
    i, j = pair
    blk = target.psi[i]
    after = _rebuild(target, drop={i, j})
    f1 = block_factor(blk, target.rho0, target.a0)
    f3 = f1   # L(St(a) x St(a0), ...) written with rho0 first
    ident = f1 * f3 * r_ratio(target, after.psi)
    entry = LedgerEntry(IDENTITY, GAIN, "r(psi) = f1*f3*r(psi')", ident, 0)
    seg = speh_matrix(blk.rho, blk.a, blk.b)
    return ReductionStep(MULTIPLICITY, target, after, (seg,), (entry,), (i, j))


# -- the side opposite to zeta0 --------------------------------------------------------

def _segment_ledger(target: Target, after: Target, segments, exact=False) -> tuple:
    """Ledger for a step whose ladders sit on the side -zeta0."""
    ratio = r_ratio(target, after.psi)
    if target.zeta0 < 0:
        return (_entry(target, ratio, "r(psi')/r(psi)"),)
    norm = ONE
    for seg in segments:
        n1, n2 = ladder_normalizers(target, seg)
        norm = norm * n1 * n2
    prod = norm * ratio
    if exact:
        return (LedgerEntry(IDENTITY, GAIN, "n1*n2*r(psi') = r(psi)", prod, 0),)
    return (_entry(target, prod, "n1*n2*r(psi')/r(psi)"),)


def _check_opposite_block(target: Target, pos: int) -> JordanBlock:
    blk = target.psi[pos]
    _require(target.s0 > 0, "reductions need s0 > 0")
    _require(eff_zeta(blk, target.zeta0) == -target.zeta0, "block is not on the side -zeta0")
    _require(blk.A > blk.B, "block must have A > B")
    return blk


def apply_isole(target: Target, pos: int) -> ReductionStep:
    blk = _check_opposite_block(target, pos)
    z = -target.zeta0
    between = [j for j in _same_side(target, blk, z) if blk.B < target.psi[j].B < blk.A]
    _require(not between, "block is not isolated")
    t, eta = _known_t(target, pos), target.point.eta[pos]
    if t == 0:
        n = int(blk.A - blk.B)
        fan = [(JordanBlock(blk.rho, blk.B + k, blk.B + k, z), 0, _alternating(eta, k)) for k in range(n + 1)]
        after = _rebuild(target, change={pos: fan})
        ledger = (_entry(target, r_ratio(target, after.psi), "r(psi')/r(psi)"),)
        return ReductionStep(ISOLE_T0, target, after, (), ledger, (pos,))
    seg = single_row(blk.rho, z * blk.B, -z * blk.A)
    if blk.A == blk.B + 1:
        after = _rebuild(target, drop={pos})
    else:
        new = JordanBlock(blk.rho, blk.A - 1, blk.B + 1, z)
        after = _rebuild(target, change={pos: [(new, t - 1, eta)]})
    return ReductionStep(ISOLE_TPOS, target, after, (seg,), _segment_ledger(target, after, (seg,)), (pos,))


def _consecutif_hypothesis(target: Target, p: int, q: int):
    psi = target.psi
    b1, b2 = psi[p], psi[q]
    z0 = target.zeta0
    _require(target.s0 > 0, "reductions need s0 > 0")
    _require(b1.is_flat and b2.is_flat, "both blocks must be flat")
    _require(b1.rho == b2.rho, "blocks must share the cuspidal label")
    z = eff_zeta(b1, z0)
    _require(eff_zeta(b2, z0) == z, "blocks must be on the same side")
    _require(b1.B < b2.B, "need B < B'")
    for j in _same_side(target, b1, z):
        if j in (p, q):
            continue
        _require(not (b1.B < psi[j].B <= b2.B), "blocks are not consecutive")
    if z == -z0:
        return z, False
    _require(z0 > 0, "same-sign variant needs zeta0 = +")
    _require(target.B0 >= b2.B or target.B0 < b1.B, "same-sign variant needs B0 >= B' or B0 < B")
    return z, True


def consecutif_vanishes(target: Target, p: int, q: int) -> bool:
    """The Jacquet chain between the two flats vanishes iff their eta differ."""
    _consecutif_hypothesis(target, p, q)
    return _known_eta(target, p) != _known_eta(target, q)


def apply_consecutif(target: Target, p: int, q: int) -> ReductionStep:
    z, same_sign = _consecutif_hypothesis(target, p, q)
    if consecutif_vanishes(target, p, q):
        raise ReductionError("eta differ: the Jacquet chain vanishes and nothing is removed")
    b1, b2 = target.psi[p], target.psi[q]
    after = _rebuild(target, drop={p, q})
    seg = single_row(b1.rho, z * b2.B, -z * b1.B)
    ratio = r_ratio(target, after.psi)
    if same_sign:
        ledger = (_entry(target, ratio, "r(psi')/r(psi)"),)
    elif target.zeta0 < 0:
        n1, _ = ladder_normalizers(target, seg)
        ledger = (_entry(target, ratio, "r(psi')/r(psi)"), _entry(target, n1, "n1"))
    else:
        ledger = _segment_ledger(target, after, (seg,), exact=True)
    return ReductionStep(CONSECUTIF, target, after, (seg,), ledger, (p, q))


def apply_nonisole(target: Target, pos: int, case: Optional[int] = None) -> ReductionStep:
    blk = _check_opposite_block(target, pos)
    z = -target.zeta0
    psi = target.psi
    between = [j for j in _same_side(target, blk, z) if blk.B < psi[j].B < blk.A]
    _require(bool(between), "block is isolated")
    _require(all(psi[j].is_flat for j in between), "blocks between B and A must be flat")
    flats = sorted(between, key=lambda j: psi[j].B)
    t, eta = _known_t(target, pos), target.point.eta[pos]
    if t == 0:
        _require(case in (None, 3), "t = 0 forces the third case")
        case = 3
    else:
        _require(case in (1, 2), "t >= 1 leaves two cases; pass case=1 or case=2")
    A, B = blk.A, blk.B
    if case == 1:
        last = flats[-1]
        Bl = psi[last].B
        add = [(JordanBlock(blk.rho, A, A, z), None, None),
               (JordanBlock(blk.rho, A - 1, B + 1, z), None, None)]
        after = _rebuild(target, drop={pos, last}, add=add)
        segs = (single_row(blk.rho, z * B, -z * Bl),)
        tag = NONISOLE_1
    elif case == 2:
        new = JordanBlock(blk.rho, A - 1, B + 1, z)
        after = _rebuild(target, change={pos: [(new, t - 1, eta)]})
        segs = (single_row(blk.rho, z * B, -z * A),)
        tag = NONISOLE_2
    else:
        ell = len(flats)
        n = int(A - B) - ell
        fan = [(JordanBlock(blk.rho, B + k, B + k, z), 0, _alternating(eta, k)) for k in range(n + 1)]
        after = _rebuild(target, drop=set(flats), change={pos: fan})
        segs = tuple(single_row(blk.rho, z * psi[j].B, -z * (A - i)) for i, j in enumerate(flats))
        tag = NONISOLE_3
    return ReductionStep(tag, target, after, segs, _segment_ledger(target, after, segs), (pos,), (case,))


# -- zeta0 = +: non-flat blocks on the + side -----------------------------------------

def apply_nonisole_same_sign(target: Target, pos: int) -> ReductionStep:
    blk = target.psi[pos]
    _require(target.s0 > 0, "reductions need s0 > 0")
    _require(target.zeta0 > 0, "needs zeta0 = +")
    _require(eff_zeta(blk, 1) > 0 and blk.A > blk.B, "needs a non-flat block on the + side")
    for b in target.psi.blocks:
        _require(eff_zeta(b, 1) > 0 or b.is_flat, "the - side must be elementary first")
        if b.rho == blk.rho and eff_zeta(b, 1) > 0 and b.B > blk.B:
            _require(b.is_flat, "B must be maximal among non-flat + blocks")
    t, eta = _known_t(target, pos), target.point.eta[pos]
    A, B = blk.A, blk.B
    n = int(A - B) - 2 * t
    fan = [(JordanBlock(blk.rho, B + t + k, B + t + k, 1), 0, _alternating(eta, k)) for k in range(n + 1)]
    after = _rebuild(target, change={pos: fan})
    cell = _cell(blk, target)
    ledger = [_entry(target, r_ratio(target, after.psi), "r(psi')/r(psi)", GAIN, cell)]
    segs = ()
    if t >= 1:
        sigma = LadderMatrix(blk.rho, [(B + i, -(A - i)) for i in range(t)], -1)
        segs = (sigma,)
        ledger.append(_entry(target, ladder_numerator(target, sigma), "numerator of n2(sigma1)", POLE, -cell))
    return ReductionStep(NONISOLE_SAME_SIGN, target, after, segs, tuple(ledger), (pos,), (t,))


# -- zeta0 = -: reduction from the bottom -------------------------------------------------

def apply_bottom(target: Target, pos: int) -> ReductionStep:
    blk = target.psi[pos]
    _require(target.s0 > 0, "reductions need s0 > 0")
    _require(target.zeta0 < 0, "needs zeta0 = -")
    _require(blk.zeta < 0, "needs a block with zeta = zeta0")
    for b in target.psi.blocks:
        if b.zeta < 0:
            _require(b.B >= blk.B, "B must be minimal among zeta0 blocks")
        else:
            _require(b.is_flat, "the + side must be elementary first")
    A, B = blk.A, blk.B
    t0, eta0 = target.point.t[pos], target.point.eta[pos]
    if B.is_integral:
        tag, delta = BOTTOM_III, HalfInt(1)
        new = (JordanBlock(blk.rho, A - B, 0, 1), t0, eta0)
    else:
        t0, eta0 = _known_t(target, pos), _known_eta(target, pos)
        if t0 != 0 or eta0 > 0:
            tag, delta = BOTTOM_I, HALF
            new = None
            if A > B:
                nb = JordanBlock(blk.rho, A - B - HALF, HALF, 1)
                nt = t0 if eta0 > 0 else t0 - 1
                ne = -eta0
                if nt < 0 or nt > nb.inf // 2 or (2 * nt == nb.inf and ne < 0):
                    nt, ne = None, None
                new = (nb, nt, ne)
        else:
            tag, delta = BOTTOM_II, HalfInt.from_twice(3)
            new = (JordanBlock(blk.rho, A - B + HALF, HALF, 1), None, None)
    after = _rebuild(target, change={pos: [new] if new else []})
    n_rows = int(B - delta) + 1
    cell = _cell(blk, target)
    ledger = [_entry(target, r_ratio(target, after.psi), "r(psi'')/r(psi)", GAIN, cell)]
    segs = ()
    if n_rows > 0:
        sigma = staircase(blk.rho, (-B, -A), n_rows, -1)
        segs = (sigma,)
        ledger.append(_entry(target, ladder_numerator(target, sigma), "numerator of n2(sigma)", POLE, -cell))
    return ReductionStep(tag, target, after, segs, tuple(ledger), (pos,))


# -- zeta0 = +: elementary parameters -------------------------------------------------------

def _check_bottom_final(target: Target, pos: int) -> JordanBlock:
    blk = target.psi[pos]
    _require(target.s0 > 0, "reductions need s0 > 0")
    _require(target.zeta0 > 0, "needs zeta0 = +")
    _require(all(b.is_flat for b in target.psi.blocks), "psi must be elementary")
    _require(duplicate_pair(target.psi) is None, "psi must be multiplicity free")
    _require(blk.zeta < 0, "needs a flat block with zeta = -")
    _require(all(b.B >= blk.B for b in target.psi.blocks if b.zeta < 0), "B must be minimal")
    return blk


def bottom_final_outcomes(target: Target, pos: int) -> list:
    """All B~ the descent can reach; -1/2 stands for removing the block."""
    blk = _check_bottom_final(target, pos)
    B = blk.B
    if not B.is_integral and _known_eta(target, pos) > 0:
        return [HalfInt.from_twice(-1)]
    c = HALF if not B.is_integral else HalfInt(0)
    plus = {b.B for b in target.psi.blocks if b.rho == blk.rho and b.zeta > 0}
    out = [c]
    while c in plus and c + 1 <= B - 1:
        c = c + 1
        out.append(c)
    return out


def apply_bottom_final(target: Target, pos: int, B_tilde) -> ReductionStep:
    blk = _check_bottom_final(target, pos)
    B_tilde = hi(B_tilde)
    _require(B_tilde in bottom_final_outcomes(target, pos), f"B~={B_tilde} is not reachable")
    B = blk.B
    change = {pos: []}
    if B_tilde >= 0:
        c0 = HALF if not B.is_integral else HalfInt(0)
        change[pos] = [(JordanBlock(blk.rho, c0, c0, 1), None, None)]
        for j, b in enumerate(target.psi.blocks):
            if b.rho == blk.rho and b.zeta > 0 and b.B < B_tilde:
                change[j] = [(b.shifted(1), target.point.t[j], target.point.eta[j])]
    after = _rebuild(target, change=change)
    cell = _cell(blk, target)
    ledger = [_entry(target, r_ratio(target, after.psi), "r(psi~)/r(psi)", GAIN, cell)]
    segs = ()
    if -B <= -B_tilde - 1:
        sigma = single_row(blk.rho, -B, -B_tilde - 1)
        segs = (sigma,)
        ledger.append(_entry(target, ladder_numerator(target, sigma), "numerator of n2(sigma)", POLE, -cell))
    return ReductionStep(BOTTOM_FINAL, target, after, segs, tuple(ledger), (pos,), (B_tilde,))


# -- classification ------------------------------------------------------------------------

@dataclass(frozen=True)
class Plan:
    """A case to apply to a (possibly pinned) target."""

    tag: str
    target: Target
    pos: tuple = ()
    extra: tuple = ()


def _completions(target: Target, pos: int, need_t: bool, need_eta: bool) -> list:
    """Admissible values for the requested unknown labels at one position."""
    blk = target.psi[pos]
    t, e = target.point.t[pos], target.point.eta[pos]
    out = []
    for ct, ce in block_candidates(blk):
        if (t is not None and ct != t) or (e is not None and ce != e):
            continue
        nt = ct if (need_t or t is not None) else None
        ne = ce if (need_eta or e is not None or 2 * ct == blk.inf and nt is not None) else None
        if (nt, ne) not in out:
            out.append((nt, ne))
    return out


def _expand(target: Target, pos: int, need_t: bool, need_eta: bool) -> list:
    out = []
    for t, e in _completions(target, pos, need_t, need_eta):
        pinned = target.pin(pos, t, e)
        if pinned == target:
            raise ReductionError("pinning made no progress")
        out.extend(_plans(pinned))
    return out


def _unknown(target: Target, pos: int, need_t: bool, need_eta: bool) -> bool:
    return (need_t and target.point.t[pos] is None) or (need_eta and target.point.eta[pos] is None)


def _consecutive_pairs(target: Target, positions: list) -> list:
    ordered = sorted(positions, key=lambda j: target.psi[j].B)
    return list(zip(ordered, ordered[1:]))


def _first_consecutif(target: Target, pairs, check=None):
    """Plans from the first consecutive pair that reduces; None when all vanish."""
    for p, q in pairs:
        if check is not None and not check(p, q):
            continue
        for j in (p, q):
            if _unknown(target, j, False, True):
                return _expand(target, j, False, True)
        if target.point.eta[p] == target.point.eta[q]:
            return [Plan(CONSECUTIF, target, (p, q))]
    return None


def _plans(target: Target) -> list:
    psi = target.psi
    if target.s0 == 0:
        return [Plan(BASE_S0_ZERO, target)]
    if is_tempered(psi):
        return [Plan(BASE_TEMPERED, target)]
    if duplicate_pair(psi) is not None:
        return [Plan(MULTIPLICITY, target)]
    z0 = target.zeta0
    blocks = psi.blocks

    family = [i for i, b in enumerate(blocks) if eff_zeta(b, z0) == -z0 and b.A > b.B]
    if family:
        pos = max(family, key=lambda i: (blocks[i].B, -i))
        flats = _in_between_flats(target, pos)
        if not flats:
            if _unknown(target, pos, True, False):
                return _expand(target, pos, True, False)
            tag = ISOLE_T0 if target.point.t[pos] == 0 else ISOLE_TPOS
            return [Plan(tag, target, (pos,))]
        plans = _first_consecutif(target, _consecutive_pairs(target, flats))
        if plans is not None:
            return plans
        if _unknown(target, pos, True, False):
            return _expand(target, pos, True, False)
        if target.point.t[pos] == 0:
            return [Plan(NONISOLE_3, target, (pos,), (3,))]
        return [Plan(NONISOLE_1, target, (pos,), (1,)), Plan(NONISOLE_2, target, (pos,), (2,))]

    if z0 > 0:
        same = [i for i, b in enumerate(blocks) if eff_zeta(b, 1) > 0 and b.A > b.B]
        if same:
            pos = max(same, key=lambda i: (blocks[i].B, -i))
            blk = blocks[pos]
            flats = [j for j in _in_between_flats(target, pos) if blocks[j].is_flat]

            def eligible(p, q):
                return target.B0 >= blocks[q].B or target.B0 < blocks[p].B
            plans = _first_consecutif(target, _consecutive_pairs(target, flats), eligible)
            if plans is not None:
                return plans
            if _unknown(target, pos, True, False):
                return _expand(target, pos, True, False)
            return [Plan(NONISOLE_SAME_SIGN, target, (pos,), (target.point.t[pos],))]
        minus = [i for i, b in enumerate(blocks) if b.zeta < 0]
        pos = min(minus, key=lambda i: (blocks[i].B, i))
        if not blocks[pos].B.is_integral and _unknown(target, pos, False, True):
            return _expand(target, pos, False, True)
        return [Plan(BOTTOM_FINAL, target, (pos,), (bt,)) for bt in bottom_final_outcomes(target, pos)]

    minus = [i for i, b in enumerate(blocks) if b.zeta < 0]
    pos = min(minus, key=lambda i: (blocks[i].B, i))
    blk = blocks[pos]
    flats = [j for j, b in enumerate(blocks) if b.rho == blk.rho and b.zeta > 0]
    plans = _first_consecutif(target, _consecutive_pairs(target, flats))
    if plans is not None:
        return plans
    if not blk.B.is_integral:
        if _unknown(target, pos, True, True):
            return _expand(target, pos, True, True)
        t, e = target.point.t[pos], target.point.eta[pos]
        tag = BOTTOM_I if (t != 0 or e > 0) else BOTTOM_II
    else:
        tag = BOTTOM_III
    return [Plan(tag, target, (pos,))]


def plans(target: Target) -> list:
    """All alternatives the case analysis admits for this target."""
    return _plans(target)


def classify_case(target: Target) -> tuple:
    """Distinct case tags of the admissible alternatives, in order."""
    return tuple(dict.fromkeys(p.tag for p in _plans(target)))


def apply_plan(plan: Plan) -> ReductionStep:
    t = plan.target
    tag = plan.tag
    if tag in LEAF_TAGS:
        return base_step(t)
    if tag == MULTIPLICITY:
        return apply_multiplicity(t)
    if tag in (ISOLE_T0, ISOLE_TPOS):
        return apply_isole(t, plan.pos[0])
    if tag == CONSECUTIF:
        return apply_consecutif(t, *plan.pos)
    if tag in (NONISOLE_1, NONISOLE_2, NONISOLE_3):
        return apply_nonisole(t, plan.pos[0], plan.extra[0])
    if tag == NONISOLE_SAME_SIGN:
        return apply_nonisole_same_sign(t, plan.pos[0])
    if tag in (BOTTOM_I, BOTTOM_II, BOTTOM_III):
        return apply_bottom(t, plan.pos[0])
    if tag == BOTTOM_FINAL:
        return apply_bottom_final(t, plan.pos[0], plan.extra[0])
    raise ReductionError(f"unknown case tag {tag!r}")


# -- driver and verifier ------------------------------------------------------------------------

def run_reduction(target: Target, max_nodes: int = 200000) -> Certificate:
    """Expand the full certificate tree; identical subtargets share one node."""
    memo = {}

    def build(t: Target) -> CertNode:
        key = t.key()
        if key in memo:
            return memo[key]
        if len(memo) >= max_nodes:
            raise ReductionError(f"certificate exceeds {max_nodes} nodes")
        node = CertNode(t)
        memo[key] = node
        alts = _plans(t)
        if not alts:
            raise ReductionError(f"no case applies to {t}")
        for plan in alts:
            step = apply_plan(plan)
            node.steps.append(step)
            if step.after is None:
                node.children.append(None)
                continue
            if not measure(step.after) < measure(step.before):
                raise ReductionError(f"{step.case_tag} does not decrease the measure at {t}")
            node.children.append(build(step.after))
        return node

    return Certificate(target, build(target))


def _refines(pinned: Target, base: Target) -> bool:
    if (pinned.psi, pinned.rho0, pinned.a0, pinned.s0) != (base.psi, base.rho0, base.a0, base.s0):
        return False
    for mine, theirs in ((pinned.point.t, base.point.t), (pinned.point.eta, base.point.eta)):
        for a, b in zip(mine, theirs):
            if b is not None and a != b:
                return False
    return True


def certificate_problems(cert: Certificate, limit: int = 20) -> list:
    """Diagnostics for checks (a)-(e); empty when the certificate is sound."""
    problems = []
    done = set()

    def note(path, msg):
        if len(problems) < limit:
            problems.append(f"{' / '.join(path) or 'root'}: {msg}")

    def visit(node: CertNode, path: tuple, budget: int):
        if node.target != cert.root and not path:
            note(path, "tree root differs from certificate root")
        if id(node) in done:
            return
        done.add(id(node))
        if len(node.steps) != len(node.children) or not node.steps:
            note(path, "malformed node")
            return
        try:
            expected = [apply_plan(p) for p in _plans(node.target)]
        except ParameterError as exc:
            note(path, f"classification failed: {exc}")
            expected = None
        if expected is not None and expected != node.steps:
            note(path, "steps differ from the case analysis of this target (d)")
        for k, (step, child) in enumerate(zip(node.steps, node.children)):
            here = path + (f"{step.case_tag}#{k}",)
            if not _refines(step.before, node.target):
                note(here, "step does not act on this target (d)")
            for entry in step.ledger:
                if not entry.holds(step.before.s0):
                    note(here, f"ledger entry '{entry.label}' expected {entry.expected}, "
                               f"got {entry.actual(step.before.s0)} (a)")
            if step.budget < 0 or budget + step.budget < 0:
                note(here, f"negative holomorphy budget {step.budget} (e)")
            if step.after is None:
                if step.case_tag not in LEAF_TAGS:
                    note(here, "leaf is not a base case (c)")
                if child is not None:
                    note(here, "leaf step has a child (c)")
                continue
            if step.case_tag in LEAF_TAGS:
                note(here, "base case with a child (c)")
            if not measure(step.after) < measure(step.before):
                note(here, f"measure {measure(step.before)} -> {measure(step.after)} does not decrease (b)")
            if child is None or child.target != step.after:
                note(here, "child does not match the step's result")
                continue
            visit(child, here, budget + step.budget)

    visit(cert.tree, (), 0)
    return problems


def verify_certificate(cert: Certificate) -> bool:
    return not certificate_problems(cert, limit=1)
