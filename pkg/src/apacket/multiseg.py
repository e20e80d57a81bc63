"""Segments, ladder matrices and their Jacquet calculus on the GL side.

A ladder has rows ``(start, end)`` read in a common direction ``d``
(+1 increasing, -1 decreasing). Going down, starts and ends both move
strictly in direction -d. Left derivatives remove row starts, right
derivatives remove row ends:

* ``Jac^g_x`` is nonzero iff x is the start of some row i and either i is
  the top row or x != start(i-1) - d;
* ``Jac^d_y`` is nonzero iff y is the end of some row i and either i is the
  bottom row or y != end(i+1) + d.

On a product the first derivative is the sum over factors (Leibniz rule),
which is where the decoupages come from.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .halfint import HalfInt, hi
from .params import CuspidalLabel, JordanBlock, ParameterError, PsiParameter


@dataclass(frozen=True)
class Segment:
    """The exponents start, start +- 1, ..., end of rho|.|^x."""

    rho: CuspidalLabel
    start: HalfInt
    end: HalfInt

    def __post_init__(self):
        object.__setattr__(self, "start", hi(self.start))
        object.__setattr__(self, "end", hi(self.end))
        if not (self.end - self.start).is_integral:
            raise ParameterError("segment endpoints must differ by an integer")

    @property
    def direction(self) -> int:
        diff = self.end - self.start
        return 0 if diff == 0 else (1 if diff > 0 else -1)

    def __len__(self):
        return abs(int(self.end - self.start)) + 1

    def exponents(self) -> list:
        step = self.direction or 1
        return [self.start + step * k for k in range(len(self))]

    def as_set(self) -> frozenset:
        return frozenset(x.twice for x in self.exponents())

    def __str__(self):
        return f"<{self.start},...,{self.end}>_{self.rho}"


def linked(s1: Segment, s2: Segment) -> bool:
    """Zelevinsky linkage: neither contains the other and the union is a segment."""
    if s1.rho != s2.rho:
        return False
    if not (s1.start - s2.start).is_integral:
        return False
    a, b = s1.as_set(), s2.as_set()
    if a <= b or b <= a:
        return False
    union = a | b
    return max(union) - min(union) == 2 * (len(union) - 1)


def _row_len(start: HalfInt, end: HalfInt, d: int) -> int:
    return int((end - start) * d) + 1


@dataclass(frozen=True)
class LadderMatrix:
    rho: CuspidalLabel
    rows: tuple
    d: int = 1

    def __post_init__(self):
        rows = tuple((hi(s), hi(e)) for s, e in self.rows)
        d = self.d
        if d not in (1, -1):
            raise ParameterError("direction must be +1 or -1")
        rows = tuple(r for r in rows if _row_len(r[0], r[1], d) > 0)
        if len(rows) == 1 and rows[0][0] == rows[0][1]:
            d = 1
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "d", d)

    @property
    def is_empty(self) -> bool:
        return not self.rows

    def segments(self) -> list:
        return [Segment(self.rho, s, e) for s, e in self.rows]

    def is_valid(self) -> bool:
        """Starts and ends strictly move in direction -d going down, rows linked."""
        d = self.d
        for (s0, e0), (s1, e1) in zip(self.rows, self.rows[1:]):
            if not (d * s1 < d * s0 and d * e1 < d * e0):
                return False
            if not linked(Segment(self.rho, s0, e0), Segment(self.rho, s1, e1)):
                return False
        return True

    def size(self) -> int:
        return sum(_row_len(s, e, self.d) for s, e in self.rows)

    def key(self):
        return (self.rho.id, self.d, tuple((s.twice, e.twice) for s, e in self.rows))

    def jac_left(self, x) -> "LadderMatrix | None":
        x = hi(x)
        d = self.d
        for i, (s, e) in enumerate(self.rows):
            if s == x and (i == 0 or x != self.rows[i - 1][0] - d):
                rows = list(self.rows)
                rows[i] = (s + d, e)
                return LadderMatrix(self.rho, rows, d)
        return None

    def jac_right(self, y) -> "LadderMatrix | None":
        y = hi(y)
        d = self.d
        n = len(self.rows)
        for i, (s, e) in enumerate(self.rows):
            if e == y and (i == n - 1 or y != self.rows[i + 1][1] + d):
                rows = list(self.rows)
                rows[i] = (s, e - d)
                return LadderMatrix(self.rho, rows, d)
        return None

    def __str__(self):
        body = "; ".join(f"{s}..{e}" for s, e in self.rows)
        return f"[{body}]_{self.rho}"


def single_row(rho: CuspidalLabel, start, end) -> LadderMatrix:
    start, end = hi(start), hi(end)
    return LadderMatrix(rho, [(start, end)], 1 if end >= start else -1)


def speh_matrix(rho: CuspidalLabel, a: int, b: int) -> LadderMatrix:
    """The rectangle of Speh(St(rho,a),b): a rows of length b.

    Row i runs (a-b)/2 - i, ..., (a+b)/2 - 1 - i, so the top-left corner is
    (a-b)/2 and the bottom-right corner is -(a-b)/2.
    """
    if a < 1 or b < 1:
        raise ParameterError("a and b must be positive")
    lo = HalfInt.from_twice(a - b)
    hi_ = HalfInt.from_twice(a + b - 2)
    return LadderMatrix(rho, [(lo - i, hi_ - i) for i in range(a)], 1)


def Z_of_block(block: JordanBlock) -> LadderMatrix:
    """Rows zeta(B+r), ..., -zeta(A-r) for r = 0, ..., A-B."""
    z = block.zeta
    n = int(block.A - block.B)
    rows = [(z * (block.B + r), -z * (block.A - r)) for r in range(n + 1)]
    return LadderMatrix(block.rho, rows, -z)


def staircase(rho: CuspidalLabel, top: tuple, n_rows: int, d: int) -> LadderMatrix:
    """n_rows rows starting from ``top``, each shifted by -d from the one above."""
    s, e = hi(top[0]), hi(top[1])
    return LadderMatrix(rho, [(s - d * k, e - d * k) for k in range(n_rows)], d)


@dataclass(frozen=True)
class GLObject:
    """Formal product of ladders; a multiset, so factor order is irrelevant."""

    factors: tuple = ()

    def __post_init__(self):
        facs = [f for f in self.factors if not f.is_empty]
        object.__setattr__(self, "factors", tuple(sorted(facs, key=LadderMatrix.key)))

    def replace(self, i: int, new: LadderMatrix) -> "GLObject":
        facs = list(self.factors)
        facs[i] = new
        return GLObject(facs)

    def __str__(self):
        return " x ".join(str(f) for f in self.factors) or "1"


def pi_gl(psi: PsiParameter | Iterable[JordanBlock]) -> GLObject:
    blocks = psi.blocks if isinstance(psi, PsiParameter) else psi
    return GLObject([Z_of_block(b) for b in blocks])


def _derive(obj: GLObject, rho: CuspidalLabel, x: HalfInt, side: str) -> list:
    out = []
    for i, fac in enumerate(obj.factors):
        if fac.rho != rho:
            continue
        new = fac.jac_left(x) if side == "g" else fac.jac_right(x)
        if new is not None:
            out.append(obj.replace(i, new))
    return out


def jac_left(obj: GLObject, rho: CuspidalLabel, x) -> Counter:
    return Counter(_derive(obj, rho, hi(x), "g"))


def jac_right(obj: GLObject, rho: CuspidalLabel, y) -> Counter:
    return Counter(_derive(obj, rho, hi(y), "d"))


def apply_chain(obj: GLObject, rho: CuspidalLabel, steps: Sequence[tuple]) -> Counter:
    """Apply ("g"|"d", exponent) steps in order; multiplicity = number of decoupages."""
    current = Counter({obj: 1})
    for side, x in steps:
        nxt = Counter()
        for o, mult in current.items():
            for res in _derive(o, rho, hi(x), side):
                nxt[res] += mult
        current = nxt
        if not current:
            break
    return current


def chain_exponents(start, stop) -> list:
    start, stop = hi(start), hi(stop)
    if not (stop - start).is_integral:
        raise ParameterError("chain endpoints must differ by an integer")
    step = 1 if stop >= start else -1
    return [start + step * k for k in range(abs(int(stop - start)) + 1)]


def jac_theta_chain(obj: GLObject, rho: CuspidalLabel, zeta: int, start, stop) -> Counter:
    """Jac^theta along start, ..., stop, as a formal sum over surviving decoupages.

    Jac^theta_x = Jac^g_x Jac^d_{-x}; the left chain runs start..stop and the
    right chain runs -start..-stop. ``zeta`` only documents the direction of
    the chain and must agree with it.
    """
    xs = chain_exponents(start, stop)
    if len(xs) > 1 and (xs[1] - xs[0]) * zeta < 0:
        raise ParameterError("chain direction disagrees with zeta")
    steps = [("g", x) for x in xs] + [("d", -x) for x in xs]
    return apply_chain(obj, rho, steps)


def decoupage_count(formal_sum: Counter) -> int:
    return sum(formal_sum.values())


def raise_block(psi: PsiParameter, pos: int) -> PsiParameter:
    """Replace (rho,A,B,zeta) at pos by (rho,A+1,B+1,zeta)."""
    blocks = list(psi.blocks)
    blocks[pos] = blocks[pos].shifted(1)
    return psi.replace_blocks(blocks, check_order=False)


def raise_hypotheses(psi: PsiParameter, pos: int) -> bool:
    """Order conditions under which lowering the raised block is a single decoupage.

    Later blocks with the same rho start strictly above A+1; earlier blocks
    have a different rho, the other sign with B' != 0, B' <= B or A' <= A.
    """
    blk = psi[pos]
    for k, other in enumerate(psi.blocks):
        if k > pos and other.rho == blk.rho and not other.B > blk.A + 1:
            return False
        if k < pos and other.rho == blk.rho:
            if other.zeta != blk.zeta and other.B != 0:
                continue
            if not (other.B <= blk.B or other.A <= blk.A):
                return False
    return True


def unlinked_product_irreducible(m1: LadderMatrix, m2: LadderMatrix) -> bool:
    """Sufficient criterion: no row of m1 is linked to a row of m2."""
    if m1.rho != m2.rho:
        raise ParameterError("ladders must share the cuspidal label")
    return not any(linked(r1, r2) for r1 in m1.segments() for r2 in m2.segments())
