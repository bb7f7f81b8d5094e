"""
Cuts of the value group and final/initial segments.

A cut (L, R) is compared through its left set. Cuts known only from sampled
witnesses are never ordered by guesswork: comparisons that the samples cannot
decide return an Inconclusive value.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence, Tuple, Union

from hahnlab.exponents import Exponent, Order, exp_cmp

logger = logging.getLogger(__name__)

MINUS = '-'
PLUS = '+'


class Inconclusive(NamedTuple):
    """Order undecided after inspecting ``depth`` sampled witnesses."""

    depth: int


CutOrder = Union[Order, Inconclusive]


class UnsettledCut(Exception):
    """Sampled witnesses stay below a declared limit without reaching its marks."""


class CutKind(Enum):
    MINUS_INFINITY = 'minus_infinity'
    PRINCIPAL = 'principal'
    WITNESSES = 'witnesses'
    INFINITY_MINUS = 'infinity_minus'


def _wrap(x: Exponent) -> str:
    text = str(x)
    return f"({text})" if ' ' in text else text


@dataclass(frozen=True)
class Cut:
    kind: CutKind
    gamma: Optional[Exponent] = None
    side: Optional[str] = None
    witnesses: Tuple[Exponent, ...] = ()
    # Known strict upper bound of every witness, if any
    upper: Optional[Exponent] = None

    def __str__(self) -> str:
        if self.kind is CutKind.MINUS_INFINITY:
            return '-inf'
        if self.kind is CutKind.INFINITY_MINUS:
            return 'inf^-'
        if self.kind is CutKind.PRINCIPAL:
            return f"{_wrap(self.gamma)}^{self.side}"
        return 'limsup{' + ', '.join(str(w) for w in self.witnesses) + '}'


def minus_infinity() -> Cut:
    return Cut(CutKind.MINUS_INFINITY)


def infinity_minus() -> Cut:
    return Cut(CutKind.INFINITY_MINUS)


def principal(gamma: Exponent, side: str = MINUS) -> Cut:
    if side not in (MINUS, PLUS):
        raise ValueError(f"Cut side must be '-' or '+', got '{side}'")
    return Cut(CutKind.PRINCIPAL, gamma=gamma, side=side)


def _check_increasing(values: Sequence[Exponent]) -> None:
    for prev, cur in zip(values, values[1:]):
        if exp_cmp(prev, cur) is not Order.LT:
            raise ValueError(f"Witness values must strictly increase: {prev} then {cur}")


def cut_from_witnesses(
    values: Sequence[Exponent],
    limit_hint: Optional[Exponent] = None,
    attained: bool = False,
    mark_base: int = 2,
    depth: int = 1,
) -> Cut:
    """
    The cut D^+ of a sampled distance family.

    Args:
        values: Strictly increasing witness values
        limit_hint: Candidate supremum gamma of the family
        attained: The last value is the maximum of the family
        mark_base: Base b of the marks gamma - b^(-k)
        depth: Number of marks (k = 1..depth) that must be exceeded

    Returns:
        gamma^+ for an attained maximum, gamma^- when every witness is below
        the hint and every mark is exceeded, otherwise a witness cut

    Raises:
        ValueError: If the values are empty or not strictly increasing
    """
    vals = tuple(values)
    if not vals:
        raise ValueError("cut_from_witnesses needs at least one witness value")
    _check_increasing(vals)
    if attained:
        return principal(vals[-1], PLUS)
    if limit_hint is None:
        return Cut(CutKind.WITNESSES, witnesses=vals)
    below = all(exp_cmp(w, limit_hint) is Order.LT for w in vals)
    if not below:
        return Cut(CutKind.WITNESSES, witnesses=vals)
    context = limit_hint.context
    for k in range(1, depth + 1):
        mark = limit_hint - context.rational(1) / (mark_base ** k)
        if not any(exp_cmp(w, mark) is Order.GT for w in vals):
            logger.debug("Mark %s not exceeded by witnesses of %s", mark, limit_hint)
            return Cut(CutKind.WITNESSES, witnesses=vals, upper=limit_hint)
    return principal(limit_hint, MINUS)


def require_settled(cut: Cut) -> Cut:
    """
    Raises:
        UnsettledCut: For a witness cut whose declared limit the marks did not reach
    """
    if cut.kind is CutKind.WITNESSES and cut.upper is not None:
        raise UnsettledCut(f"witnesses {cut} do not settle the cut at {cut.upper}")
    return cut


_IMPROPER_RANK = {CutKind.MINUS_INFINITY: -1, CutKind.INFINITY_MINUS: 1}


def _flip(order: CutOrder) -> CutOrder:
    if isinstance(order, Inconclusive):
        return order
    return {Order.LT: Order.GT, Order.GT: Order.LT, Order.EQ: Order.EQ}[order]


def _witness_vs_principal(w: Cut, gamma: Exponent, side: str) -> CutOrder:
    if any(exp_cmp(x, gamma) is not Order.LT for x in w.witnesses):
        # the family has no maximum, so a later witness lies strictly above gamma
        return Order.GT
    if w.upper is not None:
        rel = exp_cmp(w.upper, gamma)
        if rel is Order.LT:
            return Order.LT
        if rel is Order.EQ and side == PLUS:
            return Order.LT
    return Inconclusive(len(w.witnesses))


def cut_cmp(a: Cut, b: Cut) -> CutOrder:
    """
    Compare two cuts by inclusion of their left sets.

    Exact on principal and improper cuts; witness cuts are decided only when
    the sampled witnesses or declared upper bounds settle the question.
    """
    if a.kind in _IMPROPER_RANK or b.kind in _IMPROPER_RANK:
        ra = _IMPROPER_RANK.get(a.kind, 0)
        rb = _IMPROPER_RANK.get(b.kind, 0)
        if ra != rb:
            return Order.LT if ra < rb else Order.GT
        if ra != 0:
            return Order.EQ
        # one side improper handled above, so both are proper here
    if a.kind is CutKind.PRINCIPAL and b.kind is CutKind.PRINCIPAL:
        rel = exp_cmp(a.gamma, b.gamma)
        if rel is not Order.EQ:
            return rel
        if a.side == b.side:
            return Order.EQ
        return Order.LT if a.side == MINUS else Order.GT
    if a.kind is CutKind.WITNESSES and b.kind is CutKind.PRINCIPAL:
        return _witness_vs_principal(a, b.gamma, b.side)
    if a.kind is CutKind.PRINCIPAL and b.kind is CutKind.WITNESSES:
        return _flip(_witness_vs_principal(b, a.gamma, a.side))
    # two witness cuts
    if b.upper is not None and any(exp_cmp(x, b.upper) is not Order.LT for x in a.witnesses):
        return Order.GT
    if a.upper is not None and any(exp_cmp(x, a.upper) is not Order.LT for x in b.witnesses):
        return Order.LT
    return Inconclusive(min(len(a.witnesses), len(b.witnesses)))


def cut_contains_left(cut: Cut, value: Exponent) -> Optional[bool]:
    """Whether ``value`` lies in the left set of ``cut`` (None if undecided)."""
    if cut.kind is CutKind.MINUS_INFINITY:
        return False
    if cut.kind is CutKind.INFINITY_MINUS:
        return True
    if cut.kind is CutKind.PRINCIPAL:
        rel = exp_cmp(value, cut.gamma)
        return rel is Order.LT or (rel is Order.EQ and cut.side == PLUS)
    if any(exp_cmp(value, w) is not Order.GT for w in cut.witnesses):
        return True
    if cut.upper is not None and exp_cmp(value, cut.upper) is not Order.LT:
        return False
    return None


class SegmentKind(Enum):
    OPEN = 'open'
    CLOSED = 'closed'
    WITNESSES = 'witnesses'


FINAL = 'final'
INITIAL = 'initial'

_NAMES = {
    (FINAL, SegmentKind.OPEN): 'AboveOpen',
    (FINAL, SegmentKind.CLOSED): 'AboveClosed',
    (FINAL, SegmentKind.WITNESSES): 'GeneratedBy',
    (INITIAL, SegmentKind.OPEN): 'BelowOpen',
    (INITIAL, SegmentKind.CLOSED): 'BelowClosed',
    (INITIAL, SegmentKind.WITNESSES): 'BoundedBy',
}


@dataclass(frozen=True)
class Segment:
    """
    A final (upward closed) or initial (downward closed) segment.

    Witness segments are the closure of a sampled family: decreasing for
    final segments, increasing for initial ones.
    """

    direction: str
    kind: SegmentKind
    gamma: Optional[Exponent] = None
    witnesses: Tuple[Exponent, ...] = ()

    def __str__(self) -> str:
        name = _NAMES[(self.direction, self.kind)]
        if self.kind is SegmentKind.WITNESSES:
            return name + '{' + ', '.join(str(w) for w in self.witnesses) + '}'
        return f"{name}({self.gamma})"

    @property
    def is_final(self) -> bool:
        return self.direction == FINAL


def above_open(gamma: Exponent) -> Segment:
    return Segment(FINAL, SegmentKind.OPEN, gamma=gamma)


def above_closed(gamma: Exponent) -> Segment:
    return Segment(FINAL, SegmentKind.CLOSED, gamma=gamma)


def generated_by(witnesses: Sequence[Exponent]) -> Segment:
    if not witnesses:
        raise ValueError("A witness segment needs at least one witness")
    return Segment(FINAL, SegmentKind.WITNESSES, witnesses=tuple(witnesses))


def below_open(gamma: Exponent) -> Segment:
    return Segment(INITIAL, SegmentKind.OPEN, gamma=gamma)


def below_closed(gamma: Exponent) -> Segment:
    return Segment(INITIAL, SegmentKind.CLOSED, gamma=gamma)


def segment_neg(s: Segment) -> Segment:
    """The mirror -S; final and initial segments swap."""
    direction = INITIAL if s.is_final else FINAL
    if s.kind is SegmentKind.WITNESSES:
        return Segment(direction, s.kind, witnesses=tuple(-w for w in s.witnesses))
    return Segment(direction, s.kind, gamma=-s.gamma)


def segment_shift(s: Segment, delta: Exponent) -> Segment:
    if s.kind is SegmentKind.WITNESSES:
        return Segment(s.direction, s.kind, witnesses=tuple(w + delta for w in s.witnesses))
    return Segment(s.direction, s.kind, gamma=s.gamma + delta)


def segment_sum(s: Segment, t: Segment) -> Segment:
    """
    Minkowski sum S + T of two segments of the same direction.

    Raises:
        ValueError: Mixed directions or two witness operands
    """
    if s.direction != t.direction:
        raise ValueError("Minkowski sum of a final and an initial segment is not a segment")
    if s.kind is SegmentKind.WITNESSES and t.kind is SegmentKind.WITNESSES:
        raise ValueError("Minkowski sum of two witness segments exceeds the sampling depth")
    if s.kind is SegmentKind.WITNESSES:
        # sampled families have no extremal element, so strictness is absorbed
        return segment_shift(s, t.gamma)
    if t.kind is SegmentKind.WITNESSES:
        return segment_shift(t, s.gamma)
    kind = SegmentKind.CLOSED
    if SegmentKind.OPEN in (s.kind, t.kind):
        kind = SegmentKind.OPEN
    return Segment(s.direction, kind, gamma=s.gamma + t.gamma)


def final_minus_cut(s: Exponent, cut: Cut) -> Segment:
    """
    The final segment generated by s - D for the distance family D of ``cut``.

    Raises:
        ValueError: If the cut is improper
    """
    if cut.kind is CutKind.PRINCIPAL:
        shifted = s - cut.gamma
        return above_open(shifted) if cut.side == MINUS else above_closed(shifted)
    if cut.kind is CutKind.WITNESSES:
        return generated_by([s - w for w in cut.witnesses])
    raise ValueError(f"No final segment s - D for the improper cut {cut}")


def ideal_contains(s: Segment, value: Exponent) -> bool:
    """Membership of a valuation in the segment (sampled witnesses for families)."""
    if s.kind is SegmentKind.WITNESSES:
        if s.is_final:
            return any(exp_cmp(value, w) is not Order.LT for w in s.witnesses)
        return any(exp_cmp(value, w) is not Order.GT for w in s.witnesses)
    rel = exp_cmp(value, s.gamma)
    if s.is_final:
        return rel is Order.GT or (rel is Order.EQ and s.kind is SegmentKind.CLOSED)
    return rel is Order.LT or (rel is Order.EQ and s.kind is SegmentKind.CLOSED)


def segment_within(s: Segment, t: Segment) -> Optional[bool]:
    """
    Inclusion S ⊆ T of two final segments; None when samples cannot decide.
    """
    if not (s.is_final and t.is_final):
        raise ValueError("segment_within compares final segments")
    if t.kind is SegmentKind.WITNESSES:
        if s.kind is SegmentKind.WITNESSES:
            return None
        return True if ideal_contains(t, s.gamma) else None
    if s.kind is SegmentKind.WITNESSES:
        if all(ideal_contains(t, w) for w in s.witnesses):
            return None
        return False
    rel = exp_cmp(s.gamma, t.gamma)
    if rel is Order.GT:
        return True
    if rel is Order.LT:
        return False
    return not (s.kind is SegmentKind.CLOSED and t.kind is SegmentKind.OPEN)
