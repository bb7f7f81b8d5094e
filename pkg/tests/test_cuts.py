from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hahnlab.cuts import (
    MINUS,
    PLUS,
    CutKind,
    Inconclusive,
    UnsettledCut,
    above_closed,
    above_open,
    below_closed,
    cut_cmp,
    cut_contains_left,
    cut_from_witnesses,
    final_minus_cut,
    generated_by,
    ideal_contains,
    infinity_minus,
    minus_infinity,
    principal,
    require_settled,
    segment_neg,
    segment_shift,
    segment_sum,
    segment_within,
)
from hahnlab.exponents import BasisContext, Order

CTX = BasisContext(3)
P = 3


def q(n, d=1):
    return CTX.rational(Fraction(n, d))


small = st.fractions(min_value=-4, max_value=4, max_denominator=12)
points = st.builds(lambda a, b: CTX.exponent({"1": a, "pi": b}), small, st.sampled_from([0, Fraction(1, 3), -1]))
sides = st.sampled_from([MINUS, PLUS])


def beta_witnesses(levels=5):
    return [q(-1) - q(1, P ** (k + 1)) for k in range(1, levels + 1)]


def alpha_witnesses(levels=5):
    return [-CTX.pi(Fraction(1, P ** (k + 1))) for k in range(1, levels + 1)]


# --- cut_from_witnesses ---

def test_distance_family_of_beta_is_minus_one_minus():
    cut = cut_from_witnesses(beta_witnesses(), limit_hint=q(-1))
    assert cut == principal(q(-1), MINUS)
    assert str(cut) == "-1^-"


def test_distance_family_of_alpha_is_zero_minus():
    cut = cut_from_witnesses(alpha_witnesses(), limit_hint=CTX.zero())
    assert str(cut) == "0^-"


def test_attained_maximum_gives_plus_cut():
    assert cut_from_witnesses([q(2)], attained=True) == principal(q(2), PLUS)


def test_unexceeded_mark_keeps_witnesses():
    cut = cut_from_witnesses(alpha_witnesses(1), limit_hint=CTX.zero(), depth=2)
    assert cut.kind is CutKind.WITNESSES
    assert cut.upper == CTX.zero()
    deeper = cut_from_witnesses(alpha_witnesses(3), limit_hint=CTX.zero(), depth=3)
    assert deeper == principal(CTX.zero(), MINUS)


def test_witness_above_hint_is_not_a_limit():
    cut = cut_from_witnesses([q(-1), q(1)], limit_hint=CTX.zero())
    assert cut.kind is CutKind.WITNESSES
    assert cut.upper is None
    assert str(cut) == "limsup{-1, 1}"


def test_require_settled():
    thin = cut_from_witnesses(alpha_witnesses(1), limit_hint=CTX.zero(), depth=2)
    with pytest.raises(UnsettledCut, match="do not settle the cut at 0"):
        require_settled(thin)
    settled = cut_from_witnesses(alpha_witnesses(3), limit_hint=CTX.zero(), depth=3)
    assert require_settled(settled) is settled
    unbounded = cut_from_witnesses([q(-1), q(1)], limit_hint=CTX.zero())
    assert require_settled(unbounded) is unbounded


def test_witnesses_must_increase():
    with pytest.raises(ValueError, match="strictly increase"):
        cut_from_witnesses([q(1), q(0)])
    with pytest.raises(ValueError):
        cut_from_witnesses([])


# --- order ---

def test_principal_sides():
    assert cut_cmp(principal(q(0), MINUS), principal(q(0), PLUS)) is Order.LT
    assert cut_cmp(principal(q(0), PLUS), principal(q(0), MINUS)) is Order.GT


def test_delta_beta_below_krasner_cut():
    delta = cut_from_witnesses(beta_witnesses(), limit_hint=q(-1))
    assert cut_cmp(delta, principal(CTX.zero(), MINUS)) is Order.LT


def test_improper_cuts():
    assert cut_cmp(minus_infinity(), principal(q(-100))) is Order.LT
    assert cut_cmp(minus_infinity(), minus_infinity()) is Order.EQ
    assert cut_cmp(infinity_minus(), principal(q(100), PLUS)) is Order.GT
    assert cut_cmp(minus_infinity(), infinity_minus()) is Order.LT
    assert str(minus_infinity()) == "-inf" and str(infinity_minus()) == "inf^-"
    with pytest.raises(ValueError):
        principal(q(0), "*")


def test_witness_cut_against_principal():
    bounded = cut_from_witnesses(alpha_witnesses(1), limit_hint=CTX.zero(), depth=2)
    assert cut_cmp(bounded, principal(q(1))) is Order.LT
    assert cut_cmp(bounded, principal(CTX.zero(), PLUS)) is Order.LT
    assert cut_cmp(bounded, principal(q(-1))) is Order.GT
    assert cut_cmp(bounded, principal(CTX.zero(), MINUS)) == Inconclusive(1)
    assert cut_cmp(principal(q(1)), bounded) is Order.GT


def test_two_witness_cuts_are_inconclusive_without_bounds():
    a = cut_from_witnesses([q(-2), q(-1)])
    b = cut_from_witnesses([q(-3), q(-2, 3)])
    assert isinstance(cut_cmp(a, b), Inconclusive)


def test_cut_contains_left():
    assert cut_contains_left(principal(q(0), PLUS), q(0))
    assert not cut_contains_left(principal(q(0), MINUS), q(0))
    assert cut_contains_left(minus_infinity(), q(0)) is False
    bounded = cut_from_witnesses(alpha_witnesses(1), limit_hint=CTX.zero(), depth=2)
    assert cut_contains_left(bounded, q(-1)) is True
    assert cut_contains_left(bounded, q(1)) is False
    assert cut_contains_left(bounded, q(-1, 100)) is None


@given(points, points, sides, sides)
def test_principal_order_antisymmetric(a, b, sa, sb):
    flip = {Order.LT: Order.GT, Order.GT: Order.LT, Order.EQ: Order.EQ}
    x, y = principal(a, sa), principal(b, sb)
    assert cut_cmp(y, x) is flip[cut_cmp(x, y)]


@given(points, points, points, sides, sides, sides)
def test_principal_order_transitive(a, b, c, sa, sb, sc):
    x, y, z = principal(a, sa), principal(b, sb), principal(c, sc)
    if cut_cmp(x, y) is not Order.GT and cut_cmp(y, z) is not Order.GT:
        assert cut_cmp(x, z) is not Order.GT


# --- segments ---

def test_segment_printing():
    assert str(above_open(q(0))) == "AboveOpen(0)"
    assert str(above_closed(q(1, 3))) == "AboveClosed(1/3)"
    assert str(generated_by([q(1), q(0)])) == "GeneratedBy{1, 0}"


def test_ideal_membership():
    assert all(ideal_contains(above_open(q(0)), q(1, P ** (n + 1))) for n in range(1, 6))
    assert not ideal_contains(above_open(q(1)), q(1))
    assert ideal_contains(above_open(q(1)), q(1) + q(1, P))
    assert ideal_contains(above_closed(q(1)), q(1))
    assert ideal_contains(generated_by([q(1), q(1, 2)]), q(1, 2))
    assert not ideal_contains(generated_by([q(1), q(1, 2)]), q(1, 3))


def test_final_minus_cut():
    assert final_minus_cut(CTX.zero(), principal(CTX.zero(), MINUS)) == above_open(CTX.zero())
    assert final_minus_cut(q(1), principal(CTX.zero(), MINUS)) == above_open(q(1))
    assert final_minus_cut(q(1), principal(q(1, 2), PLUS)) == above_closed(q(1, 2))
    witnessed = final_minus_cut(q(0), cut_from_witnesses([q(-1), q(-1, 2)]))
    assert witnessed == generated_by([q(1), q(1, 2)])
    with pytest.raises(ValueError, match="improper"):
        final_minus_cut(q(0), minus_infinity())


def test_negation_is_an_involution():
    s = above_closed(q(2))
    assert segment_neg(s) == below_closed(q(-2))
    assert segment_neg(segment_neg(s)) == s
    w = generated_by([q(1), q(0)])
    assert segment_neg(segment_neg(w)) == w


def test_minkowski_sum():
    assert segment_sum(above_open(q(1)), above_closed(q(2))) == above_open(q(3))
    assert segment_sum(above_closed(q(1)), above_closed(q(2))) == above_closed(q(3))
    assert segment_sum(generated_by([q(1)]), above_open(q(1))) == generated_by([q(2)])
    with pytest.raises(ValueError, match="final and an initial"):
        segment_sum(above_open(q(0)), below_closed(q(0)))
    with pytest.raises(ValueError, match="sampling depth"):
        segment_sum(generated_by([q(0)]), generated_by([q(1)]))


def test_segment_within():
    assert segment_within(above_open(q(1)), above_open(q(0))) is True
    assert segment_within(above_open(q(0)), above_open(q(1))) is False
    assert segment_within(above_closed(q(0)), above_open(q(0))) is False
    assert segment_within(above_open(q(0)), above_closed(q(0))) is True
    assert segment_within(above_open(q(1)), generated_by([q(1, 2)])) is True
    assert segment_within(generated_by([q(-1)]), above_open(q(0))) is False
    with pytest.raises(ValueError):
        segment_within(below_closed(q(0)), above_open(q(0)))


@given(points, points, points, st.sampled_from([above_open, above_closed]))
def test_shift_is_translation_equivariant(gamma, delta, value, make):
    s = make(gamma)
    assert ideal_contains(segment_shift(s, delta), value) == ideal_contains(s, value - delta)
