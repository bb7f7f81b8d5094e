from fractions import Fraction
from itertools import count

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hahnlab.coefficients import FieldSpec
from hahnlab.exponents import BasisContext, Order, exp_cmp
from hahnlab.series import (
    HahnSeries,
    TermBudgetExceeded,
    Window,
    as_operator,
    format_terms,
    from_terms,
    lazy_sum,
    leading_coefficient,
    monomial,
    pth_power,
    pth_root,
    series_equal_below,
    series_mul,
    series_shift,
    support_count_below,
    truncate,
    zero_series,
)

CTX = BasisContext(3)
F9 = FieldSpec(3, 2)


def q(n, d=1):
    return CTX.rational(Fraction(n, d))


def geometric(field=F9, ctx=CTX):
    """sum_{k>=1} t^(-1/3^k), accumulating at 0 from below."""
    def parts():
        for k in count(1):
            e = ctx.rational(Fraction(-1, 3 ** k))
            yield e, monomial(1, e, field)
    return lazy_sum(parts, field, ctx, label='geometric')


def exps(series, bound=None, budget=None):
    return [e for e, _ in series.terms(bound, budget)]


@st.composite
def finite_series(draw, max_terms=4):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        e = CTX.exponent({
            "1": draw(st.fractions(min_value=-3, max_value=3, max_denominator=9)),
            "pi": draw(st.sampled_from([0, Fraction(1, 3), Fraction(-1, 3), 1])),
        })
        terms[e] = F9.from_int(draw(st.integers(1, F9.order - 1)))
    return from_terms(sorted(terms.items(), key=lambda t: t[0]), F9, CTX)


def at_least(a, b):
    """a >= b with None standing for infinity."""
    if a is None:
        return True
    if b is None:
        return False
    return exp_cmp(a, b) is not Order.LT


# --- construction ---

def test_monomial_and_zero():
    m = monomial(2, q(-1), F9)
    assert list(m.terms()) == [(q(-1), F9.element(2))]
    assert m.val() == q(-1)
    assert monomial(0, q(1), F9).val() is None
    assert zero_series(F9, CTX).val() is None


def test_monomial_needs_field_for_integers():
    with pytest.raises(ValueError):
        monomial(1, q(1))


def test_from_terms_validation():
    with pytest.raises(ValueError, match="not strictly increasing"):
        from_terms([(q(1), 1), (q(0), 1)], F9, CTX)
    with pytest.raises(ValueError, match="Zero coefficient"):
        from_terms([(q(1), 0)], F9, CTX)
    with pytest.raises(ValueError, match="another basis context"):
        from_terms([(BasisContext(3).rational(1), 1)], F9, CTX)


def test_stream_validation_on_draw():
    bad = HahnSeries(lambda: iter([(q(1), F9.one()), (q(0), F9.one())]), F9, CTX, label='bad')
    with pytest.raises(ValueError, match="below an earlier bound"):
        list(bad.terms())


def test_mixed_fields_rejected():
    with pytest.raises(ValueError, match="different fields"):
        monomial(1, q(0), F9) + monomial(1, q(0), FieldSpec(3, 1))


def test_format_terms():
    s = from_terms([(CTX.pi(Fraction(-1, 3)), 1), (q(-1, 3), F9.gen() + 1)], F9, CTX)
    assert format_terms(list(s.terms())) == "1*t^(-1/3*pi) + (u+1)*t^(-1/3)"
    assert format_terms([]) == "0"


# --- arithmetic ---

def test_addition_cancels():
    a = from_terms([(q(-1), 1), (q(0), 2)], F9, CTX)
    assert list((a - a).terms()) == []
    assert exps(a + a) == [q(-1), q(0)]
    assert leading_coefficient(a + a) == F9.element(2)


def test_shift_and_scale():
    a = from_terms([(q(-1), 1), (q(0), 2)], F9, CTX)
    shifted = series_shift(a, CTX.pi())
    assert exps(shifted) == [CTX.pi() - q(1), CTX.pi()]
    assert list((a * 2).terms()) == [(q(-1), F9.element(2)), (q(0), F9.element(1))]
    assert (a * 0).val() is None


def test_finite_product():
    a = from_terms([(q(0), 1), (q(1), 1)], F9, CTX)
    square = a * a
    assert list(square.terms()) == [(q(0), F9.one()), (q(1), F9.element(2)), (q(2), F9.one())]


def test_finite_times_infinite_is_lazy():
    product = monomial(1, q(-1), F9) * geometric()
    assert exps(product, q(-1) - q(1, 30)) == [q(-4, 3), q(-10, 9), q(-28, 27)]


def test_two_infinite_factors_need_window():
    with pytest.raises(ValueError, match="requires a window"):
        series_mul(geometric(), geometric())
    windowed = series_mul(geometric(), geometric(), Window(q(-1, 2)))
    assert list(windowed.terms()) == [(q(-2, 3), F9.one())]


# --- infinite streams ---

def test_geometric_terms_below_bound():
    assert exps(geometric(), q(-1, 100)) == [q(-1, 3), q(-1, 9), q(-1, 27), q(-1, 81)]


def test_accumulation_point_exhausts_budget():
    with pytest.raises(TermBudgetExceeded):
        list(geometric().terms(q(0), budget=50))
    counted = support_count_below(geometric(), q(0), budget=50)
    assert counted.overflow
    assert support_count_below(geometric(), q(-1, 100)) == (4, False)


def test_infinite_cancellation_stays_observable():
    difference = geometric() - geometric()
    assert list(difference.terms(q(-1, 1000))) == []
    with pytest.raises(TermBudgetExceeded):
        list(difference.terms(q(0), budget=40))


def test_streams_are_memoized():
    g = geometric()
    first = exps(g, q(-1, 100))
    assert exps(g, q(-1, 100)) == first


def test_as_operator_of_geometric():
    # g^3 = t^-1 + g, so AS(g) = t^-1 below any bound < 0
    result = as_operator(geometric(), Window(q(-1, 1000)))
    assert list(result.terms()) == [(q(-1), F9.one())]


def test_lazy_sum_checks_declared_bounds():
    def parts():
        yield q(0), monomial(1, q(-1), F9)
    with pytest.raises(ValueError, match="below its declared bound"):
        list(lazy_sum(parts, F9, CTX).terms())


def test_pth_root_and_power():
    g = geometric()
    root = pth_root(g)
    assert exps(root, q(-1, 100)) == [q(-1, 9), q(-1, 27), q(-1, 81)]
    assert exps(pth_power(g), q(-1, 10)) == [q(-1), q(-1, 3), q(-1, 9)]
    assert exps(pth_power(g, Window(q(-1, 2)))) == [q(-1)]


# --- properties ---

@settings(max_examples=1000)
@given(finite_series(), finite_series())
def test_ultrametric_law(a, b):
    va, vb = a.val(), b.val()
    low = vb if va is None else (va if vb is None else min(va, vb))
    assert at_least((a + b).val(), low)


@settings(max_examples=1000)
@given(finite_series(), finite_series())
def test_valuation_multiplicative(a, b):
    va, vb = a.val(), b.val()
    if va is None or vb is None:
        assert (a * b).val() is None
    else:
        assert (a * b).val() == va + vb


@settings(max_examples=1000)
@given(finite_series(), finite_series())
def test_as_additive(a, b):
    window = Window(q(4))
    left = as_operator(a + b, window)
    right = as_operator(a, window) + as_operator(b, window)
    assert series_equal_below(left, right, window.bound)


@settings(max_examples=1000)
@given(finite_series(), st.fractions(min_value=-3, max_value=3, max_denominator=9))
def test_truncation_idempotent(a, bound):
    delta = CTX.rational(bound)
    once = truncate(a, delta)
    assert list(truncate(once, delta).terms()) == list(once.terms())
    assert all(exp_cmp(e, delta) is Order.LT for e in exps(once))


@given(finite_series())
def test_pth_root_inverts_power(a):
    assert list(pth_root(pth_power(a)).terms()) == list(a.terms())
