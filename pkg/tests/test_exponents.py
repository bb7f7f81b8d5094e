import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hahnlab.exponents import (
    BasisContext,
    BasisMismatchError,
    Order,
    RefinementBudgetExceeded,
    ValueLattice,
    exp_cmp,
    exp_max,
    exp_min,
    format_exponent,
    lattice_contains,
    lattice_index,
    pi_interval,
)

CTX = BasisContext(3)
SYMBOLS = ("1", "pi", "r2")

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=9)
positive_fractions = st.fractions(min_value=Fraction(1, 9), max_value=3, max_denominator=9)


@st.composite
def exponents(draw):
    coords = {s: draw(small_fractions) for s in SYMBOLS}
    return CTX.exponent(coords)


_FLIP = {Order.LT: Order.GT, Order.GT: Order.LT, Order.EQ: Order.EQ}


# --- construction and printing ---

def test_zero_and_rational():
    assert CTX.zero().is_zero()
    assert CTX.rational(0) == CTX.zero()
    assert CTX.rational(Fraction(1, 3)).is_rational()
    assert not CTX.pi().is_rational()


def test_reciprocal_r1_is_rational():
    assert CTX.reciprocal_r(1) == CTX.rational(Fraction(1, 3))
    assert CTX.reciprocal_r(2).symbols == ["r2"]
    with pytest.raises(ValueError):
        CTX.reciprocal_r(0)


def test_unknown_symbol_rejected():
    with pytest.raises(ValueError, match="Unknown basis symbol"):
        CTX.exponent({"x": 1})
    with pytest.raises(ValueError):
        CTX.exponent({"r1": 1})


def test_coordinates_merge_and_drop_zeros():
    e = CTX.exponent({"pi": 1}) + CTX.exponent({"pi": -1, "1": 2})
    assert e.coords == (("1", Fraction(2)),)
    assert e.coefficient("pi") == 0


def test_format_exponent():
    e = CTX.pi(Fraction(-1, 9)) + CTX.rational(Fraction(2, 3))
    assert format_exponent(e) == "-1/9*pi + 2/3"
    assert str(CTX.zero()) == "0"
    assert str(CTX.pi()) == "pi"
    assert str(-CTX.reciprocal_r(3) - CTX.rational(1)) == "-r3 - 1"


def test_scaling_operators():
    e = CTX.pi(Fraction(1, 3))
    assert e * 3 == CTX.pi()
    assert 3 * e == CTX.pi()
    assert CTX.pi() / 3 == e
    assert -e == CTX.pi(Fraction(-1, 3))


# --- order ---

def test_pi_against_rationals():
    assert exp_cmp(CTX.pi(), CTX.rational(3)) is Order.GT
    assert exp_cmp(CTX.pi(), CTX.rational(Fraction(22, 7))) is Order.LT
    assert CTX.rational(3) < CTX.pi()


def test_reciprocal_r2_position():
    # 1/r_2 = 1/(p + 1 + 1/pi) sits between 1/5 and 1/4 for p = 3
    r2 = CTX.reciprocal_r(2)
    assert exp_cmp(r2, CTX.rational(Fraction(1, 4))) is Order.LT
    assert exp_cmp(r2, CTX.rational(Fraction(1, 5))) is Order.GT


def test_reciprocals_decrease():
    assert CTX.reciprocal_r(3) < CTX.reciprocal_r(2) < CTX.reciprocal_r(1)


def test_equal_coordinates_compare_equal():
    a = CTX.pi(2) + CTX.rational(1)
    b = CTX.rational(1) + CTX.pi(2)
    assert exp_cmp(a, b) is Order.EQ
    assert a == b and hash(a) == hash(b)


def test_budget_exhaustion_raises():
    ctx = BasisContext(3)
    close = ctx.rational(pi_interval(512)[0])
    with pytest.raises(RefinementBudgetExceeded):
        exp_cmp(ctx.pi(), close, budget=0)
    assert exp_cmp(ctx.pi(), close) is Order.GT


def test_mixed_contexts_rejected():
    other = BasisContext(3)
    with pytest.raises(BasisMismatchError):
        exp_cmp(CTX.pi(), other.pi())
    with pytest.raises(BasisMismatchError):
        CTX.pi() + other.rational(1)
    assert CTX.pi() != other.pi()


def test_min_max():
    values = [CTX.pi(), CTX.rational(3), CTX.rational(-1), CTX.reciprocal_r(2)]
    assert exp_min(values) == CTX.rational(-1)
    assert exp_max(values) == CTX.pi()
    with pytest.raises(ValueError):
        exp_min([])


@settings(max_examples=1000)
@given(exponents(), exponents())
def test_order_antisymmetry(a, b):
    assert exp_cmp(b, a) is _FLIP[exp_cmp(a, b)]
    assert (exp_cmp(a, b) is Order.EQ) == (a == b)


@settings(max_examples=1000)
@given(exponents(), exponents(), exponents())
def test_order_transitive(a, b, c):
    ordered = sorted([a, b, c])
    assert exp_cmp(ordered[0], ordered[1]) is not Order.GT
    assert exp_cmp(ordered[1], ordered[2]) is not Order.GT
    assert exp_cmp(ordered[0], ordered[2]) is not Order.GT


@settings(max_examples=1000)
@given(exponents(), exponents(), exponents())
def test_order_translation_invariant(a, b, c):
    assert exp_cmp(a + c, b + c) is exp_cmp(a, b)


@given(exponents(), positive_fractions)
def test_order_positive_scaling(a, q):
    assert exp_cmp(a * q, CTX.zero()) is exp_cmp(a, CTX.zero())


# --- lattices ---

def test_lattice_membership():
    lattice = ValueLattice([CTX.pi(), CTX.rational(1)])
    assert lattice_contains(lattice, CTX.pi(2) - CTX.rational(3))
    assert not lattice_contains(lattice, CTX.pi(Fraction(1, 2)))
    assert CTX.zero() in lattice
    assert CTX.reciprocal_r(2) not in lattice
    assert lattice.rank == 2


def test_empty_lattice():
    empty = ValueLattice([])
    assert CTX.zero() in empty
    assert CTX.rational(1) not in empty


def test_lattice_with_dependent_generators():
    third = CTX.rational(Fraction(1, 3))
    lattice = ValueLattice([CTX.rational(1), third, third * 2])
    assert lattice.rank == 1
    assert CTX.rational(Fraction(4, 3)) in lattice
    assert CTX.rational(Fraction(1, 9)) not in lattice


def test_lattice_index():
    big = ValueLattice([CTX.rational(Fraction(1, 3)), CTX.pi()])
    small = ValueLattice([CTX.rational(1), CTX.pi(2)])
    assert lattice_index(big, small) == 6
    assert lattice_index(big, big) == 1
    assert lattice_index(big, ValueLattice([CTX.rational(1)])) == math.inf


def test_lattice_index_requires_sublattice():
    with pytest.raises(ValueError, match="not in the big lattice"):
        lattice_index(ValueLattice([CTX.rational(1)]), ValueLattice([CTX.pi()]))


@st.composite
def diagonal_lattices(draw):
    """A rank <= 3 lattice with diagonal scales and a unimodular change of generators."""
    rank = draw(st.integers(min_value=1, max_value=3))
    symbols = SYMBOLS[:rank]
    scales = [draw(positive_fractions) for _ in symbols]
    upper = {(i, j): draw(st.integers(-3, 3)) for i in range(rank) for j in range(i + 1, rank)}
    generators = []
    for j in range(rank):
        coords = {symbols[j]: scales[j]}
        for i in range(j):
            coords[symbols[i]] = upper[(i, j)] * scales[i]
        generators.append(CTX.exponent(coords))
    return symbols, scales, ValueLattice(generators)


@settings(max_examples=1000)
@given(diagonal_lattices(), st.data())
def test_lattice_contains_matches_oracle(lattice_data, data):
    symbols, scales, lattice = lattice_data
    offsets = [data.draw(st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(1, 3)])) for _ in symbols]
    ints = [data.draw(st.integers(-4, 4)) for _ in symbols]
    x = CTX.exponent({s: (n + o) * d for s, n, o, d in zip(symbols, ints, offsets, scales)})
    assert lattice_contains(lattice, x) == all(o == 0 for o in offsets)


@given(diagonal_lattices(), st.lists(st.integers(1, 4), min_size=3, max_size=3))
def test_lattice_index_of_scaled_sublattice(lattice_data, factors):
    symbols, scales, lattice = lattice_data
    small = ValueLattice([CTX.exponent({s: k * d}) for s, k, d in zip(symbols, factors, scales)])
    assert lattice_index(lattice, small) == math.prod(factors[:len(symbols)])
