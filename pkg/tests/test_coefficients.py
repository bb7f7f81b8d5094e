import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hahnlab.coefficients import (
    FieldSpec,
    artin_schreier,
    as_roots_in_field,
    default_modulus,
    field_ops,
    frobenius,
    frobenius_inverse,
)

FIELDS = [FieldSpec(2, 3), FieldSpec(3, 2), FieldSpec(3, 3), FieldSpec(5, 1), FieldSpec(5, 2)]


@st.composite
def field_elements(draw, count=1):
    field = draw(st.sampled_from(FIELDS))
    values = [field.from_int(draw(st.integers(0, field.order - 1))) for _ in range(count)]
    return values[0] if count == 1 else values


def trace(x):
    total, y = x.field.zero(), x
    for _ in range(x.field.m):
        total, y = total + y, y.frobenius()
    return total


def test_default_modulus_is_least_irreducible():
    assert default_modulus(3, 2) == (1, 0, 1)
    assert default_modulus(2, 2) == (1, 1, 1)
    assert FieldSpec(3, 2).modulus_text() == "u^2+1"


def test_invalid_fields():
    with pytest.raises(ValueError, match="prime"):
        FieldSpec(4, 1)
    with pytest.raises(ValueError, match="reducible"):
        FieldSpec(3, 2, modulus=(0, 0, 1))
    with pytest.raises(ValueError, match="monic"):
        FieldSpec(3, 2, modulus=(1, 0, 2))


def test_generator_arithmetic(f9):
    u = f9.gen()
    assert u ** 2 == 2
    assert str(u * 2 + 1) == "2*u+1"
    assert (u + 1) * (u + 2) == u ** 2 + 2
    assert f9.element([1, 0, 1]) == f9.zero()
    assert f9.order == 9 and len(list(f9.elements())) == 9


def test_prime_field_elements(f9):
    prime = f9.prime_elements()
    assert len(prime) == 3
    assert all(x.in_prime_field() for x in prime)
    assert not f9.gen().in_prime_field()


def test_division_by_zero(f9):
    with pytest.raises(ZeroDivisionError):
        f9.one() / f9.zero()
    with pytest.raises(ZeroDivisionError):
        f9.zero().inverse()


def test_mixed_fields_rejected(f3, f9):
    with pytest.raises(ValueError):
        f3.one() + f9.one()
    with pytest.raises(TypeError):
        f9.one() + 1.5


def test_field_ops_dispatch(f9):
    u = f9.gen()
    assert field_ops(u, u, "add") == u * 2
    assert field_ops(u, u, "div") == f9.one()
    with pytest.raises(ValueError, match="Unsupported field operation"):
        field_ops(u, u, "pow")


def test_from_int_range(f9):
    assert f9.from_int(3) == f9.gen()
    with pytest.raises(ValueError):
        f9.from_int(9)


def test_as_roots(f3, f9):
    assert as_roots_in_field(f3.zero()) == set(f3.elements())
    assert as_roots_in_field(f9.one()) == set()
    f27 = FieldSpec(3, 3)
    roots = as_roots_in_field(f27.one())
    assert len(roots) == 3
    assert all(artin_schreier(x) == 1 for x in roots)


@settings(max_examples=1000)
@given(field_elements(count=3))
def test_field_axioms(values):
    a, b, c = values
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == a.field.zero()
    if a:
        assert a * a.inverse() == a.field.one()


@settings(max_examples=1000)
@given(field_elements())
def test_frobenius_inverts(x):
    assert frobenius_inverse(frobenius(x)) == x
    assert frobenius(frobenius_inverse(x)) == x
    assert x.frobenius_inverse(times=x.field.m) == x


@settings(max_examples=1000)
@given(field_elements(count=2))
def test_artin_schreier_additive(values):
    a, b = values
    assert artin_schreier(a + b) == artin_schreier(a) + artin_schreier(b)


@given(field_elements())
def test_as_roots_exist_iff_trace_vanishes(a):
    roots = as_roots_in_field(a)
    assert len(roots) in (0, a.field.p)
    assert bool(roots) == trace(a).is_zero()
