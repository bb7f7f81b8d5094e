"""
Finite coefficient fields F_{p^m} = F_p[u]/(modulus).

Polynomial arithmetic over F_p is delegated to sympy's galoistools; elements
are immutable and print as polynomials in ``u``, e.g. ``2*u+1``.
"""

import logging
from itertools import product
from typing import Iterator, List, Optional, Sequence, Set, Tuple, Union

from sympy import isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (
    gf_add,
    gf_gcdex,
    gf_irreducible_p,
    gf_mul,
    gf_neg,
    gf_pow_mod,
    gf_rem,
    gf_strip,
    gf_sub,
)

logger = logging.getLogger(__name__)

# Brute-force irreducibility search is only meant for desk-scale fields
MAX_DEGREE = 12

Scalar = Union['FFElem', int]


def _to_gf(coeffs: Sequence[int]) -> List[int]:
    """Low-degree-first tuple to a galoistools list (high degree first)."""
    return gf_strip([ZZ(c) for c in reversed(coeffs)])


def _from_gf(poly: Sequence[int], m: int) -> Tuple[int, ...]:
    low_first = [int(c) for c in reversed(poly)]
    return tuple(low_first + [0] * (m - len(low_first)))


def default_modulus(p: int, m: int) -> Tuple[int, ...]:
    """
    Lexicographically least monic irreducible polynomial of degree m over F_p.

    Candidates u^m + c_{m-1}u^{m-1} + ... + c_0 are enumerated by the integer
    whose base-p digits are c_0, c_1, ... (constant term least significant).

    Returns:
        Coefficients low degree first, including the leading 1
    """
    if m == 1:
        return (0, 1)
    for n in range(p ** m):
        digits = [(n // p ** i) % p for i in range(m)]
        candidate = tuple(digits) + (1,)
        if gf_irreducible_p(_to_gf(candidate), p, ZZ):
            return candidate
    raise ValueError(f"No irreducible polynomial of degree {m} over F_{p}")


class FieldSpec:
    """
    The field F_{p^m} with a fixed modulus.

    Args:
        p: Characteristic (prime)
        m: Extension degree
        modulus: Monic irreducible polynomial, low degree first; the
            lexicographically least one when omitted
    """

    def __init__(self, p: int, m: int = 1, modulus: Optional[Sequence[int]] = None):
        if not isprime(p):
            raise ValueError(f"Field characteristic must be prime, got {p}")
        if m < 1 or m > MAX_DEGREE:
            raise ValueError(f"Extension degree must be between 1 and {MAX_DEGREE}, got {m}")
        if modulus is None:
            modulus = default_modulus(p, m)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError(f"Modulus must be monic of degree {m}, got {modulus}")
        if m > 1 and not gf_irreducible_p(_to_gf(modulus), p, ZZ):
            raise ValueError(f"Modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.m = m
        self.modulus = modulus
        self._gf_modulus = _to_gf(modulus)
        self.order = p ** m

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.m, self.modulus))

    def __repr__(self) -> str:
        return f"FieldSpec(p={self.p}, m={self.m}, modulus={self.modulus_text()})"

    def modulus_text(self) -> str:
        """The modulus as a polynomial in u, recorded in reports."""
        return _format_poly(self.modulus, self.p, self.m + 1)

    def element(self, value: Union[int, Sequence[int], 'FFElem']) -> 'FFElem':
        """Coerce an integer (prime field) or a coefficient vector."""
        if isinstance(value, FFElem):
            if value.field != self:
                raise ValueError(f"Element {value} belongs to {value.field}, not {self}")
            return value
        if isinstance(value, int):
            return FFElem(self, (value % self.p,) + (0,) * (self.m - 1))
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.m:
            poly = gf_rem(_to_gf(coeffs), self._gf_modulus, self.p, ZZ)
            return FFElem(self, _from_gf(poly, self.m))
        return FFElem(self, tuple(coeffs) + (0,) * (self.m - len(coeffs)))

    def from_int(self, n: int) -> 'FFElem':
        """The element whose base-p digits (low degree first) spell ``n``."""
        if not 0 <= n < self.order:
            raise ValueError(f"Index {n} out of range for a field of order {self.order}")
        return FFElem(self, tuple((n // self.p ** i) % self.p for i in range(self.m)))

    def zero(self) -> 'FFElem':
        return self.element(0)

    def one(self) -> 'FFElem':
        return self.element(1)

    def gen(self) -> 'FFElem':
        """The class of u."""
        if self.m == 1:
            # u is a root of u - c0 in the prime field
            return self.element(-self.modulus[0])
        return self.element([0, 1])

    def elements(self) -> Iterator['FFElem']:
        for digits in product(range(self.p), repeat=self.m):
            yield FFElem(self, tuple(reversed(digits)))

    def prime_elements(self) -> List['FFElem']:
        return [self.element(i) for i in range(self.p)]

    # Arithmetic on raw coefficient tuples

    def _add(self, a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
        return _from_gf(gf_add(_to_gf(a), _to_gf(b), self.p, ZZ), self.m)

    def _sub(self, a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
        return _from_gf(gf_sub(_to_gf(a), _to_gf(b), self.p, ZZ), self.m)

    def _neg(self, a: Tuple[int, ...]) -> Tuple[int, ...]:
        return _from_gf(gf_neg(_to_gf(a), self.p, ZZ), self.m)

    def _mul(self, a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
        prod = gf_mul(_to_gf(a), _to_gf(b), self.p, ZZ)
        return _from_gf(gf_rem(prod, self._gf_modulus, self.p, ZZ), self.m)

    def _inv(self, a: Tuple[int, ...]) -> Tuple[int, ...]:
        s, _, h = gf_gcdex(_to_gf(a), self._gf_modulus, self.p, ZZ)
        # h is the monic gcd, which is 1 for a nonzero element
        if h != [ZZ(1)]:
            raise ZeroDivisionError("Division by zero in a finite field")
        return _from_gf(gf_rem(s, self._gf_modulus, self.p, ZZ), self.m)

    def _pow(self, a: Tuple[int, ...], n: int) -> Tuple[int, ...]:
        return _from_gf(gf_pow_mod(_to_gf(a), n, self._gf_modulus, self.p, ZZ), self.m)


def _format_poly(coeffs: Sequence[int], p: int, length: int) -> str:
    terms = []
    for degree in range(length - 1, -1, -1):
        c = coeffs[degree] if degree < len(coeffs) else 0
        if c == 0:
            continue
        if degree == 0:
            terms.append(str(c))
        else:
            power = 'u' if degree == 1 else f"u^{degree}"
            terms.append(power if c == 1 else f"{c}*{power}")
    return '+'.join(terms) if terms else '0'


class FFElem:
    """Immutable element of a FieldSpec."""

    __slots__ = ('field', 'coeffs')

    def __init__(self, field: FieldSpec, coeffs: Tuple[int, ...]):
        self.field = field
        self.coeffs = coeffs

    def _coerce(self, other: Scalar) -> 'FFElem':
        if isinstance(other, FFElem):
            if other.field != self.field:
                raise ValueError(f"Cannot combine elements of {self.field} and {other.field}")
            return other
        if isinstance(other, int):
            return self.field.element(other)
        raise TypeError(f"Cannot combine a field element with {type(other).__name__}")

    def __add__(self, other: Scalar) -> 'FFElem':
        return FFElem(self.field, self.field._add(self.coeffs, self._coerce(other).coeffs))

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> 'FFElem':
        return FFElem(self.field, self.field._sub(self.coeffs, self._coerce(other).coeffs))

    def __rsub__(self, other: Scalar) -> 'FFElem':
        return self._coerce(other) - self

    def __neg__(self) -> 'FFElem':
        return FFElem(self.field, self.field._neg(self.coeffs))

    def __mul__(self, other: Scalar) -> 'FFElem':
        return FFElem(self.field, self.field._mul(self.coeffs, self._coerce(other).coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> 'FFElem':
        divisor = self._coerce(other)
        if divisor.is_zero():
            raise ZeroDivisionError("Division by zero in a finite field")
        return self * divisor.inverse()

    def __rtruediv__(self, other: Scalar) -> 'FFElem':
        return self._coerce(other) / self

    def __pow__(self, n: int) -> 'FFElem':
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return self.field.one()
        return FFElem(self.field, self.field._pow(self.coeffs, n))

    def inverse(self) -> 'FFElem':
        if self.is_zero():
            raise ZeroDivisionError("Zero has no inverse")
        return FFElem(self.field, self.field._inv(self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def in_prime_field(self) -> bool:
        return not any(self.coeffs[1:])

    def frobenius(self) -> 'FFElem':
        return self ** self.field.p

    def frobenius_inverse(self, times: int = 1) -> 'FFElem':
        """The unique x with x^(p^times) = self."""
        m = self.field.m
        shift = (-times) % m
        if shift == 0:
            return self
        return self ** (self.field.p ** shift)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self == self.field.element(other)
        if not isinstance(other, FFElem):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        return f"FFElem({self})"

    def __str__(self) -> str:
        return _format_poly(self.coeffs, self.field.p, self.field.m)


def field_ops(a: FFElem, b: FFElem, op: str) -> FFElem:
    """
    Apply a named field operation.

    Args:
        a: Left operand
        b: Right operand
        op: One of add, sub, mul, div

    Raises:
        ValueError: Unknown operation or mismatched fields
        ZeroDivisionError: Division by zero
    """
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op == 'mul':
        return a * b
    if op == 'div':
        return a / b
    raise ValueError(f"Unsupported field operation '{op}'. Use add, sub, mul or div")


def frobenius(a: FFElem) -> FFElem:
    return a.frobenius()


def frobenius_inverse(a: FFElem) -> FFElem:
    return a.frobenius_inverse()


def artin_schreier(x: FFElem) -> FFElem:
    return x.frobenius() - x


def as_roots_in_field(a: FFElem) -> Set[FFElem]:
    """All x in the field of ``a`` with x^p - x = a (empty or a coset of F_p)."""
    roots = {x for x in a.field.elements() if artin_schreier(x) == a}
    logger.debug("AS roots of %s in %r: %d found", a, a.field, len(roots))
    return roots
