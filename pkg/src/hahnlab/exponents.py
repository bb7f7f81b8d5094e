"""
Exact exponents of the value group.

An exponent is a rational coordinate vector over a declared basis of
rationally independent reals: the unit ``1``, ``pi`` and the reciprocals
``rK`` = 1/r_K of the family r_K = p + (K - 1) + 1/pi (K >= 2). Equality is
syntactic; order is decided by evaluating coordinates against refinable
rational enclosures of the basis reals.
"""

import logging
import math
import re
import threading
from enum import Enum
from fractions import Fraction
from functools import total_ordering
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from mpmath.libmp import mpf_pi, round_ceiling, round_floor, to_rational
from sympy import Matrix, ilcm
from sympy.matrices.normalforms import hermite_normal_form, smith_normal_form

logger = logging.getLogger(__name__)

UNIT = '1'
PI = 'pi'
DEFAULT_BUDGET = 256

# Bits added to an enclosure per refinement step
_PREC_STEP = 64

_R_SYMBOL = re.compile(r'^r([0-9]+)$')

Rational = Union[int, Fraction]
Interval = Tuple[Fraction, Fraction]


class BasisMismatchError(ValueError):
    """Raised when exponents from different basis contexts are combined."""


class RefinementBudgetExceeded(RuntimeError):
    """Raised when an order decision needs more refinement steps than allowed."""


class Order(Enum):
    LT = -1
    EQ = 0
    GT = 1


def pi_interval(prec: int) -> Interval:
    """Certified rational enclosure of pi at ``prec`` bits."""
    lo = Fraction(*to_rational(mpf_pi(prec, round_floor)))
    hi = Fraction(*to_rational(mpf_pi(prec, round_ceiling)))
    return lo, hi


def _reciprocal_r_interval(p: int, k: int) -> Callable[[int], Interval]:
    """Enclosure of 1/r_k with r_k = p + (k - 1) + 1/pi."""
    base = Fraction(p + k - 1)

    def evaluate(prec: int) -> Interval:
        lo_pi, hi_pi = pi_interval(prec)
        # r_k is decreasing in pi, so 1/r_k is increasing in pi
        return 1 / (base + 1 / lo_pi), 1 / (base + 1 / hi_pi)

    return evaluate


class Enclosure:
    """
    Refinable rational interval containing one basis real.

    Refinement only ever intersects with a tighter interval, so concurrent
    refiners cannot disagree about the bounds they observe.
    """

    def __init__(
        self,
        symbol: str,
        evaluate: Optional[Callable[[int], Interval]] = None,
        exact: Optional[Fraction] = None,
    ):
        if evaluate is None and exact is None:
            raise ValueError(f"Enclosure for '{symbol}' needs a value or an evaluator")
        self.symbol = symbol
        self._evaluate = evaluate
        self._lock = threading.Lock()
        self._prec = _PREC_STEP
        if exact is not None:
            self._bounds = (Fraction(exact), Fraction(exact))
        else:
            self._bounds = evaluate(self._prec)

    @property
    def exact(self) -> bool:
        return self._evaluate is None

    @property
    def bounds(self) -> Interval:
        with self._lock:
            return self._bounds

    @property
    def width(self) -> Fraction:
        lo, hi = self.bounds
        return hi - lo

    def refine(self) -> Interval:
        """Tighten the enclosure by one precision step and return it."""
        if self.exact:
            return self.bounds
        with self._lock:
            self._prec += _PREC_STEP
            lo, hi = self._evaluate(self._prec)
            old_lo, old_hi = self._bounds
            self._bounds = (max(lo, old_lo), min(hi, old_hi))
            logger.debug(
                "Refined %s to %d bits (width %.3e)",
                self.symbol, self._prec, float(self._bounds[1] - self._bounds[0]),
            )
            return self._bounds


def _symbol_key(symbol: str) -> Tuple[int, int]:
    if symbol == UNIT:
        return (0, 0)
    if symbol == PI:
        return (1, 0)
    match = _R_SYMBOL.match(symbol)
    if match:
        return (2, int(match.group(1)))
    return (3, 0)


class BasisContext:
    """
    The declared basis of the value group for one scenario.

    Symbols ``rK`` (K >= 2) are created on first use. Rational independence
    of the basis is an asserted axiom, never proved.
    """

    def __init__(self, p: int = 3, budget: int = DEFAULT_BUDGET, independent: bool = True):
        if p < 2:
            raise ValueError(f"Characteristic must be a prime, got {p}")
        self.p = p
        self.budget = budget
        self.independent = independent
        self._lock = threading.Lock()
        self._enclosures: Dict[str, Enclosure] = {
            UNIT: Enclosure(UNIT, exact=Fraction(1)),
            PI: Enclosure(PI, evaluate=pi_interval),
        }

    def __repr__(self) -> str:
        return f"BasisContext(p={self.p}, symbols={self.symbols})"

    @property
    def symbols(self) -> List[str]:
        with self._lock:
            return sorted(self._enclosures, key=_symbol_key)

    def is_symbol(self, symbol: str) -> bool:
        if symbol in (UNIT, PI):
            return True
        match = _R_SYMBOL.match(symbol)
        return bool(match) and int(match.group(1)) >= 2

    def enclosure(self, symbol: str) -> Enclosure:
        """Return the enclosure of ``symbol``, creating ``rK`` on demand."""
        with self._lock:
            found = self._enclosures.get(symbol)
            if found is not None:
                return found
            if not self.is_symbol(symbol):
                raise ValueError(
                    f"Unknown basis symbol '{symbol}'. Reserved symbols: 1, pi, r2, r3, ..."
                )
            k = int(_R_SYMBOL.match(symbol).group(1))
            created = Enclosure(symbol, evaluate=_reciprocal_r_interval(self.p, k))
            self._enclosures[symbol] = created
            return created

    def exponent(self, coords: Optional[Dict[str, Rational]] = None) -> 'Exponent':
        return Exponent(coords or {}, self)

    def zero(self) -> 'Exponent':
        return Exponent({}, self)

    def rational(self, q: Rational) -> 'Exponent':
        return Exponent({UNIT: q}, self)

    def pi(self, q: Rational = 1) -> 'Exponent':
        return Exponent({PI: q}, self)

    def reciprocal_r(self, k: int, q: Rational = 1) -> 'Exponent':
        """The exponent q/r_k; r_1 = p lives on the unit symbol."""
        if k < 1:
            raise ValueError(f"r_k is defined for k >= 1, got {k}")
        if k == 1:
            return Exponent({UNIT: Fraction(q) / self.p}, self)
        return Exponent({f"r{k}": q}, self)

    def interval(self, x: 'Exponent') -> Interval:
        """Rational interval containing the real value of ``x``."""
        lo = hi = Fraction(0)
        for symbol, q in x.coords:
            s_lo, s_hi = self.enclosure(symbol).bounds
            if q > 0:
                lo += q * s_lo
                hi += q * s_hi
            else:
                lo += q * s_hi
                hi += q * s_lo
        return lo, hi

    def refine(self, symbols: Iterable[str]) -> None:
        for symbol in symbols:
            self.enclosure(symbol).refine()


@total_ordering
class Exponent:
    """Immutable element of the value group."""

    __slots__ = ('_coords', '_context', '_hash')

    def __init__(self, coords: Union[Dict[str, Rational], Iterable[Tuple[str, Rational]]], context: BasisContext):
        items = coords.items() if isinstance(coords, dict) else coords
        merged: Dict[str, Fraction] = {}
        for symbol, q in items:
            if not context.is_symbol(symbol):
                raise ValueError(f"Unknown basis symbol '{symbol}'")
            merged[symbol] = merged.get(symbol, Fraction(0)) + Fraction(q)
        self._coords = tuple(
            (s, merged[s]) for s in sorted(merged, key=_symbol_key) if merged[s] != 0
        )
        self._context = context
        self._hash = hash(self._coords)

    @property
    def coords(self) -> Tuple[Tuple[str, Fraction], ...]:
        return self._coords

    @property
    def context(self) -> BasisContext:
        return self._context

    @property
    def symbols(self) -> List[str]:
        return [s for s, _ in self._coords]

    def coefficient(self, symbol: str) -> Fraction:
        for s, q in self._coords:
            if s == symbol:
                return q
        return Fraction(0)

    def is_zero(self) -> bool:
        return not self._coords

    def is_rational(self) -> bool:
        return all(s == UNIT for s, _ in self._coords)

    def __add__(self, other: 'Exponent') -> 'Exponent':
        return exp_add(self, other)

    def __sub__(self, other: 'Exponent') -> 'Exponent':
        return exp_add(self, exp_scale(other, -1))

    def __neg__(self) -> 'Exponent':
        return exp_scale(self, -1)

    def __mul__(self, q: Rational) -> 'Exponent':
        return exp_scale(self, q)

    __rmul__ = __mul__

    def __truediv__(self, q: Rational) -> 'Exponent':
        return exp_scale(self, Fraction(1) / Fraction(q))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Exponent):
            return NotImplemented
        return self._context is other._context and self._coords == other._coords

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: 'Exponent') -> bool:
        return exp_cmp(self, other) is Order.LT

    def __repr__(self) -> str:
        return f"Exponent({format_exponent(self)})"

    def __str__(self) -> str:
        return format_exponent(self)


def _check_context(a: Exponent, b: Exponent) -> None:
    if a.context is not b.context:
        raise BasisMismatchError("Exponents belong to different basis contexts")


def exp_add(a: Exponent, b: Exponent) -> Exponent:
    """Coordinatewise sum of two exponents over one basis context."""
    _check_context(a, b)
    return Exponent(list(a.coords) + list(b.coords), a.context)


def exp_scale(a: Exponent, q: Rational) -> Exponent:
    q = Fraction(q)
    return Exponent([(s, c * q) for s, c in a.coords], a.context)


def exp_cmp(a: Exponent, b: Exponent, budget: Optional[int] = None) -> Order:
    """
    Decide the order of two exponents.

    EQ is returned exactly when the coordinates agree. Otherwise the interval
    of a - b is refined until it excludes zero.

    Args:
        a: Left exponent
        b: Right exponent
        budget: Maximum refinement steps (defaults to the context budget)

    Returns:
        Order.LT, Order.EQ or Order.GT

    Raises:
        BasisMismatchError: If the exponents use different contexts
        RefinementBudgetExceeded: If the enclosures stay too coarse
    """
    _check_context(a, b)
    diff = exp_add(a, exp_scale(b, -1))
    if diff.is_zero():
        return Order.EQ
    context = a.context
    limit = context.budget if budget is None else budget
    moving = [s for s in diff.symbols if s != UNIT]
    for step in range(limit + 1):
        lo, hi = context.interval(diff)
        if lo > 0:
            return Order.GT
        if hi < 0:
            return Order.LT
        if step < limit:
            context.refine(moving)
    logger.debug("Refinement budget %d exhausted comparing %s and %s", limit, a, b)
    raise RefinementBudgetExceeded(
        f"Could not order {a} and {b} within {limit} refinement steps"
    )


def exp_min(values: Iterable[Exponent]) -> Exponent:
    items = list(values)
    if not items:
        raise ValueError("min of an empty exponent collection")
    best = items[0]
    for x in items[1:]:
        if exp_cmp(x, best) is Order.LT:
            best = x
    return best


def exp_max(values: Iterable[Exponent]) -> Exponent:
    items = list(values)
    if not items:
        raise ValueError("max of an empty exponent collection")
    best = items[0]
    for x in items[1:]:
        if exp_cmp(x, best) is Order.GT:
            best = x
    return best


def _format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_exponent(x: Exponent) -> str:
    """
    Render an exponent in the literal form read by the series parser.

    Symbol terms come first, the rational part last, e.g. ``-1/9*pi + 2/3``.
    """
    if x.is_zero():
        return '0'
    parts: List[Tuple[bool, str]] = []
    unit = Fraction(0)
    for symbol, q in x.coords:
        if symbol == UNIT:
            unit = q
            continue
        mag = abs(q)
        body = symbol if mag == 1 else f"{_format_rational(mag)}*{symbol}"
        parts.append((q < 0, body))
    if unit:
        parts.append((unit < 0, _format_rational(abs(unit))))
    negative, body = parts[0]
    text = f"-{body}" if negative else body
    for negative, body in parts[1:]:
        text += f" - {body}" if negative else f" + {body}"
    return text


class ValueLattice:
    """Finitely generated subgroup of the value group."""

    def __init__(self, generators: Sequence[Exponent], label: Optional[str] = None):
        gens = list(generators)
        for g in gens[1:]:
            _check_context(gens[0], g)
        self.generators = gens
        self.label = label

    def __repr__(self) -> str:
        inner = ', '.join(str(g) for g in self.generators)
        return f"ValueLattice({self.label or ''}<{inner}>)"

    def __contains__(self, x: Exponent) -> bool:
        return lattice_contains(self, x)

    @property
    def rank(self) -> int:
        matrix, _ = _integer_columns([self], [])
        return _ProjectedBasis(matrix).rank


def _integer_columns(
    lattices: Sequence[ValueLattice], extra: Sequence[Exponent]
) -> Tuple[Matrix, List[List[int]]]:
    """
    Scale all coordinates to integers with one common denominator.

    Returns the generator matrix of the first lattice (one column per
    generator) and the integer coordinate columns of every other lattice's
    generators followed by ``extra``.
    """
    vectors: List[Exponent] = []
    for lattice in lattices:
        vectors.extend(lattice.generators)
    vectors.extend(extra)
    symbols = sorted({s for v in vectors for s in v.symbols}, key=_symbol_key)
    scale = int(ilcm(1, 1, *[q.denominator for v in vectors for _, q in v.coords]))

    def column(v: Exponent) -> List[int]:
        return [int(v.coefficient(s) * scale) for s in symbols]

    head = lattices[0].generators
    if head and symbols:
        matrix = Matrix([column(g) for g in head]).T
    else:
        matrix = Matrix.zeros(len(symbols), 0)
    rest = [column(v) for v in vectors[len(head):]]
    return matrix, rest


class _ProjectedBasis:
    """
    Hermite basis of a column lattice after projecting onto independent rows.

    The projection is injective on the column space, so membership reduces
    to a square integral system once the target is known to lie in that
    space. Projecting first keeps the normal form input at full row rank.
    """

    def __init__(self, generators: Matrix):
        self.generators = generators
        if generators.cols == 0 or generators.rows == 0 or generators.is_zero_matrix:
            self.rows: List[int] = []
            self.basis = Matrix.zeros(0, 0)
            return
        _, pivots = generators.T.rref()
        self.rows = list(pivots)
        projected = generators.extract(self.rows, list(range(generators.cols)))
        self.basis = hermite_normal_form(projected)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def in_span(self, target: List[int]) -> bool:
        if not any(target):
            return True
        if self.rank == 0:
            return False
        augmented = self.generators.row_join(Matrix(target))
        return augmented.rank() == self.rank

    def coordinates(self, target: List[int]) -> Optional[List[Fraction]]:
        """Rational coordinates of ``target`` in the Hermite basis, or None."""
        if not self.in_span(target):
            return None
        if self.rank == 0:
            return []
        projected = Matrix([target[i] for i in self.rows])
        solution, _ = self.basis.gauss_jordan_solve(projected)
        return [Fraction(int(v.p), int(v.q)) for v in solution]


def lattice_contains(lattice: ValueLattice, x: Exponent) -> bool:
    """
    Decide whether ``x`` is an integer combination of the lattice generators.

    Coordinates are cleared of denominators, the generator columns are put in
    Hermite normal form and the unique rational solution is tested for
    integrality.
    """
    if x.is_zero():
        return True
    if not lattice.generators:
        return False
    _check_context(lattice.generators[0], x)
    matrix, rest = _integer_columns([lattice], [x])
    coords = _ProjectedBasis(matrix).coordinates(rest[0])
    return coords is not None and all(c.denominator == 1 for c in coords)


def lattice_index(big: ValueLattice, small: ValueLattice) -> Union[int, float]:
    """
    Group index (big : small).

    Args:
        big: The containing lattice
        small: A sublattice of ``big``

    Returns:
        Positive integer index, or math.inf when the ranks differ

    Raises:
        ValueError: If ``small`` is not contained in ``big``
    """
    for g in small.generators:
        if not lattice_contains(big, g):
            raise ValueError(f"Generator {g} of the small lattice is not in the big lattice")
    if not big.generators:
        return 1
    matrix, rest = _integer_columns([big, small], [])
    basis = _ProjectedBasis(matrix)
    rest = [col for col in rest if any(col)]
    rank_small = Matrix(rest).T.rank() if rest else 0
    if basis.rank != rank_small:
        return math.inf
    if basis.rank == 0:
        return 1
    relative = Matrix([[int(c) for c in basis.coordinates(col)] for col in rest]).T
    diagonal = smith_normal_form(relative)
    index = 1
    for i in range(basis.rank):
        index *= abs(int(diagonal[i, i]))
    return index
