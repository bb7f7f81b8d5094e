"""
Lazy Hahn series over a finite field with exponents in the value group.

A series is a restartable stream of items ``(exponent, coefficient)`` in
increasing exponent order. An item whose coefficient is ``None`` is a
progress marker: every later item has an exponent at least as large. Markers
let bounded consumers stop inside infinite cancellations; they never carry
value. Streams are memoized, so re-enumeration returns identical items.
"""

import heapq
import logging
import threading
from dataclasses import dataclass
from itertools import count
from typing import Callable, Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from hahnlab.coefficients import FFElem, FieldSpec
from hahnlab.exponents import BasisContext, Exponent, Order, exp_cmp

logger = logging.getLogger(__name__)

DEFAULT_TERM_BUDGET = 10_000

Item = Tuple[Exponent, Optional[FFElem]]
Term = Tuple[Exponent, FFElem]
StreamFactory = Callable[[], Iterator[Item]]


class TermBudgetExceeded(RuntimeError):
    """Raised when a bounded materialization draws more items than allowed."""


class SupportCount(NamedTuple):
    count: int
    overflow: bool


@dataclass(frozen=True)
class Window:
    """All materializations keep terms with exponent strictly below ``bound``."""

    bound: Exponent


def _memoized(factory: StreamFactory, label: str) -> Callable[[], Iterator[Item]]:
    """
    Share one underlying generator between all enumerations of a stream.

    Items are validated as they are first drawn: term exponents strictly
    increase, coefficients are nonzero and no item undercuts a marker.
    """
    lock = threading.RLock()
    cache: List[Item] = []
    state: Dict[str, object] = {'source': None, 'done': False, 'last_term': None, 'floor': None}

    def _draw(i: int) -> Optional[Item]:
        with lock:
            while len(cache) <= i:
                if state['done']:
                    return None
                if state['source'] is None:
                    state['source'] = factory()
                try:
                    item = next(state['source'])
                except StopIteration:
                    state['done'] = True
                    return None
                _validate(item, state, label)
                cache.append(item)
            return cache[i]

    def _gen() -> Iterator[Item]:
        for i in count():
            item = _draw(i)
            if item is None:
                return
            yield item

    return _gen


def _validate(item: Item, state: Dict[str, object], label: str) -> None:
    e, c = item
    floor = state['floor']
    if floor is not None and exp_cmp(e, floor) is Order.LT:
        raise ValueError(f"Series {label}: item at {e} lies below an earlier bound {floor}")
    if c is None:
        state['floor'] = e
        return
    if c.is_zero():
        raise ValueError(f"Series {label}: zero coefficient at {e}")
    last = state['last_term']
    if last is not None and exp_cmp(e, last) is not Order.GT:
        raise ValueError(f"Series {label}: exponents not strictly increasing at {e}")
    state['last_term'] = e
    state['floor'] = e


class HahnSeries:
    """
    A lazily generated Hahn series.

    Args:
        factory: Zero-argument callable returning a fresh item iterator
        field: Coefficient field
        context: Basis context of the exponents
        label: Descriptor used in reports (e.g. ``a(3)``)
        finite: True when the stream is known to terminate
    """

    def __init__(
        self,
        factory: StreamFactory,
        field: FieldSpec,
        context: BasisContext,
        label: Optional[str] = None,
        finite: bool = False,
    ):
        self.field = field
        self.context = context
        self.label = label
        self.finite = finite
        self._stream = _memoized(factory, label or 'anonymous')

    def __repr__(self) -> str:
        if self.label:
            return f"HahnSeries({self.label})"
        if self.finite:
            return f"HahnSeries({format_terms(self.terms())})"
        return "HahnSeries(<lazy>)"

    def items(self) -> Iterator[Item]:
        return self._stream()

    def terms(self, bound: Optional[Exponent] = None, budget: Optional[int] = None) -> Iterator[Term]:
        """
        Yield the terms with exponent strictly below ``bound``.

        Raises:
            TermBudgetExceeded: If more than ``budget`` items are drawn
        """
        limit = DEFAULT_TERM_BUDGET if budget is None else budget
        drawn = 0
        for e, c in self.items():
            if bound is not None and exp_cmp(e, bound) is not Order.LT:
                return
            drawn += 1
            if drawn > limit:
                logger.debug("Term budget %d exceeded on %r below %s", limit, self, bound)
                raise TermBudgetExceeded(
                    f"{self.label or 'series'}: more than {limit} items below {bound}"
                )
            if c is not None:
                yield e, c

    def with_label(self, label: str) -> 'HahnSeries':
        return HahnSeries(self.items, self.field, self.context, label=label, finite=self.finite)

    def __add__(self, other: 'HahnSeries') -> 'HahnSeries':
        return series_add(self, other)

    def __sub__(self, other: 'HahnSeries') -> 'HahnSeries':
        return series_sub(self, other)

    def __neg__(self) -> 'HahnSeries':
        return series_neg(self)

    def __mul__(self, other: Union['HahnSeries', FFElem, int]) -> 'HahnSeries':
        if isinstance(other, HahnSeries):
            return series_mul(self, other)
        return series_scale(self, other)

    __rmul__ = __mul__

    def val(self, budget: Optional[int] = None) -> Optional[Exponent]:
        return series_val(self, budget)


def format_terms(terms: Sequence[Term]) -> str:
    if not terms:
        return '0'
    parts = []
    for e, c in terms:
        coeff = str(c)
        if '+' in coeff:
            coeff = f"({coeff})"
        parts.append(f"{coeff}*t^({e})")
    return ' + '.join(parts)


def _check_compatible(a: HahnSeries, b: HahnSeries) -> None:
    if a.field != b.field:
        raise ValueError(f"Series over different fields: {a.field} and {b.field}")
    if a.context is not b.context:
        raise ValueError("Series over different basis contexts")


def zero_series(field: FieldSpec, context: BasisContext) -> HahnSeries:
    return HahnSeries(lambda: iter(()), field, context, label='0', finite=True)


def from_terms(
    terms: Iterable[Tuple[Exponent, Union[FFElem, int]]],
    field: FieldSpec,
    context: BasisContext,
    label: Optional[str] = None,
) -> HahnSeries:
    """
    Build a finite series from terms sorted strictly by exponent.

    Raises:
        ValueError: On unsorted input or a zero coefficient
    """
    checked: List[Term] = []
    for e, c in terms:
        coeff = field.element(c)
        if coeff.is_zero():
            raise ValueError(f"Zero coefficient at exponent {e}")
        if e.context is not context:
            raise ValueError(f"Exponent {e} belongs to another basis context")
        if checked and exp_cmp(e, checked[-1][0]) is not Order.GT:
            raise ValueError(f"Terms are not strictly increasing at exponent {e}")
        checked.append((e, coeff))
    frozen = tuple(checked)
    return HahnSeries(lambda: iter(frozen), field, context, label=label, finite=True)


def monomial(c: Union[FFElem, int], e: Exponent, field: Optional[FieldSpec] = None) -> HahnSeries:
    """The series c*t^e; zero when c is zero."""
    if field is None:
        if not isinstance(c, FFElem):
            raise ValueError("monomial needs a field when the coefficient is an integer")
        field = c.field
    coeff = field.element(c)
    if coeff.is_zero():
        return zero_series(field, e.context)
    return from_terms([(e, coeff)], field, e.context)


def _map_items(
    a: HahnSeries,
    exponent_map: Callable[[Exponent], Exponent],
    coeff_map: Callable[[FFElem], FFElem],
    label: Optional[str] = None,
) -> HahnSeries:
    """Termwise map; ``exponent_map`` must be strictly increasing."""

    def _factory() -> Iterator[Item]:
        for e, c in a.items():
            yield exponent_map(e), (None if c is None else coeff_map(c))

    return HahnSeries(_factory, a.field, a.context, label=label, finite=a.finite)


def series_neg(a: HahnSeries) -> HahnSeries:
    return _map_items(a, lambda e: e, lambda c: -c)


def series_scale(a: HahnSeries, c: Union[FFElem, int]) -> HahnSeries:
    coeff = a.field.element(c)
    if coeff.is_zero():
        return zero_series(a.field, a.context)
    if coeff.is_one():
        return a
    return _map_items(a, lambda e: e, lambda x: x * coeff)


def series_shift(a: HahnSeries, e: Exponent) -> HahnSeries:
    """Multiply by the monomial t^e."""
    if e.is_zero():
        return a
    return _map_items(a, lambda x: x + e, lambda c: c)


def _merge(
    parts_factory: Callable[[], Iterator[Tuple[Optional[Exponent], HahnSeries]]],
) -> StreamFactory:
    """
    Stream factory of the sum of a (possibly infinite) family of series.

    ``parts_factory`` yields ``(lower, series)`` pairs with nondecreasing
    lower bounds; ``lower`` (or None for "no bound") promises that every item
    of the series is at least ``lower``. A part is only started once the
    smallest active head reaches its lower bound, so parts whose terms lie
    beyond an accumulation point are never touched prematurely.
    """

    def _factory() -> Iterator[Item]:
        parts = parts_factory()
        heap: List[Tuple[Exponent, int, int]] = []
        streams: Dict[int, Tuple[Iterator[Item], Optional[FFElem]]] = {}
        seq = count()
        pending: Optional[Tuple[Optional[Exponent], HahnSeries]] = None
        exhausted = False
        last_lower: Optional[Exponent] = None

        def _push(it: Iterator[Item], lower: Optional[Exponent] = None) -> bool:
            item = next(it, None)
            if item is None:
                return False
            e, c = item
            if lower is not None and exp_cmp(e, lower) is Order.LT:
                raise ValueError(f"Summand starts at {e}, below its declared bound {lower}")
            key = next(seq)
            streams[key] = (it, c)
            heapq.heappush(heap, (e, 0 if c is None else 1, key))
            return True

        while True:
            # Start every part whose lower bound is reached by the current minimum
            while not exhausted:
                if pending is None:
                    pending = next(parts, None)
                    if pending is None:
                        exhausted = True
                        break
                    lower = pending[0]
                    if lower is not None and last_lower is not None and exp_cmp(lower, last_lower) is Order.LT:
                        raise ValueError(f"Summand bounds must not decrease: {lower} after {last_lower}")
                    if lower is not None:
                        last_lower = lower
                lower, part = pending
                if heap and lower is not None and exp_cmp(lower, heap[0][0]) is Order.GT:
                    break
                pending = None
                if not _push(part.items(), lower) and lower is not None:
                    yield lower, None
            if not heap:
                if exhausted:
                    return
                continue
            e, kind, key = heapq.heappop(heap)
            it, c = streams.pop(key)
            if kind == 0:
                _push(it)
                yield e, None
                continue
            total = c
            advance = [it]
            while heap and heap[0][0] == e:
                _, _, other = heapq.heappop(heap)
                other_it, other_c = streams.pop(other)
                total = total + other_c
                advance.append(other_it)
            for stream in advance:
                _push(stream)
            yield e, (None if total.is_zero() else total)

    return _factory


def series_sum(series: Sequence[HahnSeries], label: Optional[str] = None) -> HahnSeries:
    """Sum of finitely many series."""
    if not series:
        raise ValueError("series_sum needs at least one summand")
    for s in series[1:]:
        _check_compatible(series[0], s)
    frozen = list(series)
    factory = _merge(lambda: iter([(None, s) for s in frozen]))
    return HahnSeries(
        factory, frozen[0].field, frozen[0].context, label=label,
        finite=all(s.finite for s in frozen),
    )


def series_add(a: HahnSeries, b: HahnSeries) -> HahnSeries:
    return series_sum([a, b])


def series_sub(a: HahnSeries, b: HahnSeries) -> HahnSeries:
    return series_sum([a, series_neg(b)])


def lazy_sum(
    parts_factory: Callable[[], Iterator[Tuple[Exponent, HahnSeries]]],
    field: FieldSpec,
    context: BasisContext,
    label: Optional[str] = None,
) -> HahnSeries:
    """
    Sum of a family of series with nondecreasing declared lower bounds.

    Args:
        parts_factory: Zero-argument callable yielding (lower bound, series)
        field: Coefficient field of every summand
        context: Basis context of every summand
        label: Descriptor for reports
    """
    return HahnSeries(_merge(parts_factory), field, context, label=label)


def _convolve(
    left: Sequence[Term], right: Sequence[Term], bound: Optional[Exponent] = None
) -> List[Term]:
    sums: Dict[Exponent, FFElem] = {}
    for ea, ca in left:
        for eb, cb in right:
            e = ea + eb
            if bound is not None and exp_cmp(e, bound) is not Order.LT:
                continue
            prod = ca * cb
            sums[e] = sums[e] + prod if e in sums else prod
    return [(e, sums[e]) for e in sorted(sums) if not sums[e].is_zero()]


def series_mul(
    a: HahnSeries,
    b: HahnSeries,
    window: Optional[Window] = None,
    budget: Optional[int] = None,
) -> HahnSeries:
    """
    Product of two series.

    When one factor is finite the product is lazy (a finite sum of shifted
    copies of the other). Two infinite factors need a window: the result is
    the finite truncation of the product below ``window.bound``.

    Raises:
        ValueError: Both factors infinite and no window given
        TermBudgetExceeded: A factor has too many terms below its window share
    """
    _check_compatible(a, b)
    if window is None:
        if a.finite and b.finite:
            left, right = list(a.terms()), list(b.terms())
            return from_terms(_convolve(left, right), a.field, a.context)
        if not (a.finite or b.finite):
            raise ValueError("Multiplying two infinite series requires a window")
        short, long_ = (a, b) if a.finite else (b, a)
        pieces = [series_shift(series_scale(long_, c), e) for e, c in short.terms()]
        if not pieces:
            return zero_series(a.field, a.context)
        return series_sum(pieces)
    va, vb = series_val(a, budget), series_val(b, budget)
    if va is None or vb is None:
        return zero_series(a.field, a.context)
    left = list(a.terms(window.bound - vb, budget))
    right = list(b.terms(window.bound - va, budget))
    return from_terms(_convolve(left, right, window.bound), a.field, a.context)


def series_val(a: HahnSeries, budget: Optional[int] = None) -> Optional[Exponent]:
    """Least exponent of the support, or None for the zero series."""
    for e, _ in a.terms(budget=budget):
        return e
    return None


def leading_coefficient(a: HahnSeries, budget: Optional[int] = None) -> Optional[FFElem]:
    for _, c in a.terms(budget=budget):
        return c
    return None


def truncate(a: HahnSeries, delta: Exponent, budget: Optional[int] = None) -> HahnSeries:
    """
    The finite partial sum of ``a`` over exponents strictly below ``delta``.

    Raises:
        TermBudgetExceeded: If ``a`` has too many terms below ``delta``
    """
    return from_terms(list(a.terms(delta, budget)), a.field, a.context)


def series_equal_below(
    a: HahnSeries, b: HahnSeries, bound: Exponent, budget: Optional[int] = None
) -> bool:
    return list(a.terms(bound, budget)) == list(b.terms(bound, budget))


def pth_root(a: HahnSeries, times: int = 1) -> HahnSeries:
    """Termwise (e, c) -> (e/p^k, c^(1/p^k)); exact since the field is perfect."""
    if times == 0:
        return a
    q = a.field.p ** times
    label = f"({a.label})^(1/{q})" if a.label else None
    return _map_items(a, lambda e: e / q, lambda c: c.frobenius_inverse(times), label=label)


def pth_power(a: HahnSeries, window: Optional[Window] = None, budget: Optional[int] = None) -> HahnSeries:
    """
    Termwise (e, c) -> (p*e, c^p), equal to a^p in characteristic p.

    With a window the result is truncated below its bound.
    """
    p = a.field.p
    powered = _map_items(a, lambda e: e * p, lambda c: c.frobenius())
    if window is None:
        return powered
    return truncate(powered, window.bound, budget)


def as_operator(a: HahnSeries, window: Window, budget: Optional[int] = None) -> HahnSeries:
    """AS(a) = a^p - a, restricted below the window bound."""
    return truncate(series_sub(pth_power(a), a), window.bound, budget)


def support_count_below(a: HahnSeries, delta: Exponent, budget: int = DEFAULT_TERM_BUDGET) -> SupportCount:
    """Number of terms below ``delta``; overflow is a value, not an error."""
    found = 0
    try:
        for _ in a.terms(delta, budget):
            found += 1
    except TermBudgetExceeded:
        return SupportCount(found, True)
    return SupportCount(found, False)
