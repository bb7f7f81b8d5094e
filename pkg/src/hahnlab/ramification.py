"""
Galois group models, automorphisms acting on explicit generators, and
ramification-ideal segments.

Field elements of an extension are polynomials in generator symbols with
finite series coefficients (FieldExpr). Automorphisms act on them symbolically
through an action table; values are read off by evaluating to Hahn series.
"""

import concurrent.futures
import logging
import re
import threading
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple, Union

from hahnlab.coefficients import FFElem, FieldSpec
from hahnlab.cuts import (
    Segment,
    UnsettledCut,
    above_open,
    final_minus_cut,
    generated_by,
    ideal_contains,
    segment_within,
)
from hahnlab.exponents import BasisContext, Exponent, Order, RefinementBudgetExceeded, exp_cmp, exp_min
from hahnlab.extensions import DistanceWitnesses, distance
from hahnlab.series import (
    HahnSeries,
    TermBudgetExceeded,
    Window,
    from_terms,
    series_mul,
    series_sum,
    series_val,
    zero_series,
)

logger = logging.getLogger(__name__)

MAX_GROUP_ORDER = 10_000
_MAX_REDUCTIONS = 10_000

Monomial = Tuple[Tuple[str, int], ...]
Constant = Dict[Exponent, FFElem]
Element = Tuple[int, ...]


def _const_add(a: Constant, b: Constant) -> Constant:
    out = dict(a)
    for e, c in b.items():
        total = out[e] + c if e in out else c
        if total.is_zero():
            out.pop(e, None)
        else:
            out[e] = total
    return out


def _const_mul(a: Constant, b: Constant) -> Constant:
    out: Constant = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            out = _const_add(out, {ea + eb: ca * cb})
    return out


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    powers = dict(a)
    for s, k in b:
        powers[s] = powers.get(s, 0) + k
    return tuple(sorted(powers.items()))


class FieldExpr:
    """
    A polynomial in generator symbols with finite-series coefficients.

    ``closed_form`` optionally carries a known series for the whole element;
    evaluation then uses it instead of expanding, which is needed when the
    expansion cancels infinitely often below the leading term.
    """

    def __init__(
        self,
        terms: Dict[Monomial, Constant],
        field: FieldSpec,
        context: BasisContext,
        closed_form: Optional[HahnSeries] = None,
    ):
        self.terms = {m: c for m, c in terms.items() if c}
        self.field = field
        self.context = context
        self.closed_form = closed_form

    @classmethod
    def symbol(cls, name: str, field: FieldSpec, context: BasisContext) -> 'FieldExpr':
        return cls({((name, 1),): {context.zero(): field.one()}}, field, context)

    @classmethod
    def constant(
        cls,
        c: Union[FFElem, int],
        field: FieldSpec,
        context: BasisContext,
        e: Optional[Exponent] = None,
    ) -> 'FieldExpr':
        coeff = field.element(c)
        if coeff.is_zero():
            return cls({}, field, context)
        return cls({(): {e if e is not None else context.zero(): coeff}}, field, context)

    @classmethod
    def from_series(cls, s: HahnSeries) -> 'FieldExpr':
        """A finite series as a constant expression."""
        if not s.finite:
            raise ValueError("Only finite series can be FieldExpr coefficients")
        return cls({(): dict(s.terms())}, s.field, s.context)

    def _coerce(self, other: Union['FieldExpr', FFElem, int, HahnSeries]) -> 'FieldExpr':
        if isinstance(other, FieldExpr):
            if other.field != self.field or other.context is not self.context:
                raise ValueError("FieldExpr operands over different fields or contexts")
            return other
        if isinstance(other, HahnSeries):
            return FieldExpr.from_series(other)
        return FieldExpr.constant(other, self.field, self.context)

    def _new(self, terms: Dict[Monomial, Constant]) -> 'FieldExpr':
        return FieldExpr(terms, self.field, self.context)

    def __add__(self, other) -> 'FieldExpr':
        other = self._coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = _const_add(terms.get(m, {}), c)
        return self._new(terms)

    __radd__ = __add__

    def __neg__(self) -> 'FieldExpr':
        return self._new({m: {e: -x for e, x in c.items()} for m, c in self.terms.items()})

    def __sub__(self, other) -> 'FieldExpr':
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> 'FieldExpr':
        return self._coerce(other) - self

    def __mul__(self, other) -> 'FieldExpr':
        other = self._coerce(other)
        terms: Dict[Monomial, Constant] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                terms[m] = _const_add(terms.get(m, {}), _const_mul(ca, cb))
        return self._new(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> 'FieldExpr':
        if n < 0:
            raise ValueError("FieldExpr powers must be nonnegative")
        result = FieldExpr.constant(1, self.field, self.context)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldExpr):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self) -> int:
        return hash(frozenset((m, frozenset(c.items())) for m, c in self.terms.items()))

    def __repr__(self) -> str:
        return f"FieldExpr({self})"

    def __str__(self) -> str:
        if not self.terms:
            return '0'
        parts = []
        for m in sorted(self.terms, key=lambda mono: (sum(k for _, k in mono), mono)):
            const = self.terms[m]
            mono = '*'.join(s if k == 1 else f"{s}^{k}" for s, k in m)
            if len(const) == 1 and next(iter(const)).is_zero():
                c = next(iter(const.values()))
                if not mono:
                    parts.append(str(c))
                elif c.is_one():
                    parts.append(mono)
                else:
                    parts.append(f"({c})*{mono}")
                continue
            text = ' + '.join(
                f"{c}*t^({e})" for e, c in sorted(const.items(), key=lambda item: item[0]))
            parts.append(f"({text})*{mono}" if mono else f"({text})")
        return ' + '.join(parts)

    def symbols(self) -> Set[str]:
        return {s for m in self.terms for s, _ in m}

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_series(self) -> HahnSeries:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        const = self.terms.get((), {})
        return from_terms(sorted(const.items(), key=lambda item: item[0]), self.field, self.context)

    def with_closed_form(self, series: HahnSeries) -> 'FieldExpr':
        return FieldExpr(self.terms, self.field, self.context, closed_form=series)

    def frobenius(self) -> 'FieldExpr':
        """The p-th power, computed termwise in characteristic p."""
        p = self.field.p
        terms = {}
        for m, c in self.terms.items():
            mono = tuple((s, k * p) for s, k in m)
            terms[mono] = {e * p: x.frobenius() for e, x in c.items()}
        return self._new(terms)

    def substitute(self, images: Dict[str, 'FieldExpr']) -> 'FieldExpr':
        """Replace symbols by expressions; unlisted symbols stay."""
        result = self._new({})
        for m, c in self.terms.items():
            piece = self._new({(): c})
            for s, k in m:
                image = images.get(s)
                if image is None:
                    image = FieldExpr.symbol(s, self.field, self.context)
                piece = piece * (image ** k)
            result = result + piece
        return result

    def evaluate(
        self,
        env: Dict[str, HahnSeries],
        window: Optional[Window] = None,
        budget: Optional[int] = None,
    ) -> HahnSeries:
        """
        The element as a series.

        Linear expressions evaluate lazily; monomials of degree 2 or more need
        a window and are truncated below it, so only the part of the result
        below ``window.bound`` is meaningful then.

        Raises:
            ValueError: Unknown symbol, or a nonlinear monomial without window
        """
        if self.closed_form is not None:
            return self.closed_form
        pieces = []
        for m, c in self.terms.items():
            coeff = from_terms(sorted(c.items(), key=lambda item: item[0]), self.field, self.context)
            value = coeff
            degree = sum(k for _, k in m)
            if degree > 1 and window is None:
                raise ValueError(f"Evaluating the nonlinear monomial {m} needs a window")
            for s, k in m:
                if s not in env:
                    raise ValueError(f"No series bound to symbol '{s}'")
                for _ in range(k):
                    value = series_mul(value, env[s], window if degree > 1 else None, budget)
            pieces.append(value)
        if not pieces:
            return zero_series(self.field, self.context)
        return series_sum(pieces)


def reduce_relations(expr: FieldExpr, relations: Dict[str, FieldExpr]) -> FieldExpr:
    """
    Rewrite X^k with k >= p as X^(k-p) (X + R_X) for every X with AS(X) = R_X.

    Raises:
        ValueError: If the rewriting does not terminate
    """
    p = expr.field.p
    for _ in range(_MAX_REDUCTIONS):
        result = expr._new({})
        changed = False
        for m, c in expr.terms.items():
            powers = dict(m)
            target = next((s for s, k in m if k >= p and s in relations), None)
            piece = expr._new({(): c})
            if target is None:
                result = result + expr._new({m: c})
                continue
            changed = True
            powers[target] -= p
            rest = tuple(sorted((s, k) for s, k in powers.items() if k))
            x = FieldExpr.symbol(target, expr.field, expr.context)
            result = result + piece * expr._new({rest: {expr.context.zero(): expr.field.one()}}) * (
                x + relations[target])
        expr = result
        if not changed:
            return expr
    raise ValueError("Artin-Schreier reduction did not terminate")


def as_image(expr: FieldExpr, relations: Dict[str, FieldExpr]) -> FieldExpr:
    """AS(expr) = expr^p - expr, reduced with the relations X^p = X + R_X."""
    return reduce_relations(expr.frobenius(), relations) - expr


class GaloisGroupModel:
    """
    A finite group in normal form together with its action on generator symbols.

    Args:
        p: Characteristic
        action: generator name -> symbol -> image of the symbol
        derived: Symbols defined by expressions in the others (e.g. omega)
    """

    kind = 'abstract'
    generator_names: Tuple[str, ...] = ()

    def __init__(
        self,
        p: int,
        action: Optional[Dict[str, Dict[str, FieldExpr]]] = None,
        derived: Optional[Dict[str, FieldExpr]] = None,
    ):
        self.p = p
        self.action = action or {}
        self.derived = derived or {}
        unknown = set(self.action) - set(self.generator_names)
        if unknown:
            raise ValueError(f"Action table names unknown generators: {sorted(unknown)}")

    @property
    def symbols(self) -> Set[str]:
        return {s for table in self.action.values() for s in table}

    def identity(self) -> Element:
        raise NotImplementedError

    def group_mul(self, g: Element, h: Element) -> Element:
        raise NotImplementedError

    def inverse(self, g: Element) -> Element:
        raise NotImplementedError

    def group_elements(self) -> List[Element]:
        raise NotImplementedError

    def generator(self, name: str) -> Element:
        raise NotImplementedError

    def _words(self, g: Element) -> List[Tuple[str, int]]:
        """(generator, exponent) pairs, applied right to left."""
        raise NotImplementedError

    @property
    def order(self) -> int:
        return len(self.group_elements())

    def check(self, g: Element) -> Element:
        if len(g) != len(self.identity()) or any(not 0 <= x < self.p for x in g):
            raise ValueError(f"Element {g} does not belong to {self}")
        return tuple(g)

    def power(self, g: Element, n: int) -> Element:
        if n < 0:
            return self.power(self.inverse(g), -n)
        result = self.identity()
        for _ in range(n):
            result = self.group_mul(result, g)
        return result

    def format_element(self, g: Element) -> str:
        parts = [name if k == 1 else f"{name}^{k}" for name, k in self._words(g) if k]
        return '*'.join(reversed(parts)) if parts else 'id'

    def parse_word(self, text: str) -> Element:
        """
        Parse a product such as ``sigma*tau^-1``; ``id`` is the identity.

        Raises:
            ValueError: Unknown generator or malformed factor
        """
        result = self.identity()
        text = text.strip()
        if text in ('id', '1', ''):
            return result
        for factor in text.split('*'):
            match = re.fullmatch(r'\s*([A-Za-z]\w*)\s*(?:\^\s*(-?\d+))?\s*', factor)
            if not match:
                raise ValueError(f"Malformed group word factor '{factor}'")
            name, exp = match.group(1), int(match.group(2) or 1)
            if name not in self.generator_names:
                raise ValueError(
                    f"Unknown generator '{name}'. Valid generators: {', '.join(self.generator_names)}")
            result = self.group_mul(result, self.power(self.generator(name), exp))
        return result

    def apply_generator(self, name: str, expr: FieldExpr, times: int = 1) -> FieldExpr:
        images = self.action.get(name, {})
        for _ in range(times % self.p):
            expr = expr.substitute(images)
        return expr

    def act(self, g: Element, expr: FieldExpr) -> FieldExpr:
        """The image of ``expr`` under the automorphism g."""
        g = self.check(g)
        unknown = expr.symbols() - self.symbols
        if unknown:
            raise ValueError(f"Unknown field symbol(s) {sorted(unknown)} for {self}")
        for name, k in self._words(g):
            expr = self.apply_generator(name, expr, k)
        return expr


class ElementaryAbelian(GaloisGroupModel):
    """(C_p)^n with generators sigma1..sigman acting independently."""

    kind = 'elementary-abelian'

    def __init__(
        self,
        n: int,
        p: int,
        action: Optional[Dict[str, Dict[str, FieldExpr]]] = None,
        names: Optional[Sequence[str]] = None,
        derived: Optional[Dict[str, FieldExpr]] = None,
    ):
        if n < 1:
            raise ValueError(f"Rank must be positive, got {n}")
        if p ** n > MAX_GROUP_ORDER:
            raise ValueError(f"Group order {p ** n} exceeds {MAX_GROUP_ORDER}")
        self.n = n
        self.generator_names = tuple(names) if names else tuple(f"sigma{i + 1}" for i in range(n))
        if len(self.generator_names) != n:
            raise ValueError(f"Expected {n} generator names, got {len(self.generator_names)}")
        super().__init__(p, action, derived)

    def __repr__(self) -> str:
        return f"ElementaryAbelian(n={self.n}, p={self.p})"

    def identity(self) -> Element:
        return (0,) * self.n

    def group_mul(self, g: Element, h: Element) -> Element:
        g, h = self.check(g), self.check(h)
        return tuple((a + b) % self.p for a, b in zip(g, h))

    def inverse(self, g: Element) -> Element:
        return tuple((-a) % self.p for a in self.check(g))

    def group_elements(self) -> List[Element]:
        return list(product(range(self.p), repeat=self.n))

    def generator(self, name: str) -> Element:
        i = self.generator_names.index(name)
        return tuple(1 if j == i else 0 for j in range(self.n))

    def _words(self, g: Element) -> List[Tuple[str, int]]:
        return list(zip(self.generator_names, g))


class Heisenberg(GaloisGroupModel):
    """
    The group of order p^3 with normal form iota^a tau^b sigma^c, iota central
    and sigma tau = iota^-2 tau sigma.
    """

    kind = 'heisenberg'
    generator_names = ('iota', 'tau', 'sigma')

    def __init__(
        self,
        p: int,
        action: Optional[Dict[str, Dict[str, FieldExpr]]] = None,
        derived: Optional[Dict[str, FieldExpr]] = None,
    ):
        if p == 2:
            raise ValueError("The Heisenberg model needs an odd characteristic")
        super().__init__(p, action, derived)

    def __repr__(self) -> str:
        return f"Heisenberg(p={self.p})"

    def identity(self) -> Element:
        return (0, 0, 0)

    def group_mul(self, g: Element, h: Element) -> Element:
        (a, b, c), (a2, b2, c2) = self.check(g), self.check(h)
        p = self.p
        return ((a + a2 - 2 * c * b2) % p, (b + b2) % p, (c + c2) % p)

    def inverse(self, g: Element) -> Element:
        a, b, c = self.check(g)
        p = self.p
        return ((-a - 2 * c * b) % p, (-b) % p, (-c) % p)

    def group_elements(self) -> List[Element]:
        return list(product(range(self.p), repeat=3))

    def generator(self, name: str) -> Element:
        return {'iota': (1, 0, 0), 'tau': (0, 1, 0), 'sigma': (0, 0, 1)}[name]

    def _words(self, g: Element) -> List[Tuple[str, int]]:
        a, b, c = g
        # iota^a(tau^b(sigma^c(x)))
        return [('sigma', c), ('tau', b), ('iota', a)]


def apply_automorphism(model: GaloisGroupModel, g: Element, expr: FieldExpr) -> FieldExpr:
    return model.act(g, expr)


def action_consistency(model: GaloisGroupModel) -> List[Tuple[str, str, bool]]:
    """
    act(g*s) = act(g) o act(s) on every symbol, for all g and generators s.

    Returns:
        Failing (element, symbol) descriptions as (element, symbol, False)
        entries; an empty list when the action is a homomorphism
    """
    failures = []
    symbols = sorted(model.symbols)
    for g in model.group_elements():
        for name in model.generator_names:
            s = model.generator(name)
            for sym in symbols:
                x = FieldExpr.symbol(sym, *_expr_space(model))
                lhs = model.act(model.group_mul(g, s), x)
                rhs = model.act(g, model.act(s, x))
                if lhs != rhs:
                    failures.append((f"{model.format_element(g)}*{name}", sym, False))
    return failures


def _expr_space(model: GaloisGroupModel) -> Tuple[FieldSpec, BasisContext]:
    for table in model.action.values():
        for image in table.values():
            return image.field, image.context
    raise ValueError(f"{model} has an empty action table")


def as_compatibility(
    model: GaloisGroupModel, relations: Dict[str, FieldExpr]
) -> List[Tuple[str, str, bool]]:
    """
    For each generator g and symbol X with AS(X) = R_X, check AS(gX) = g(R_X).
    """
    results = []
    for name in model.generator_names:
        g = model.generator(name)
        for sym, rel in sorted(relations.items()):
            x = FieldExpr.symbol(sym, rel.field, rel.context)
            lhs = as_image(model.act(g, x), relations)
            rhs = reduce_relations(model.act(g, rel), relations)
            results.append((name, sym, lhs == rhs))
    return results


def derived_consistency(
    model: GaloisGroupModel, images: Dict[Tuple[str, str], FieldExpr]
) -> List[Tuple[str, str, bool]]:
    """
    Check declared images of derived symbols, e.g. iota(omega) = omega + 1.

    Images may mention derived symbols; they are expanded by definition.
    """
    results = []
    for (name, sym), image in sorted(images.items()):
        definition = model.derived[sym]
        computed = model.act(model.generator(name), definition)
        expected = image.substitute(model.derived)
        results.append((name, sym, computed == expected))
    return results


@dataclass(frozen=True)
class Subgroup:
    elements: frozenset
    generators: Tuple[Element, ...]
    label: str

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def nonidentity(self) -> List[Element]:
        return sorted(g for g in self.elements if any(g))


def closure(model: GaloisGroupModel, gens: Iterable[Element]) -> frozenset:
    gens = [model.check(g) for g in gens]
    seen = {model.identity()}
    frontier = [model.identity()]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = model.group_mul(x, g)
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return frozenset(seen)


def subgroup_enumerate(model: GaloisGroupModel) -> List[Subgroup]:
    """
    All subgroups, by closing cyclic subgroups under joins.

    Returns:
        Subgroups sorted by order then elements, trivial subgroup first
    """
    order = model.order
    if order > MAX_GROUP_ORDER:
        raise ValueError(f"Group order {order} exceeds {MAX_GROUP_ORDER}")
    found: Dict[frozenset, Tuple[Element, ...]] = {}
    for g in model.group_elements():
        elems = closure(model, [g])
        if elems not in found:
            found[elems] = (g,) if any(g) else ()
    changed = True
    while changed:
        changed = False
        current = list(found.items())
        for i, (a, gens_a) in enumerate(current):
            for b, gens_b in current[i + 1:]:
                joined = closure(model, list(gens_a) + list(gens_b))
                if joined not in found:
                    found[joined] = tuple(gens_a) + tuple(gens_b)
                    changed = True
    subgroups = []
    for elems, gens in found.items():
        label = '<' + ', '.join(model.format_element(g) for g in gens) + '>' if gens else '<id>'
        subgroups.append(Subgroup(elems, gens, label))
    subgroups.sort(key=lambda h: (h.order, sorted(h.elements)))
    logger.debug("%r has %d subgroups", model, len(subgroups))
    return subgroups


class Evidence(NamedTuple):
    element: str
    descriptor: str
    value: Exponent


EQUALITY = 'equality'
LOWER_BOUND = 'segment lower bound'
WITNESSED = 'witness-established'


@dataclass
class RamSegment:
    segment: Segment
    evidence: List[Evidence] = field(default_factory=list)
    status: str = LOWER_BOUND
    note: str = ''

    @property
    def sound(self) -> bool:
        return all(ideal_contains(self.segment, ev.value) for ev in self.evidence)


def i_sigma_witnesses(
    model: GaloisGroupModel,
    g: Element,
    tests: Sequence[Tuple[str, FieldExpr]],
    env: Dict[str, HahnSeries],
    window: Optional[Window] = None,
    budget: Optional[int] = None,
) -> List[Exponent]:
    """
    Values v(g b - b) - v(b) for the test elements b.

    Raises:
        ValueError: If g fixes a test element or an element evaluates to zero
    """
    values = []
    for descriptor, b in tests:
        diff = model.act(g, b) - b
        if diff.is_zero():
            raise ValueError(
                f"{model.format_element(g)} fixes {descriptor}; v(gb - b) is undefined")
        num = _leading_value(diff.evaluate(env, window, budget), window, budget, descriptor)
        den = _leading_value(b.evaluate(env, window, budget), window, budget, descriptor)
        values.append(num - den)
    return values


def _leading_value(
    s: HahnSeries, window: Optional[Window], budget: Optional[int], descriptor: str
) -> Exponent:
    bound = window.bound if window is not None else None
    for e, _ in s.terms(bound, budget):
        return e
    raise ValueError(f"Test element {descriptor} evaluates to zero below the window")


def segment_from_witnesses(
    values: Sequence[Exponent], gamma: Exponent, mark_base: int = 2, depth: int = 1, settle: bool = False
) -> Segment:
    """
    AboveOpen(gamma) when every value lies above gamma and values come within
    mark_base^-k of gamma for k = 1..depth; otherwise the witness segment.

    Raises:
        UnsettledCut: With ``settle``, when every value lies above gamma but
            the marks are not reached
    """
    if not values:
        raise ValueError("segment_from_witnesses needs at least one value")
    above = all(exp_cmp(v, gamma) is Order.GT for v in values)
    close = all(
        any(exp_cmp(v, gamma + gamma.context.rational(1) / mark_base ** k) is Order.LT for v in values)
        for k in range(1, depth + 1)
    )
    if above and close:
        return above_open(gamma)
    if above and settle:
        shown = ", ".join(str(v) for v in sorted(values, reverse=True))
        raise UnsettledCut(f"witnesses {shown} do not settle AboveOpen({gamma})")
    return generated_by(sorted(values, reverse=True))


def min_s_theta_h(
    model: GaloisGroupModel,
    h: Subgroup,
    theta: FieldExpr,
    env: Dict[str, HahnSeries],
    budget: Optional[int] = None,
) -> Tuple[Exponent, Dict[Element, Exponent]]:
    """min over sigma in H of v(sigma theta - theta), with the per-element values."""
    if h.is_trivial:
        raise ValueError("S(theta, H) is empty for the trivial subgroup")
    per_element = {}
    for g in h.nonidentity():
        diff = model.act(g, theta) - theta
        v = series_val(diff.evaluate(env, budget=budget), budget) if not diff.is_zero() else None
        if v is None:
            raise ValueError(f"{model.format_element(g)} fixes theta; theta is no generator")
        per_element[g] = v
    return exp_min(per_element.values()), per_element


def i_h_formula(
    model: GaloisGroupModel,
    h: Subgroup,
    theta: FieldExpr,
    env: Dict[str, HahnSeries],
    d1: DistanceWitnesses,
    hc_declared: bool = False,
    budget: Optional[int] = None,
) -> RamSegment:
    """
    The segment S_H = min S(theta, H) - D_1(theta, K_H) with sampled evidence.

    Evidence values v(sigma theta - theta) - v(theta - a) use the distance
    witnesses a in K_H. Equality with I_H is only marked under |H| <= p and a
    declared (HC).
    """
    smin, per_element = min_s_theta_h(model, h, theta, env, budget)
    segment = final_minus_cut(smin, d1.cut)
    evidence = []
    for g, v_sigma in sorted(per_element.items()):
        for i, value in enumerate(d1.values):
            evidence.append(Evidence(model.format_element(g), f"theta - a[{i}]", v_sigma - value))
    status = EQUALITY if hc_declared and h.order <= model.p else LOWER_BOUND
    note = f"min S(theta,H) = {smin}, d_1(theta,K_H) = {d1.cut}"
    return RamSegment(segment, evidence, status, note)


class HCResult(NamedTuple):
    ok: bool
    strict: bool
    values: List[Exponent]


def hc_check(
    model: GaloisGroupModel,
    h: Subgroup,
    theta: FieldExpr,
    env: Dict[str, HahnSeries],
    samples: Sequence[HahnSeries],
    window: Optional[Window] = None,
    budget: Optional[int] = None,
) -> HCResult:
    """Sampled (HC): v(sigma theta - theta) - v(theta - a) >= 0 for a in K_H."""
    _, per_element = min_s_theta_h(model, h, theta, env, budget)
    theta_series = theta.evaluate(env, window, budget)
    values = []
    for a in samples:
        d = distance(theta_series, a, window, budget)
        values.extend(v - d for _, v in sorted(per_element.items()))
    zero = theta.context.zero()
    ok = all(exp_cmp(v, zero) is not Order.LT for v in values)
    strict = all(exp_cmp(v, zero) is Order.GT for v in values)
    return HCResult(ok, strict, values)


@dataclass
class RamComparison:
    segments: List[str]
    count: int
    exact: bool
    depth: Optional[int]
    s_theta_count: Optional[int]
    within_maximal: Dict[str, Optional[bool]]

    def as_dict(self) -> Dict[str, object]:
        return {
            'ram': self.segments,
            'count': self.count,
            'bound': 'exact' if self.exact else 'at-least',
            'depth': self.depth,
            's_theta': self.s_theta_count,
            'within_maximal_ideal': self.within_maximal,
        }


def ram_set_and_compare(
    subgroups: Sequence[Subgroup],
    segments: Dict[str, RamSegment],
    depth: Optional[int] = None,
    s_theta_count: Optional[int] = None,
) -> RamComparison:
    """
    Deduplicate the ideals I_H over nontrivial subgroups.

    Only segments established exactly (formula equality or witnesses) are
    counted; lower-bound segments make the count a lower bound.

    Raises:
        ValueError: If a nontrivial subgroup has no segment
    """
    missing = [h.label for h in subgroups if not h.is_trivial and h.label not in segments]
    if missing:
        raise ValueError(f"No ramification segment for subgroup(s): {', '.join(missing)}")
    distinct: List[Segment] = []
    exact = True
    for h in subgroups:
        if h.is_trivial:
            continue
        ram = segments[h.label]
        if ram.status == LOWER_BOUND:
            exact = False
            continue
        if ram.segment not in distinct:
            distinct.append(ram.segment)
    zero = None
    for seg in distinct:
        base = seg.gamma if seg.gamma is not None else seg.witnesses[0]
        zero = base.context.zero()
        break
    within = {}
    for seg in distinct:
        within[str(seg)] = segment_within(seg, above_open(zero)) if zero is not None else None
    return RamComparison([str(s) for s in distinct], len(distinct), exact, depth, s_theta_count, within)


def subgroup_battery(
    subgroups: Sequence[Subgroup],
    task: Callable[[Subgroup], RamSegment],
    max_workers: int = 4,
) -> Dict[str, RamSegment]:
    """
    Run ``task`` for every nontrivial subgroup in a thread pool.

    Failures are logged and leave the subgroup without a segment; budget
    exhaustion and unsettled cuts are raised once the pool has drained.
    """
    results: Dict[str, RamSegment] = {}
    lock = threading.Lock()
    pending = [h for h in subgroups if not h.is_trivial]
    inconclusive: Dict[str, Exception] = {}

    def on_complete(h: Subgroup, segment: RamSegment) -> None:
        with lock:
            results[h.label] = segment
            logger.debug("Subgroup %s: %s (%d/%d)", h.label, segment.segment, len(results), len(pending))

    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures_map = {executor.submit(task, h): h for h in pending}
        for future in concurrent.futures.as_completed(futures_map):
            h = futures_map[future]
            try:
                on_complete(h, future.result())
            except (TermBudgetExceeded, RefinementBudgetExceeded, UnsettledCut) as e:
                logger.debug("Subgroup %s is inconclusive: %s", h.label, e)
                inconclusive[h.label] = e
            except Exception as e:
                logger.warning("Subgroup %s failed: %s", h.label, e)
    if inconclusive:
        raise inconclusive[min(inconclusive)]
    return dict(sorted(results.items()))
