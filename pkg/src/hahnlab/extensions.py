"""
Artin-Schreier elements, generator combinations and the invariants built on them.

Covers series solutions of x^p - x = c, conjugate sets and the value set
S_theta, Krasner's constant, distance witnesses with their cuts, Okutsu
sequence verification, the Kaplansky-form obstruction battery, Hasse-Schmidt
derivatives and the tame multiset predictor.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from math import comb
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from hahnlab.coefficients import FFElem, as_roots_in_field
from hahnlab.cuts import (
    MINUS,
    Cut,
    cut_cmp,
    cut_contains_left,
    cut_from_witnesses,
    principal,
)
from hahnlab.exponents import (
    BasisContext,
    Exponent,
    Order,
    ValueLattice,
    exp_cmp,
    exp_max,
    lattice_contains,
)
from hahnlab.series import (
    DEFAULT_TERM_BUDGET,
    HahnSeries,
    Item,
    Term,
    Window,
    lazy_sum,
    monomial,
    pth_power,
    pth_root,
    series_mul,
    series_neg,
    series_scale,
    series_shift,
    series_sub,
    series_sum,
    series_val,
    support_count_below,
    zero_series,
)

logger = logging.getLogger(__name__)

NECESSARY_ONLY = 'necessary-conditions only'

Approximant = Tuple[HahnSeries, int]
Coefficient = Union[FFElem, HahnSeries]
Poly = Dict[int, Coefficient]


@dataclass(frozen=True)
class ASElement:
    """A root of x^p - x = rhs given by its series solution."""

    rhs: HahnSeries
    solution: HahnSeries
    label: Optional[str] = None


def _split_at_zero(a: HahnSeries, negative: bool) -> HahnSeries:
    """The part of ``a`` strictly below 0 (negative=True) or at and above 0."""
    zero = a.context.zero()

    def _factory() -> Iterator[Item]:
        for e, c in a.items():
            below = exp_cmp(e, zero) is Order.LT
            if negative and not below:
                return
            if negative or not below:
                yield e, c

    return HahnSeries(_factory, a.field, a.context)


def _frobenius_power(a: HahnSeries, times: int) -> HahnSeries:
    for _ in range(times):
        a = pth_power(a)
    return a


def _constant_root(c0: Optional[FFElem], rhs: HahnSeries) -> FFElem:
    if c0 is None:
        return rhs.field.zero()
    roots = as_roots_in_field(c0)
    if not roots:
        raise ValueError(
            f"x^p - x = {c0} has no root in F_{rhs.field.order}; enlarge the coefficient field"
        )
    # least root by coefficient vector, highest degree first
    return min(roots, key=lambda r: tuple(reversed(r.coeffs)))


def _nonnegative_solution(rhs: HahnSeries, budget: Optional[int]) -> HahnSeries:
    """Solution of AS(x) = c for the part of rhs at and above 0."""
    upper = _split_at_zero(rhs, negative=False)
    zero = rhs.context.zero()

    def _parts() -> Iterator[Tuple[Exponent, HahnSeries]]:
        c0 = None
        first = next(upper.terms(budget=budget), None)
        if first is not None and first[0] == zero:
            c0 = first[1]
        yield zero, monomial(_constant_root(c0, rhs), zero, rhs.field)
        positive = HahnSeries(
            lambda: ((e, c) for e, c in upper.items() if c is not None and e != zero),
            rhs.field,
            rhs.context,
        )
        v_pos = series_val(positive, budget)
        if v_pos is None:
            return
        k = 0
        while True:
            yield v_pos * (rhs.field.p ** k), series_neg(_frobenius_power(positive, k))
            k += 1

    return lazy_sum(_parts, rhs.field, rhs.context)


def as_solve(rhs: HahnSeries, label: Optional[str] = None, budget: Optional[int] = None) -> ASElement:
    """
    Solve x^p - x = rhs in the Hahn field.

    The polar part contributes sum_k rhs^(1/p^k), the constant term a root in
    the coefficient field and the positive part -sum_k rhs^(p^k). The solution
    is lazy: the constant and positive parts are only started once a bounded
    consumer reaches exponent 0.

    Raises:
        ValueError: If rhs is zero or has nonnegative valuation
    """
    v = series_val(rhs, budget)
    if v is None:
        raise ValueError("as_solve needs a nonzero right-hand side")
    if exp_cmp(v, rhs.context.zero()) is not Order.LT:
        raise ValueError(f"as_solve expects negative valuation, got v(rhs) = {v}")
    p = rhs.field.p
    polar = _split_at_zero(rhs, negative=True)

    def _polar_parts() -> Iterator[Tuple[Exponent, HahnSeries]]:
        k = 1
        while True:
            yield v / (p ** k), pth_root(polar, k)
            k += 1

    polar_solution = lazy_sum(_polar_parts, rhs.field, rhs.context)
    tail = _nonnegative_solution(rhs, budget)
    zero = rhs.context.zero()

    def _parts() -> Iterator[Tuple[Exponent, HahnSeries]]:
        yield v / p, polar_solution
        yield zero, tail

    solution = lazy_sum(_parts, rhs.field, rhs.context, label=label)
    logger.debug("AS solution %s for rhs of valuation %s", label or 'x', v)
    return ASElement(rhs, solution, label)


@dataclass(frozen=True)
class GeneratorCombo:
    """
    theta = offset + sum c_i * x_i over Artin-Schreier elements x_i.

    The coefficients c_i are finite series of the ground field; ``disjoint``
    declares the x_i linearly disjoint, which makes the conjugates exactly
    theta + sum F_p c_i.
    """

    parts: Tuple[Tuple[HahnSeries, ASElement], ...]
    disjoint: bool = True
    label: Optional[str] = None
    offset: Optional[HahnSeries] = None

    @property
    def degree(self) -> int:
        return self.parts[0][0].field.p ** len(self.parts) if self.parts else 1

    def value(self) -> HahnSeries:
        pieces = [series_mul(c, x.solution) for c, x in self.parts]
        if self.offset is not None:
            pieces.append(self.offset)
        return series_sum(pieces, label=self.label)


class Conjugate(NamedTuple):
    shift: Tuple[int, ...]
    series: HahnSeries


def _coefficient_combination(g: GeneratorCombo, shift: Sequence[int]) -> HahnSeries:
    pieces = [series_scale(c, e) for e, (c, _) in zip(shift, g.parts) if e]
    if not pieces:
        c = g.parts[0][0]
        return zero_series(c.field, c.context)
    return series_sum(pieces)


def _require_disjoint(g: GeneratorCombo) -> None:
    if not g.parts:
        raise ValueError("Generator combination has no Artin-Schreier parts")
    if not g.disjoint:
        raise ValueError("Conjugates are only known for linearly disjoint parts; declare disjointness")


def conjugate_set(g: GeneratorCombo) -> List[Conjugate]:
    """
    All conjugates theta + sum e_i c_i, (e_i) in F_p^n, in lexicographic order.

    Raises:
        ValueError: If disjointness is not declared
    """
    _require_disjoint(g)
    p = g.parts[0][0].field.p
    theta = g.value()
    conjugates = []
    for shift in product(range(p), repeat=len(g.parts)):
        if any(shift):
            member = series_sum([theta, _coefficient_combination(g, shift)])
        else:
            member = theta
        conjugates.append(Conjugate(shift, member))
    return conjugates


class STheta(NamedTuple):
    values: List[Exponent]
    multiset: Counter


def s_theta(g: GeneratorCombo, budget: Optional[int] = None) -> STheta:
    """
    Values v(theta' - theta) over conjugates theta' != theta.

    Returns:
        The distinct values in increasing order and the multiset of all
        p^n - 1 values

    Raises:
        ValueError: If a nonzero combination vanishes (theta is no generator)
    """
    _require_disjoint(g)
    p = g.parts[0][0].field.p
    multiset: Counter = Counter()
    for shift in product(range(p), repeat=len(g.parts)):
        if not any(shift):
            continue
        v = series_val(_coefficient_combination(g, shift), budget)
        if v is None:
            raise ValueError(f"Combination {shift} vanishes, so theta does not generate")
        multiset[v] += 1
    values = sorted(multiset)
    return STheta(values, multiset)


def krasner_omega(g: GeneratorCombo, budget: Optional[int] = None) -> Exponent:
    """Krasner's constant: the maximum of S_theta."""
    if not g.parts:
        raise ValueError("Krasner's constant is undefined for an element of degree 1")
    return exp_max(s_theta(g, budget).values)


def ge_witness_check(p: int, coeffs: Sequence[Coefficient], budget: Optional[int] = None) -> bool:
    """True iff every nonzero F_p-combination of ``coeffs`` has valuation 0."""
    for tup in product(range(p), repeat=len(coeffs)):
        if not any(tup):
            continue
        if all(isinstance(c, FFElem) for c in coeffs):
            total = sum((c * a for a, c in zip(tup, coeffs)), coeffs[0].field.zero())
            if total.is_zero():
                return False
            continue
        pieces = [series_scale(c, a) for a, c in zip(tup, coeffs) if a]
        v = series_val(series_sum(pieces), budget)
        if v is None or not v.is_zero():
            return False
    return True


@dataclass(frozen=True)
class DistanceWitnesses:
    approximants: Tuple[Approximant, ...]
    values: Tuple[Exponent, ...]
    attained: bool
    cut: Cut
    outside_lattice: Tuple[bool, ...] = ()


def distance(theta: HahnSeries, a: HahnSeries, window: Optional[Window] = None,
             budget: Optional[int] = None) -> Exponent:
    """
    v(theta - a), located inside the window.

    Raises:
        ValueError: If theta - a has no term below the window bound
    """
    bound = window.bound if window is not None else None
    for e, _ in series_sub(theta, a).terms(bound, budget):
        return e
    if bound is None:
        raise ValueError("The approximant equals theta; distance is infinite")
    raise ValueError(f"Window too small: no term of theta - approximant below {bound}")


def distance_witnesses_eval(
    theta: HahnSeries,
    approximants: Sequence[Approximant],
    window: Optional[Window] = None,
    lattices: Optional[Sequence[ValueLattice]] = None,
    limit_hint: Optional[Exponent] = None,
    attained: bool = False,
    mark_base: int = 2,
    depth: int = 1,
    budget: Optional[int] = None,
) -> DistanceWitnesses:
    """
    Evaluate v(theta - a) over an approximant family and the induced cut.

    Args:
        theta: The element approximated
        approximants: (series, declared degree) pairs in increasing quality
        window: Bound below which every distance must be found
        lattices: Optional value groups G_l; witness l must lie outside G_l,
            which is the non-attainment argument for ground fields built
            as increasing unions
        limit_hint: Candidate supremum of the family
        attained: The last approximant realizes the maximum
        mark_base: Base of the closeness marks
        depth: Number of closeness marks
        budget: Term budget per materialization
    """
    values = tuple(distance(theta, a, window, budget) for a, _ in approximants)
    cut = cut_from_witnesses(values, limit_hint, attained, mark_base, depth)
    outside: Tuple[bool, ...] = ()
    if lattices is not None:
        if len(lattices) != len(values):
            raise ValueError(f"Expected {len(values)} lattices, got {len(lattices)}")
        outside = tuple(not lattice_contains(g, v) for g, v in zip(lattices, values))
    return DistanceWitnesses(tuple(approximants), values, attained, cut, outside)


def classify_dependence(cut: Cut) -> str:
    """
    Classify an Artin-Schreier element by its cut d_1.

    Returns:
        ``independent`` for 0^-, ``dependent`` for a cut strictly below 0^-,
        ``undetermined`` when the evidence does not decide
    """
    origin = principal(_cut_context(cut).zero(), MINUS)
    order = cut_cmp(cut, origin)
    if order is Order.EQ:
        return 'independent'
    if order is Order.LT:
        return 'dependent'
    return 'undetermined'


def _cut_context(cut: Cut) -> BasisContext:
    if cut.gamma is not None:
        return cut.gamma.context
    if cut.witnesses:
        return cut.witnesses[0].context
    raise ValueError(f"Improper cut {cut} carries no basis context")


@dataclass(frozen=True)
class OkutsuLevel:
    """One set A_l: approximants of a common degree and how their values behave."""

    approximants: Tuple[Approximant, ...]
    attained: bool = False
    limit_hint: Optional[Exponent] = None
    mark_base: int = 2
    mark_depth: int = 1


@dataclass(frozen=True)
class OkutsuCandidate:
    """Levels A_0..A_{r-1}; the final level {theta} of degree ``degree`` is implicit."""

    levels: Tuple[OkutsuLevel, ...]
    degree: int


class ConditionResult(NamedTuple):
    name: str
    ok: bool
    detail: str


@dataclass
class OkutsuReport:
    depth: int
    kinds: List[str]
    cuts: List[Cut]
    values: List[List[Exponent]]
    conditions: List[ConditionResult] = field(default_factory=list)
    undecided: List[str] = field(default_factory=list)
    note: str = NECESSARY_ONLY

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.conditions)

    @property
    def violations(self) -> List[ConditionResult]:
        return [c for c in self.conditions if not c.ok]


def _degree_chain(cand: OkutsuCandidate) -> ConditionResult:
    degrees = []
    for i, level in enumerate(cand.levels):
        if not level.approximants:
            return ConditionResult('degree-chain', False, f"level {i} is empty")
        level_degrees = {d for _, d in level.approximants}
        if len(level_degrees) != 1:
            return ConditionResult('degree-chain', False, f"level {i} mixes degrees {sorted(level_degrees)}")
        degrees.append(level_degrees.pop())
    chain = degrees + [cand.degree]
    ok = bool(degrees) and chain[0] == 1 and all(a < b for a, b in zip(chain, chain[1:]))
    return ConditionResult('degree-chain', ok, ' < '.join(str(m) for m in chain))


def okutsu_verify(
    cand: OkutsuCandidate,
    theta: HahnSeries,
    challenge: Sequence[Approximant] = (),
    window: Optional[Window] = None,
    budget: Optional[int] = None,
) -> OkutsuReport:
    """
    Check the Okutsu conditions for a candidate sequence of approximants.

    Degree chain, single approximant at ordinary levels, strictly increasing
    values at limit levels and the level separation are checked on the
    sampled approximants; the closeness condition is checked against the
    finite challenge set only. Violations are reported, not raised.
    """
    chain = _degree_chain(cand)
    report = OkutsuReport(depth=len(cand.levels), kinds=[], cuts=[], values=[])
    report.conditions.append(chain)
    if not chain.ok:
        return report
    degrees = [level.approximants[0][1] for level in cand.levels if level.approximants] + [cand.degree]

    for i, level in enumerate(cand.levels):
        vals = [distance(theta, a, window, budget) for a, _ in level.approximants]
        report.values.append(vals)
        report.kinds.append('ordinary' if level.attained else 'limit')
        if level.attained:
            ok = len(level.approximants) == 1
            report.conditions.append(ConditionResult(
                f"OS1[{i}]", ok, f"{len(level.approximants)} approximant(s) at an attained level"))
        else:
            ok = all(exp_cmp(x, y) is Order.LT for x, y in zip(vals, vals[1:]))
            report.conditions.append(ConditionResult(
                f"OS2[{i}]", ok, 'values ' + ', '.join(str(v) for v in vals)))
        try:
            cut = cut_from_witnesses(
                vals, level.limit_hint, level.attained, level.mark_base, level.mark_depth)
        except ValueError:
            cut = cut_from_witnesses(vals[-1:], attained=True)
        report.cuts.append(cut)

    for i in range(len(cand.levels) - 1):
        lower, upper = report.values[i], report.values[i + 1]
        ok = exp_cmp(exp_max(lower), min(upper)) is Order.LT
        beyond = [v for v in upper if cut_contains_left(report.cuts[i], v) is True]
        report.conditions.append(ConditionResult(
            f"OS3[{i}]", ok and not beyond,
            f"max A_{i} = {exp_max(lower)}, min A_{i + 1} = {min(upper)}"))

    for j, (b, deg) in enumerate(challenge):
        try:
            val = distance(theta, b, window, budget)
        except ValueError as e:
            report.conditions.append(ConditionResult(f"OS0[challenge {j}]", False, str(e)))
            continue
        for i in range(len(cand.levels)):
            if deg >= degrees[i + 1]:
                continue
            if any(exp_cmp(val, v) is not Order.GT for v in report.values[i]):
                continue
            inside = cut_contains_left(report.cuts[i], val)
            if inside is None:
                report.undecided.append(f"challenge {j} at level {i}: value {val}")
            elif not inside:
                report.conditions.append(ConditionResult(
                    f"OS0[challenge {j}]", False,
                    f"v(theta - b) = {val} exceeds level {i} cut {report.cuts[i]}"))
    if challenge and not any(c.name.startswith('OS0') for c in report.conditions):
        report.conditions.append(ConditionResult('OS0', True, f"{len(challenge)} challenge element(s)"))
    logger.debug("Okutsu candidate of depth %d: %d violation(s)", report.depth, len(report.violations))
    return report


class ObstructionCheck(NamedTuple):
    name: str
    ok: bool
    detail: str


def kaplansky_obstructions(
    epsilon: HahnSeries,
    residue_bound: Exponent,
    coefficients: Sequence[FFElem] = (),
    budget: int = DEFAULT_TERM_BUDGET,
    bounds: int = 3,
) -> Tuple[List[ObstructionCheck], List[Term]]:
    """
    Finite evidence that ``epsilon`` is no root of x^p - c or x^p - c x - d over
    a ground field without finite limits.

    Args:
        epsilon: Candidate approximant, with infinitely many terms below 0
        residue_bound: Window bound for the residue of AS(epsilon)
        coefficients: Leading coefficients c_1 != 0, 1 to rule out
        budget: Item budget defining "infinite support"
        bounds: The leading exponent q_1 is sampled at q = -1/p^k and
            q = 1/p^k for k = 1..bounds

    Returns:
        The obstruction checks and the terms of AS(epsilon) below the bound

    Raises:
        ValueError: If bounds is not positive or a coefficient is 0 or 1
    """
    if bounds < 1:
        raise ValueError(f"Need at least one sampled bound, got {bounds}")
    ctx = epsilon.context
    zero = ctx.zero()
    p = epsilon.field.p
    powered = pth_power(epsilon)
    checks = []

    pure = support_count_below(powered, zero, budget)
    checks.append(ObstructionCheck(
        'pure-power', pure.overflow, f"trn_0(epsilon^p) overflow={pure.overflow}"))

    samples = [ctx.rational(1) / p ** k for k in range(1, bounds + 1)]

    ok, details = True, []
    for q in (-s for s in samples):
        shifted = support_count_below(series_shift(epsilon, q), q, budget)
        power_below = support_count_below(powered, q, budget)
        ok = ok and shifted.overflow and not power_below.overflow
        details.append(f"q = {q}: trn_q(t^q epsilon) overflow={shifted.overflow}, "
                       f"trn_q(epsilon^p) has {power_below.count} term(s)")
    checks.append(ObstructionCheck('q1-negative', ok, '; '.join(details)))

    ok, details = pure.overflow, []
    for q in samples:
        shifted = support_count_below(series_shift(epsilon, q), zero, budget)
        ok = ok and not shifted.overflow
        details.append(f"q = {q}: trn_0(t^q epsilon) has {shifted.count} term(s)")
    checks.append(ObstructionCheck('q1-positive', ok, '; '.join(details)))

    for c in coefficients:
        if c.is_zero() or c.is_one():
            raise ValueError(f"Leading coefficient {c} is not an obstruction candidate")
        diff = support_count_below(series_sub(powered, series_scale(epsilon, c)), zero, budget)
        checks.append(ObstructionCheck(
            f"c1={c}", diff.overflow, f"trn_0(epsilon^p - c epsilon) overflow={diff.overflow}"))

    residue = list(series_sub(powered, epsilon).terms(residue_bound, budget))
    return checks, residue


def tame_multiset_predict(n: int, degrees: Sequence[int], deltas: Sequence[Exponent]) -> Counter:
    """
    Multiset {delta_i with multiplicity n/m_i - n/m_{i+1}} of cardinality n - 1.

    Raises:
        ValueError: If the degree chain does not run 1 = m_0 | m_1 | ... | m_r = n
    """
    if not degrees or degrees[0] != 1 or degrees[-1] != n:
        raise ValueError(f"Degree chain must start at 1 and end at {n}, got {list(degrees)}")
    for a, b in zip(degrees, degrees[1:]):
        if a >= b or b % a:
            raise ValueError(f"Degree chain is not strictly dividing at {a} -> {b}")
    if len(deltas) != len(degrees) - 1:
        raise ValueError(f"Expected {len(degrees) - 1} deltas, got {len(deltas)}")
    multiset: Counter = Counter()
    for i, delta in enumerate(deltas):
        multiset[delta] += n // degrees[i] - n // degrees[i + 1]
    return multiset


def _scale_coefficient(c: Coefficient, k: int) -> Optional[Coefficient]:
    if isinstance(c, FFElem):
        scaled = c * k
        return None if scaled.is_zero() else scaled
    return series_scale(c, k)


def _characteristic(f: Poly) -> int:
    c = next(iter(f.values()))
    return c.field.p


def hasse_schmidt(f: Poly, s: int) -> Poly:
    """
    The s-th Hasse-Schmidt derivative: d_s x^n = binom(n, s) x^(n-s) mod p.

    Polynomials are dicts from degree to coefficient (field elements or
    series); zero coefficients are dropped.
    """
    if s < 0:
        raise ValueError(f"Derivative order must be nonnegative, got {s}")
    if not f:
        return {}
    p = _characteristic(f)
    out: Poly = {}
    for n, c in f.items():
        if n < s:
            continue
        k = comb(n, s) % p
        if k == 0:
            continue
        scaled = _scale_coefficient(c, k)
        if scaled is not None:
            out[n - s] = scaled
    return out


def taylor_expand(f: Poly) -> List[Poly]:
    """[d_0 f, d_1 f, ..., d_deg f]."""
    if not f:
        return []
    return [hasse_schmidt(f, s) for s in range(max(f) + 1)]


def poly_eval(f: Poly, x: FFElem) -> FFElem:
    """Horner evaluation of a polynomial with field coefficients."""
    result = x.field.zero()
    if not f:
        return result
    for n in range(max(f), -1, -1):
        result = result * x
        if n in f:
            result = result + f[n]
    return result
