"""
The Artin-Schreier tower K(alpha) < K(theta) < K(theta, eta) with a Heisenberg
Galois group.

Over a ground field containing the algebraic closure of F_p, alpha, theta and
eta solve AS(alpha) = t^-1, AS(theta) = alpha and AS(eta) = alpha^2. The
automorphisms sigma, tau, iota act on (alpha, theta, eta) by explicit affine
maps; omega = eta - alpha(theta + gamma) with gamma = theta - c*alpha is a
derived symbol. Every ramification ideal of N = K(theta, eta) is the maximal
ideal, and so is every ideal of M_0 = K(theta).
"""

import logging
import re
from functools import cached_property, lru_cache
from itertools import product
from typing import Dict, Iterator, List, Sequence, Tuple

from hahnlab.coefficients import FFElem, FieldSpec, as_roots_in_field
from hahnlab.cuts import principal
from hahnlab.exponents import BasisContext, Exponent
from hahnlab.extensions import ASElement, as_solve, distance_witnesses_eval
from hahnlab.parser import Recipe
from hahnlab.ramification import (
    WITNESSED,
    ElementaryAbelian,
    Element,
    Evidence,
    FieldExpr,
    GaloisGroupModel,
    Heisenberg,
    RamSegment,
    Subgroup,
    action_consistency,
    as_compatibility,
    derived_consistency,
    i_sigma_witnesses,
    ram_set_and_compare,
    segment_from_witnesses,
    subgroup_battery,
    subgroup_enumerate,
)
from hahnlab.runner import DERIVED, TRIVIAL, Check, RunConfig, Scenario
from hahnlab.scenarios.common import (
    as_solve_failures,
    count_summary,
    require_prime,
    settled,
    window_bounds,
)
from hahnlab.series import (
    HahnSeries,
    Window,
    as_operator,
    lazy_sum,
    monomial,
    pth_root,
    series_equal_below,
    series_mul,
    series_scale,
    series_shift,
    series_sub,
    truncate,
)

logger = logging.getLogger(__name__)

SCENARIO_ID = 'asd-6-3'
SUPPORTED_PRIMES = (3, 5)

# Declared depth of M_0/K in characteristic 2
M0_CHAR_2_DEPTH = 2

Test = Tuple[str, FieldExpr]

# Lemma identities as (left word, right word); (iv) in its consistent form
LEMMA_IDENTITIES = {
    'i': [('iota*sigma', 'sigma*iota'), ('iota*tau', 'tau*iota')],
    'ii': [('sigma*tau*sigma^-1', 'iota^-2*tau')],
    'iii': [('sigma*tau*sigma^-1*tau^-1', 'iota^-2'), ('tau*sigma^-1*tau^-1', 'iota^-2*sigma^-1')],
    'iv': [('tau^-1*sigma*tau*sigma^-1', 'iota^-2'), ('tau^-1*sigma*tau', 'iota^-2*sigma')],
    'v': [('sigma*tau', 'iota^-2*tau*sigma')],
}
LEMMA_IV_AS_STATED = ('tau^-1*sigma*tau', 'iota^-1*sigma')

_FACTOR = re.compile(r'\s*([A-Za-z]\w*)\s*(?:\^\s*(-?\d+))?\s*')


def as_constant(field: FieldSpec) -> FFElem:
    """
    The least c (by coefficient vector) with c^p - c = 1.

    Raises:
        ValueError: If the field has no such element
    """
    roots = as_roots_in_field(field.one())
    if not roots:
        raise ValueError(f"x^p - x = 1 has no root in {field!r}")
    return min(roots, key=lambda c: c.coeffs)


def theta_tail_exponent(p: int, n: int) -> int:
    """Least N >= n+1 such that t^(-1/p^N) occurs in theta, whose coefficient is N - 1."""
    big_n = n + 1
    while (big_n - 1) % p == 0:
        big_n += 1
    return big_n


def word_action(model: GaloisGroupModel, word: str, expr: FieldExpr) -> FieldExpr:
    """Apply a group word factor by factor, rightmost first, without normal forms."""
    for factor in reversed(word.split('*')):
        match = _FACTOR.fullmatch(factor)
        if not match:
            raise ValueError(f"Malformed group word factor '{factor}'")
        expr = model.apply_generator(match.group(1), expr, int(match.group(2) or 1))
    return expr


class ArtinSchreierTower:
    """
    alpha and theta over F_(p^p), which contains a root c of x^p - x = 1.

    Args:
        p: Characteristic
        config: Run configuration
    """

    def __init__(self, p: int, config: RunConfig):
        self.p = p
        self.config = config
        self.levels = config.levels
        self.term_budget = config.term_budget
        self.workers = config.workers
        self.field = FieldSpec(p, p)
        self.ctx = BasisContext(p, budget=config.budget)
        self.window = Window(self.ctx.rational(1))
        self.kappa = as_constant(self.field)
        self.x = {s: FieldExpr.symbol(s, self.field, self.ctx) for s in ('alpha', 'theta', 'eta', 'gamma')}

    def t(self, e: Exponent, c=1) -> HahnSeries:
        return monomial(c, e, self.field)

    def inv_power(self, k: int) -> Exponent:
        """1/p^k."""
        return self.ctx.rational(1) / self.p ** k

    def level_range(self) -> range:
        return range(1, self.levels + 1)

    @cached_property
    def alpha(self) -> ASElement:
        return as_solve(self.t(self.ctx.rational(-1)), label='alpha')

    @cached_property
    def theta(self) -> ASElement:
        return as_solve(self.alpha.solution, label='theta')

    @cached_property
    def gamma(self) -> HahnSeries:
        return series_sub(self.theta.solution, series_scale(self.alpha.solution, self.kappa))

    @property
    def env(self) -> Dict[str, HahnSeries]:
        return {'alpha': self.alpha.solution, 'theta': self.theta.solution, 'gamma': self.gamma}

    def truncation_tests(self, name: str, series: HahnSeries, shift: int) -> List[Test]:
        """x - trn(x, -1/p^(n+shift)) for n = 1..levels."""
        tests = []
        for n in self.level_range():
            head = truncate(series, -self.inv_power(n + shift), self.term_budget)
            tests.append((f"{name} - trn({name}, -1/p^{n + shift})", self.x[name] - FieldExpr.from_series(head)))
        return tests

    def theta_tests(self) -> List[Test]:
        return self.truncation_tests('theta', self.theta.solution, 1)

    def expected_theta_values(self) -> List[Exponent]:
        return [self.inv_power(theta_tail_exponent(self.p, n)) for n in self.level_range()]

    def theta_values(self) -> List[Exponent]:
        model = self.m0_model()
        return i_sigma_witnesses(
            model, model.generator('sigma'), self.theta_tests(), self.env, self.window, self.term_budget)

    def moves_theta(self, model: GaloisGroupModel, g: Element) -> bool:
        return not (model.act(g, self.x['theta']) - self.x['theta']).is_zero()

    def witnessed(self, model: GaloisGroupModel, g: Element, tests: Sequence[Test]) -> RamSegment:
        """AboveOpen(0) from v(g b - b) - v(b) coming arbitrarily close to 0."""
        values = i_sigma_witnesses(model, g, tests, self.env, self.window, self.term_budget)
        label = model.format_element(g)
        evidence = [Evidence(label, descriptor, v) for (descriptor, _), v in zip(tests, values)]
        segment = segment_from_witnesses(values, self.ctx.zero(), settle=True)
        return RamSegment(segment, evidence, WITNESSED, f"witnesses from {label}")

    def m0_model(self) -> ElementaryAbelian:
        """Gal(K(theta)/K) = <sigma, tau>."""
        x = self.x
        return ElementaryAbelian(2, self.p, names=('sigma', 'tau'), action={
            'sigma': {'alpha': x['alpha'] + 1, 'theta': x['theta'] + self.kappa},
            'tau': {'theta': x['theta'] + 1},
        })

    def m0_summary(self, depth=None):
        model = self.m0_model()
        subgroups = subgroup_enumerate(model)
        tests = self.theta_tests()

        def task(h: Subgroup) -> RamSegment:
            return self.witnessed(model, h.generators[0], tests)

        segments = subgroup_battery(subgroups, task, self.workers)
        return ram_summary(subgroups, segments, depth)


def ram_summary(subgroups: List[Subgroup], segments: Dict[str, RamSegment], depth=None):
    result = ram_set_and_compare(subgroups, segments, depth)
    summary = {k: v for k, v in result.as_dict().items() if v is not None}
    summary['subgroups'] = len(subgroups)
    if depth is not None:
        summary['summary'] = count_summary(result.count, depth, result.exact)
    return summary


class HeisenbergTower(ArtinSchreierTower):
    """The full tower N = K(theta, eta) with its Heisenberg group."""

    @cached_property
    def beta(self) -> HahnSeries:
        """beta = t^(-2/p) + 2 t^(-1/p) alpha^(1/p) = 2 t^(-1/p) alpha - t^(-2/p)."""
        two_alpha = series_scale(self.alpha.solution, 2)
        return series_sub(series_shift(two_alpha, -self.inv_power(1)), self.t(self.inv_power(1) * -2))

    @lru_cache(maxsize=None)
    def eta_tail(self, n: int) -> HahnSeries:
        """sum over k >= n of k beta^(1/p^k); eta itself for n = 1."""
        if n < 1:
            raise ValueError(f"eta_tail(n) is defined for n >= 1, got {n}")

        def _parts() -> Iterator[Tuple[Exponent, HahnSeries]]:
            k = n
            while True:
                yield self.inv_power(k + 1) * -2, series_scale(pth_root(self.beta, k), k)
                k += 1

        return lazy_sum(_parts, self.field, self.ctx, label='eta' if n == 1 else f"eta_tail({n})")

    @property
    def eta(self) -> HahnSeries:
        return self.eta_tail(1)

    @property
    def env(self) -> Dict[str, HahnSeries]:
        env = super().env
        env['eta'] = self.eta
        return env

    def recipes(self) -> Dict[str, Recipe]:
        return {
            'alpha': Recipe(lambda: self.alpha.solution),
            'theta': Recipe(lambda: self.theta.solution),
            'eta': Recipe(lambda: self.eta),
            'gamma': Recipe(lambda: self.gamma),
            'beta': Recipe(lambda: self.beta),
            'eta_tail': Recipe(self.eta_tail, indexed=True),
        }

    def root_form(self, k: int) -> FieldExpr:
        """beta^(1/p^k) linear in alpha, via alpha^(1/p^k) = alpha - sum_(j<=k) t^(-1/p^j)."""
        ctx, field = self.ctx, self.field
        head = FieldExpr({}, field, ctx)
        for j in range(1, k + 1):
            head = head + FieldExpr.constant(1, field, ctx, e=-self.inv_power(j))
        scale = FieldExpr.constant(2, field, ctx, e=-self.inv_power(k + 1))
        return scale * (self.x['alpha'] - head) - FieldExpr.constant(1, field, ctx, e=self.inv_power(k + 1) * -2)

    def beta_partial(self, n: int) -> FieldExpr:
        """beta_n = sum over k < n of k beta^(1/p^k)."""
        total = FieldExpr({}, self.field, self.ctx)
        for k in range(1, n):
            total = total + self.root_form(k) * k
        return total

    def iota_tests(self) -> List[Test]:
        """b = eta - beta_n, evaluated through its closed form sum_(k>=n) k beta^(1/p^k)."""
        return [(f"eta - beta_{n}", (self.x['eta'] - self.beta_partial(n)).with_closed_form(self.eta_tail(n)))
                for n in self.level_range()]

    def expected_iota_values(self) -> List[Exponent]:
        return [self.inv_power(n + 1 if n % self.p else n + 2) * 2 for n in self.level_range()]

    def model(self) -> Heisenberg:
        x = self.x
        return Heisenberg(
            self.p,
            action={
                'sigma': {
                    'alpha': x['alpha'] + 1,
                    'theta': x['theta'] + self.kappa,
                    'eta': x['eta'] + x['theta'] * 2 + self.kappa,
                },
                'tau': {'theta': x['theta'] + 1},
                'iota': {'eta': x['eta'] + 1},
            },
            derived={'omega': x['eta'] - x['alpha'] * x['theta'] * 2 + x['alpha'] ** 2 * self.kappa},
        )

    @cached_property
    def heisenberg(self) -> Heisenberg:
        return self.model()

    @cached_property
    def subgroups(self) -> List[Subgroup]:
        return subgroup_enumerate(self.heisenberg)

    def battery_elements(self) -> List[Element]:
        """Elements with coordinates in {0, 1, -1}; the whole group for p = 3."""
        coords = sorted({0, 1, self.p - 1})
        return list(product(coords, repeat=3))

    def group_law(self):
        model = self.heisenberg
        e = model.identity()
        elements = model.group_elements()
        sample = self.battery_elements()
        return {
            'order': len(elements),
            'associative': all(
                model.group_mul(model.group_mul(a, b), c) == model.group_mul(a, model.group_mul(b, c))
                for a in sample for b in sample for c in sample),
            'identity': all(model.group_mul(g, e) == g == model.group_mul(e, g) for g in elements),
            'inverse': all(model.group_mul(g, model.inverse(g)) == e for g in elements),
        }

    def identity_holds(self, left: str, right: str) -> bool:
        """The identity in normal form and, independently, on the action of every symbol."""
        model = self.heisenberg
        if model.parse_word(left) != model.parse_word(right):
            return False
        return all(word_action(model, left, x) == word_action(model, right, x)
                   for s, x in self.x.items() if s in model.symbols)

    def lemma(self) -> Dict[str, bool]:
        return {
            name: all(self.identity_holds(left, right) for left, right in pairs)
            for name, pairs in LEMMA_IDENTITIES.items()
        }

    def consistency_failures(self) -> List[str]:
        model, x = self.heisenberg, self.x
        omega = FieldExpr.symbol('omega', self.field, self.ctx)
        relations = {
            'alpha': FieldExpr.constant(1, self.field, self.ctx, e=self.ctx.rational(-1)),
            'theta': x['alpha'],
            'eta': x['alpha'] ** 2,
        }
        images = {
            ('sigma', 'omega'): omega,
            ('tau', 'omega'): omega - x['alpha'] * 2,
            ('iota', 'omega'): omega + 1,
        }
        failures = [f"{g} on {sym}" for g, sym, _ in action_consistency(model)]
        failures += [f"AS relation of {sym} under {name}"
                     for name, sym, ok in as_compatibility(model, relations) if not ok]
        failures += [f"{name}({sym})" for name, sym, ok in derived_consistency(model, images) if not ok]
        return failures

    def faithful_count(self) -> int:
        """Number of distinct actions on (alpha, theta, eta)."""
        model = self.heisenberg
        symbols = [self.x[s] for s in ('alpha', 'theta', 'eta')]
        return len({tuple(str(model.act(g, s)) for s in symbols) for g in model.group_elements()})

    def subgroup_counts(self) -> Dict[str, int]:
        counts = {'total': len(self.subgroups)}
        for label, order in (('order p', self.p), ('order p^2', self.p ** 2)):
            counts[label] = sum(1 for h in self.subgroups if h.order == order)
        return counts

    def as_solve_soundness(self) -> List[str]:
        depths = (1, 2, self.levels + self.config.window_extra)
        cases = [
            ('alpha', self.alpha, window_bounds(self.ctx.rational(-1), self.p, depths)),
            ('theta', self.theta, window_bounds(-self.inv_power(1), self.p, depths)),
        ]
        return as_solve_failures(cases, self.term_budget)

    def eta_bounds(self) -> List[Exponent]:
        """Bounds -1/p - 1/p^m; alpha^2 accumulates at -1/p from below."""
        return [-self.inv_power(1) - self.inv_power(m) for m in (3, 3 + self.config.window_extra)]

    def eta_relation_failures(self) -> List[str]:
        failures = []
        for bound in self.eta_bounds():
            window = Window(bound)
            image = as_operator(self.eta, window, self.term_budget)
            square = series_mul(self.alpha.solution, self.alpha.solution, window, self.term_budget)
            if not series_equal_below(image, square, bound, self.term_budget):
                failures.append(f"AS(eta) differs from alpha^2 below {bound}")
        return failures

    def witness_forms(self) -> Dict[str, object]:
        """The linear forms of beta^(1/p^k) and the tails eta - beta_n agree with their series."""
        env = self.env
        roots = []
        for k in (1, 2, 3):
            bound = -self.inv_power(k + 1) - self.inv_power(k + 4)
            form = self.root_form(k).evaluate(env, budget=self.term_budget)
            roots.append(series_equal_below(form, pth_root(self.beta, k), bound, self.term_budget))
        bound = -self.inv_power(2) - self.inv_power(5)
        tails = []
        for n in (2, 3):
            plain = (self.x['eta'] - self.beta_partial(n)).evaluate(env, budget=self.term_budget)
            tails.append(series_equal_below(plain, self.eta_tail(n), bound, self.term_budget))
        return {'root forms': roots, 'tails': tails}

    def eta_distances(self):
        """trn(eta, -1/p^2 - 1/p^(k+2)) approaches eta up to values tending to -1/p^2."""
        approximants = [(truncate(self.eta, -self.inv_power(2) - self.inv_power(k + 2), self.term_budget), 1)
                        for k in self.level_range()]
        found = settled(distance_witnesses_eval(
            self.eta, approximants, self.window, limit_hint=-self.inv_power(2), budget=self.term_budget))
        return {'values': list(found.values), 'cut': found.cut}

    def iota_values(self) -> List[Exponent]:
        model = self.heisenberg
        return i_sigma_witnesses(
            model, model.generator('iota'), self.iota_tests(), self.env, self.window, self.term_budget)

    def iota_ideal(self):
        model = self.heisenberg
        ram = self.witnessed(model, model.generator('iota'), self.iota_tests())
        return {'segment': ram.segment, 'sound': ram.sound}

    def degree_p_ideals(self):
        """L = K(alpha) with sigma(alpha) = alpha + 1; L' = K(gamma) with tau(gamma) = gamma + 1."""
        x = self.x
        l_model = ElementaryAbelian(1, self.p, names=('sigma',), action={'sigma': {'alpha': x['alpha'] + 1}})
        l_prime = ElementaryAbelian(1, self.p, names=('tau',), action={'tau': {'gamma': x['gamma'] + 1}})
        found = {}
        for name, model, series in (('L', l_model, self.alpha.solution), ("L'", l_prime, self.gamma)):
            symbol = next(iter(model.symbols))
            tests = self.truncation_tests(symbol, series, 0)
            ram = self.witnessed(model, model.generator(model.generator_names[0]), tests)
            found[name] = {'segment': ram.segment, 'values': [ev.value for ev in ram.evidence]}
        return found

    @lru_cache(maxsize=None)
    def segments(self) -> Dict[str, RamSegment]:
        """Each subgroup through an element moving theta, or through iota for the center."""
        model = self.heisenberg
        theta_tests, iota_tests = self.theta_tests(), self.iota_tests()

        def task(h: Subgroup) -> RamSegment:
            movers = [g for g in h.nonidentity() if self.moves_theta(model, g)]
            if movers:
                return self.witnessed(model, movers[0], theta_tests)
            return self.witnessed(model, h.nonidentity()[0], iota_tests)

        return subgroup_battery(self.subgroups, task, self.workers)

    def ram(self):
        return ram_summary(self.subgroups, self.segments())


def char_2_variant(config: RunConfig):
    """M_0/K over F_4: one ramification ideal against the declared depth 2."""
    tower = ArtinSchreierTower(2, config)
    return tower.m0_summary(depth=M0_CHAR_2_DEPTH)


def build_heisenberg_scenario(config: RunConfig) -> Scenario:
    """
    Build the Heisenberg tower scenario.

    Args:
        config: Run configuration; ``levels`` is the number of witnesses per
            subgroup

    Raises:
        ValueError: Unsupported prime
    """
    require_prime(SCENARIO_ID, config.prime, SUPPORTED_PRIMES)
    n = HeisenbergTower(config.prime, config)
    p, ctx = n.p, n.ctx
    zero_ram = {'AboveOpen(0)': True}

    checks = [
        Check(
            'as-constant',
            'the constant c of sigma(theta) = theta + c',
            '§6.3, "Take c ∈ F_p-bar ⊆ K such that c^p − c = 1"',
            {'AS(c)': '1', 'in prime field': False},
            lambda: {'AS(c)': n.kappa ** p - n.kappa, 'in prime field': n.kappa.in_prime_field()},
            provenance=TRIVIAL,
        ),
        Check(
            'as-solve-soundness',
            'AS(x) equals the right-hand side below three window bounds for alpha and theta',
            '§6.3, "AS(α) = t^{-1}, AS(θ) = α and AS(η) = α^2"',
            [],
            n.as_solve_soundness,
            provenance=TRIVIAL,
        ),
        Check(
            'eta-relation',
            'AS(eta) against alpha^2 below -1/p - 1/p^m',
            '§6.3, "AS(α) = t^{-1}, AS(θ) = α and AS(η) = α^2"',
            [],
            n.eta_relation_failures,
        ),
        Check(
            'witness-forms',
            'linear forms of beta^(1/p^k) in alpha and the tails eta - beta_n against their series',
            '§6.3, "β_n = β^{1/p} + … + (n − 1)β^{1/p^{n−1}} and b = η − β_n"',
            {'root forms': [True] * 3, 'tails': [True] * 2},
            n.witness_forms,
            provenance=DERIVED,
        ),
        Check(
            'group-law',
            'normal-form multiplication: associativity on the battery, identity and inverses on the group',
            '§6.3 Prop. (iv), "If p > 2, then Gal(N/K) ≃ (C_p × C_p) ⋊ C_p"',
            {'order': p ** 3, 'associative': True, 'identity': True, 'inverse': True},
            n.group_law,
        ),
        Check(
            'lemma-identities',
            'commutator identities in normal form and on the action table',
            '§6.3 Lemma, "ι commutes with σ and τ" and "(v) στ = ι^{-2}τσ"',
            {name: True for name in LEMMA_IDENTITIES},
            n.lemma,
        ),
        Check(
            'lemma-iv-as-stated',
            'tau^-1 sigma tau = iota^-1 sigma, as written, on the action table',
            '§6.3 Lemma (iv), "τ^{-1}στσ^{-1} = ι^{-2} ⟹ τ^{-1}στ = ι^{-1}σ"',
            False,
            lambda: n.identity_holds(*LEMMA_IV_AS_STATED),
            provenance=DERIVED,
        ),
        Check(
            'action-consistency',
            'homomorphism, AS relations and the images of omega',
            '§6.3 action table, "σ(ω) = ω, ι(ω) = ω + 1, τ(ω) = ω − 2α"',
            [],
            n.consistency_failures,
        ),
        Check(
            'action-faithful',
            'distinct automorphisms of (alpha, theta, eta)',
            '§6.3 Prop. (iv), "If p > 2, then Gal(N/K) ≃ (C_p × C_p) ⋊ C_p"',
            p ** 3,
            n.faithful_count,
            provenance=DERIVED,
        ),
        Check(
            'subgroups',
            'subgroups of the Heisenberg group',
            '§1, "Ram(E) := {I_H | H is a subgroup of Gal(L/K), H ≠ {id}}"',
            {'total': p * p + 2 * p + 4, 'order p': p * p + p + 1, 'order p^2': p + 1},
            n.subgroup_counts,
            provenance=DERIVED,
        ),
        Check(
            'eta-distance',
            'v(eta - trn(eta, -1/p^2 - 1/p^(k+2))) and the induced cut',
            '§6.3, "In particular, d_1(η) = (−1/p^2)^-"',
            {
                'values': [-n.inv_power(2) - n.inv_power(k + 2) for k in n.level_range()],
                'cut': principal(-n.inv_power(2)),
            },
            n.eta_distances,
        ),
        Check(
            'iota-witness-values',
            'v((iota b - b)/b) for b = eta - beta_n, n = 1..levels',
            '§6.3, "v((ιb − b)/b) = v(1/b) = 1/p^{n+1}"',
            n.expected_iota_values(),
            n.iota_values,
            provenance=DERIVED,
        ),
        Check(
            'iota-ideal',
            'ideal of <iota> from its witnesses',
            '§6.3 Prop., "The extension N/K admits only one ramification ideal and it is the maximal ideal"',
            {'segment': 'AboveOpen(0)', 'sound': True},
            n.iota_ideal,
        ),
        Check(
            'degree-p-ideals',
            "ideals of L = K(alpha) and L' = K(gamma) from truncations",
            '§6.3 Prop., "The extensions (L/K, v) and (L′/K, v) have only one ramification ideal and it is the maximal ideal"',
            {
                'L': {'segment': 'AboveOpen(0)', 'values': [n.inv_power(k) for k in n.level_range()]},
                "L'": {'segment': 'AboveOpen(0)', 'values': [n.inv_power(k) for k in n.level_range()]},
            },
            n.degree_p_ideals,
        ),
        Check(
            'theta-witness-values',
            'v((sigma b - b)/b) for b = theta - trn(theta, -1/p^(n+1))',
            '§6.3 eq. (equasigma), "v(c/(θ − a)) = −v(θ − a)"',
            n.expected_theta_values(),
            n.theta_values,
            provenance=DERIVED,
        ),
        Check(
            'm0-ram',
            'ideals of all nontrivial subgroups of <sigma, tau> from theta - trn(theta)',
            '§6.3 Prop., "The extension M_0/K admits only one ramification ideal and it is the maximal ideal"',
            {'ram': ['AboveOpen(0)'], 'count': 1, 'bound': 'exact', 'within_maximal_ideal': zero_ram,
             'subgroups': p + 3},
            n.m0_summary,
        ),
        Check(
            'ram',
            'ideals of all nontrivial subgroups of Gal(N/K)',
            '§6.3 Prop., "The extension N/K admits only one ramification ideal and it is the maximal ideal"',
            {'ram': ['AboveOpen(0)'], 'count': 1, 'bound': 'exact', 'within_maximal_ideal': zero_ram,
             'subgroups': p * p + 2 * p + 4},
            n.ram,
        ),
        Check(
            'm0-char-2',
            'M_0/K over F_4 in characteristic 2, depth declared',
            '§6.3 Remark (depn3famif1), "#Ram(E) = 1 < 2 = depth(E)"',
            {'ram': ['AboveOpen(0)'], 'count': 1, 'bound': 'exact', 'depth': M0_CHAR_2_DEPTH,
             'within_maximal_ideal': zero_ram, 'subgroups': 5, 'summary': '#Ram = 1 < 2 = depth'},
            lambda: char_2_variant(config),
        ),
    ]
    logger.debug("Built %s with p=%d, levels=%d", SCENARIO_ID, p, n.levels)
    return Scenario(
        id=SCENARIO_ID,
        title='Heisenberg tower with a single ramification ideal',
        prime=p,
        base_field=n.field,
        context=ctx,
        recipes=n.recipes(),
        checks=checks,
        notes=[
            f"c = {n.kappa} is the least root of x^p - x = 1 in {n.field.modulus_text()}",
            'ideals are established by witnesses; v(sigma b - b) > v(b) holds as all extensions are immediate',
            'in characteristic 2 the explicit action gives Gal(M_0/K) of exponent 2; depth 2 is declared',
        ],
    )
