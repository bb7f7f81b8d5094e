"""
A defect extension generated by an independent and a dependent Artin-Schreier element.

Ground field: the union of K_l with v(K_l) = (1/p^l)(Z + pi Z) over F_{p^2}.
alpha solves x^p - x = t^-pi (independent, d_1 = 0^-), beta solves
x^p - x = t^-(p+1) (dependent, d_1 = -1^-) and theta = alpha + u*beta
generates the compositum of degree p^2 with depth 2 but a single value in
S_theta.
"""

import logging
from functools import cached_property, lru_cache

from hahnlab.coefficients import FieldSpec
from hahnlab.exponents import BasisContext, ValueLattice
from hahnlab.extensions import (
    ASElement,
    DistanceWitnesses,
    GeneratorCombo,
    OkutsuCandidate,
    OkutsuLevel,
    as_solve,
    classify_dependence,
    conjugate_set,
    distance_witnesses_eval,
    ge_witness_check,
    krasner_omega,
    okutsu_verify,
    s_theta,
)
from hahnlab.parser import Recipe, SeriesParser
from hahnlab.runner import DERIVED, TRIVIAL, Check, RunConfig, Scenario
from hahnlab.scenarios.common import (
    as_solve_failures,
    count_summary,
    require_prime,
    settled,
    settled_cuts,
    window_bounds,
)
from hahnlab.scenarios.compositum import CompositumRamification
from hahnlab.series import (
    HahnSeries,
    Window,
    as_operator,
    monomial,
    series_add,
    series_equal_below,
    series_neg,
    series_scale,
    series_shift,
    series_sum,
)

logger = logging.getLogger(__name__)

SCENARIO_ID = 'example-5-1-1'
SUPPORTED_PRIMES = (2, 3, 5, 7)

# Depth of theta, established by the Okutsu evidence
THETA_DEPTH = 2


class DependentPair:
    """The elements of the construction, memoized per level."""

    def __init__(self, config: RunConfig):
        require_prime(SCENARIO_ID, config.prime, SUPPORTED_PRIMES)
        self.config = config
        self.p = config.prime
        self.levels = config.levels
        self.term_budget = config.term_budget
        self.field = FieldSpec(self.p, 2)
        self.ctx = BasisContext(self.p, budget=config.budget)
        self.u = self.field.gen()
        self.window = Window(self.ctx.rational(1))

    def t(self, e) -> HahnSeries:
        return monomial(1, e, self.field)

    @lru_cache(maxsize=None)
    def a(self, level: int) -> ASElement:
        """a_1 solves x^p - x = t^-1; a_{l+1} solves x^p - x = -a_l."""
        if level < 1:
            raise ValueError(f"a(l) is defined for l >= 1, got {level}")
        if level == 1:
            return as_solve(self.t(self.ctx.rational(-1)), label='a(1)')
        return as_solve(series_neg(self.a(level - 1).solution), label=f"a({level})")

    def b(self, level: int) -> HahnSeries:
        if level < 1:
            raise ValueError(f"b(l) is defined for l >= 1, got {level}")
        return self.t(self.ctx.pi(-1) / self.p ** level)

    @lru_cache(maxsize=None)
    def c(self, level: int) -> HahnSeries:
        if level < 1:
            raise ValueError(f"c(l) is defined for l >= 1, got {level}")
        return series_sum([self.a(j).solution for j in range(1, level + 1)], label=f"c({level})")

    @lru_cache(maxsize=None)
    def d(self, level: int) -> HahnSeries:
        if level < 1:
            raise ValueError(f"d(l) is defined for l >= 1, got {level}")
        return series_sum([self.b(j) for j in range(1, level + 1)], label=f"d({level})")

    @cached_property
    def alpha(self) -> ASElement:
        return as_solve(self.t(self.ctx.pi(-1)), label='alpha')

    @cached_property
    def beta(self) -> ASElement:
        return as_solve(self.t(self.ctx.rational(-(self.p + 1))), label='beta')

    @cached_property
    def theta(self) -> GeneratorCombo:
        zero = self.ctx.zero()
        parts = ((monomial(1, zero, self.field), self.alpha), (monomial(self.u, zero, self.field), self.beta))
        return GeneratorCombo(parts, disjoint=True, label='theta')

    def lattice(self, level: int) -> ValueLattice:
        q = self.p ** level
        return ValueLattice([self.ctx.rational(1) / q, self.ctx.pi(1) / q], label=f"vK_{level}")

    def recipes(self):
        return {
            'a': Recipe(lambda level: self.a(level).solution, indexed=True),
            'b': Recipe(self.b, indexed=True),
            'c': Recipe(self.c, indexed=True),
            'd': Recipe(self.d, indexed=True),
            'alpha': Recipe(lambda: self.alpha.solution),
            'beta': Recipe(lambda: self.beta.solution),
            'theta': Recipe(lambda: self.theta.value()),
        }

    @property
    def _mark_depth(self) -> int:
        return max(1, self.levels - 1)

    @lru_cache(maxsize=None)
    def beta_witnesses(self) -> DistanceWitnesses:
        approximants = [(series_shift(self.c(k), self.ctx.rational(-1)), 1) for k in self._range()]
        return settled(distance_witnesses_eval(
            self.beta.solution, approximants, self.window,
            lattices=[self.lattice(k) for k in self._range()],
            limit_hint=self.ctx.rational(-1), mark_base=self.p, depth=self._mark_depth,
            budget=self.term_budget))

    @lru_cache(maxsize=None)
    def alpha_witnesses(self) -> DistanceWitnesses:
        approximants = [(self.d(k), 1) for k in self._range()]
        return settled(distance_witnesses_eval(
            self.alpha.solution, approximants, self.window,
            lattices=[self.lattice(k) for k in self._range()],
            limit_hint=self.ctx.zero(), mark_base=self.p, depth=self._mark_depth,
            budget=self.term_budget))

    def _range(self):
        return range(1, self.levels + 1)

    def _ground_approximant(self, k: int) -> HahnSeries:
        """d_k + u t^-1 c_k, the degree-1 approximant of theta."""
        shifted = series_shift(self.c(k), self.ctx.rational(-1))
        return series_add(self.d(k), series_scale(shifted, self.u))

    def okutsu_candidate(self) -> OkutsuCandidate:
        u_beta = series_scale(self.beta.solution, self.u)
        level0 = OkutsuLevel(
            tuple((self._ground_approximant(k), 1) for k in self._range()),
            limit_hint=self.ctx.rational(-1), mark_base=self.p, mark_depth=self._mark_depth)
        level1 = OkutsuLevel(
            tuple((series_add(u_beta, self.d(k)), self.p) for k in self._range()),
            limit_hint=self.ctx.zero(), mark_base=self.p, mark_depth=self._mark_depth)
        return OkutsuCandidate((level0, level1), self.p ** 2)

    def challenges(self):
        top = self.levels + 1
        u_beta = series_scale(self.beta.solution, self.u)
        shifted = series_shift(self.c(self.levels), self.ctx.rational(-1))
        return [
            (self.d(self.levels), 1),
            (monomial(0, self.ctx.zero(), self.field), 1),
            (self._ground_approximant(top), 1),
            (series_add(self.alpha.solution, series_scale(shifted, self.u)), self.p),
            (u_beta, self.p),
            (series_add(u_beta, self.d(top)), self.p),
        ]

    def depth_evidence(self):
        report = okutsu_verify(
            self.okutsu_candidate(), self.theta.value(), self.challenges(), self.window, self.term_budget)
        return {
            'depth': report.depth,
            'kinds': report.kinds,
            'cuts': settled_cuts(report.cuts),
            'violations': [f"{c.name}: {c.detail}" for c in report.violations],
            'undecided': report.undecided,
            'note': report.note,
        }

    def s_theta_summary(self):
        found = s_theta(self.theta, self.term_budget)
        return {'values': found.values, 'multiset': dict(found.multiset)}

    def as_solve_soundness(self):
        depths = (1, 2, self.levels + self.config.window_extra)
        cases = [
            ('a(1)', self.a(1), window_bounds(self.ctx.rational(-1), self.p, depths)),
            ('a(2)', self.a(2), window_bounds(self.ctx.rational(-1), self.p, depths)),
            ('alpha', self.alpha, window_bounds(self.ctx.pi(-1), self.p, depths)),
            ('beta', self.beta, window_bounds(self.ctx.rational(-(self.p + 1)), self.p, depths)),
        ]
        return as_solve_failures(cases, self.term_budget)

    @cached_property
    def ram(self) -> CompositumRamification:
        return CompositumRamification(
            self.field, self.ctx, self.alpha, self.beta, self.u, self.term_budget, self.config.workers)

    def ramification(self):
        """#Ram against S_theta: <sigma1> and <sigma2> already give two ideals."""
        ks, zero, minus_one = self._range(), self.ctx.zero(), self.ctx.rational(-1)
        u_beta = series_scale(self.beta.solution, self.u)
        u_tau = [series_scale(series_shift(self.c(k), minus_one), self.u) for k in ks]
        over_beta = self.ram.distances([series_add(u_beta, self.d(k)) for k in ks], zero)
        over_alpha = self.ram.distances([series_add(self.alpha.solution, a) for a in u_tau], minus_one)
        over_ground = self.ram.distances([self._ground_approximant(k) for k in ks], minus_one)
        segments = self.ram.segments(over_beta, over_alpha, over_ground)
        result = self.ram.compare(segments, THETA_DEPTH, s_theta_count=1)
        summary = result.as_dict()
        summary['summary'] = count_summary(result.count, result.depth, result.exact)
        return summary

    def parsed_a2_recurrence(self) -> bool:
        parser = SeriesParser(self.field, self.ctx, self.recipes())
        parsed = parser.parse('a(2)')
        bound = self.ctx.rational(-1) / self.p ** (self.levels + 1)
        image = as_operator(parsed, Window(bound), self.term_budget)
        return series_equal_below(image, series_neg(self.a(1).solution), bound, self.term_budget)


def build_dependent_pair_scenario(config: RunConfig) -> Scenario:
    """
    Build the dependent-pair scenario.

    Args:
        config: Run configuration; ``levels`` is the number of sampled
            approximants per family

    Returns:
        Scenario with its recipes and checks

    Raises:
        ValueError: Unsupported prime
    """
    pair = DependentPair(config)
    p, levels, ctx = pair.p, pair.levels, pair.ctx
    ks = list(range(1, levels + 1))

    checks = [
        Check(
            'as-solve-soundness',
            'AS(x) equals the right-hand side below three window bounds for a(1), a(2), alpha, beta',
            '§5.1.1, "AS(a) = a^p − a"',
            [],
            pair.as_solve_soundness,
            provenance=TRIVIAL,
        ),
        Check(
            'recipe-a2',
            "the literal 'a(2)' resolves to a stream with AS(a(2)) = -a(1)",
            '§5.1.1, "AS(a_{ℓ+1}) = −a_ℓ"',
            True,
            pair.parsed_a2_recurrence,
        ),
        Check(
            'beta-distance-values',
            'v(beta - t^-1 c_l) for l = 1..levels',
            '§5.1.1 eq. (psicusbeta), "v(β − t^{-1}c_ℓ) = −1 − 1/p^{ℓ+1}"',
            [ctx.rational(-1) - ctx.rational(1) / p ** (k + 1) for k in ks],
            lambda: list(pair.beta_witnesses().values),
        ),
        Check(
            'alpha-distance-values',
            'v(alpha - d_l) for l = 1..levels',
            '§5.1.1 eq. (psicusalpha), "v(α − d_ℓ) = −π/p^{ℓ+1}"',
            [ctx.pi(-1) / p ** (k + 1) for k in ks],
            lambda: list(pair.alpha_witnesses().values),
        ),
        Check(
            'd1-cuts',
            'cuts d_1(alpha) and d_1(beta) induced by the sampled distances',
            '§5.1.1, "Therefore, d_1(β) = −1^- and d_1(α) = 0^-"',
            {'alpha': '0^-', 'beta': '-1^-'},
            lambda: {'alpha': str(pair.alpha_witnesses().cut), 'beta': str(pair.beta_witnesses().cut)},
        ),
        Check(
            'value-group-nonmembership',
            'every witness value of level l lies outside vK_l, so no distance is attained',
            '§5.1.1 eq. (equakl), "vK_ℓ = (1/p^ℓ)(Z + πZ) for every ℓ"',
            {'alpha': [True] * levels, 'beta': [True] * levels},
            lambda: {
                'alpha': list(pair.alpha_witnesses().outside_lattice),
                'beta': list(pair.beta_witnesses().outside_lattice),
            },
            provenance=DERIVED,
        ),
        Check(
            'dependence-classes',
            'classification of alpha and beta by their cuts',
            '§5.1.1, "α is independent (d_1(α) = 0^-) and β is dependent (d_1(β) = δ^-, δ < 0)"',
            {'alpha': 'independent', 'beta': 'dependent'},
            lambda: {
                'alpha': classify_dependence(pair.alpha_witnesses().cut),
                'beta': classify_dependence(pair.beta_witnesses().cut),
            },
        ),
        Check(
            'ge-condition',
            'every nonzero F_p-combination of 1 and u has value 0',
            '§5.1 Lemma (congent1) eq. (congent), "v(ac + bd) = 0 for every (c, d) ∈ F_p^2 ∖ {(0, 0)}"',
            True,
            lambda: ge_witness_check(p, [pair.field.one(), pair.u]),
            provenance=TRIVIAL,
        ),
        Check(
            'conjugates',
            'number of conjugates theta + e1 + e2*u',
            '§5.1 Lemma (congent1), "all the conjugates of θ over K are θ + aF_p + bF_p"',
            p ** 2,
            lambda: len(conjugate_set(pair.theta)),
            provenance=TRIVIAL,
        ),
        Check(
            's-theta',
            'values v(theta\' - theta) over the conjugates theta\' != theta',
            '§5.1.1, "#S_θ = 1 < 2 = depth(θ)"',
            {'values': [ctx.zero()], 'multiset': {ctx.zero(): p ** 2 - 1}},
            pair.s_theta_summary,
        ),
        Check(
            'krasner-omega',
            "Krasner's constant of theta",
            '§1, "Krasner\'s constant ω(θ) is, by definition, the maximum of S_θ"',
            ctx.zero(),
            lambda: krasner_omega(pair.theta),
            provenance=DERIVED,
        ),
        Check(
            'depth-evidence',
            'Okutsu conditions for A_0 = {d_l + u t^-1 c_l}, A_1 = {u*beta + d_l} and a challenge battery',
            '§3 Theorem (OSdepth), "The length r of any Okutsu sequence of θ is equal to depth(θ)"',
            {
                'depth': THETA_DEPTH,
                'kinds': ['limit', 'limit'],
                'cuts': ['-1^-', '0^-'],
                'violations': [],
                'undecided': [],
                'note': 'necessary-conditions only',
            },
            pair.depth_evidence,
        ),
        Check(
            'ram-lower-bound',
            'ideals of <sigma1>, <sigma2> from the distances of theta to K(beta), K(alpha)',
            '§6.2 Remark (depn3famif2), "#S_θ = 1 < 2 ≤ #Ram(E)"',
            {
                'ram': ['AboveOpen(1)', 'AboveOpen(0)'],
                'count': 2,
                'bound': 'at-least',
                'depth': THETA_DEPTH,
                's_theta': 1,
                'within_maximal_ideal': {'AboveOpen(1)': True, 'AboveOpen(0)': True},
                'summary': '#Ram >= 2 = 2 = depth',
            },
            pair.ramification,
            provenance=DERIVED,
        ),
    ]
    logger.debug("Built %s with p=%d, levels=%d", SCENARIO_ID, p, levels)
    return Scenario(
        id=SCENARIO_ID,
        title='Dependent and independent Artin-Schreier pair',
        prime=p,
        base_field=pair.field,
        context=ctx,
        recipes=pair.recipes(),
        checks=checks,
        notes=[
            'b_l is taken as t^(-pi/p^l) so that d_l approximates alpha',
            'depth evidence checks necessary conditions on sampled approximants only',
        ],
    )
