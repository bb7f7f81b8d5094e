"""
An immediate extension of degree p^2 and depth 1 over a ground field without
finite limits.

Ground field: K_0 = k(t, t^pi) extended by a_l = t^(-pi/p^l) and
b_l = t^(-1/r_l) - t^(-1/r_(l+1)) for all l, with r_1 = p. alpha and beta solve
x^p - x = t^-pi and x^p - x = t^-(p+1); theta = alpha + t*beta has two values
in S_theta and a single limit level, so its depth is 1.
"""

import logging
from functools import cached_property, lru_cache
from typing import Dict, List

from hahnlab.coefficients import FieldSpec
from hahnlab.exponents import BasisContext, Exponent, Order, ValueLattice, exp_cmp, exp_min, lattice_contains
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
    kaplansky_obstructions,
    krasner_omega,
    okutsu_verify,
    s_theta,
)
from hahnlab.parser import Recipe
from hahnlab.runner import DERIVED, TRIVIAL, Check, RunConfig, Scenario
from hahnlab.scenarios.common import (
    as_solve_failures,
    require_prime,
    settled,
    settled_cuts,
    window_bounds,
)
from hahnlab.series import (
    HahnSeries,
    Window,
    format_terms,
    monomial,
    pth_power,
    series_add,
    series_shift,
    series_sub,
    series_sum,
    series_val,
    support_count_below,
)

logger = logging.getLogger(__name__)

SCENARIO_ID = 'monster-5-2'
SUPPORTED_PRIMES = (3, 5)

# Item budget standing in for "infinitely many terms below the bound"
OVERFLOW_BUDGET = 200


class MonsterField:
    """
    The ground field data and the elements alpha, beta over it.

    Args:
        config: Run configuration
        degree: Degree m of the coefficient field F_{p^m}
    """

    def __init__(self, config: RunConfig, degree: int = 1):
        self.config = config
        self.p = config.prime
        self.levels = config.levels
        self.term_budget = config.term_budget
        self.field = FieldSpec(self.p, degree)
        self.ctx = BasisContext(self.p, budget=config.budget)
        self.window = Window(self.ctx.rational(1))

    def t(self, e: Exponent, c=1) -> HahnSeries:
        return monomial(c, e, self.field)

    def r_inv(self, k: int, q=1) -> Exponent:
        return self.ctx.reciprocal_r(k, q)

    def a(self, level: int) -> HahnSeries:
        if level < 1:
            raise ValueError(f"a(l) is defined for l >= 1, got {level}")
        return self.t(self.ctx.pi(-1) / self.p ** level)

    def b(self, level: int) -> HahnSeries:
        if level < 1:
            raise ValueError(f"b(l) is defined for l >= 1, got {level}")
        return series_sub(self.t(self.r_inv(level, -1)), self.t(self.r_inv(level + 1, -1)))

    @lru_cache(maxsize=None)
    def c(self, level: int) -> HahnSeries:
        if level < 1:
            raise ValueError(f"c(l) is defined for l >= 1, got {level}")
        return series_sum([self.a(j) for j in range(1, level + 1)], label=f"c({level})")

    @lru_cache(maxsize=None)
    def d(self, level: int) -> HahnSeries:
        """d_l = b_1 + ... + b_l = t^(-1/p) - t^(-1/r_(l+1))."""
        if level < 1:
            raise ValueError(f"d(l) is defined for l >= 1, got {level}")
        return series_sum([self.b(j) for j in range(1, level + 1)], label=f"d({level})")

    def t_tilde(self, level: int) -> HahnSeries:
        return series_sub(self.t(self.ctx.rational(-1)), pth_power(self.d(level)))

    @cached_property
    def alpha(self) -> ASElement:
        return as_solve(self.t(self.ctx.pi(-1)), label='alpha')

    @cached_property
    def beta(self) -> ASElement:
        return as_solve(self.t(self.ctx.rational(-(self.p + 1))), label='beta')

    def lattice(self, level: int) -> ValueLattice:
        """G_l = (pi/p^l)Z + (1/r_1)Z + ... + (1/r_l)Z + (p/r_(l+1))Z."""
        gens = [self.ctx.pi(1) / self.p ** level]
        gens += [self.r_inv(k) for k in range(1, level + 1)]
        gens.append(self.r_inv(level + 1, self.p))
        return ValueLattice(gens, label=f"G_{level}")

    def level_range(self) -> range:
        return range(1, self.levels + 1)

    def tau_approximant(self, level: int) -> HahnSeries:
        """t^-1 d_l, the approximant of beta."""
        return series_shift(self.d(level), self.ctx.rational(-1))

    def witnesses(self, target: HahnSeries, approximants: List[HahnSeries], hint: Exponent) -> DistanceWitnesses:
        return distance_witnesses_eval(
            target, [(a, 1) for a in approximants], self.window,
            lattices=[self.lattice(k) for k in self.level_range()],
            limit_hint=hint, budget=self.term_budget)

    def as_solve_soundness(self) -> List[str]:
        depths = (1, 2, self.levels + self.config.window_extra)
        cases = [
            ('alpha', self.alpha, window_bounds(self.ctx.pi(-1), self.p, depths)),
            ('beta', self.beta, window_bounds(self.ctx.rational(-(self.p + 1)), self.p, depths)),
        ]
        return as_solve_failures(cases, self.term_budget)


class Monster(MonsterField):
    """theta = alpha + t*beta over the monster ground field."""

    @cached_property
    def theta(self) -> GeneratorCombo:
        one = self.t(self.ctx.zero())
        t = self.t(self.ctx.rational(1))
        return GeneratorCombo(((one, self.alpha), (t, self.beta)), disjoint=True, label='theta')

    @cached_property
    def theta_series(self) -> HahnSeries:
        return self.theta.value()

    def recipes(self) -> Dict[str, Recipe]:
        return {
            'a': Recipe(self.a, indexed=True),
            'b': Recipe(self.b, indexed=True),
            'c': Recipe(self.c, indexed=True),
            'd': Recipe(self.d, indexed=True),
            'alpha': Recipe(lambda: self.alpha.solution),
            'beta': Recipe(lambda: self.beta.solution),
            'theta': Recipe(lambda: self.theta_series),
        }

    def generator_membership_failures(self) -> List[str]:
        failures = []
        for level in self.level_range():
            lattice = self.lattice(level)
            samples = [(f"a({j})", self.a(j)) for j in range(1, level + 1)]
            samples += [(f"b({j})", self.b(j)) for j in range(1, level + 1)]
            samples += [(f"d({level})", self.d(level)), (f"t~({level})", self.t_tilde(level))]
            for name, s in samples:
                v = series_val(s, self.term_budget)
                if not lattice_contains(lattice, v):
                    failures.append(f"v({name}) = {v} not in G_{level}")
        return failures

    def nonmembership_violations(self) -> List[str]:
        found = []
        for level in self.level_range():
            lattice = self.lattice(level)
            for x in (self.ctx.pi(1) / self.p ** (level + 1), self.r_inv(level + 1)):
                if lattice_contains(lattice, x):
                    found.append(f"{x} in G_{level}")
        return found

    @lru_cache(maxsize=None)
    def theta_witnesses(self) -> DistanceWitnesses:
        approximants = [series_add(self.c(k), self.d(k)) for k in self.level_range()]
        return self.witnesses(self.theta_series, approximants, self.ctx.zero())

    def okutsu_candidate(self) -> OkutsuCandidate:
        level0 = OkutsuLevel(
            tuple((series_add(self.c(k), self.d(k)), 1) for k in self.level_range()),
            limit_hint=self.ctx.zero())
        return OkutsuCandidate((level0,), self.p ** 2)

    def challenges(self):
        top = self.levels + 1
        t_beta = series_shift(self.beta.solution, self.ctx.rational(1))
        return [
            (self.c(self.levels), 1),
            (monomial(0, self.ctx.zero(), self.field), 1),
            (self.alpha.solution, self.p),
            (series_add(self.alpha.solution, self.d(top)), self.p),
            (series_add(t_beta, self.c(self.levels)), self.p),
        ]

    def depth_evidence(self):
        report = okutsu_verify(
            self.okutsu_candidate(), self.theta_series, self.challenges(), self.window, self.term_budget)
        return {
            'depth': report.depth,
            'kinds': report.kinds,
            'cuts': settled_cuts(report.cuts),
            'violations': [f"{c.name}: {c.detail}" for c in report.violations],
            'undecided': report.undecided,
            'note': report.note,
        }

    def obstruction_coefficients(self):
        return [c for c in self.field.prime_elements() if not (c.is_zero() or c.is_one())]

    def kaplansky(self):
        checks, residue = kaplansky_obstructions(
            self.theta_series, self.ctx.pi(-1) / self.p ** 3, self.obstruction_coefficients(), OVERFLOW_BUDGET)
        return {'checks': {c.name: c.ok for c in checks}, 'residue': format_terms(residue)}

    def small_powers(self) -> int:
        """Number of j >= 1 with pi/p^j > 1/p."""
        threshold = self.ctx.rational(1) / self.p
        j = 0
        while exp_cmp(self.ctx.pi(1) / self.p ** (j + 1), threshold) is Order.GT:
            j += 1
        return j

    def kaplansky_counts(self) -> Dict[str, int]:
        q = self.ctx.rational(-1) / self.p
        powered = pth_power(self.theta_series)
        shifted = series_shift(self.theta_series, self.ctx.rational(1) / self.p)
        return {
            'theta^p below -1/p': support_count_below(powered, q, OVERFLOW_BUDGET).count,
            't^(1/p)*theta below 0': support_count_below(shifted, self.ctx.zero(), OVERFLOW_BUDGET).count,
        }

    def truncation_exponents(self) -> List[Exponent]:
        bound = self.ctx.pi(-1) / self.p ** (self.levels + 1)
        return [e for e, _ in self.theta_series.terms(bound, self.term_budget)]

    def s_theta_summary(self):
        found = s_theta(self.theta, self.term_budget)
        return {'values': found.values, 'multiset': dict(found.multiset)}


def build_monster_scenario(config: RunConfig) -> Scenario:
    """
    Build the monster scenario.

    Args:
        config: Run configuration; ``levels`` bounds the lattice battery and
            the sampled approximants

    Returns:
        Scenario with its recipes and checks

    Raises:
        ValueError: Unsupported prime
    """
    require_prime(SCENARIO_ID, config.prime, SUPPORTED_PRIMES)
    m = Monster(config)
    p, ctx, ks = m.p, m.ctx, list(m.level_range())
    zero, one = ctx.zero(), ctx.rational(1)
    j_small = m.small_powers()
    minus_one = m.field.element(-1)

    checks = [
        Check(
            'as-solve-soundness',
            'AS(x) equals the right-hand side below three window bounds for alpha and beta',
            '§5.2, "AS(α) = t^{-π} and AS(β) = t^{-p-1}"',
            [],
            m.as_solve_soundness,
            provenance=TRIVIAL,
        ),
        Check(
            'value-group-generators',
            'v(a_j), v(b_j), v(d_l) and v(t~) lie in G_l for l = 1..levels',
            '§5.2 eq. (equatsibestigl), "vK_ℓ = G_ℓ := (π/p^ℓ)Z + (1/r_1)Z + … + (1/r_ℓ)Z + (p/r_{ℓ+1})Z"',
            [],
            m.generator_membership_failures,
        ),
        Check(
            'equianfgmarl-nonmembership',
            'pi/p^(l+1) and 1/r_(l+1) fail lattice membership in G_l',
            '§5.2 eq. (equianfgmarl), "π/p^{ℓ+1}, 1/r_{ℓ+1} ∉ vK_ℓ"',
            [],
            m.nonmembership_violations,
        ),
        Check(
            'alpha-distance-values',
            'v(alpha - c_l) for l = 1..levels',
            '§5.2, "v(α − c_ℓ) = −π/p^{ℓ+1}"',
            [ctx.pi(-1) / p ** (k + 1) for k in ks],
            lambda: list(m.witnesses(m.alpha.solution, [m.c(k) for k in ks], zero).values),
        ),
        Check(
            'tp-distance-values',
            'v(t^(-1/p) - d_l) for l = 1..levels',
            '§5.2, "v(t^{-1/p} − d_ℓ) = −1/r_{ℓ+1}"',
            [m.r_inv(k + 1, -1) for k in ks],
            lambda: list(m.witnesses(m.t(m.r_inv(1, -1)), [m.d(k) for k in ks], zero).values),
        ),
        Check(
            'd1-cuts',
            'cuts of alpha, t^(-1/p) and beta from their sampled distances',
            '§5.2 eq. (impodist), "d_1(α) = d_1(t^{-1/p}) = 0^- and d_1(β) = −1^-"',
            {'alpha': '0^-', 't^(-1/p)': '0^-', 'beta': '-1^-'},
            lambda: {
                'alpha': settled(m.witnesses(m.alpha.solution, [m.c(k) for k in ks], zero)).cut,
                't^(-1/p)': settled(m.witnesses(m.t(m.r_inv(1, -1)), [m.d(k) for k in ks], zero)).cut,
                'beta': settled(m.witnesses(m.beta.solution, [m.tau_approximant(k) for k in ks], -one)).cut,
            },
        ),
        Check(
            'dependence-classes',
            'classification of alpha and beta by their cuts',
            '§5.2 eq. (impodist), "d_1(α) = d_1(t^{-1/p}) = 0^- and d_1(β) = −1^-"',
            {'alpha': 'independent', 'beta': 'dependent'},
            lambda: {
                'alpha': classify_dependence(
                    settled(m.witnesses(m.alpha.solution, [m.c(k) for k in ks], zero)).cut),
                'beta': classify_dependence(
                    settled(m.witnesses(m.beta.solution, [m.tau_approximant(k) for k in ks], -one)).cut),
            },
            provenance=DERIVED,
        ),
        Check(
            'theta-truncation',
            'support of theta below -pi/p^(levels+1)',
            '§5.2, "trn_0(θ) = t^{-1/p} + t^{-π/p} + … + t^{-π/p^ℓ} + …"',
            sorted([ctx.pi(-1) / p ** j for j in ks] + [m.r_inv(1, -1)]),
            m.truncation_exponents,
        ),
        Check(
            'conjugates',
            'number of conjugates theta + e1 + e2*t',
            '§5.2, "all the conjugates of θ over K are θ + tF_p + F_p"',
            p ** 2,
            lambda: len(conjugate_set(m.theta)),
            provenance=TRIVIAL,
        ),
        Check(
            's-theta',
            "values v(theta' - theta) over the conjugates theta' != theta",
            '§5.2, "Hence θ is a generator of K(α, β) over K and #S_θ = 2"',
            {'values': [zero, one], 'multiset': {zero: p * p - p, one: p - 1}},
            m.s_theta_summary,
        ),
        Check(
            'krasner-omega',
            "Krasner's constant of theta",
            '§1, "Krasner\'s constant ω(θ) is, by definition, the maximum of S_θ"',
            one,
            lambda: krasner_omega(m.theta),
            provenance=DERIVED,
        ),
        Check(
            'theta-witness-values',
            'v(theta - (c_l + d_l)) for l = 1..levels',
            '§5.2, "v(α − c_ℓ) = −π/p^{ℓ+1} and v(t^{-1/p} − d_ℓ) = −1/r_{ℓ+1}"',
            [exp_min([ctx.pi(-1) / p ** (k + 1), m.r_inv(k + 1, -1)]) for k in ks],
            lambda: list(m.theta_witnesses().values),
            provenance=DERIVED,
        ),
        Check(
            'theta-nonattainment',
            'the witness value of level l lies outside G_l',
            '§5.2 eq. (equianfgmarl), "π/p^{ℓ+1}, 1/r_{ℓ+1} ∉ vK_ℓ"',
            [True] * len(ks),
            lambda: list(m.theta_witnesses().outside_lattice),
            provenance=DERIVED,
        ),
        Check(
            'depth-evidence',
            'Okutsu conditions for A_0 = {c_l + d_l} and a challenge battery of degree 1 and p',
            '§5.2 Lemma (dephtonfisone), "We have depth(θ) = 1"',
            {
                'depth': 1,
                'kinds': ['limit'],
                'cuts': ['0^-'],
                'violations': [],
                'undecided': [],
                'note': 'necessary-conditions only',
            },
            m.depth_evidence,
        ),
        Check(
            'kaplansky-obstructions',
            'degree-p approximants x^p - c and x^p - c x - d are excluded by support overflow',
            '§3 Cor. (corkaplansky), "the minimal polynomial of ε over K is of the form x^p − c or x^p − cx − d"',
            {
                'checks': dict(
                    [('pure-power', True), ('q1-negative', True), ('q1-positive', True)]
                    + [(f"c1={c}", True) for c in m.obstruction_coefficients()]),
                'residue': format_terms([
                    (ctx.pi(-1), m.field.one()),
                    (-one, m.field.one()),
                    (m.r_inv(1, -1), minus_one),
                ]),
            },
            m.kaplansky,
        ),
        Check(
            'kaplansky-counts',
            'finite supports behind the q_1 obstructions',
            '§5.2 Def., "#supp(trn_δ(a)) < ∞" (no finite limits)',
            {'theta^p below -1/p': 2 + j_small, 't^(1/p)*theta below 0': j_small},
            m.kaplansky_counts,
            provenance=DERIVED,
        ),
    ]
    logger.debug("Built %s with p=%d, levels=%d", SCENARIO_ID, p, m.levels)
    return Scenario(
        id=SCENARIO_ID,
        title='Immediate extension of depth 1 with two values in S_theta',
        prime=p,
        base_field=m.field,
        context=ctx,
        recipes=m.recipes(),
        checks=checks,
        notes=[
            'r_1 = p is carried by the unit symbol; r2, r3, ... are independent basis symbols',
            f'support overflow means more than {OVERFLOW_BUDGET} stream items below the bound',
            'depth evidence checks necessary conditions on sampled approximants only',
        ],
    )
