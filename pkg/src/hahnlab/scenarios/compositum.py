"""
Ramification ideals of a compositum K(alpha, beta) of two linearly disjoint
Artin-Schreier extensions, generated by theta' = alpha + u*beta.

With sigma1 moving alpha and sigma2 moving beta, the ideal of <sigma_i> is
determined by the distance of alpha_i to the other generator's field. Over the
monster ground field this yields two distinct ideals while the depth is 1.
"""

import logging
from functools import cached_property, lru_cache
from typing import Dict, List, Sequence

from hahnlab.coefficients import FFElem, FieldSpec
from hahnlab.exponents import BasisContext, Exponent
from hahnlab.extensions import (
    ASElement,
    DistanceWitnesses,
    GeneratorCombo,
    distance_witnesses_eval,
    ge_witness_check,
    s_theta,
)
from hahnlab.parser import Recipe
from hahnlab.ramification import (
    ElementaryAbelian,
    FieldExpr,
    RamComparison,
    RamSegment,
    Subgroup,
    action_consistency,
    as_compatibility,
    closure,
    hc_check,
    i_h_formula,
    i_sigma_witnesses,
    ram_set_and_compare,
    segment_from_witnesses,
    subgroup_battery,
    subgroup_enumerate,
)
from hahnlab.runner import DERIVED, TRIVIAL, Check, RunConfig, Scenario
from hahnlab.scenarios.common import count_summary, require_prime, settled
from hahnlab.scenarios.monster import MonsterField
from hahnlab.series import HahnSeries, Window, monomial, series_add, series_scale

logger = logging.getLogger(__name__)

SCENARIO_ID = 'ramif-6-2'
SUPPORTED_PRIMES = (3, 5)

Approximants = Sequence[HahnSeries]


class CompositumRamification:
    """
    The group (C_p)^2 acting on alpha and beta, and the ideals of its subgroups.

    Args:
        field: Coefficient field containing u
        context: Basis context
        alpha: First Artin-Schreier element (moved by sigma1)
        beta: Second Artin-Schreier element (moved by sigma2)
        u: Coefficient of beta in theta', outside F_p
        term_budget: Item budget per materialization
        workers: Threads for the subgroup battery
    """

    def __init__(
        self,
        field: FieldSpec,
        context: BasisContext,
        alpha: ASElement,
        beta: ASElement,
        u: FFElem,
        term_budget: int,
        workers: int = 4,
    ):
        self.field = field
        self.ctx = context
        self.alpha = alpha
        self.beta = beta
        self.u = u
        self.p = field.p
        self.term_budget = term_budget
        self.workers = workers
        self.window = Window(context.rational(1))
        self.x = FieldExpr.symbol('alpha', field, context)
        self.y = FieldExpr.symbol('beta', field, context)
        self.theta = self.x + self.y * u
        self.env = {'alpha': alpha.solution, 'beta': beta.solution}
        self.relations = {
            'alpha': FieldExpr.from_series(alpha.rhs),
            'beta': FieldExpr.from_series(beta.rhs),
        }
        self.model = ElementaryAbelian(2, self.p, action={
            'sigma1': {'alpha': self.x + 1},
            'sigma2': {'beta': self.y + 1},
        })
        self.h1 = closure(self.model, [self.model.generator('sigma1')])
        self.h2 = closure(self.model, [self.model.generator('sigma2')])

    @cached_property
    def subgroups(self) -> List[Subgroup]:
        return subgroup_enumerate(self.model)

    def subgroup(self, elements: frozenset) -> Subgroup:
        return next(h for h in self.subgroups if h.elements == elements)

    @cached_property
    def theta_series(self) -> HahnSeries:
        return self.theta.evaluate(self.env, budget=self.term_budget)

    def combo(self) -> GeneratorCombo:
        zero = self.ctx.zero()
        parts = ((monomial(1, zero, self.field), self.alpha), (monomial(self.u, zero, self.field), self.beta))
        return GeneratorCombo(parts, disjoint=True, label="theta'")

    def distances(self, approximants: Approximants, hint: Exponent) -> DistanceWitnesses:
        return settled(distance_witnesses_eval(
            self.theta_series, [(a, 1) for a in approximants], self.window,
            limit_hint=hint, budget=self.term_budget))

    def ideal(self, h: Subgroup, d1: DistanceWitnesses, hc_declared: bool) -> RamSegment:
        return i_h_formula(self.model, h, self.theta, self.env, d1, hc_declared, self.term_budget)

    def segments(
        self, over_beta: DistanceWitnesses, over_alpha: DistanceWitnesses, over_ground: DistanceWitnesses
    ) -> Dict[str, RamSegment]:
        """
        Ideals of all nontrivial subgroups.

        <sigma1> fixes K(beta) and <sigma2> fixes K(alpha), so their segments
        are exact; every other subgroup only gets the lower bound from the
        distances over K.
        """

        def task(h: Subgroup) -> RamSegment:
            if h.elements == self.h1:
                return self.ideal(h, over_beta, hc_declared=True)
            if h.elements == self.h2:
                return self.ideal(h, over_alpha, hc_declared=True)
            return self.ideal(h, over_ground, hc_declared=False)

        return subgroup_battery(self.subgroups, task, self.workers)

    def compare(self, segments: Dict[str, RamSegment], depth: int, s_theta_count: int) -> RamComparison:
        return ram_set_and_compare(self.subgroups, segments, depth, s_theta_count)

    def hc(self, elements: frozenset, samples: Approximants) -> Dict[str, bool]:
        result = hc_check(
            self.model, self.subgroup(elements), self.theta, self.env, samples, self.window, self.term_budget)
        return {'ok': result.ok, 'strict': result.strict}

    def consistency_failures(self) -> List[str]:
        failures = [f"{g} on {sym}" for g, sym, _ in action_consistency(self.model)]
        failures += [f"AS relation of {sym} under {name}"
                     for name, sym, ok in as_compatibility(self.model, self.relations) if not ok]
        return failures

    def ge_condition(self) -> bool:
        return ge_witness_check(self.p, [self.field.one(), self.u])

    def s_theta_summary(self):
        found = s_theta(self.combo(), self.term_budget)
        return {'values': found.values, 'multiset': dict(found.multiset)}


class MonsterCompositum(MonsterField):
    """The monster ground field over F_{p^2} with theta' = alpha + u*beta."""

    def __init__(self, config: RunConfig):
        super().__init__(config, degree=2)
        self.u = self.field.gen()
        self.ram = CompositumRamification(
            self.field, self.ctx, self.alpha, self.beta, self.u, config.term_budget, config.workers)

    def recipes(self) -> Dict[str, Recipe]:
        return {
            'c': Recipe(self.c, indexed=True),
            'd': Recipe(self.d, indexed=True),
            'alpha': Recipe(lambda: self.alpha.solution),
            'beta': Recipe(lambda: self.beta.solution),
            'theta_prime': Recipe(lambda: self.ram.theta_series),
        }

    def over_beta(self, k: int) -> HahnSeries:
        """u*beta + c_k in K(beta)."""
        return series_add(series_scale(self.beta.solution, self.u), self.c(k))

    def over_alpha(self, k: int) -> HahnSeries:
        """alpha + u t^-1 d_k in K(alpha)."""
        return series_add(self.alpha.solution, series_scale(self.tau_approximant(k), self.u))

    def over_ground(self, k: int) -> HahnSeries:
        return series_add(self.c(k), series_scale(self.tau_approximant(k), self.u))

    @lru_cache(maxsize=None)
    def d1_over_beta(self) -> DistanceWitnesses:
        return self.ram.distances([self.over_beta(k) for k in self.level_range()], self.ctx.zero())

    @lru_cache(maxsize=None)
    def d1_over_alpha(self) -> DistanceWitnesses:
        return self.ram.distances([self.over_alpha(k) for k in self.level_range()], self.ctx.rational(-1))

    @lru_cache(maxsize=None)
    def d1_over_ground(self) -> DistanceWitnesses:
        return self.ram.distances([self.over_ground(k) for k in self.level_range()], self.ctx.rational(-1))

    @lru_cache(maxsize=None)
    def segments(self) -> Dict[str, RamSegment]:
        return self.ram.segments(self.d1_over_beta(), self.d1_over_alpha(), self.d1_over_ground())

    def ideal_summary(self, elements: frozenset):
        h = self.ram.subgroup(elements)
        ram = self.segments()[h.label]
        return {'segment': ram.segment, 'status': ram.status, 'sound': ram.sound}

    def witnessed_ideals(self) -> Dict[str, object]:
        """The ideals of <sigma1>, <sigma2> again, from sampled test elements b = theta' - a."""
        ram, ks = self.ram, self.level_range()
        tests_h1 = [(f"theta' - a[{k}]", ram.theta - FieldExpr.from_series(self.c(k)) - ram.y * self.u)
                    for k in ks]
        tests_h2 = [(f"theta' - a[{k}]", ram.theta - ram.x
                     - FieldExpr.from_series(series_scale(self.tau_approximant(k), self.u)))
                    for k in ks]
        v1 = i_sigma_witnesses(ram.model, ram.model.generator('sigma1'), tests_h1, ram.env, ram.window,
                               self.term_budget)
        v2 = i_sigma_witnesses(ram.model, ram.model.generator('sigma2'), tests_h2, ram.env, ram.window,
                               self.term_budget)
        return {
            'sigma1': segment_from_witnesses(v1, self.ctx.zero(), settle=True),
            'sigma2': segment_from_witnesses(v2, self.ctx.rational(1), settle=True),
        }

    def comparison(self):
        result = self.ram.compare(self.segments(), depth=1, s_theta_count=1)
        summary = result.as_dict()
        summary['summary'] = count_summary(result.count, result.depth, result.exact)
        return summary


def build_compositum_scenario(config: RunConfig) -> Scenario:
    """
    Build the compositum scenario over the monster ground field.

    Raises:
        ValueError: Unsupported prime
    """
    require_prime(SCENARIO_ID, config.prime, SUPPORTED_PRIMES)
    m = MonsterCompositum(config)
    p, ctx, ks = m.p, m.ctx, list(m.level_range())
    zero, one = ctx.zero(), ctx.rational(1)

    checks = [
        Check(
            'ge-condition',
            'every nonzero F_p-combination of 1 and u has value 0',
            '§6.2 Remark, "If K admits an infinite subfield K_0 which is algebraic over F_p, then (K, v) satisfies the condition (GE)"',
            True,
            m.ram.ge_condition,
            provenance=TRIVIAL,
        ),
        Check(
            'theta-prime-generator',
            "values v(theta'' - theta') over the conjugates of theta' = alpha + u*beta",
            '§6.2 Cor., "Take b ∈ k ∖ F_p and θ′ = α + bβ. Then θ′ is a generator of L/K"',
            {'values': [zero], 'multiset': {zero: p * p - 1}},
            m.ram.s_theta_summary,
            provenance=DERIVED,
        ),
        Check(
            'subgroups',
            'subgroups of Gal(L/K) = <sigma1> x <sigma2>',
            '§6.2 Prop. (ramificiudle), "Gal(L/K) ≃ C_p × … × C_p is generated by σ_i"',
            {'total': p + 3, 'order p': p + 1},
            lambda: {
                'total': len(m.ram.subgroups),
                'order p': sum(1 for h in m.ram.subgroups if h.order == p),
            },
            provenance=TRIVIAL,
        ),
        Check(
            'action-consistency',
            'the action table is a homomorphism and respects AS(alpha) = t^-pi, AS(beta) = t^-(p+1)',
            '§6.2 Prop. (ramificiudle), "σ_i(α_i) = α_i + 1 and σ_i(α_j) = α_j if i ≠ j"',
            [],
            m.ram.consistency_failures,
            provenance=TRIVIAL,
        ),
        Check(
            'd1-alpha-over-k-beta',
            "v(theta' - (u*beta + c_l)) and the induced cut",
            '§5.2 Remark (examplediferamificidela), "d_1(α, K(β)) = 0^- and d_1(β, K(α)) = −1^-"',
            {'values': [ctx.pi(-1) / p ** (k + 1) for k in ks], 'cut': '0^-'},
            lambda: {'values': list(m.d1_over_beta().values), 'cut': m.d1_over_beta().cut},
        ),
        Check(
            'd1-beta-over-k-alpha',
            "v(theta' - (alpha + u t^-1 d_l)) and the induced cut",
            '§5.2 Remark (examplediferamificidela), "d_1(α, K(β)) = 0^- and d_1(β, K(α)) = −1^-"',
            {'values': [-one + m.r_inv(k + 1, -1) for k in ks], 'cut': '-1^-'},
            lambda: {'values': list(m.d1_over_alpha().values), 'cut': m.d1_over_alpha().cut},
        ),
        Check(
            'ideal-h1',
            'I_H for H = <sigma1> from min S(theta\', H) - D_1(theta\', K(beta))',
            '§6.2 Cor., "I_{H_1} = M_L"',
            {'segment': 'AboveOpen(0)', 'status': 'equality', 'sound': True},
            lambda: m.ideal_summary(m.ram.h1),
        ),
        Check(
            'ideal-h2',
            'I_H for H = <sigma2> from min S(theta\', H) - D_1(theta\', K(alpha))',
            '§6.2 Cor., "I_{H_2} = {b ∈ L | vb > 1}"',
            {'segment': 'AboveOpen(1)', 'status': 'equality', 'sound': True},
            lambda: m.ideal_summary(m.ram.h2),
        ),
        Check(
            'ideal-witnesses',
            'the same ideals from sampled values v(sigma b - b) - v(b)',
            '§1, "I_σ = {c ∈ L | vc ≥ v((σb − b)/b) for some b ∈ L^*}"',
            {'sigma1': 'AboveOpen(0)', 'sigma2': 'AboveOpen(1)'},
            m.witnessed_ideals,
            provenance=DERIVED,
        ),
        Check(
            'hc-condition',
            'sampled (HC) for both cyclic factors',
            '§6.1, "(H, θ) satisfies (HC) if for every a ∈ K_H and every σ ∈ H"',
            {'sigma1': {'ok': True, 'strict': True}, 'sigma2': {'ok': True, 'strict': True}},
            lambda: {
                'sigma1': m.ram.hc(m.ram.h1, [m.over_beta(k) for k in ks]),
                'sigma2': m.ram.hc(m.ram.h2, [m.over_alpha(k) for k in ks]),
            },
            provenance=DERIVED,
        ),
        Check(
            'ram-comparison',
            'distinct ideals over all nontrivial subgroups against the depth',
            '§6.2 Cor., "depth(E) < #Ram(E)"',
            {
                'ram': ['AboveOpen(1)', 'AboveOpen(0)'],
                'count': 2,
                'bound': 'at-least',
                'depth': 1,
                's_theta': 1,
                'within_maximal_ideal': {'AboveOpen(1)': True, 'AboveOpen(0)': True},
                'summary': '#Ram >= 2 > 1 = depth',
            },
            m.comparison,
        ),
    ]
    logger.debug("Built %s with p=%d, levels=%d", SCENARIO_ID, p, m.levels)
    return Scenario(
        id=SCENARIO_ID,
        title='Compositum with more ramification ideals than its depth',
        prime=p,
        base_field=m.field,
        context=ctx,
        recipes=m.recipes(),
        checks=checks,
        notes=[
            'the depth 1 of L/K is carried over from the monster scenario',
            'subgroups other than <sigma1>, <sigma2> only get lower-bound segments',
        ],
    )
