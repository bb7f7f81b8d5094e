"""
Helpers shared by the scenario builders.
"""

import logging
from typing import List, Sequence, Tuple

from hahnlab.cuts import Cut, require_settled
from hahnlab.exponents import Exponent
from hahnlab.extensions import ASElement, DistanceWitnesses
from hahnlab.series import HahnSeries, Window, as_operator, format_terms, series_equal_below

logger = logging.getLogger(__name__)

SolveCase = Tuple[str, ASElement, Sequence[Exponent]]


def require_prime(scenario_id: str, p: int, supported: Sequence[int]) -> None:
    """
    Raises:
        ValueError: If the scenario is not set up for characteristic p
    """
    if p not in supported:
        raise ValueError(
            f"Scenario {scenario_id} supports primes {', '.join(str(q) for q in supported)}; got {p}")


def window_bounds(base: Exponent, p: int, depths: Sequence[int]) -> List[Exponent]:
    """Bounds base/p^k, which approach the accumulation point 0 from below for base < 0."""
    return [base / p ** k for k in depths]


def as_solve_failures(cases: Sequence[SolveCase], budget: int) -> List[str]:
    """Windows on which AS(solution) and the right-hand side disagree."""
    failures = []
    for label, element, bounds in cases:
        for bound in bounds:
            image = as_operator(element.solution, Window(bound), budget)
            if not series_equal_below(image, element.rhs, bound, budget):
                failures.append(f"AS({label}) differs from its right-hand side below {bound}")
    logger.debug("Checked %d AS solutions, %d failing window(s)", len(cases), len(failures))
    return failures


def terms_below(s: HahnSeries, bound: Exponent, budget: int) -> str:
    return format_terms(list(s.terms(bound, budget)))


def count_summary(count: int, depth: int, exact: bool) -> str:
    """Render the comparison of #Ram with the depth, e.g. ``#Ram >= 2 > 1 = depth``."""
    relation = '>' if count > depth else ('=' if count == depth else '<')
    return f"#Ram {'=' if exact else '>='} {count} {relation} {depth} = depth"


def settled(found: DistanceWitnesses) -> DistanceWitnesses:
    """
    Raises:
        UnsettledCut: When too few levels were sampled to reach the declared limit
    """
    require_settled(found.cut)
    return found


def settled_cuts(cuts: Sequence[Cut]) -> List[Cut]:
    return [require_settled(c) for c in cuts]
