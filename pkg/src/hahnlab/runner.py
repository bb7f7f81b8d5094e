"""
Scenario registry and check execution with parallel scenario runs.
"""

import concurrent.futures
import importlib
import logging
import threading
import time
from dataclasses import asdict, dataclass, field
from difflib import get_close_matches
from typing import Any, Callable, Dict, List, Optional

from hahnlab.coefficients import FieldSpec
from hahnlab.cuts import UnsettledCut
from hahnlab.exponents import BasisContext, RefinementBudgetExceeded
from hahnlab.parser import Recipe
from hahnlab.series import DEFAULT_TERM_BUDGET, TermBudgetExceeded

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

PASS = 'PASS'
FAIL = 'FAIL'
INCONCLUSIVE = 'INCONCLUSIVE'

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 3

# Provenance of an expected value
SOURCE = 'source'
DERIVED = 'derived'
TRIVIAL = 'trivial'

# Scenario id to module name mapping
SCENARIO_MODULE_MAP = {
    'example-5-1-1': 'dependent_pair',
    'monster-5-2': 'monster',
    'ramif-6-2': 'compositum',
    'asd-6-3': 'heisenberg',
}

_lock = threading.Lock()


@dataclass
class RunConfig:
    """Knobs shared by every scenario; all windows derive from these."""

    prime: int = 3
    levels: int = 5
    budget: int = 256
    term_budget: int = DEFAULT_TERM_BUDGET
    window_extra: int = 2
    workers: int = 4

    def as_dict(self) -> Dict[str, int]:
        return asdict(self)

    def validate(self) -> None:
        """
        Raises:
            ValueError: On a non-positive knob
        """
        for name, value in self.as_dict().items():
            if value < 1:
                raise ValueError(f"Config value '{name}' must be positive, got {value}")


@dataclass
class Check:
    """
    One verifiable claim of a scenario.

    ``compute`` runs lazily inside the runner; ``compare`` defaults to
    equality of the normalized values.
    """

    id: str
    description: str
    paper_ref: str
    expected: Any
    compute: Callable[[], Any]
    provenance: str = SOURCE
    compare: Optional[Callable[[Any, Any], bool]] = None


@dataclass
class Scenario:
    id: str
    title: str
    prime: int
    base_field: FieldSpec
    context: BasisContext
    recipes: Dict[str, Recipe] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)


def normalize(value: Any) -> Any:
    """Turn computed values into JSON-ready data; exponents and cuts print exactly."""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, dict):
        return {str(k): normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(normalize(v) for v in value)
    return str(value)


def get_available_scenarios() -> List[str]:
    """
    Get list of scenarios with an importable builder.

    Returns:
        Sorted scenario ids
    """
    return sorted(s for s in SCENARIO_MODULE_MAP if get_scenario_function(s))


def get_scenario_function(scenario_id: str) -> Optional[Callable[[RunConfig], Scenario]]:
    """
    Dynamically import and return the builder for a scenario.

    Args:
        scenario_id: Registry id such as ``monster-5-2``

    Returns:
        Builder function or None if not found
    """
    module_name = SCENARIO_MODULE_MAP.get(scenario_id)
    if module_name is None:
        return None
    function_name = f"build_{module_name}_scenario"
    try:
        module = importlib.import_module(f'hahnlab.scenarios.{module_name}')
        return getattr(module, function_name)
    except (ImportError, AttributeError) as e:
        logger.debug("No builder for scenario %s: %s", scenario_id, e)
        return None


def validate_scenarios(scenario_ids: List[str]) -> None:
    """
    Validate that all requested scenario ids are registered.

    Raises:
        ValueError: If any id is unknown
    """
    available = get_available_scenarios()
    unknown = [s for s in scenario_ids if s.lower() not in available]
    if unknown:
        msgs = []
        for s in unknown:
            matches = get_close_matches(s.lower(), available, n=3, cutoff=0.5)
            msg = f"Unknown scenario '{s}'"
            if matches:
                msg += f". Did you mean: {', '.join(matches)}?"
            msgs.append(msg)
        raise ValueError('\n'.join(msgs) + '\n\nUse list-scenarios to see all available scenarios.')


def build_scenario(scenario_id: str, config: Optional[RunConfig] = None) -> Scenario:
    """
    Raises:
        ValueError: Unknown scenario id or an unsupported prime
    """
    validate_scenarios([scenario_id])
    config = config or RunConfig()
    config.validate()
    builder = get_scenario_function(scenario_id.lower())
    return builder(config)


def run_check(check: Check) -> Dict[str, Any]:
    """Execute one check; budget exhaustion and unsettled cuts are INCONCLUSIVE, any other error FAIL."""
    expected = normalize(check.expected)
    try:
        raw = check.compute()
        computed = normalize(raw)
        if check.compare is not None:
            ok = check.compare(check.expected, raw)
        else:
            ok = expected == computed
        status = PASS if ok else FAIL
    except (TermBudgetExceeded, RefinementBudgetExceeded) as e:
        computed = f"budget exhausted: {e}"
        status = INCONCLUSIVE
    except UnsettledCut as e:
        computed = f"insufficient evidence: {e}"
        status = INCONCLUSIVE
    except Exception as e:
        logger.debug("Check %s raised %s", check.id, e, exc_info=True)
        computed = f"error: {e}"
        status = FAIL
    return {
        'id': check.id,
        'description': check.description,
        'paper_ref': check.paper_ref,
        'provenance': check.provenance,
        'expected': expected,
        'computed': computed,
        'status': status,
    }


def run_scenario(scenario_id: str, config: Optional[RunConfig] = None) -> Dict[str, Any]:
    """
    Build a scenario and run all of its checks in declaration order.

    Args:
        scenario_id: Registry id
        config: Run configuration (defaults when None)

    Returns:
        Report dict with schema, scenario, prime, config, notes and checks

    Raises:
        ValueError: Unknown scenario id or an unsupported prime
    """
    config = config or RunConfig()
    scenario = build_scenario(scenario_id, config)
    logger.debug("Running scenario %s with %d checks", scenario.id, len(scenario.checks))
    start = time.time()
    checks = [run_check(c) for c in scenario.checks]
    logger.debug("Scenario %s finished in %.2fs", scenario.id, time.time() - start)
    return {
        'schema': SCHEMA_VERSION,
        'scenario': scenario.id,
        'title': scenario.title,
        'prime': scenario.prime,
        'field': repr(scenario.base_field),
        'config': config.as_dict(),
        'notes': list(scenario.notes),
        'checks': checks,
    }


def run_all(
    scenario_ids: Optional[List[str]] = None,
    config: Optional[RunConfig] = None,
    progress_callback: Optional[Callable[[str, str], None]] = None,
) -> List[Dict[str, Any]]:
    """
    Run several scenarios in parallel.

    Args:
        scenario_ids: Ids to run (None for all)
        config: Shared run configuration
        progress_callback: Optional callback(scenario_id, status)

    Returns:
        Reports ordered by scenario id

    Raises:
        ValueError: Unknown scenario id
    """
    config = config or RunConfig()
    ids = sorted(s.lower() for s in scenario_ids) if scenario_ids else get_available_scenarios()
    validate_scenarios(ids)
    reports: Dict[str, Dict[str, Any]] = {}

    def on_complete(scenario_id: str, report: Dict[str, Any]) -> None:
        with _lock:
            reports[scenario_id] = report
            if progress_callback:
                counts = summarize(report)
                progress_callback(scenario_id, "Done: " + ", ".join(f"{n} {s}" for s, n in counts.items()))

    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, min(config.workers, len(ids)))) as executor:
        futures_map = {executor.submit(run_scenario, s, config): s for s in ids}
        for future in concurrent.futures.as_completed(futures_map):
            on_complete(futures_map[future], future.result())
    return [reports[s] for s in ids]


def summarize(report: Dict[str, Any]) -> Dict[str, int]:
    counts = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0}
    for check in report['checks']:
        counts[check['status']] += 1
    return counts


def exit_code(reports: List[Dict[str, Any]]) -> int:
    """0 iff every check passed; 1 on any FAIL; 3 when the worst is INCONCLUSIVE."""
    statuses = {c['status'] for r in reports for c in r['checks']}
    if FAIL in statuses:
        return EXIT_FAIL
    if INCONCLUSIVE in statuses:
        return EXIT_INCONCLUSIVE
    return EXIT_OK
