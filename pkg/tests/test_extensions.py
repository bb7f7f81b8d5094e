from collections import Counter
from fractions import Fraction
from itertools import accumulate

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hahnlab.coefficients import FieldSpec
from hahnlab.cuts import MINUS, cut_from_witnesses, principal
from hahnlab.exponents import BasisContext, ValueLattice
from hahnlab.extensions import (
    NECESSARY_ONLY,
    GeneratorCombo,
    OkutsuCandidate,
    OkutsuLevel,
    as_solve,
    classify_dependence,
    conjugate_set,
    distance,
    distance_witnesses_eval,
    ge_witness_check,
    hasse_schmidt,
    kaplansky_obstructions,
    krasner_omega,
    okutsu_verify,
    poly_eval,
    s_theta,
    taylor_expand,
    tame_multiset_predict,
)
from hahnlab.series import Window, as_operator, from_terms, monomial, zero_series

CTX = BasisContext(3)
F3 = FieldSpec(3, 1)
F9 = FieldSpec(3, 2)


def q(n, d=1):
    return CTX.rational(Fraction(n, d))


def t(e, c=1, field=F3):
    return monomial(c, e, field)


def partial_sum(levels, field=F3):
    """sum_{k=1..levels} t^(-1/3^k), the truncations of the root of AS(x) = t^-1."""
    return from_terms([(q(-1, 3 ** k), 1) for k in range(1, levels + 1)], field, CTX)


@pytest.fixture
def alpha():
    return as_solve(t(q(-1)), label="alpha")


# --- as_solve ---

def test_polar_solution_terms(alpha):
    assert [e for e, _ in alpha.solution.terms(q(-1, 100))] == [q(-1, 3), q(-1, 9), q(-1, 27), q(-1, 81)]
    assert alpha.solution.val() == q(-1, 3)


def test_solution_satisfies_equation_below_window(alpha):
    residual = as_operator(alpha.solution, Window(q(-1, 1000)))
    assert list(residual.terms()) == [(q(-1), F3.one())]


def test_irrational_exponents():
    rhs = t(CTX.pi(-1))
    solution = as_solve(rhs).solution
    bound = -CTX.pi(Fraction(1, 100))
    assert [e for e, _ in solution.terms(bound)] == [-CTX.pi(Fraction(1, 3 ** k)) for k in range(1, 5)]


def test_as_solve_rejects_bad_rhs():
    with pytest.raises(ValueError, match="nonzero"):
        as_solve(zero_series(F3, CTX))
    with pytest.raises(ValueError, match="negative valuation"):
        as_solve(t(q(1)))


# --- conjugates and S_theta ---

def test_s_theta_of_pair_with_independent_constants():
    a = as_solve(t(q(-1), field=F9))
    b = as_solve(t(CTX.pi(-1), field=F9))
    theta = GeneratorCombo(((t(q(0), field=F9), a), (t(q(0), F9.gen(), F9), b)))
    result = s_theta(theta)
    assert result.values == [CTX.zero()]
    assert result.multiset == Counter({CTX.zero(): 8})
    assert theta.degree == 9


def test_s_theta_with_valuation_one_coefficient():
    a = as_solve(t(q(-1)))
    b = as_solve(t(CTX.pi(-1)))
    theta = GeneratorCombo(((t(q(0)), a), (t(q(1)), b)))
    result = s_theta(theta)
    assert result.values == [q(0), q(1)]
    assert result.multiset == Counter({q(0): 6, q(1): 2})
    assert krasner_omega(theta) == q(1)


def test_conjugate_set(alpha):
    theta = GeneratorCombo(((t(q(0)), alpha),))
    conjugates = conjugate_set(theta)
    assert [c.shift for c in conjugates] == [(0,), (1,), (2,)]
    shifted = conjugates[1].series
    assert list(shifted.terms(q(-1, 100)))[:1] == [(q(-1, 3), F3.one())]


def test_conjugates_need_disjointness(alpha):
    theta = GeneratorCombo(((t(q(0)), alpha),), disjoint=False)
    with pytest.raises(ValueError, match="disjoint"):
        conjugate_set(theta)
    with pytest.raises(ValueError):
        krasner_omega(GeneratorCombo(()))


def test_ge_condition():
    assert ge_witness_check(3, [F9.one(), F9.gen()])
    assert not ge_witness_check(3, [F9.one(), F9.element(2)])
    assert ge_witness_check(3, [t(q(0), field=F9), t(q(0), F9.gen(), F9) + t(q(1), field=F9)])
    assert not ge_witness_check(3, [t(q(0)), t(q(0)) + t(q(1))])
    assert not ge_witness_check(3, [t(q(0)), t(q(1))])


# --- distances ---

def test_distance(alpha):
    assert distance(alpha.solution, partial_sum(2)) == q(-1, 27)
    with pytest.raises(ValueError, match="Window too small"):
        distance(alpha.solution, partial_sum(2), Window(q(-1, 3)))


def test_distance_witnesses_of_independent_element(alpha):
    approximants = [(partial_sum(k), 1) for k in range(1, 6)]
    lattices = [ValueLattice([q(1, 3 ** k)]) for k in range(1, 6)]
    result = distance_witnesses_eval(
        alpha.solution, approximants, lattices=lattices, limit_hint=CTX.zero())
    assert result.values == tuple(q(-1, 3 ** (k + 1)) for k in range(1, 6))
    assert result.cut == principal(CTX.zero(), MINUS)
    assert result.outside_lattice == (True,) * 5
    assert classify_dependence(result.cut) == "independent"


def test_lattice_count_must_match(alpha):
    with pytest.raises(ValueError, match="lattices"):
        distance_witnesses_eval(alpha.solution, [(partial_sum(1), 1)], lattices=[])


def test_classify_dependence():
    assert classify_dependence(principal(q(-1), MINUS)) == "dependent"
    assert classify_dependence(principal(CTX.zero(), MINUS)) == "independent"
    assert classify_dependence(cut_from_witnesses([q(-2), q(-1, 2)])) == "undetermined"


# --- Okutsu sequences ---

def test_okutsu_depth_one(alpha):
    level = OkutsuLevel(tuple((partial_sum(k), 1) for k in range(1, 5)), limit_hint=CTX.zero())
    report = okutsu_report(alpha, [level], challenge=[(partial_sum(6), 1)])
    assert report.ok
    assert report.depth == 1
    assert report.kinds == ["limit"]
    assert str(report.cuts[0]) == "0^-"
    assert report.note == NECESSARY_ONLY
    assert any(c.name == "OS0" for c in report.conditions)


def test_okutsu_rejects_bad_degree_chain(alpha):
    level = OkutsuLevel(((partial_sum(1), 3),))
    report = okutsu_report(alpha, [level])
    assert not report.ok
    assert report.violations[0].name == "degree-chain"


def test_okutsu_attained_level_allows_one_approximant(alpha):
    level = OkutsuLevel(((partial_sum(1), 1), (partial_sum(2), 1)), attained=True)
    report = okutsu_report(alpha, [level])
    assert [c.name for c in report.violations] == ["OS1[0]"]


def okutsu_report(alpha, levels, challenge=()):
    return okutsu_verify(OkutsuCandidate(tuple(levels), 3), alpha.solution, challenge)


# --- Kaplansky obstructions ---

def test_kaplansky_obstructions(alpha):
    checks, residue = kaplansky_obstructions(
        alpha.solution, q(-1, 1000), coefficients=[F3.element(2)], budget=200)
    assert {c.name: c.ok for c in checks} == {
        "pure-power": True, "q1-negative": True, "q1-positive": True, "c1=2": True}
    assert residue == [(q(-1), F3.one())]


def test_kaplansky_rejects_trivial_coefficients(alpha):
    with pytest.raises(ValueError):
        kaplansky_obstructions(alpha.solution, q(-1, 10), coefficients=[F3.one()], budget=50)


def test_kaplansky_samples_a_family_of_leading_exponents(alpha):
    checks, _ = kaplansky_obstructions(alpha.solution, q(-1, 10), budget=200, bounds=3)
    by_name = {c.name: c for c in checks}
    assert by_name["q1-negative"].ok and by_name["q1-positive"].ok
    for bound in ("1/3", "1/9", "1/27"):
        assert f"q = -{bound}:" in by_name["q1-negative"].detail
        assert f"q = {bound}:" in by_name["q1-positive"].detail


def test_kaplansky_needs_a_sampled_bound(alpha):
    with pytest.raises(ValueError):
        kaplansky_obstructions(alpha.solution, q(-1, 10), budget=50, bounds=0)


# --- tame predictor ---

def test_tame_multiset():
    d0, d1 = q(0), q(1)
    assert tame_multiset_predict(9, [1, 3, 9], [d0, d1]) == Counter({d0: 6, d1: 2})


def test_tame_multiset_validation():
    with pytest.raises(ValueError, match="start at 1"):
        tame_multiset_predict(9, [3, 9], [q(0)])
    with pytest.raises(ValueError, match="dividing"):
        tame_multiset_predict(12, [1, 4, 6, 12], [q(0), q(1), q(2)])
    with pytest.raises(ValueError, match="deltas"):
        tame_multiset_predict(9, [1, 9], [])


@given(st.lists(st.integers(2, 5), min_size=1, max_size=4))
def test_tame_multiset_cardinality(factors):
    degrees = [1] + list(accumulate(factors, lambda a, b: a * b))
    n = degrees[-1]
    deltas = [q(i) for i in range(len(factors))]
    assert sum(tame_multiset_predict(n, degrees, deltas).values()) == n - 1


# --- Hasse-Schmidt derivatives ---

def test_hasse_schmidt_in_characteristic_three():
    f = {3: F3.one(), 1: F3.one()}
    assert hasse_schmidt(f, 1) == {0: F3.one()}
    assert hasse_schmidt(f, 3) == {0: F3.one()}
    assert hasse_schmidt(f, 4) == {}
    with pytest.raises(ValueError):
        hasse_schmidt(f, -1)


@st.composite
def polynomials(draw):
    degree = draw(st.integers(0, 6))
    coeffs = {n: F9.from_int(draw(st.integers(0, 8))) for n in range(degree + 1)}
    return {n: c for n, c in coeffs.items() if c}


@settings(max_examples=1000)
@given(polynomials(), st.integers(0, 8), st.integers(0, 8))
def test_taylor_identity(f, x_index, h_index):
    x, h = F9.from_int(x_index), F9.from_int(h_index)
    expansion = taylor_expand(f)
    total = F9.zero()
    for s, derivative in enumerate(expansion):
        total = total + poly_eval(derivative, x) * h ** s
    assert total == poly_eval(f, x + h)
