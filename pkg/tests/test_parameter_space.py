"""Parameter constants, rearrangements, feasibility and bounds.

The reference values below are the closed-form statements the checks must
reproduce; they are typed in here independently of the module.
"""
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from mfdirac.parameter_space import (
    BOUND_CASES,
    DISPLAYS,
    BoundInput,
    ConditionViolated,
    FeasibilityError,
    MissingInput,
    ParameterSet,
    SideRelationError,
    bound_value,
    constants,
    crosscheck_closed_forms,
    displays_for,
    feasible_region,
    friedrich_minimum,
    friedrich_polynomial,
    hijazi_parameters,
    negative_definite,
    quadratic_form,
)
from mfdirac.scalars import Gq


def _deg(case_id):
    return max(int(c) for c in case_id.split("-")[0])


# closed-form rearrangements ------------------------------------------------

@pytest.mark.parametrize("case_id", sorted({d.case_id for d in DISPLAYS}))
def test_displays_match_raw_constants(case_id):
    for n in range(max(2, _deg(case_id)), 8):
        for res in crosscheck_closed_forms(case_id, n, samples=25, seed=1):
            if res.erratum:
                assert res.erratum_confirmed, (res.display_id, n)
            else:
                assert res.passed, (res.display_id, n)


def test_errata_are_exactly_three_displays_plus_variant():
    errata = sorted(d.display_id for d in displays_for("all") if d.erratum)
    assert errata == ["2C-C2", "3C-BOUND-C2", "4-NOGO-C2-BAR"]
    assert all(not d.erratum for d in displays_for("all", include_errata=False))


@settings(max_examples=20, deadline=None)
@given(n=st.integers(3, 12), seed=st.integers(0, 10 ** 6))
def test_two_form_polar_form(n, seed):
    # c2 = 2|e|^2 + (8 - 2n)|e|^2 cos^2(psi) at k1 = Re(e), k2 = 4k1 - 2 conj(e)
    rng = random.Random(seed)
    e = Gq(F(rng.randint(-9, 9), rng.randint(1, 9)), F(rng.randint(-9, 9), rng.randint(1, 9)))
    P = ParameterSet(n=n, case_id="2-form", e=e, k1=Gq(e.real), k2=4 * Gq(e.real) - 2 * e.conjugate())
    c2 = constants("2-form", P)["c2"]
    assert c2 == 2 * e.abs2() + (8 - 2 * n) * e.real * e.real


@settings(max_examples=20, deadline=None)
@given(n=st.integers(3, 12), a=st.fractions(-5, 5, max_denominator=7), b=st.fractions(-5, 5, max_denominator=7))
def test_closed_three_form_bound_constant(n, a, b):
    # with k1 = -i Im e, k2 = 6i Im e + 3 Re e the constant is -2(n-1)(Im e)^2
    e = Gq(a, b)
    P = ParameterSet(n=n, case_id="3-form", e=e, k1=Gq(0, -b), k2=Gq(3 * a, 6 * b))
    assert constants("3-form", P)["c2"] == -2 * (n - 1) * Gq(b) * Gq(b)


# feasibility -----------------------------------------------------------------

@pytest.mark.parametrize("n", range(2, 13))
def test_two_form_harmonic_kernel(n):
    f = feasible_region("2-form", n, "harmonic-kernel")
    if n in (4,):
        assert not f.feasible  # no phase dependence, nonzero constant
        return
    value = F(9 - n, 8 - 2 * n)
    assert f.feasible == (0 <= value <= 1) == (n >= 9)
    assert f.matches_printed
    if n >= 9:
        assert f.region == (value, value)
        assert F(f.witness_squares["im_e_sq"]) == value
    if n == 10:
        assert value == F(1, 12)


@pytest.mark.parametrize("n", range(2, 13))
def test_three_form_harmonic_kernel(n):
    f = feasible_region("3-form", n, "harmonic-kernel")
    assert f.feasible == (n >= 8)
    assert f.matches_printed
    if n >= 7:
        assert f.region[0] * (n - 6) == 2


@pytest.mark.parametrize("n", range(2, 11))
def test_closed_phase_bounds_have_witnesses(n):
    two = feasible_region("2-form", n, "closed-c2-nonneg")
    assert two.feasible and two.matches_printed
    assert two.region[1] == F(n + 1, 2 * n)  # cos^2 bound
    three = feasible_region("3-form", n, "closed-c2-nonneg")
    assert three.feasible and three.matches_printed
    assert three.region[1] == F(4, n + 3)  # sin^2 bound
    for f in (two, three):
        assert f.witness is not None


@pytest.mark.parametrize("n", range(4, 11))
def test_four_form_no_go(n):
    f = feasible_region("4-form", n, "no-go")
    assert not f.feasible and f.matches_printed
    assert "negative definite" in f.certificate


def test_feasibility_rejects_unknown_goal():
    with pytest.raises((FeasibilityError, KeyError, ValueError)):
        feasible_region("2-form", 5, "sideways")


def test_quadratic_form_and_definiteness():
    m = quadratic_form(lambda v: 3 * v[0] * v[0] - 2 * v[0] * v[1] + 5 * v[1] * v[1], 2)
    assert m == [[3, -1], [-1, 5]]
    assert negative_definite([[-2, 1], [1, -2]])
    assert not negative_definite([[-2, 3], [3, -2]])
    with pytest.raises(Exception):
        quadratic_form(lambda v: v[0] ** 3, 1)


# bounds ----------------------------------------------------------------------

@pytest.mark.parametrize("n", range(2, 9))
def test_friedrich_polynomial_minimum(n):
    s, v = friedrich_minimum(n)
    assert s == F(1, n) and v == F(n - 1, n)
    for t in (F(0), F(1, 2), F(2, n), F(1)):
        if t != s:
            assert friedrich_polynomial(t, n) > v


def test_friedrich_value():
    P = ParameterSet(n=4, case_id="friedrich")
    assert bound_value("friedrich", P, BoundInput(inf_R=12)).value == 4


def test_prop0_value_and_side_relation():
    e = Gq(0, F(1, 2))
    P = ParameterSet(n=3, case_id="0-form", e=e, k=e)
    assert bound_value("prop0", P, BoundInput(inf_R=6, f2=1)).value == 1
    with pytest.raises(SideRelationError):
        bound_value("prop0", P.with_values(k=Gq(1)), BoundInput(inf_R=6, f2=1))


def test_sign_condition_is_reported():
    e = Gq(2, 1)
    P = ParameterSet(n=2, case_id="2-form", e=e, k1=Gq(2), k2=4 * Gq(2) + Gq(0, 2))
    with pytest.raises(ConditionViolated):
        bound_value("prop2", P, BoundInput(inf_R=0, F2=1))


def test_missing_geometric_input():
    P = ParameterSet(n=3, case_id="0-form", e=Gq(1), k=Gq(1))
    with pytest.raises(MissingInput):
        bound_value("prop0", P, BoundInput(inf_R=1))


@pytest.mark.parametrize("n", range(3, 7))
def test_hijazi_parameters_reduce_to_friedrich(n):
    P = hijazi_parameters(n)
    R = n * (n - 1)
    cor = bound_value("weighted01", P, BoundInput(inf_R=R, extra={"lap_h_over_h": 0, "dlogh2": 0})).value
    fr = bound_value("friedrich", ParameterSet(n=n, case_id="friedrich"), BoundInput(inf_R=R)).value
    hij = bound_value("hijazi", P, BoundInput(extra={"mu1": R})).value
    assert cor == fr == hij == F(n * n, 4)


def test_every_bound_has_an_anchor():
    from mfdirac.parameter_space import BOUND_ANCHORS
    assert set(BOUND_ANCHORS) == set(BOUND_CASES)
