import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest

from mfdirac.geometry_models import (
    OPERATOR_DEGREES,
    BudgetExceeded,
    ChartError,
    SphereSpec,
    TorusSpec,
    anti_self_adjoint_params,
    friedrich_saturation,
    prop0_saturation_on_sphere,
    proposition_spectrum,
    random_constant_form,
    sphere_check,
    sphere_killing_spinor,
    sphere_points,
    spin_connection,
    torus_blocks,
    torus_weighted_bound_check,
    torus_spectrum,
    yamabe_hijazi_check,
)
from mfdirac.parameter_space import ParameterSet, SideRelationError


# torus -----------------------------------------------------------------------

def test_zero_mode_block_for_periodic_structure():
    spec = TorusSpec(2, theta=(0.0, 0.0), radius=1)
    blocks, p = torus_blocks(spec)
    zero = [b for b, q in zip(blocks, p) if not q.any()]
    assert len(zero) == 1 and np.allclose(zero[0], 0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_free_spectrum_is_plus_minus_i_abs_p(n):
    spec = TorusSpec(n, radius=2)
    blocks, p = torus_blocks(spec)
    lam = np.linalg.eigvals(blocks)
    assert blocks.shape[0] == (2 * 2 + 1) ** n
    mod = np.linalg.norm(p, axis=1)
    assert np.allclose(np.sort(lam.imag, axis=1)[:, 0], -mod, atol=1e-12)
    assert np.allclose(np.sort(lam.imag, axis=1)[:, -1], mod, atol=1e-12)
    assert np.abs(lam.real).max() < 1e-12
    # antiperiodic: |p| >= pi sqrt(n)
    assert mod.min() >= math.pi * math.sqrt(n) - 1e-12


def test_zero_form_shifted_spectrum():
    e = 0.7j
    spec = TorusSpec(2, "0-form", ParameterSet(n=2, case_id="0-form", e=e, k=e), radius=2)
    rep = torus_spectrum(spec, "prop0")
    free = torus_spectrum(TorusSpec(2, radius=2)).eigenvalues
    shifted = rep.eigenvalues - e
    assert np.abs(shifted.real).max() < 1e-12
    assert np.allclose(np.sort(shifted.imag), np.sort(free.imag), atol=1e-12)
    assert rep.bound == pytest.approx((1 - 2) * 0.49)
    assert rep.holds()


def test_one_form_example():
    c = 0.8
    A = np.array([c, 0.0])
    e = 0.3 + 0.4j
    P = ParameterSet(n=2, case_id="1-form", e=e, k1=-e.real, k2=0.2 + 1j * e.imag)
    rep = torus_spectrum(TorusSpec(2, "1-form", P, {1: A}, radius=3), "prop1")
    # bound with R = 0, delta A = 0 and A^2 = c^2
    from mfdirac.parameter_space import constants
    c1 = constants("1-form", P)["c1"]
    assert rep.bound == pytest.approx(0.5 * c1.real * c * c)
    assert rep.holds()


def test_horizon_without_flux_is_free_dirac():
    rep = torus_spectrum(TorusSpec(9, "horizon+", radius=1))
    assert rep.eigenvalues.size == 3 ** 9 * 16
    assert np.abs(rep.eigenvalues.real).max() < 1e-12
    assert np.abs(rep.eigenvalues).min() == pytest.approx(3 * math.pi, rel=1e-12)


def test_matrix_budget_and_validation():
    with pytest.raises(BudgetExceeded):
        torus_blocks(TorusSpec(6, radius=4, max_blocks=1000))
    with pytest.raises(ValueError):
        TorusSpec(2, radius=0)
    with pytest.raises(ValueError):
        TorusSpec(3, theta=(0.5, 0.5))


@pytest.mark.parametrize("bound_id", ["prop0", "prop1", "harm2", "prop2", "harm3", "prop3", "prop01", "prop02", "prop03"])
@pytest.mark.parametrize("n", [3, 4])
def test_proposition_spectra_respect_bounds(bound_id, n):
    rep = proposition_spectrum(bound_id, n, radius=2, seed=n)
    assert rep.min_margin >= -1e-9


def test_side_relations_are_enforced():
    P = ParameterSet(n=2, case_id="1-form", e=1 + 1j, k1=0.5, k2=1j)
    with pytest.raises(SideRelationError):
        torus_spectrum(TorusSpec(2, "1-form", P, {1: np.array([1.0, 0.0])}, radius=1), "prop1")


@pytest.mark.parametrize("case_id", [c for c in OPERATOR_DEGREES if OPERATOR_DEGREES[c]])
def test_anti_self_adjoint_parity(case_id):
    """The slash of a p-form is hermitian for p = 0, 1 mod 4 and
    anti-hermitian for p = 2, 3 mod 4; the matching phase of e gives a
    purely imaginary spectrum and the other phase does not."""
    n = 5  # at n = 4 the volume form anticommutes with the momentum and real e stays imaginary once |p| > |e|
    rng = np.random.default_rng(1)
    forms = {p: random_constant_form(n, p, rng) for _, p in OPERATOR_DEGREES[case_id] if p}
    good = anti_self_adjoint_params(case_id, n, rng)
    rep = torus_spectrum(TorusSpec(n, case_id, good, forms, radius=1))
    assert rep.max_real_part < 1e-10
    flipped = ParameterSet(n=n, case_id=case_id, **{k: 1j * complex(good.get(k)) for k, _ in OPERATOR_DEGREES[case_id]})
    assert torus_spectrum(TorusSpec(n, case_id, flipped, forms, radius=1)).max_real_part > 1e-3


def test_report_rows():
    rep = torus_spectrum(TorusSpec(2, radius=1), "friedrich")
    rows = list(rep.rows())
    assert len(rows) == 9 * 2
    case, n, re_l, im_l, bound, margin = rows[0]
    assert case == "dirac" and n == 2 and bound == 0.0
    assert margin == pytest.approx(re_l ** 2 + im_l ** 2)


# sphere ----------------------------------------------------------------------

def test_chart_centre_gives_seed_spinor():
    spec = SphereSpec(3, 1.0)
    eps, _ = sphere_killing_spinor(spec, np.zeros(3))
    assert np.allclose(eps, spec.psi0)


def test_chart_guard():
    spec = SphereSpec(3, 1.0)
    with pytest.raises(ChartError):
        sphere_killing_spinor(spec, np.array([1e4, 0, 0]))
    with pytest.raises(ChartError):
        sphere_killing_spinor(spec, np.array([np.inf, 0, 0]))


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("sign", [1, -1])
def test_killing_spinor_finite_difference_oracle(n, sign):
    """Central differences of the closed form reproduce the analytic
    derivatives, and the covariant derivative assembled from them and the
    spin connection satisfies nabla_a eps = -k Gamma_a eps."""
    spec = SphereSpec(n, 1.3, sign)
    h = 1e-5
    g = spec.algebra.fgammas
    for x in sphere_points(spec, 20, seed=5):
        eps, deps = sphere_killing_spinor(spec, x)
        assert np.vdot(eps, eps).real > 0
        om = 2 * spec.r ** 2 / (spec.r ** 2 + x @ x)
        for j in range(n):
            dx = np.zeros(n)
            dx[j] = h
            fd = (sphere_killing_spinor(spec, x + dx)[0] - sphere_killing_spinor(spec, x - dx)[0]) / (2 * h)
            assert np.allclose(fd, deps[j], atol=1e-8 * (1 + np.abs(deps[j]).max()))
            nab = (fd + spin_connection(spec, x, j) @ eps) / om
            assert np.allclose(nab, -spec.k * (g[j] @ eps), atol=1e-7)


def test_integrability_arithmetic():
    # -R/2 - 2n(n-1)k^2 with R = 6, k = i/2
    n, k = 3, 0.5j
    assert -6 / 2 - 2 * n * (n - 1) * k ** 2 == 0


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("check", ["KILLING", "INT", "INT-RICCI", "CURVATURE", "KILLING-1FORM", "CKY", "CKY-ALL",
                                   "HIER-0", "DIRAC"])
def test_sphere_checks(n, check):
    rep = sphere_check(check, SphereSpec(n, 0.8))
    assert rep.points >= 20 and rep.passed, rep.as_dict()


def test_killing_one_form_finite_difference():
    """Symmetrized covariant derivative of chi_1 built from finite differences."""
    spec = SphereSpec(3, 1.0)
    n, h = 3, 1e-5

    def K(x):
        eps, _ = sphere_killing_spinor(spec, x)
        om = 2 / (1 + x @ x)
        return om * np.array([np.vdot(eps, g @ eps).real for g in spec.algebra.fgammas])

    for x in sphere_points(spec, 20, seed=2):
        dK = np.array([(K(x + h * np.eye(n)[j]) - K(x - h * np.eye(n)[j])) / (2 * h) for j in range(n)])  # [j, i]
        du = -2 * x / (1 + x @ x)
        Kx = K(x)
        gam = (np.einsum("ki,j->kij", np.eye(n), du) + np.einsum("kj,i->kij", np.eye(n), du)
               - np.einsum("ij,k->kij", np.eye(n), du))
        nab = dK - np.einsum("kji,k->ji", gam, Kx)
        assert np.abs(nab + nab.T).max() < 1e-8


def test_unknown_sphere_check():
    with pytest.raises(KeyError):
        sphere_check("NOPE", SphereSpec(2))
    with pytest.raises(ValueError):
        SphereSpec(2, -1.0)


@pytest.mark.parametrize("n,r,lam2", [(4, 1, F(4)), (2, 2, F(1, 4))])
def test_friedrich_saturation_examples(n, r, lam2):
    d = friedrich_saturation(n, r)
    assert d["passed"] and F(d["lambda2"]) == lam2 == F(d["bound"])
    assert d["weaker_s_strictly_smaller"]


@pytest.mark.parametrize("n,r,e,margin", [(3, 1.0, 0.5j, 0.0), (3, 1.0, 0.0j, 0.75), (2, 1.0, 1j, 0.5)])
def test_prop0_sphere_examples(n, r, e, margin):
    d = prop0_saturation_on_sphere(n, r, e)
    assert d["passed"]
    assert d["margin"] == pytest.approx(margin, abs=1e-12)


def test_prop0_needs_imaginary_e():
    with pytest.raises(ValueError):
        prop0_saturation_on_sphere(3, 1.0, 0.5)


@pytest.mark.parametrize("n,mu1,bound", [(4, 12, F(4)), (3, 6, F(9, 4))])
def test_yamabe_hijazi_examples(n, mu1, bound):
    d = yamabe_hijazi_check(n, 1)
    assert d["passed"] and F(d["mu1"]) == mu1 and F(d["hijazi"]) == bound


def test_yamabe_needs_three_dimensions():
    with pytest.raises(ValueError):
        yamabe_hijazi_check(2)


def test_nonconstant_h_on_torus():
    d = torus_weighted_bound_check(3, radius=2)
    assert d["passed"] and d["bound"] <= 0
