import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mfdirac.exterior_forms import (
    DimensionMismatch,
    MultiForm,
    adjoint_by_basis,
    adjoint_inner,
    antisymmetrize,
    basis_form,
    close_gradient,
    coclose_gradient,
    d_from_gradient,
    d_sorted,
    delta_from_gradient,
    form_inner,
    form_sq,
    hodge_star,
    inner_derivation,
    interior_vector,
    levi_civita,
    sorted_components,
    star_sorted,
    vee,
    vee_by_basis,
    wedge,
    wedge_sorted,
)
from mfdirac.scalars import Gq, random_rational


def exact_form(n, p, rng, bound=5):
    if p == 0:
        return MultiForm(n, {0: np.array(Gq(random_rational(rng, bound)), dtype=object)})
    t = np.array([Gq(random_rational(rng, bound)) for _ in range(n ** p)], dtype=object).reshape((n,) * p)
    return MultiForm(n, {p: antisymmetrize(t) if p > 1 else t})


def same(a: MultiForm, b: MultiForm):
    return a.equals(b)


dims = st.integers(2, 5)
seeds = st.integers(0, 10 ** 6)
PROP = settings(max_examples=25, deadline=None)


def test_basis_normalization():
    e12 = basis_form(3, (0, 1))
    assert e12.array(2)[0, 1] == 1 and e12.array(2)[1, 0] == -1
    assert form_inner(e12, e12) == 1
    assert form_sq(e12) == 2


def test_shape_validation():
    with pytest.raises(DimensionMismatch):
        MultiForm(3, {4: np.zeros((3,) * 4)})
    with pytest.raises(DimensionMismatch):
        MultiForm(3, {2: np.zeros((3, 2))})


@PROP
@given(n=dims, p=st.integers(0, 5), q=st.integers(0, 5), seed=seeds)
def test_wedge_graded_commutative(n, p, q, seed):
    if p + q > n:
        return
    rng = random.Random(seed)
    a, b = exact_form(n, p, rng), exact_form(n, q, rng)
    assert same(wedge(a, b), wedge(b, a) * Gq((-1) ** (p * q)))


@PROP
@given(n=dims, seed=seeds)
def test_wedge_associative(n, seed):
    rng = random.Random(seed)
    a, b, c = exact_form(n, 1, rng), exact_form(n, 1, rng), exact_form(n, n - 2, rng)
    assert same(wedge(wedge(a, b), c), wedge(a, wedge(b, c)))


@PROP
@given(n=dims, p=st.integers(1, 4), q=st.integers(0, 4), seed=seeds)
def test_interior_is_antiderivation(n, p, q, seed):
    if p + q > n:
        return
    rng = random.Random(seed)
    a, b = exact_form(n, p, rng), exact_form(n, q, rng)
    x = np.array([Gq(random_rational(rng, 4)) for _ in range(n)], dtype=object)
    lhs = interior_vector(x, wedge(a, b))
    rhs = wedge(interior_vector(x, a), b) + wedge(a, interior_vector(x, b)) * Gq((-1) ** p)
    assert same(lhs, rhs)


@PROP
@given(n=dims, l=st.integers(1, 4), p=st.integers(1, 5), seed=seeds)
def test_adjoint_inner_closed_form(n, l, p, seed):
    if l > n or p > n:
        return
    rng = random.Random(seed)
    chi, om = exact_form(n, l, rng), exact_form(n, p, rng)
    assert same(adjoint_inner(chi, om), adjoint_by_basis(chi, om))


@PROP
@given(n=dims, p=st.integers(0, 4), q=st.integers(0, 5), seed=seeds)
def test_vee_closed_form(n, p, q, seed):
    if p > q or q > n:
        return
    rng = random.Random(seed)
    om, chi = exact_form(n, p, rng), exact_form(n, q, rng)
    assert same(vee(om, chi), vee_by_basis(om, chi))


@PROP
@given(n=dims, p=st.integers(0, 5), seed=seeds)
def test_hodge_star_squares_to_sign(n, p, seed):
    if p > n:
        return
    om = exact_form(n, p, random.Random(seed))
    assert same(hodge_star(hodge_star(om)), om * Gq((-1) ** (p * (n - p))))


@PROP
@given(n=dims, p=st.integers(0, 5), seed=seeds)
def test_wedge_with_star_is_inner_times_volume(n, p, seed):
    if p > n:
        return
    rng = random.Random(seed)
    a, b = exact_form(n, p, rng), exact_form(n, p, rng)
    vol = wedge(a, hodge_star(b)).array(n)
    top = tuple(range(n))
    assert vol[top] == form_inner(a, b)


@PROP
@given(n=dims, p=st.integers(0, 4), seed=seeds)
def test_form_sq_is_factorial_times_inner(n, p, seed):
    if p > n:
        return
    a = exact_form(n, p, random.Random(seed))
    assert form_sq(a) == form_inner(a, a) * Gq(math.factorial(p))


@PROP
@given(n=dims, p=st.integers(1, 3), q=st.integers(1, 3), seed=seeds)
def test_sorted_kernels_match_dense(n, p, q, seed):
    if p + q > n:
        return
    rng = random.Random(seed)
    a, b = exact_form(n, p, rng), exact_form(n, q, rng)
    fast = wedge_sorted(sorted_components(a.array(p)), p, sorted_components(b.array(q)), q, n)
    assert fast == sorted_components(wedge(a, b).array(p + q))
    assert star_sorted(sorted_components(a.array(p)), p, n) == sorted_components(hodge_star(a).array(n - p))


def test_inner_derivation_degree_one_is_interior():
    rng = random.Random(3)
    n = 4
    chi, om = exact_form(n, 1, rng), exact_form(n, 3, rng)
    assert same(inner_derivation(chi, om), interior_vector(chi.array(1), om))


def _gradient(n, p, rng):
    return np.array([exact_form(n, p, rng).array(p) for _ in range(n)], dtype=object)


@PROP
@given(n=dims, p=st.integers(1, 3), seed=seeds)
def test_closed_and_coclosed_projections(n, p, seed):
    if p >= n:
        return
    g = _gradient(n, p, random.Random(seed))
    closed = close_gradient(g)
    assert all(not v for v in d_from_gradient(closed).flat)
    both = coclose_gradient(closed)
    assert all(not v for v in np.asarray(delta_from_gradient(both)).flat)
    assert all(not v for v in d_from_gradient(both).flat)
    assert d_sorted(g) == sorted_components(d_from_gradient(g))


def test_levi_civita():
    eps = levi_civita(3)
    assert eps[0, 1, 2] == 1 and eps[1, 0, 2] == -1 and eps[0, 0, 1] == 0
