"""Spinor bilinears and the twisted covariant form hierarchies.

For a spinor with covariant derivative fixed by parallelism,
``d_Y eps = -Sigma_Y eps``, the derivative of every bilinear form chi_p is
known at the point.  Each law is written as LHS[Y, I] - RHS[Y, I] with Y
the derivative direction and I the form indices, then checked exactly.

Two kinds of law are covered per case: the raw law, whose right side mixes
many form operations, and its skew/trace repackaging in conformal
Killing-Yano shape.  At the untwisting parameter values the repackaged law
must collapse to the plain CKY equation.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .exterior_forms import (
    MultiForm,
    adjoint_inner,
    d_from_gradient,
    delta_from_gradient,
    expand_sorted,
    inner_derivation,
    vee,
    wedge,
    zero_array,
)
from .parameter_space import ParameterSet, cj, im, re
from .scalars import Gq, conj, is_zero, max_abs

__all__ = [
    "bilinears",
    "bilinear_gradient",
    "verify_hierarchy",
    "cky_residual",
    "untwisting_holds",
    "HIERARCHY_CASES",
    "HierarchyError",
]


class HierarchyError(ValueError):
    pass


HIERARCHY_CASES = {
    # case: (parameter case, connection terms, untwisting description)
    "HIER-0": ("0-form", (("k", "mul", 0),)),
    "HIER-1": ("1-form", (("k1", "mul", 1), ("k2", "int", 1))),
    "HIER-2": ("2-form", (("k1", "mul", 2), ("k2", "int", 2))),
    "HIER-3": ("3-form", (("k1", "mul", 3), ("k2", "int", 3))),
}


def _ipow(m: int, exact: bool):
    re_, im_ = ((1, 0), (0, 1), (-1, 0), (0, -1))[m % 4]
    return Gq(re_, im_) if exact else complex(re_, im_)


def _apply_monomial(algebra, idx, v, exact):
    cols, ph_exact, ph_float = algebra.monomial(idx)
    ph = ph_exact if exact else ph_float
    return ph * v[list(cols)]


def _ip(a, b):
    return np.sum(conj(a) * b)


def bilinears(epsilon, algebra, *, check_real: bool = True) -> list:
    """chi_0 .. chi_n of a spinor as full antisymmetric arrays.

    ``chi_p[I] = i^[p/2] <eps, Gamma^I eps>`` on ordered basis tuples, which
    is the permutation-averaged definition evaluated on basis vectors.
    """
    exact = epsilon.dtype == object
    n = algebra.n
    out = []
    for p in range(n + 1):
        phase = _ipow(p // 2, exact)
        comps = {}
        for idx in itertools.combinations(range(n), p):
            val = phase * _ip(epsilon, _apply_monomial(algebra, idx, epsilon, exact)) if p else _ip(epsilon, epsilon)
            if check_real:
                imag = val.imag if exact else val.imag
                if (exact and imag != 0) or (not exact and abs(imag) > 1e-9 * (1 + abs(val))):
                    raise HierarchyError(f"bilinear chi_{p}{idx} is not real")
            comps[idx] = (Gq(val.real) if exact else val.real)
        out.append(expand_sorted(n, p, comps, exact))
    return out


def bilinear_gradient(epsilon, d_epsilon, algebra) -> list:
    """``g[p][Y, I] = d_Y chi_p[I]`` from the spinor and its derivatives."""
    exact = epsilon.dtype == object
    n = algebra.n
    out = []
    for p in range(n + 1):
        phase = _ipow(p // 2, exact)
        arr = zero_array(n, p + 1, exact)
        for y in range(n):
            dv = d_epsilon[y]
            comps = {}
            for idx in itertools.combinations(range(n), p):
                a = _apply_monomial(algebra, idx, epsilon, exact)
                b = _apply_monomial(algebra, idx, dv, exact)
                val = phase * (_ip(dv, a) + _ip(epsilon, b))
                comps[idx] = Gq(val.real) if exact else val.real
            arr[y] = expand_sorted(n, p, comps, exact)
        out.append(arr)
    return out


# form operations with the direction Y as a leading axis ------------------

class _Forms:
    """Pure-degree helpers that return zero arrays outside 0..n."""

    def __init__(self, n, exact):
        self.n = n
        self.exact = exact
        self._zero = {}

    def zero(self, p, lead=0):
        key = (p, lead)
        if key not in self._zero:
            self._zero[key] = zero_array(self.n, p + lead, self.exact)
        return self._zero[key]

    def mf(self, p, arr):
        return MultiForm(self.n, {p: arr})

    def ok(self, *degrees):
        return all(0 <= d <= self.n for d in degrees)

    def wedge(self, p, x, q, y):
        if not self.ok(p, q, p + q):
            return self.zero(max(p + q, 0)) if 0 <= p + q <= self.n else None
        r = wedge(self.mf(p, x), self.mf(q, y))
        return r.components.get(p + q, self.zero(p + q))

    def interior_form(self, l, x, p, y):
        """i_x y for an l-form x (l >= 1) and a p-form y (p >= 1)."""
        r = p + l - 2
        if not self.ok(l, p, r) or p == 0:
            return self.zero(r) if 0 <= r <= self.n else None
        out = inner_derivation(self.mf(l, x), self.mf(p, y))
        return out.components.get(r, self.zero(r))

    def adjoint(self, l, x, p, y):
        r = p - l + 2
        if not self.ok(l, p, r) or r < 1:
            return self.zero(r) if 0 <= r <= self.n else None
        out = adjoint_inner(self.mf(l, x), self.mf(p, y))
        return out.components.get(r, self.zero(r))

    def vee(self, p, x, q, y):
        r = q - p
        if not self.ok(p, q, r):
            return self.zero(r) if 0 <= r <= self.n else None
        out = vee(self.mf(p, x), self.mf(q, y))
        return out.components.get(r, self.zero(r))

    def i_y(self, p, x):
        """[Y, I] array of i_{e_Y} x for a (p+1)-form x."""
        return x

    def alpha_wedge(self, q, x):
        """[Y, I] array of e^Y ^ x for a q-form x."""
        n = self.n
        rows = []
        for y in range(n):
            e = zero_array(n, 1, self.exact)
            e[y] = Gq(1) if self.exact else 1.0
            rows.append(self.wedge(1, e, q, x))
        return np.array(rows, dtype=object if self.exact else complex)


def _per_y(fn, n, exact):
    rows = [fn(y) for y in range(n)]
    if any(r is None for r in rows):
        return None
    return np.array(rows, dtype=object if exact else complex)


def _a(p, q, exact):
    """a_{p,q} = i^([p/2] - [q/2])."""
    return _ipow(p // 2 - q // 2, exact)


def _sign(k):
    return 1 if k % 2 == 0 else -1


# laws -------------------------------------------------------------------

def _terms_hier0(ctx, P, p):
    (k,) = P.require("k")
    f = ctx.jet.f
    ex = ctx.exact
    lhs_extra = []
    rhs = []
    chi = ctx.chi
    if p + 1 <= ctx.n:
        rhs.append((-_a(p, p + 1, ex) * (cj(k) + _sign(p) * k) * f, ctx.F.i_y(p, chi[p + 1])))
    if p >= 1:
        rhs.append((-_a(p, p - 1, ex) * (cj(k) + _sign(p - 1) * k) * f, ctx.F.alpha_wedge(p - 1, chi[p - 1])))
    cky = []
    return lhs_extra, rhs, cky


def _twist_scalar_hier1(P):
    k1, k2 = P.require("k1", "k2")
    return 2 * re(2 * k1 + k2)


def _terms_hier1(ctx, P, p, law):
    k1, k2 = P.require("k1", "k2")
    F, chi, n = ctx.F, ctx.chi, ctx.n
    A = ctx.form(1)
    t = _twist_scalar_hier1(P)
    lhs = [(t, np.multiply.outer(A, chi[p]))]
    rhs = []
    if law == "raw":
        if p + 2 <= n:
            iA = F.interior_form(1, A, p + 2, chi[p + 2])
            rhs.append((-2 * im(k1), F.i_y(p, iA)))
        if p + 1 <= n:
            rhs.append((2 * re(k1), F.i_y(p, F.wedge(1, A, p, chi[p]))))
        if p >= 1:
            rhs.append((2 * re(k1), F.alpha_wedge(p - 1, F.interior_form(1, A, p, chi[p]))))
        if p >= 2:
            rhs.append((2 * im(k1), F.alpha_wedge(p - 1, F.wedge(1, A, p - 2, chi[p - 2]))))
    else:
        if p + 1 <= n:
            inner = ctx.dchi(p) + F.wedge(1, A, p, chi[p]) * t
            rhs.append((ctx.q(1, p + 1), F.i_y(p, inner)))
        if p >= 1:
            inner = ctx.deltachi(p) - F.interior_form(1, A, p, chi[p]) * t
            rhs.append((-ctx.q(1, n - p + 1), F.alpha_wedge(p - 1, inner)))
    return lhs, rhs


def _B2(P, q):
    k1, k2 = P.require("k1", "k2")
    return cj(k2) - 4 * cj(k1) + _sign(q) * (k2 - 4 * k1)


def _K1(P, q):
    (k1,) = P.require("k1")
    return cj(k1) + _sign(q) * k1


def _lhs_hier2(ctx, P, p):
    F, chi, n, ex = ctx.F, ctx.chi, ctx.n, ctx.exact
    Fv = ctx.form(2)
    lhs = []
    if p + 1 <= n:
        # i_{i_Y F} chi_{p+1}
        arr = np.tensordot(Fv, chi[p + 1], axes=([1], [0]))
        lhs.append((_a(p, p + 1, ex) * _B2(P, p), arr))
    if p >= 1:
        arr = _per_y(lambda y: F.wedge(1, Fv[y], p - 1, chi[p - 1]), n, ex)
        lhs.append((_a(p, p - 1, ex) * _B2(P, p - 1), arr))
    return lhs


def _terms_hier2(ctx, P, p, law):
    F, chi, n, ex = ctx.F, ctx.chi, ctx.n, ctx.exact
    Fv = ctx.form(2)
    lhs = _lhs_hier2(ctx, P, p)
    rhs = []
    a = lambda q: _a(p, q, ex)
    if law == "raw":
        if p + 3 <= n:
            rhs.append((2 * a(p + 3) * _K1(P, p - 1), F.i_y(p, F.vee(2, Fv, p + 3, chi[p + 3]))))
        if p + 1 <= n:
            rhs.append((2 * a(p + 1) * _K1(P, p), F.i_y(p, F.interior_form(2, Fv, p + 1, chi[p + 1]))))
        if p >= 1 and p + 1 <= n:
            rhs.append((-2 * a(p - 1) * _K1(P, p - 1), F.i_y(p, F.wedge(2, Fv, p - 1, chi[p - 1]))))
        if p >= 1 and p + 1 <= n:
            rhs.append((2 * a(p + 1) * _K1(P, p), F.alpha_wedge(p - 1, F.vee(2, Fv, p + 1, chi[p + 1]))))
        if p >= 1 and p - 1 >= 1:
            rhs.append((2 * a(p - 1) * _K1(P, p - 1), F.alpha_wedge(p - 1, F.interior_form(2, Fv, p - 1, chi[p - 1]))))
        if p >= 3:
            rhs.append((-2 * a(p - 3) * _K1(P, p), F.alpha_wedge(p - 1, F.wedge(2, Fv, p - 3, chi[p - 3]))))
    else:
        if p + 1 <= n:
            inner = ctx.dchi(p)
            if p + 1 <= n:
                inner = inner - F.interior_form(2, Fv, p + 1, chi[p + 1]) * (a(p + 1) * _B2(P, p))
            if p >= 1:
                inner = inner + F.wedge(2, Fv, p - 1, chi[p - 1]) * (2 * a(p - 1) * _B2(P, p - 1))
            rhs.append((ctx.q(1, p + 1), F.i_y(p, inner)))
        if p >= 1:
            inner = ctx.deltachi(p)
            if p + 1 <= n:
                inner = inner + F.vee(2, Fv, p + 1, chi[p + 1]) * (2 * a(p + 1) * _B2(P, p))
            if p - 1 >= 1:
                inner = inner + F.interior_form(2, Fv, p - 1, chi[p - 1]) * (a(p - 1) * _B2(P, p - 1))
            rhs.append((-ctx.q(1, n - p + 1), F.alpha_wedge(p - 1, inner)))
    return lhs, rhs


def _lhs_hier3(ctx, P, p):
    k1, k2 = P.require("k1", "k2")
    F, chi, n, ex = ctx.F, ctx.chi, ctx.n, ctx.exact
    Hv = ctx.form(3)
    s = k2 + 6 * k1
    lhs = []
    if p + 2 <= n:
        arr = _per_y(lambda y: F.vee(2, Hv[y], p + 2, chi[p + 2]), n, ex)
        lhs.append((4 * im(s), arr))
    if p >= 1:
        arr = _per_y(lambda y: F.interior_form(2, Hv[y], p, chi[p]), n, ex)
        lhs.append((-4 * re(s), arr))
    if p >= 2:
        arr = _per_y(lambda y: F.wedge(2, Hv[y], p - 2, chi[p - 2]), n, ex)
        lhs.append((4 * im(s), arr))
    return lhs


def _terms_hier3(ctx, P, p, law):
    k1, k2 = P.require("k1", "k2")
    F, chi, n = ctx.F, ctx.chi, ctx.n
    Hv = ctx.form(3)
    s = k2 + 6 * k1
    lhs = _lhs_hier3(ctx, P, p)
    rhs = []
    if law == "raw":
        if p + 4 <= n:
            rhs.append((12 * re(k1), F.i_y(p, F.vee(3, Hv, p + 4, chi[p + 4]))))
        if p + 2 <= n:
            rhs.append((12 * im(k1), F.i_y(p, F.adjoint(3, Hv, p + 2, chi[p + 2]))))
        if 1 <= p and p + 1 <= n:
            rhs.append((12 * re(k1), F.i_y(p, F.interior_form(3, Hv, p, chi[p]))))
        if p >= 2 and p + 1 <= n:
            rhs.append((12 * im(k1), F.i_y(p, F.wedge(3, Hv, p - 2, chi[p - 2]))))
        if p >= 1 and p + 2 <= n:
            rhs.append((12 * im(k1), F.alpha_wedge(p - 1, F.vee(3, Hv, p + 2, chi[p + 2]))))
        if p >= 2:
            rhs.append((-12 * re(k1), F.alpha_wedge(p - 1, F.adjoint(3, Hv, p, chi[p]))))
        if p >= 3:
            rhs.append((12 * im(k1), F.alpha_wedge(p - 1, F.interior_form(3, Hv, p - 2, chi[p - 2]))))
        if p >= 4:
            rhs.append((-12 * re(k1), F.alpha_wedge(p - 1, F.wedge(3, Hv, p - 4, chi[p - 4]))))
    else:
        if p + 1 <= n:
            inner = ctx.dchi(p)
            if p + 2 <= n:
                inner = inner + F.adjoint(3, Hv, p + 2, chi[p + 2]) * (4 * im(s))
            if p >= 1:
                inner = inner + F.interior_form(3, Hv, p, chi[p]) * (8 * re(s))
            if p >= 2:
                inner = inner + F.wedge(3, Hv, p - 2, chi[p - 2]) * (12 * im(s))
            rhs.append((ctx.q(1, p + 1), F.i_y(p, inner)))
        if p >= 1:
            inner = ctx.deltachi(p)
            if p + 2 <= n:
                inner = inner - F.vee(3, Hv, p + 2, chi[p + 2]) * (12 * im(s))
            if p >= 2:
                inner = inner + F.adjoint(3, Hv, p, chi[p]) * (8 * re(s))
            if p >= 3:
                inner = inner - F.interior_form(3, Hv, p - 2, chi[p - 2]) * (4 * im(s))
            rhs.append((-ctx.q(1, n - p + 1), F.alpha_wedge(p - 1, inner)))
    return lhs, rhs


class _Context:
    def __init__(self, jet, grad):
        self.jet = jet
        self.n = jet.n
        self.exact = jet.exact
        self.F = _Forms(self.n, self.exact)
        self.chi = bilinears(jet.epsilon, jet.algebra)
        self.grad = grad

    def q(self, a, b):
        return self.jet.q(a, b)

    def form(self, p):
        return self.jet.value(p)

    def dchi(self, p):
        return d_from_gradient(self.grad[p]) if p + 1 <= self.n else None

    def deltachi(self, p):
        if p == 0:
            return None
        v = delta_from_gradient(self.grad[p])
        return v if isinstance(v, np.ndarray) else np.array(v, dtype=object if self.exact else complex)


def _cky_terms(ctx, p):
    rhs = []
    if p + 1 <= ctx.n:
        rhs.append((ctx.q(1, p + 1), ctx.F.i_y(p, ctx.dchi(p))))
    if p >= 1:
        rhs.append((-ctx.q(1, ctx.n - p + 1), ctx.F.alpha_wedge(p - 1, ctx.deltachi(p))))
    return rhs


def parallel_substitute(jet, case_id, params):
    """Copy of the jet with d_i eps replaced by -Sigma_i eps."""
    from .identity_lab import FlatJet

    _, spec = HIERARCHY_CASES[case_id]
    conn = [(params.require(name)[0], kind, p) for name, kind, p in spec]
    d_eps = []
    for i in range(jet.n):
        v = None
        for c, kind, p in conn:
            w = (jet.mat(kind, p, i) @ jet.epsilon) * c
            v = w if v is None else v + w
        d_eps.append(-v)
    d_eps = np.array(d_eps, dtype=jet.epsilon.dtype)
    return FlatJet(jet.n, jet.algebra, jet.epsilon, d_eps, jet.dd_epsilon, jet.f, jet.df, jet.forms,
                   jet.constraint_flags, jet.seed)


def verify_hierarchy(case_id: str, jet, params: ParameterSet, law: str = "raw") -> dict:
    """Residual arrays ``{p: R[Y, I]}`` of a hierarchy law.

    ``law`` is ``"raw"`` (the law with the full operator content),
    ``"cky"`` (its conformal Killing-Yano repackaging) or ``"plain-cky"``
    (the untwisted CKY equation, meaningful at the untwisting values).
    The jet's spinor derivative is overwritten by the parallelism
    substitution before anything is evaluated.
    """
    if case_id not in HIERARCHY_CASES:
        raise KeyError(f"unknown hierarchy case {case_id!r}")
    if law not in ("raw", "cky", "plain-cky"):
        raise ValueError(f"unknown law {law!r}")
    sub = parallel_substitute(jet, case_id, params)
    grad = bilinear_gradient(sub.epsilon, sub.d_epsilon, sub.algebra)
    ctx = _Context(sub, grad)
    out = {}
    for p in range(jet.n + 1):
        lhs_terms = []
        if law == "plain-cky" or (case_id == "HIER-0" and law == "cky"):
            rhs_terms = _cky_terms(ctx, p)
        elif case_id == "HIER-0":
            lhs_terms, rhs_terms, _ = _terms_hier0(ctx, params, p)
        elif case_id == "HIER-1":
            lhs_terms, rhs_terms = _terms_hier1(ctx, params, p, law)
        elif case_id == "HIER-2":
            lhs_terms, rhs_terms = _terms_hier2(ctx, params, p, law)
        else:
            lhs_terms, rhs_terms = _terms_hier3(ctx, params, p, law)
        res = grad[p].copy()
        for c, arr in lhs_terms:
            if arr is not None:
                res = res + arr * c
        for c, arr in rhs_terms:
            if arr is not None:
                res = res - arr * c
        out[p] = res
    return out


def hierarchy_is_zero(res: dict) -> bool:
    return all(is_zero(r) for r in res.values())


def hierarchy_max(res: dict) -> float:
    return max((max_abs(r) for r in res.values()), default=0.0)


def untwisting_holds(case_id: str, params: ParameterSet) -> bool:
    """The parameter condition under which the hierarchy untwists."""
    if case_id == "HIER-0":
        return True
    k1, k2 = params.require("k1", "k2")
    if case_id == "HIER-1":
        return re(2 * k1 + k2) == 0
    if case_id == "HIER-2":
        return k2 == 4 * k1
    return k2 == -6 * k1


def untwisted_params(case_id: str, params: ParameterSet) -> ParameterSet:
    """Project a random draw onto the untwisting locus."""
    if case_id == "HIER-0":
        return params
    k1, k2 = params.require("k1", "k2")
    if case_id == "HIER-1":
        return params.with_values(k2=k2 - re(2 * k1 + k2))
    if case_id == "HIER-2":
        return params.with_values(k2=4 * k1)
    return params.with_values(k2=-6 * k1)


def cky_residual(jet, case_id, params) -> dict:
    return verify_hierarchy(case_id, jet, params, "plain-cky")
