"""Random flat jets and exact residuals of the pointwise identities.

On a flat jet R = 0 and the covariant derivative is a partial derivative,
so every identity reduces to polynomial algebra in the jet data.  A jet
holds the spinor with its first and second derivatives, the scalar f with
its gradient and a value/gradient pair for each form degree.

Residuals are LHS - RHS.  With exact Gaussian-rational jets a correct
identity gives a residual that is identically zero.  Float jets run the same
code and are handy for exploration.
"""
from __future__ import annotations

import itertools
import math
import random
import time
import zlib
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from gmpy2 import mpq

from .clifford_core import CliffordAlgebra, build_algebra, slash_sorted
from .exterior_forms import (
    FormJet,
    MultiForm,
    close_gradient,
    coclose_gradient,
    d_from_gradient,
    d_sorted,
    delta_from_gradient,
    expand_sorted,
    interior_vector,
    inner_derivation,
    sorted_components,
    star_wedge,
)
from .hierarchy import (
    HIERARCHY_CASES,
    bilinears,
    hierarchy_is_zero,
    hierarchy_max,
    untwisted_params,
    untwisting_holds,
    verify_hierarchy,
)
from .parameter_space import CASE_FIELDS, ParameterSet, abs2, cj, constants, im, re
from .scalars import Gq, conj, float_array, is_zero, max_abs, random_gq, random_rational

__all__ = [
    "FlatJet",
    "IdentityReport",
    "JetError",
    "IDENTITIES",
    "AUXILIARY",
    "CURVATURE",
    "random_jet",
    "eval_identity",
    "eval_auxiliary",
    "eval_curvature_commutator",
    "run_identity",
    "run_identities",
    "run_hierarchy",
    "bilinears",
    "verify_hierarchy",
    "jet_seed",
]


class JetError(ValueError):
    pass


@dataclass
class FlatJet:
    n: int
    algebra: CliffordAlgebra
    epsilon: np.ndarray
    d_epsilon: np.ndarray
    dd_epsilon: np.ndarray
    f: object
    df: np.ndarray
    forms: dict
    constraint_flags: dict = field(default_factory=dict)
    seed: int | None = None
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def exact(self) -> bool:
        return self.epsilon.dtype == object

    @property
    def size(self) -> int:
        return self.algebra.size

    def memo(self, key, fn):
        if key not in self._memo:
            self._memo[key] = fn()
        return self._memo[key]

    def q(self, a, b=1):
        """The rational a/b in the jet's scalar kind."""
        return Gq(mpq(a, b)) if self.exact else a / b

    def zero(self):
        return Gq(0) if self.exact else 0j

    def has(self, p: int) -> bool:
        return p == 0 or p in self.forms

    def _need(self, p):
        if not self.has(p):
            raise JetError(f"jet carries no degree-{p} form")

    def value(self, p: int) -> np.ndarray:
        self._need(p)
        if p == 0:
            return np.array(self.f, dtype=object if self.exact else complex)
        return self.forms[p].value.array(p)

    def grad(self, p: int) -> np.ndarray:
        self._need(p)
        if p == 0:
            return self.df
        return self.forms[p].grad(p)

    def to_float(self) -> "FlatJet":
        forms = {p: FormJet(MultiForm(self.n, {p: float_array(fj.value.array(p))}),
                            {p: float_array(fj.grad(p))})
                 for p, fj in self.forms.items()}
        return FlatJet(self.n, self.algebra, float_array(self.epsilon), float_array(self.d_epsilon),
                       float_array(self.dd_epsilon), complex(self.f), float_array(self.df), forms,
                       dict(self.constraint_flags), self.seed)

    # matrices ---------------------------------------------------------
    def _slash_arr(self, arr, p):
        if p > self.n:
            return self.algebra.zero(self.exact)
        if p == 0:
            return self.algebra.identity(self.exact) * (arr[()] if isinstance(arr, np.ndarray) else arr)
        return slash_sorted(sorted_components(arr), p, self.algebra, self.exact)

    def gamma(self, i):
        return self.algebra.gamma(i, self.exact)

    def sl(self, p):
        """Slash of the degree-p form (f times the identity for p = 0)."""
        return self.memo(("sl", p), lambda: self._slash_arr(self.value(p), p))

    def dsl(self, p, j):
        return self.memo(("dsl", p, j), lambda: self._slash_arr(self.grad(p)[j], p))

    def isl(self, p, i):
        """Slash of the contraction of the form with the i-th basis vector."""
        return self.memo(("isl", p, i), lambda: self._slash_arr(self.value(p)[i], p - 1))

    def idsl(self, p, i, j):
        """Slash of i_{e_i} applied to the j-derivative of the form."""
        return self.memo(("idsl", p, i, j), lambda: self._slash_arr(self.grad(p)[j][i], p - 1))

    def sl_d(self, p):
        def build():
            if p + 1 > self.n:
                return self.algebra.zero(self.exact)
            if p == 0:
                return self._slash_arr(self.grad(0), 1)
            return slash_sorted(d_sorted(self.grad(p)), p + 1, self.algebra, self.exact)
        return self.memo(("sl_d", p), build)

    def sl_delta(self, p):
        return self.memo(("sl_delta", p), lambda: self._slash_arr(delta_from_gradient(self.grad(p)), p - 1))

    def mat(self, kind, p, i):
        """Connection building blocks: ``('mul', p)`` is omega_slash . Gamma^i,
        ``('int', p)`` is slash(i_{e_i} omega)."""
        if kind == "mul":
            return self.memo(("mul", p, i), lambda: self.sl(p) @ self.gamma(i))
        return self.isl(p, i)

    def dmat(self, kind, p, i, j):
        """d_j of :meth:`mat` at slot i."""
        if kind == "mul":
            return self.memo(("dmul", p, i, j), lambda: self.dsl(p, j) @ self.gamma(i))
        return self.idsl(p, i, j)

    # spinor data ------------------------------------------------------
    def eps(self):
        return self.epsilon

    def deps(self, i):
        return self.d_epsilon[i]

    def vec(self, key, fn):
        return self.memo(("vec",) + key, fn)

    def ip(self, a, b):
        """Dirac inner product, antilinear in the first slot."""
        return np.sum(conj(a) * b)

    def norm2(self):
        return self.memo(("N",), lambda: self.ip(self.epsilon, self.epsilon))

    def dnorm2(self, i):
        return self.memo(("dN", i), lambda: 2 * re(self.ip(self.epsilon, self.d_epsilon[i])))

    def lap_norm2(self):
        def build():
            tot = self.zero()
            for i in range(self.n):
                tot = tot + 2 * self.ip(self.d_epsilon[i], self.d_epsilon[i])
                tot = tot + 2 * re(self.ip(self.epsilon, self.dd_epsilon[i, i]))
            return tot
        return self.memo(("lapN",), build)

    def dirac_eps(self):
        return self.vec(("De",), lambda: sum(self.gamma(i) @ self.d_epsilon[i] for i in range(self.n)))

    def gg_apply(self, i, j, v):
        """Gamma^i Gamma^j v through the monomial tables."""
        if i == j:
            return v
        cols, ph, phf = self.algebra.monomial((min(i, j), max(i, j)))
        w = (ph if self.exact else phf) * v[list(cols)]
        return w if i < j else -w

    def dirac_dirac_eps(self):
        def build():
            out = None
            for i in range(self.n):
                for j in range(self.n):
                    t = self.gg_apply(i, j, self.dd_epsilon[i, j])
                    out = t if out is None else out + t
            return out
        return self.vec(("DDe",), build)

    def dirac_of_form_eps(self, p):
        """Dirac operator applied to (omega_slash eps), at the point."""
        def build():
            out = None
            for i in range(self.n):
                t = self.gamma(i) @ (self.dsl(p, i) @ self.epsilon + self.sl(p) @ self.d_epsilon[i])
                out = t if out is None else out + t
            return out
        return self.vec(("DW", p), build)

    def form_eps(self, p):
        return self.vec(("W", p), lambda: self.sl(p) @ self.epsilon)

    # scalar building blocks ------------------------------------------
    def pair(self, mat_key, vec_key, mat_fn, vec_fn):
        return self.memo(("pair", mat_key, vec_key), lambda: self.ip(self.epsilon, mat_fn() @ vec_fn()))

    def expect(self, key, mat_fn):
        """<eps, M eps> cached under key."""
        return self.memo(("exp",) + key, lambda: self.ip(self.epsilon, mat_fn() @ self.epsilon))

    def hat_vectors(self, conn):
        """(d_i + Sigma_i) eps for every i; conn is a list of (coef, kind, degree)."""
        out = []
        for i in range(self.n):
            v = self.d_epsilon[i]
            for coef, kind, p in conn:
                if kind == "int" and p == 0:
                    continue
                w = self.vec(("sig", kind, p, i), lambda: self.sigma_eps(kind, p, i))
                v = v + w * coef
            out.append(v)
        return out

    def sigma_eps(self, kind, p, i):
        """mat(kind, p, i) applied to eps without forming the matrix product."""
        if kind == "mul":
            return self.sl(p) @ self.vec(("ge", i), lambda: self.gamma(i) @ self.epsilon)
        return self.isl(p, i) @ self.epsilon

    def hat_norm2(self, conn):
        tot = self.zero()
        for v in self.hat_vectors(conn):
            tot = tot + self.ip(v, v)
        return tot

    def dirac_pair(self, d_terms, t_terms):
        """<eps, (Dirac + sum b_s M_s)(Dirac + sum c_t M_t) eps>.

        ``d_terms`` and ``t_terms`` are lists of (coefficient, degree); the
        degree-0 entry stands for multiplication by f.
        """
        tot = self.memo(("e.DDe",), lambda: self.ip(self.epsilon, self.dirac_dirac_eps()))
        for c, p in d_terms:
            tot = tot + c * self.memo(("e.DW", p), lambda: self.ip(self.epsilon, self.dirac_of_form_eps(p)))
        for b, s in t_terms:
            tot = tot + b * self.memo(("e.MDe", s), lambda: self.ip(self.epsilon, self.sl(s) @ self.dirac_eps()))
            for c, p in d_terms:
                tot = tot + b * c * self.memo(("e.MMe", s, p), lambda: self.ip(self.epsilon, self.sl(s) @ self.form_eps(p)))
        return tot

    def div(self, kind, p):
        """sum_j d_j <eps, M_j eps> for M_j = mat(kind, p, j)."""
        def build():
            tot = self.zero()
            for j in range(self.n):
                m = self.mat(kind, p, j)
                tot = tot + self.ip(self.d_epsilon[j], m @ self.epsilon)
                tot = tot + self.ip(self.epsilon, m @ self.d_epsilon[j])
                tot = tot + self.ip(self.epsilon, self.dmat(kind, p, j, j) @ self.epsilon)
            return tot
        return self.memo(("div", kind, p), build)

    def grad_pair(self, p):
        """sum_i <eps, slash(i_{e_i} omega) d_i eps>."""
        def build():
            tot = self.zero()
            for i in range(self.n):
                tot = tot + self.ip(self.epsilon, self.isl(p, i) @ self.d_epsilon[i])
            return tot
        return self.memo(("gradpair", p), build)

    def sq(self, p):
        """Unnormalized square of the degree-p form (f^2 for p = 0)."""
        def build():
            v = self.value(p)
            return v[()] * v[()] if p == 0 else np.sum(v * v)
        return self.memo(("sq", p), build)

    def delta_scalar(self, p=1):
        def build():
            v = delta_from_gradient(self.grad(p))
            return v[()] if isinstance(v, np.ndarray) else v
        return self.memo(("delta", p), build)


# jet generation ----------------------------------------------------------

def _random_sorted(rng, n, p, bound):
    return {idx: Gq(random_rational(rng, bound)) for idx in itertools.combinations(range(n), p)}


def random_jet(n: int, degrees=(), constraint_flags=None, seed: int = 0, *,
               field_kind: str = "complex", exact: bool = True, bound: int = 9) -> FlatJet:
    """Seeded random flat jet with Gaussian-rational entries.

    ``degrees`` lists the form degrees to populate (f is always present).
    ``constraint_flags`` maps a degree to a subset of {"closed", "coclosed"};
    constraints are imposed by exact linear projection of the gradient.
    """
    if n < 2:
        raise JetError("jets need n >= 2")
    flags = {p: frozenset(v) for p, v in (constraint_flags or {}).items()}
    for p, v in flags.items():
        if not v <= {"closed", "coclosed"}:
            raise JetError(f"unknown constraint flags {sorted(v)}")
        if p not in degrees:
            raise JetError(f"constraint given for absent degree {p}")
    algebra = build_algebra(n, field_kind)
    real = algebra.real
    rng = random.Random(seed)
    m = algebra.size

    def spinor():
        return np.array([random_gq(rng, bound, real) for _ in range(m)], dtype=object)

    eps = spinor()
    d_eps = np.array([spinor() for _ in range(n)], dtype=object)
    dd = np.empty((n, n, m), dtype=object)
    for i in range(n):
        for j in range(i, n):
            dd[i, j] = dd[j, i] = spinor()
    f = Gq(random_rational(rng, bound))
    df = np.array([Gq(random_rational(rng, bound)) for _ in range(n)], dtype=object)
    forms = {}
    for p in sorted(set(degrees)):
        if p < 1 or p > n:
            raise JetError(f"form degree {p} outside 1..{n}")
        val = expand_sorted(n, p, _random_sorted(rng, n, p, bound), True)
        grad = np.array([expand_sorted(n, p, _random_sorted(rng, n, p, bound), True) for _ in range(n)],
                        dtype=object)
        fl = flags.get(p, frozenset())
        if "closed" in fl:
            grad = close_gradient(grad)
        if "coclosed" in fl:
            grad = coclose_gradient(grad)
        forms[p] = FormJet(MultiForm(n, {p: val}), {p: grad})
    jet = FlatJet(n, algebra, eps, d_eps, dd, f, df, forms, {p: set(v) for p, v in flags.items()}, seed)
    return jet if exact else jet.to_float()


# fundamental identities ---------------------------------------------------

def _lichnerowicz(jet, P):
    return jet.lap_norm2() - (2 * jet.hat_norm2([]) + 2 * re(jet.dirac_pair([], [])))


def _zero_form(jet, P):
    e, k = P.require("e", "k")
    c = constants("0-form", P)
    N = jet.norm2()
    rhs = (c["c1"] * jet.sq(0) * N + 2 * jet.hat_norm2([(k, "mul", 0)])
           + 2 * re(jet.dirac_pair([(e, 0)], [(-2 * cj(k) + cj(e), 0)]))
           - 2 * re(e * jet.div("mul", 0)))
    return jet.lap_norm2() - rhs


def _delta_AN(jet):
    """delta(A |eps|^2) = (delta A) N - A^i d_i N."""
    A = jet.value(1)
    out = jet.delta_scalar(1) * jet.norm2()
    for i in range(jet.n):
        out = out - A[i] * jet.dnorm2(i)
    return out


def _one_form(jet, P):
    e, k1, k2 = P.require("e", "k1", "k2")
    c = constants("1-form", P)
    N = jet.norm2()
    rhs = (2 * jet.hat_norm2([(k1, "mul", 1), (k2, "int", 1)])
           + 2 * re(jet.dirac_pair([(e, 1)], [(2 * cj(k1) + e, 1)]))
           + 2 * re(2 * k1 + k2 + e) * _delta_AN(jet)
           - 2 * re(2 * k1 + k2) * jet.delta_scalar(1) * N
           + c["c1"] * jet.sq(1) * N
           + 4 * im(e + 2 * cj(k1) + cj(k2)) * im(jet.grad_pair(1))
           - re(e * jet.expect(("d", 1), lambda: jet.sl_d(1))))
    return jet.lap_norm2() - rhs


def _fe_norm(jet, p):
    return jet.memo(("|We|", p), lambda: jet.ip(jet.form_eps(p), jet.form_eps(p)))


def _two_form(jet, P):
    e, k1, k2 = P.require("e", "k1", "k2")
    c = constants("2-form", P)
    N = jet.norm2()
    rhs = (2 * jet.hat_norm2([(k1, "mul", 2), (k2, "int", 2)])
           + c["c1"] * jet.sq(2) * N + c["c2"] * _fe_norm(jet, 2)
           + 2 * re(jet.dirac_pair([(e, 2)], [(2 * cj(k1) - e, 2)]))
           + re((-4 * cj(k2) + 16 * cj(k1) - 8 * e) * jet.grad_pair(2))
           - jet.q(2, 3) * re(e * jet.expect(("d", 2), lambda: jet.sl_d(2)))
           + 4 * re(e * jet.expect(("delta", 2), lambda: jet.sl_delta(2))))
    return jet.lap_norm2() - rhs


def _three_form(jet, P):
    e, k1, k2 = P.require("e", "k1", "k2")
    c = constants("3-form", P)
    N = jet.norm2()
    rhs = (2 * jet.hat_norm2([(k1, "mul", 3), (k2, "int", 3)])
           + c["c1"] * jet.sq(3) * N + c["c2"] * _fe_norm(jet, 3)
           + 2 * re(jet.dirac_pair([(e, 3)], [(-2 * cj(k1) + e, 3)]))
           - jet.q(1, 2) * re(e * jet.expect(("d", 3), lambda: jet.sl_d(3)))
           + 6 * re(e * jet.expect(("delta", 3), lambda: jet.sl_delta(3)))
           + re((12 * (2 * cj(k1) - e) + 4 * cj(k2)) * jet.grad_pair(3)))
    return jet.lap_norm2() - rhs


def _quad_four(jet):
    """sum_{m,n} |slash(F_{mn..}) eps|^2 with F_{mn..} the 2-form slices."""
    def build():
        F = jet.value(4)
        tot = jet.zero()
        for a in range(jet.n):
            for b in range(jet.n):
                if a == b:
                    continue
                v = jet._slash_arr(F[a, b], 2) @ jet.epsilon
                tot = tot + jet.ip(v, v)
        return tot
    return jet.memo(("quad4",), build)


def _four_form(jet, P):
    e, k1, k2 = P.require("e", "k1", "k2")
    c = constants("4-form", P)
    N = jet.norm2()
    rhs = (2 * jet.hat_norm2([(k1, "mul", 4), (k2, "int", 4)])
           + 2 * re(jet.dirac_pair([(e, 4)], [(-(2 * cj(k1) + e), 4)]))
           + c["c1"] * _fe_norm(jet, 4)
           - 4 * re((8 * cj(k1) - cj(k2) + 4 * re(e)) * jet.grad_pair(4))
           + 18 * c["c2"] * _quad_four(jet) - 24 * c["c2"] * jet.sq(4) * N
           - 8 * re(e * jet.div("int", 4))
           - jet.q(2, 5) * re(e * jet.expect(("d", 4), lambda: jet.sl_d(4))))
    return jet.lap_norm2() - rhs


def _zero_one_form(jet, P):
    e1, e2, k0, k1, k2 = P.require("e1", "e2", "k0", "k1", "k2")
    c = constants("01-form", P)
    N = jet.norm2()
    f = jet.f
    rhs = (2 * jet.hat_norm2([(k0, "mul", 0), (k1, "mul", 1), (k2, "int", 1)])
           + (c["c0"] * jet.sq(0) + c["c1"] * jet.sq(1)) * N
           + 2 * re(jet.dirac_pair([(e1, 0), (e2, 1)], [(-2 * cj(k0) + cj(e1), 0), (2 * cj(k1) + e2, 1)]))
           - 2 * re(2 * k1 + k2) * jet.delta_scalar(1) * N
           - 2 * re(e1 * jet.div("mul", 0))
           + 2 * re(2 * k1 + k2 + e2) * _delta_AN(jet)
           + re(c["c2"] * f * jet.expect(("W", 1), lambda: jet.sl(1)))
           + 4 * im(e2 + 2 * cj(k1) + cj(k2)) * im(jet.grad_pair(1))
           - re(e2 * jet.expect(("d", 1), lambda: jet.sl_d(1))))
    return jet.lap_norm2() - rhs


def _zero_two_form(jet, P):
    e1, e2, k0, k1, k2 = P.require("e1", "e2", "k0", "k1", "k2")
    c = constants("02-form", P)
    N = jet.norm2()
    i = Gq(0, 1) if jet.exact else 1j
    rhs = ((c["c1_0"] * jet.sq(0) + c["c1_2"] * jet.sq(2)) * N
           + 2 * jet.hat_norm2([(k0, "mul", 0), (k1, "mul", 2), (k2, "int", 2)])
           + c["c2_2"] * _fe_norm(jet, 2)
           + 2 * re(jet.dirac_pair([(e1, 0), (e2, 2)], [(-2 * cj(k0) + cj(e1), 0), (2 * cj(k1) - e2, 2)]))
           + re(c["c3"] * jet.f * jet.expect(("W", 2), lambda: jet.sl(2)))
           - 2 * re(e1 * jet.div("mul", 0))
           + re((-4 * cj(k2) + 16 * cj(k1) - 8 * i * im(e2)) * jet.grad_pair(2))
           - jet.q(2, 3) * re(e2 * jet.expect(("d", 2), lambda: jet.sl_d(2)))
           - 4 * re(e2 * jet.div("int", 2)))
    return jet.lap_norm2() - rhs


def _zero_three_form(jet, P):
    e1, e2, k0, k1, k2 = P.require("e1", "e2", "k0", "k1", "k2")
    c = constants("03-form", P)
    N = jet.norm2()
    rhs = ((c["c1_0"] * jet.sq(0) + c["c1_3"] * jet.sq(3)) * N
           + 2 * jet.hat_norm2([(k0, "mul", 0), (k1, "mul", 3), (k2, "int", 3)])
           + c["c2_3"] * _fe_norm(jet, 3)
           + 2 * re(jet.dirac_pair([(e1, 0), (e2, 3)], [(-2 * cj(k0) + cj(e1), 0), (-2 * cj(k1) + e2, 3)]))
           + re(c["c3"] * jet.f * jet.expect(("W", 3), lambda: jet.sl(3)))
           + re((12 * (2 * cj(k1) - re(e2)) + 4 * cj(k2)) * jet.grad_pair(3))
           - 2 * re(e1 * jet.div("mul", 0))
           - jet.q(1, 2) * re(e2 * jet.expect(("d", 3), lambda: jet.sl_d(3)))
           - 6 * re(e2 * jet.div("int", 3)))
    return jet.lap_norm2() - rhs


def _star_ff(jet):
    """Slash of *(F ^ F) for the 4-form F (a 1-form in nine dimensions)."""
    def build():
        F = MultiForm(jet.n, {4: jet.value(4)})
        return jet._slash_arr(star_wedge(F, F).array(1), 1)
    return jet.memo(("starFF",), build)


def _horizon(jet, P, sign, derived=False):
    """Horizon identity on the real rank-16 bundle.  ``derived`` switches to
    the coefficients obtained by direct expansion (see README)."""
    if not jet.algebra.real or jet.n != 9:
        raise JetError("the horizon identity needs the real Cl(9) jet")
    s = jet.q(sign)
    q = jet.q
    conn = [(-s * q(1, 4), "int", 1), (-q(1, 288), "mul", 4), (q(1, 72), "int", 4),
            (s * q(1, 24), "mul", 2), (-s * q(1, 12), "int", 2)]
    d_terms = [(-s * q(1, 4), 1), (q(1, 96), 4), (s * q(1, 8), 2)]
    t_terms = [(-s * q(1, 4), 1), (-q(1, 288), 4), (-s * q(1, 24), 2)]
    N = jet.norm2()
    h = jet.value(1)
    dh = jet.delta_scalar(1)
    lhs = jet.lap_norm2() + q(1, 2) * (1 - s) * (-dh) * N
    for i in range(jet.n):
        lhs = lhs - s * h[i] * jet.dnorm2(i)
    curly_R = -dh - q(1, 2) * jet.sq(1) - q(1, 4) * jet.sq(2) - q(1, 48) * jet.sq(4)
    delta_G = jet.expect(("delta", 2), lambda: jet.sl_delta(2))
    star_ff = jet.expect(("starFF",), lambda: _star_ff(jet))
    dF = jet.expect(("d", 4), lambda: jet.sl_d(4))
    if derived:
        flux = s * q(1, 2) * delta_G + q(1, 4) * star_ff
        df_coef = q(1, 240)
    else:
        # -(+-)1/2 <eps, slash(G_curly) eps>, G_curly = -delta G - *(F ^ F)
        flux = s * q(1, 2) * (delta_G + star_ff)
        df_coef = q(1, 120)
    rhs = (2 * jet.hat_norm2(conn) + q(1, 2) * curly_R * N + flux - df_coef * dF
           + 2 * jet.dirac_pair(d_terms, t_terms))
    return lhs - rhs


IDENTITIES = {
    # id: (evaluator, parameter case, required degrees)
    "FI-LICH": (_lichnerowicz, "lichnerowicz", ()),
    "FI-0": (_zero_form, "0-form", ()),
    "FI-1": (_one_form, "1-form", (1,)),
    "FI-2": (_two_form, "2-form", (2,)),
    "FI-3": (_three_form, "3-form", (3,)),
    "FI-4": (_four_form, "4-form", (4,)),
    "FI-01": (_zero_one_form, "01-form", (1,)),
    "FI-02": (_zero_two_form, "02-form", (2,)),
    "FI-03": (_zero_three_form, "03-form", (3,)),
    "FI-HOR+": (lambda j, P: _horizon(j, P, 1), "horizon", (1, 2, 4)),
    "FI-HOR-": (lambda j, P: _horizon(j, P, -1), "horizon", (1, 2, 4)),
    "FI-HOR-DERIVED+": (lambda j, P: _horizon(j, P, 1, True), "horizon", (1, 2, 4)),
    "FI-HOR-DERIVED-": (lambda j, P: _horizon(j, P, -1, True), "horizon", (1, 2, 4)),
}

ANCHORS = {
    "FI-LICH": "Lichnerowicz identity",
    "FI-0": "0-form identity",
    "FI-1": "1-form identity",
    "FI-2": "2-form identity",
    "FI-3": "3-form identity",
    "FI-4": "4-form identity",
    "FI-01": "(0,1)-form identity",
    "FI-02": "(0,2)-form identity",
    "FI-03": "(0,3)-form identity",
    "FI-HOR+": "horizon identity, upper sign",
    "FI-HOR-": "horizon identity, lower sign",
    "FI-HOR-DERIVED+": "horizon identity, recomputed coefficients, upper sign",
    "FI-HOR-DERIVED-": "horizon identity, recomputed coefficients, lower sign",
}


def _check_jet(jet, degrees):
    for p in degrees:
        if not jet.has(p):
            raise JetError(f"identity needs a degree-{p} form in the jet")


def eval_identity(identity_id: str, jet: FlatJet, params: ParameterSet | None = None):
    """LHS - RHS of a fundamental identity on a flat jet (a scalar)."""
    try:
        fn, case, degrees = IDENTITIES[identity_id]
    except KeyError:
        raise KeyError(f"unknown identity {identity_id!r}") from None
    _check_jet(jet, degrees)
    if params is None:
        params = ParameterSet(n=jet.n, case_id=case)
    if params.n != jet.n:
        raise JetError(f"parameter dimension {params.n} differs from jet dimension {jet.n}")
    return fn(jet, params)


# auxiliary identities ------------------------------------------------------

def _dirac_form_eps_hat(jet, p, conn):
    """sum_i Gamma^i omega_slash hat_i."""
    out = None
    for i, v in enumerate(jet.hat_vectors(conn)):
        t = jet.gamma(i) @ (jet.sl(p) @ v)
        out = t if out is None else out + t
    return out


def _aux_two(jet, P):
    _, k1, k2 = P.require("e", "k1", "k2")
    n = jet.n
    conn = [(k1, "mul", 2), (k2, "int", 2)]
    F_eps = jet.form_eps(2)
    rhs = (jet.sl_d(2) @ jet.epsilon * jet.q(1, 3) - jet.sl_delta(2) @ jet.epsilon * 2
           + _dirac_form_eps_hat(jet, 2, conn)
           - jet.sl(2) @ F_eps * (k2 + (n - 8) * k1)
           - jet.epsilon * (4 * (k2 - 4 * k1) * jet.sq(2)))
    return jet.dirac_of_form_eps(2) - rhs


def _aux_three(jet, P):
    _, k1, k2 = P.require("e", "k1", "k2")
    n = jet.n
    conn = [(k1, "mul", 3), (k2, "int", 3)]
    H_eps = jet.form_eps(3)
    rhs = (jet.sl_d(3) @ jet.epsilon * jet.q(1, 4) - jet.sl_delta(3) @ jet.epsilon * 3
           + _dirac_form_eps_hat(jet, 3, conn)
           + jet.sl(3) @ H_eps * (k2 * jet.q(1, 3) - (n - 8) * k1)
           + jet.epsilon * (8 * (6 * k1 + k2) * jet.sq(3)))
    return jet.dirac_of_form_eps(3) - rhs


AUXILIARY = {
    "AUX-2F": (_aux_two, "2-form", (2,)),
    "AUX-3F": (_aux_three, "3-form", (3,)),
}


def eval_auxiliary(identity_id: str, jet: FlatJet, params: ParameterSet):
    """Spinor-valued residual of an auxiliary Dirac-of-form identity."""
    fn, _, degrees = AUXILIARY[identity_id]
    _check_jet(jet, degrees)
    return fn(jet, params)


# curvature of the modified connection -------------------------------------

CURVATURE = {
    # case: (parameter case, connection as (parameter, kind, degree))
    "CURV-0": ("0-form", (("k", "mul", 0),)),
    "CURV-1": ("1-form", (("k1", "mul", 1), ("k2", "int", 1))),
    "CURV-2": ("2-form", (("k1", "mul", 2), ("k2", "int", 2))),
    "CURV-3": ("3-form", (("k1", "mul", 3), ("k2", "int", 3))),
}


def _sigma(jet, conn, i):
    out = jet.algebra.zero(jet.exact)
    for c, kind, p in conn:
        out = out + jet.mat(kind, p, i) * c
    return out


def _dsigma(jet, conn, i, j):
    out = jet.algebra.zero(jet.exact)
    for c, kind, p in conn:
        out = out + jet.dmat(kind, p, i, j) * c
    return out


def _curvature_direct(jet, conn, i, j):
    """[hat_i, hat_j] eps from the jet; returns (vector, second-derivative part)."""
    def hat_hat(a, b):
        # hat_a (hat_b eps) = d_a d_b eps + (d_a Sigma_b) eps + Sigma_b d_a eps
        #                     + Sigma_a d_b eps + Sigma_a Sigma_b eps
        sa, sb = _sigma(jet, conn, a), _sigma(jet, conn, b)
        rest = (_dsigma(jet, conn, b, a) @ jet.epsilon + sb @ jet.d_epsilon[a]
                + sa @ jet.d_epsilon[b] + sa @ (sb @ jet.epsilon))
        return jet.dd_epsilon[a, b], rest
    ddij, rij = hat_hat(i, j)
    ddji, rji = hat_hat(j, i)
    return rij - rji, ddij - ddji


def _interior_slash(jet, vec, p, arr=None):
    """slash(i_vec omega) for the degree-p form (or a given array)."""
    arr = jet.value(p) if arr is None else arr
    return jet._slash_arr(np.tensordot(vec, arr, axes=([0], [0])), p - 1)


def _curv_zero(jet, P, i, j):
    (k,) = P.require("k")
    f, df = jet.f, jet.df
    gi, gj = jet.gamma(i), jet.gamma(j)
    return gj * (k * df[i]) - gi * (k * df[j]) + (gi @ gj - gj @ gi) * (k * k * f * f)


def _curv_one(jet, P, i, j):
    k1, k2 = P.require("k1", "k2")
    A = jet.sl(1)
    gi, gj = jet.gamma(i), jet.gamma(j)
    dA = d_from_gradient(jet.grad(1))
    return ((jet.dsl(1, i) @ gj - jet.dsl(1, j) @ gi) * k1
            + jet.algebra.identity(jet.exact) * (k2 * dA[i, j])
            + A @ (gi @ A @ gj - gj @ A @ gi) * (k1 * k1))


def _curv_two(jet, P, i, j):
    k1, k2 = P.require("k1", "k2")
    F = jet.sl(2)
    Fv = jet.value(2)
    gi, gj = jet.gamma(i), jet.gamma(j)
    iF_i, iF_j = jet.isl(2, i), jet.isl(2, j)
    # i_{i_X F} F as a slashed 1-form
    ii_i = _interior_slash(jet, Fv[i], 2)
    ii_j = _interior_slash(jet, Fv[j], 2)
    return ((jet.dsl(2, i) @ gj - jet.dsl(2, j) @ gi) * k1
            + (jet.idsl(2, j, i) - jet.idsl(2, i, j)) * k2
            + (iF_i @ iF_j - iF_j @ iF_i) * (k2 * k2)
            + F @ F @ (gi @ gj - gj @ gi) * (k1 * k1)
            + F * ((16 * k1 * k1 + 4 * k1 * k2) * Fv[i, j])
            - gj @ ii_i * (4 * k1 * k2)
            + F @ (gi @ iF_j - gj @ iF_i) * (2 * k1 * k2 + 4 * k1 * k1)
            + gi @ ii_j * (4 * k1 * k2))


def _curv_three(jet, P, i, j):
    k1, k2 = P.require("k1", "k2")
    H = jet.sl(3)
    gi, gj = jet.gamma(i), jet.gamma(j)
    iH_i, iH_j = jet.isl(3, i), jet.isl(3, j)
    return ((jet.dsl(3, i) @ gj - jet.dsl(3, j) @ gi) * k1
            + (jet.idsl(3, j, i) - jet.idsl(3, i, j)) * k2
            + (H @ gi @ H @ gj - H @ gj @ H @ gi) * (k1 * k1)
            + (iH_i @ iH_j - iH_j @ iH_i) * (k2 * k2)
            + (H @ gi @ iH_j + iH_i @ H @ gj - H @ gj @ iH_i - iH_j @ H @ gi) * (k1 * k2))


_CURV_FORMULAS = {"CURV-0": _curv_zero, "CURV-1": _curv_one, "CURV-2": _curv_two, "CURV-3": _curv_three}


class CancellationError(ArithmeticError):
    pass


def eval_curvature_commutator(case_id: str, jet: FlatJet, params: ParameterSet):
    """Stack of residual spinors [hat_i, hat_j] eps - R_hat(e_i, e_j) eps, i < j."""
    case, spec = CURVATURE[case_id]
    conn = [(params.require(name)[0], kind, p) for name, kind, p in spec]
    _check_jet(jet, {p for _, _, p in spec})
    out = []
    for i in range(jet.n):
        for j in range(i + 1, jet.n):
            vec, second = _curvature_direct(jet, conn, i, j)
            if not is_zero(second):
                raise CancellationError("second derivatives of eps failed to cancel")
            out.append(vec - _CURV_FORMULAS[case_id](jet, params, i, j) @ jet.epsilon)
    return np.array(out, dtype=object if jet.exact else complex)


# driver -----------------------------------------------------------------

def jet_seed(kind_id: str, n: int, seed: int, trial: int) -> int:
    """Stable per-trial seed (``hash`` of a str is salted per process)."""
    return zlib.crc32(f"{kind_id}|{n}|{seed}|{trial}".encode())


@dataclass
class IdentityReport:
    identity_id: str
    n: int
    trials: int
    draws: int
    seed: int
    exact: bool
    residual_norm: float
    exact_zero: bool
    failures: int
    seconds: float = 0.0
    field_kind: str = "complex"
    anchor: str = ""
    parameter_draws: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.exact_zero if self.exact else self.residual_norm <= 1e-9

    def as_dict(self) -> dict:
        return {
            "id": self.identity_id, "n": self.n, "field": self.field_kind, "trials": self.trials,
            "draws": self.draws, "seed": self.seed, "exact": self.exact,
            "residual_max": self.residual_norm, "exact_zero": self.exact_zero,
            "failures": self.failures, "passed": self.passed, "anchor": self.anchor,
            "parameters": self.parameter_draws, "seconds": round(self.seconds, 3),
        }


def _degrees_for(kind_id):
    if kind_id in IDENTITIES:
        return IDENTITIES[kind_id][2], IDENTITIES[kind_id][1]
    if kind_id in AUXILIARY:
        return AUXILIARY[kind_id][2], AUXILIARY[kind_id][1]
    case, spec = CURVATURE[kind_id] if kind_id in CURVATURE else HIERARCHY_CASES[kind_id]
    return tuple(sorted({p for _, _, p in spec if p})), case


def _evaluate(kind_id, jet, P):
    if kind_id in IDENTITIES:
        return eval_identity(kind_id, jet, P)
    if kind_id in AUXILIARY:
        return eval_auxiliary(kind_id, jet, P)
    return eval_curvature_commutator(kind_id, jet, P)


def run_identities(kind_ids, n: int, trials: int = 100, draws: int = 5, seed: int = 0,
                   exact: bool = True, constraint_flags=None) -> list:
    """Evaluate several checks on the same ``trials`` jets.

    All ids must share a parameter case.  Sharing jets lets the per-jet
    Clifford data be computed once, which matters in nine dimensions.
    """
    kind_ids = list(kind_ids)
    cases = {_degrees_for(k)[1] for k in kind_ids}
    if len(cases) != 1:
        raise ValueError(f"checks span several parameter cases: {sorted(cases)}")
    case = cases.pop()
    degrees = tuple(sorted({p for k in kind_ids for p in _degrees_for(k)[0]}))
    field_kind = "real" if case.startswith("horizon") else "complex"
    group = "+".join(kind_ids)
    rng = random.Random(f"{group}:{n}:{seed}")
    has_params = bool(CASE_FIELDS.get(case))
    n_draws = draws if has_params else 1
    stats = {k: [0.0, 0, 0.0] for k in kind_ids}
    recorded = []
    for t in range(trials):
        jet = random_jet(n, degrees, constraint_flags, seed=jet_seed(group, n, seed, t),
                         field_kind=field_kind, exact=exact)
        for _ in range(n_draws):
            P = ParameterSet.random(case, n, rng) if has_params else ParameterSet(n=n, case_id=case)
            if not exact:
                P = ParameterSet(n=n, case_id=case, **{k: complex(P.get(k)) for k in CASE_FIELDS[case]})
            if t == 0 and has_params:
                recorded.append(P.as_dict())
            for k in kind_ids:
                start = time.perf_counter()
                r = _evaluate(k, jet, P)
                st = stats[k]
                st[0] = max(st[0], max_abs(r))
                st[1] += not is_zero(r) if exact else max_abs(r) > 1e-9
                st[2] += time.perf_counter() - start
    return [IdentityReport(k, n, trials, n_draws, seed, exact, stats[k][0], stats[k][1] == 0,
                           stats[k][1], stats[k][2], field_kind, ANCHORS.get(k, k), recorded)
            for k in kind_ids]


def run_identity(kind_id: str, n: int, trials: int = 100, draws: int = 5, seed: int = 0,
                 exact: bool = True, constraint_flags=None) -> IdentityReport:
    """Evaluate an identity, auxiliary identity or curvature formula on
    ``trials`` jets with ``draws`` parameter draws per jet."""
    return run_identities([kind_id], n, trials, draws, seed, exact, constraint_flags)[0]


# hierarchy driver ---------------------------------------------------------

HIERARCHY_LAWS = ("RAW", "CKY", "UNTWIST")


def run_hierarchy(case_id: str, n: int, trials: int = 20, draws: int = 2, seed: int = 0) -> list:
    """Reports for the raw law, its CKY repackaging and the untwisted
    reduction of one hierarchy case.

    Every draw is also projected onto the untwisting locus, where both the
    repackaged law and the plain CKY equation must hold.
    """
    case, spec = HIERARCHY_CASES[case_id]
    degrees = tuple(sorted({p for _, _, p in spec if p}))
    rng = random.Random(f"{case_id}:{n}:{seed}")
    stats = {law: [0.0, True, 0, []] for law in HIERARCHY_LAWS}
    start = time.perf_counter()

    def record(law, res, P, first):
        worst, ok, fails, rec = stats[law]
        z = hierarchy_is_zero(res)
        stats[law] = [max(worst, hierarchy_max(res)), ok and z, fails + (not z), rec]
        if first:
            rec.append(P.as_dict())

    for t in range(trials):
        jet = random_jet(n, degrees, seed=jet_seed(case_id, n, seed, t))
        for d in range(draws):
            P = ParameterSet.random(case, n, rng)
            record("RAW", verify_hierarchy(case_id, jet, P, "raw"), P, t == 0)
            record("CKY", verify_hierarchy(case_id, jet, P, "cky"), P, t == 0)
            U = untwisted_params(case_id, P)
            if not untwisting_holds(case_id, U):
                raise AssertionError("untwisting projection failed")
            plain = verify_hierarchy(case_id, jet, U, "plain-cky")
            packed = verify_hierarchy(case_id, jet, U, "cky")
            record("UNTWIST", {**{("p", k): v for k, v in plain.items()},
                               **{("c", k): v for k, v in packed.items()}}, U, t == 0)
    elapsed = time.perf_counter() - start
    out = []
    for law in HIERARCHY_LAWS:
        worst, ok, fails, rec = stats[law]
        ident = f"{case_id}-{law}"
        out.append(IdentityReport(ident, n, trials, draws, seed, True, worst, ok, fails, elapsed / 3,
                                  "complex", HIERARCHY_ANCHORS[law].format(case=case_id), rec))
    return out


HIERARCHY_ANCHORS = {
    "RAW": "{case} raw hierarchy law",
    "CKY": "{case} law in conformal Killing-Yano form",
    "UNTWIST": "{case} reduction to the conformal Killing-Yano equation at the untwisting values",
}
