"""Exactly solvable model geometries.

Flat tori: with constant forms every modified Dirac operator is block
diagonal in Fourier modes, ``D = i p-slash + M`` on the mode
``exp(i p.x)`` with ``p = 2 pi (m + theta)``.

Round spheres: stereographic chart ``g = Omega^2 delta`` with
``Omega = 2 r^2 / (r^2 + |x|^2)`` (x = 0 is the north pole).  In the frame
``e_a = Omega^-1 d_a`` the spin connection is
``nabla_j = d_j + 1/4 [Gamma_j, du-slash]`` with ``u = log Omega`` and the
Killing spinors ``nabla_{e_a} eps = -k Gamma_a eps``, ``k = +-i/(2r)``, are
``eps = Omega^(1/2) (1 - 2k x-slash) psi0``.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .clifford_core import CliffordAlgebra, build_algebra, slash
from .exterior_forms import MultiForm, antisymmetrize, form_sq, wedge, zero_array
from .hierarchy import _Forms, _a, bilinear_gradient, bilinears
from .parameter_space import (
    BOUND_CASE_OF,
    BoundInput,
    ConditionViolated,
    ParameterSet,
    SideRelationError,
    bound_value,
    friedrich_polynomial,
    hijazi_parameters,
)

__all__ = [
    "TorusSpec",
    "SpectralReport",
    "BudgetExceeded",
    "OPERATOR_DEGREES",
    "modification_matrix",
    "torus_blocks",
    "torus_spectrum",
    "random_constant_form",
    "anti_self_adjoint_params",
    "proposition_config",
    "proposition_spectrum",
    "SphereSpec",
    "ChartError",
    "sphere_killing_spinor",
    "sphere_points",
    "sphere_check",
    "SPHERE_CHECKS",
    "friedrich_saturation",
    "prop0_saturation_on_sphere",
    "yamabe_hijazi_check",
    "torus_weighted_bound_check",
]

SPECTRAL_TOL = 1e-9
POINTWISE_TOL = 1e-10

# case -> ((parameter name, degree), ...); the 0-form part multiplies f
OPERATOR_DEGREES = {
    "dirac": (),
    "0-form": (("e", 0),),
    "1-form": (("e", 1),),
    "2-form": (("e", 2),),
    "3-form": (("e", 3),),
    "4-form": (("e", 4),),
    "01-form": (("e1", 0), ("e2", 1)),
    "02-form": (("e1", 0), ("e2", 2)),
    "03-form": (("e1", 0), ("e2", 3)),
}

_HORIZON = {1: (-0.25, 0.25), 4: (1 / 96, 1 / 96), 2: (0.125, -0.125)}


class BudgetExceeded(ValueError):
    pass


def _algebra(n: int, case_id: str) -> CliffordAlgebra:
    if case_id.startswith("horizon"):
        if n != 9:
            raise ValueError("horizon operators live on 9-manifolds")
        return build_algebra(9, "real")
    return build_algebra(n)


def _slash_float(arr, p, algebra):
    if p == 0:
        return complex(arr) * np.eye(algebra.size, dtype=complex)
    return np.asarray(slash(MultiForm(algebra.n, {p: np.asarray(arr, dtype=float)}), algebra, exact=False),
                      dtype=complex)


def modification_matrix(case_id: str, params: ParameterSet | None, forms: dict, algebra: CliffordAlgebra,
                        f: float = 1.0) -> np.ndarray:
    """The zeroth order part ``D - nabla-slash`` for constant data."""
    m = np.zeros((algebra.size, algebra.size), dtype=complex)
    if case_id.startswith("horizon"):
        upper = case_id == "horizon+"
        for p, (cp, cm) in _HORIZON.items():
            if p in forms:
                m += (cp if upper else cm) * _slash_float(forms[p], p, algebra)
        return m
    for name, p in OPERATOR_DEGREES[case_id]:
        coef = complex(params.get(name))
        if p == 0:
            m += coef * f * np.eye(algebra.size)
        elif p in forms:
            m += coef * _slash_float(forms[p], p, algebra)
    return m


@dataclass
class TorusSpec:
    """Flat unit torus with spin structure offsets ``theta`` and constant forms.

    ``forms`` maps degree to a full antisymmetric float array; for the
    horizon cases the degrees 1, 2, 4 carry h, G, F.
    """

    n: int
    case_id: str = "dirac"
    params: ParameterSet | None = None
    forms: dict = field(default_factory=dict)
    f: float = 1.0
    theta: tuple | None = None
    radius: int = 4
    max_blocks: int = 250_000

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("truncation radius must be >= 1")
        if self.theta is None:
            self.theta = (0.5,) * self.n
        if len(self.theta) != self.n:
            raise ValueError("theta needs one offset per direction")

    @property
    def block_count(self) -> int:
        return (2 * self.radius + 1) ** self.n


def _momenta(spec: TorusSpec) -> np.ndarray:
    rng = range(-spec.radius, spec.radius + 1)
    modes = np.array(list(itertools.product(rng, repeat=spec.n)), dtype=float)
    return 2 * np.pi * (modes + np.asarray(spec.theta, dtype=float))


def torus_blocks(spec: TorusSpec):
    """Per-mode matrices ``i p-slash + M`` stacked as ``(blocks, d, d)``."""
    if spec.block_count > spec.max_blocks:
        raise BudgetExceeded(f"{spec.block_count} blocks exceed the budget of {spec.max_blocks}")
    alg = _algebra(spec.n, spec.case_id)
    p = _momenta(spec)
    g = np.stack([np.asarray(x, dtype=complex) for x in alg.fgammas])
    pslash = np.einsum("ka,aij->kij", p, g)
    m = modification_matrix(spec.case_id, spec.params, spec.forms, alg, spec.f)
    return 1j * pslash + m[None, :, :], p


@dataclass
class SpectralReport:
    case_id: str
    n: int
    eigenvalues: np.ndarray
    bound: float | None = None
    bound_id: str | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def abs2(self) -> np.ndarray:
        return np.abs(self.eigenvalues) ** 2

    @property
    def margins(self) -> np.ndarray | None:
        return None if self.bound is None else self.abs2 - self.bound

    @property
    def min_margin(self) -> float | None:
        m = self.margins
        return None if m is None else float(m.min())

    @property
    def max_real_part(self) -> float:
        return float(np.abs(self.eigenvalues.real).max())

    def holds(self, tol: float = SPECTRAL_TOL) -> bool:
        return self.bound is None or self.min_margin >= -tol

    def rows(self, label: str | None = None):
        """CSV rows ``(case, n, Re, Im, bound, margin)``."""
        label = label or self.case_id
        margins = self.margins
        for i, lam in enumerate(self.eigenvalues):
            yield (label, self.n, float(lam.real), float(lam.imag),
                   None if self.bound is None else float(self.bound),
                   None if margins is None else float(margins[i]))

    def as_dict(self) -> dict:
        out = {
            "case": self.case_id, "n": self.n, "count": int(self.eigenvalues.size),
            "min_abs2": float(self.abs2.min()), "max_abs_real": self.max_real_part,
        }
        if self.bound is not None:
            out.update(bound_id=self.bound_id, bound=float(self.bound), min_margin=self.min_margin,
                       holds=self.holds())
        out.update(self.metadata)
        return out


def torus_spectrum(spec: TorusSpec, bound_id: str | None = None) -> SpectralReport:
    """All block eigenvalues; with ``bound_id`` the proposition's bound at
    ``inf R = 0`` and the constant form squares."""
    blocks, _ = torus_blocks(spec)
    lam = np.linalg.eigvals(blocks).reshape(-1)
    bound = None
    if bound_id is not None:
        params = spec.params or ParameterSet(n=spec.n, case_id=BOUND_CASE_OF[bound_id])
        bound = float(bound_value(bound_id, params, _torus_bound_input(spec)).value)
    meta = {"radius": spec.radius, "theta": list(spec.theta), "blocks": spec.block_count}
    if spec.params is not None:
        meta["params"] = spec.params.as_dict()
    return SpectralReport(spec.case_id, spec.n, lam, bound, bound_id, meta)


def _sq(arr, p, n):
    if arr is None:
        return 0.0
    return float(np.real(form_sq(MultiForm(n, {p: np.asarray(arr, dtype=float)}))))


def _torus_bound_input(spec: TorusSpec) -> BoundInput:
    n = spec.n
    return BoundInput(inf_R=0.0, f2=float(spec.f) ** 2, A2=_sq(spec.forms.get(1), 1, n),
                      F2=_sq(spec.forms.get(2), 2, n), H2=_sq(spec.forms.get(3), 3, n), delta_A=0.0)


def random_constant_form(n: int, p: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    t = rng.normal(size=(n,) * p) * scale
    return np.real(antisymmetrize(t)).astype(float) if p > 1 else t


def anti_self_adjoint_params(case_id: str, n: int, rng: np.random.Generator) -> ParameterSet:
    """Coefficients making ``e omega-slash`` anti-hermitian.

    The slash of a p-form is hermitian for p = 0, 1 (mod 4) and
    anti-hermitian for p = 2, 3 (mod 4), so e must be imaginary or real
    accordingly.
    """
    vals = {}
    for name, p in OPERATOR_DEGREES[case_id]:
        x = float(rng.normal())
        vals[name] = complex(0, x) if p % 4 in (0, 1) else complex(x, 0)
    return ParameterSet(n=n, case_id=case_id, **vals)


def _c(x):
    return complex(x)


def proposition_config(bound_id: str, n: int, rng: np.random.Generator, radius: int = 4,
                       attempts: int = 200) -> TorusSpec:
    """Random constant forms and parameters satisfying the bound's side relations."""
    case_id = BOUND_CASE_OF[bound_id]
    top = max((deg for _, deg in OPERATOR_DEGREES.get(case_id, ())), default=0)
    if top > n:
        raise ValueError(f"{case_id} needs n >= {top}")
    if bound_id == "friedrich":
        return TorusSpec(n, "dirac", ParameterSet(n=n, case_id="friedrich"), radius=radius)
    for _ in range(attempts):
        z = lambda: complex(rng.normal(), rng.normal())
        e = z()
        if bound_id == "prop0":
            p = dict(e=e, k=e)
        elif bound_id == "prop1":
            p = dict(e=e, k1=-e.real, k2=complex(rng.normal(), e.imag))
        elif bound_id == "harm2":
            p = dict(e=e, k1=e.real, k2=4 * e.real - 2 * e.conjugate())
        elif bound_id == "prop2":
            p = dict(e=e, k1=e.real, k2=4 * e.real + 2j * e.imag)
        elif bound_id == "harm3":
            p = dict(e=e, k1=-1j * e.imag, k2=6j * e.imag + 3 * e.conjugate())
        elif bound_id == "prop3":
            e = complex(e.real, 0)
            p = dict(e=e, k1=0j, k2=3 * e)
        elif bound_id == "prop01":
            e1, e2 = z(), z()
            p = dict(e1=e1, e2=e2, k0=e1, k1=-e2.real, k2=complex((3 - n) * e2.real, e2.imag))
        elif bound_id == "prop02":
            e2 = z()
            e1 = float(rng.normal()) * complex((n - 1) * e2.real, e2.imag)
            p = dict(e1=e1, e2=e2, k0=e1, k1=e2.real, k2=4 * e2.real + 2j * e2.imag)
        elif bound_id == "prop03":
            e1, e2 = complex(rng.normal(), 0), complex(rng.normal(), 0)
            p = dict(e1=e1, e2=e2, k0=e1, k1=0j, k2=3 * e2)
        else:
            raise KeyError(f"no torus configuration for {bound_id!r}")
        params = ParameterSet(n=n, case_id=case_id, **p)
        forms = {}
        for _, deg in OPERATOR_DEGREES[case_id]:
            if deg:
                forms[deg] = random_constant_form(n, deg, rng, 0.5)
        spec = TorusSpec(n, case_id, params, forms, f=float(rng.uniform(0.5, 1.5)), radius=radius)
        try:
            bound_value(bound_id, params, _torus_bound_input(spec))
        except ConditionViolated:
            continue
        return spec
    raise SideRelationError(f"could not sample parameters for {bound_id} in dimension {n}")


def proposition_spectrum(bound_id: str, n: int, radius: int = 4, seed: int = 0) -> SpectralReport:
    rng = np.random.default_rng([seed, n, sum(map(ord, bound_id))])
    spec = proposition_config(bound_id, n, rng, radius)
    return torus_spectrum(spec, bound_id)


# round sphere ---------------------------------------------------------------

class ChartError(ValueError):
    pass


@dataclass
class SphereSpec:
    n: int
    r: float = 1.0
    killing_sign: int = 1
    psi0: np.ndarray | None = None
    chart_limit: float = 1e3

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("radius must be positive")
        if self.killing_sign not in (1, -1):
            raise ValueError("killing_sign is +1 or -1")
        self.algebra = build_algebra(self.n)
        if self.psi0 is None:
            rng = np.random.default_rng(self.n)
            v = rng.normal(size=self.algebra.size) + 1j * rng.normal(size=self.algebra.size)
            self.psi0 = v / np.linalg.norm(v)

    @property
    def k(self) -> complex:
        return self.killing_sign * 0.5j / self.r

    @property
    def scalar_curvature(self) -> float:
        return self.n * (self.n - 1) / self.r ** 2

    def gammas(self):
        return self.algebra.fgammas


def _omega(spec: SphereSpec, x):
    return 2 * spec.r ** 2 / (spec.r ** 2 + x @ x)


def _du(spec: SphereSpec, x):
    return -2 * x / (spec.r ** 2 + x @ x)


def _xslash(g, v):
    return sum(v[a] * g[a] for a in range(len(v)))


def sphere_killing_spinor(spec: SphereSpec, x):
    """Closed-form Killing spinor and its coordinate derivatives at ``x``.

    Normalised so that the chart centre returns ``psi0`` itself.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or math.sqrt(x @ x) > spec.chart_limit * spec.r:
        raise ChartError("point too close to the excluded antipode")
    g = spec.gammas()
    om = _omega(spec, x)
    ident = np.eye(spec.algebra.size)
    c = -2 * spec.k
    base = (ident + c * _xslash(g, x)) @ spec.psi0
    eps = math.sqrt(om / 2) * base
    half = -0.5 * om ** 1.5 / (math.sqrt(2) * spec.r ** 2)
    deps = [half * x[j] * base + math.sqrt(om / 2) * c * (g[j] @ spec.psi0) for j in range(spec.n)]
    return eps, deps


def spin_connection(spec: SphereSpec, x, j):
    g = spec.gammas()
    dus = _xslash(g, _du(spec, x))
    return 0.25 * (g[j] @ dus - dus @ g[j])


def sphere_points(spec: SphereSpec, count: int = 20, seed: int = 0):
    """Sample chart points, including the chart centre."""
    rng = np.random.default_rng(seed)
    pts = [np.zeros(spec.n)]
    while len(pts) < count:
        pts.append(rng.normal(size=spec.n) * spec.r * rng.uniform(0.2, 2.0))
    return pts


def _christoffel(spec: SphereSpec, x):
    du = _du(spec, x)
    n = spec.n
    d = np.eye(n)
    # gam[k, i, j] = Gamma^k_ij
    return (np.einsum("ki,j->kij", d, du) + np.einsum("kj,i->kij", d, du) - np.einsum("ij,k->kij", d, du))


def _covariant_chi(spec: SphereSpec, x, eps, deps):
    """Coordinate components chi_p and nabla chi_p ([j, I]) for all p."""
    om = _omega(spec, x)
    du = _du(spec, x)
    fr = bilinears(eps, spec.algebra)
    dfr = bilinear_gradient(eps, deps, spec.algebra)
    gam = _christoffel(spec, x)
    out = []
    for p in range(spec.n + 1):
        chi = np.real(om ** p * fr[p])
        dchi = np.real(np.stack([p * om ** p * du[j] * fr[p] + om ** p * dfr[p][j] for j in range(spec.n)]))
        nab = dchi.copy()
        for slot in range(p):
            # - Gamma^k_{j i_slot} chi_{.. k ..}
            moved = np.moveaxis(chi, slot, 0)
            corr = np.einsum("kjs,k...->js...", gam, moved)
            nab -= np.moveaxis(corr, 1, slot + 1)
        out.append((chi, nab, fr[p]))
    return out, om


def _wedge_float(n, p, a, q, b):
    r = wedge(MultiForm(n, {p: np.asarray(a, dtype=float)}), MultiForm(n, {q: np.asarray(b, dtype=float)}))
    return np.real(r.components.get(p + q, zero_array(n, p + q, False)))


def _cky_coordinate_residual(n, p, chi, nab, om):
    if p == 0:
        return 0.0
    dchi = (p + 1) * antisymmetrize(nab)
    g = om ** 2 * np.eye(n)
    delta = -np.einsum("kk...->...", nab) / om ** 2 if p >= 1 else None
    worst = 0.0
    for j in range(n):
        lhs = nab[j]
        term_d = dchi[j] / (p + 1)
        term_delta = _wedge_float(n, 1, g[j], p - 1, delta) / (n - p + 1)
        res = lhs - term_d + term_delta
        worst = max(worst, float(np.abs(res).max()) / om ** (p + 1))
    return worst


def _check_killing(spec, x):
    eps, deps = sphere_killing_spinor(spec, x)
    om = _omega(spec, x)
    g = spec.gammas()
    worst = 0.0
    for j in range(spec.n):
        nab = deps[j] + spin_connection(spec, x, j) @ eps
        worst = max(worst, float(np.abs(nab / om + spec.k * (g[j] @ eps)).max()))
    return worst


def _curvature(spec, x):
    """Scalar curvature and Ricci tensor (frame components) of the chart metric."""
    n, r = spec.n, spec.r
    s = r ** 2 + x @ x
    du = _du(spec, x)
    hess = -2 * np.eye(n) / s + 4 * np.outer(x, x) / s ** 2
    lap = np.trace(hess)
    om = _omega(spec, x)
    ric = -(n - 2) * (hess - np.outer(du, du)) - (lap + (n - 2) * du @ du) * np.eye(n)
    scal = -(2 * (n - 1) * lap + (n - 2) * (n - 1) * du @ du) / om ** 2
    return scal, ric / om ** 2


def _check_int(spec, x):
    eps, _ = sphere_killing_spinor(spec, x)
    scal, _ = _curvature(spec, x)
    coef = -0.5 * scal - 2 * spec.n * (spec.n - 1) * spec.k ** 2
    return float(abs(coef) * np.linalg.norm(eps))


def _check_int1(spec, x):
    eps, _ = sphere_killing_spinor(spec, x)
    _, ric = _curvature(spec, x)
    g = spec.gammas()
    worst = 0.0
    for a in range(spec.n):
        rs = _xslash(g, ric[a])
        v = (-0.5 * rs - 2 * (spec.n - 1) * spec.k ** 2 * g[a]) @ eps
        worst = max(worst, float(np.abs(v).max()))
    return worst


def _check_curvature_model(spec, x):
    scal, _ = _curvature(spec, x)
    return abs(scal - spec.scalar_curvature)


def _check_killing_1form(spec, x):
    eps, deps = sphere_killing_spinor(spec, x)
    data, om = _covariant_chi(spec, x, eps, deps)
    nab = data[1][1]
    return float(np.abs(nab + nab.T).max()) / om ** 2


def _check_cky(spec, x, degrees=(2,)):
    eps, deps = sphere_killing_spinor(spec, x)
    data, om = _covariant_chi(spec, x, eps, deps)
    return max(_cky_coordinate_residual(spec.n, p, data[p][0], data[p][1], om) for p in degrees if p <= spec.n)


def _check_hier0(spec, x):
    eps, deps = sphere_killing_spinor(spec, x)
    data, om = _covariant_chi(spec, x, eps, deps)
    n, k = spec.n, spec.k
    F = _Forms(n, False)
    worst = 0.0
    for p in range(n + 1):
        lhs = data[p][1] / om ** (p + 1)
        rhs = np.zeros_like(lhs, dtype=complex)
        if p + 1 <= n:
            rhs += -_a(p, p + 1, False) * (k.conjugate() + (-1) ** p * k) * data[p + 1][2]
        if p >= 1:
            rhs += -_a(p, p - 1, False) * (k.conjugate() + (-1) ** (p - 1) * k) * F.alpha_wedge(p - 1, data[p - 1][2])
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


def _check_dirac_eigen(spec, x):
    eps, deps = sphere_killing_spinor(spec, x)
    om = _omega(spec, x)
    g = spec.gammas()
    d = sum(g[j] @ (deps[j] + spin_connection(spec, x, j) @ eps) for j in range(spec.n)) / om
    return float(np.abs(d + spec.n * spec.k * eps).max())


SPHERE_CHECKS = {
    "KILLING": (_check_killing, "Killing spinor equation, nabla-hat eps = 0"),
    "INT": (_check_int, "scalar integrability condition with f constant"),
    "INT-RICCI": (_check_int1, "Ricci integrability condition with f constant"),
    "CURVATURE": (_check_curvature_model, "chart scalar curvature equals n(n-1)/r^2"),
    "KILLING-1FORM": (_check_killing_1form, "chi_1 is a Killing 1-form"),
    "CKY": (_check_cky, "chi_2 is a conformal Killing-Yano form"),
    "CKY-ALL": (lambda s, x: _check_cky(s, x, range(1, s.n + 1)), "every chi_p is conformal Killing-Yano"),
    "HIER-0": (_check_hier0, "covariant derivative law of the bilinears for a parallel spinor"),
    "DIRAC": (_check_dirac_eigen, "Killing spinor is a Dirac eigenspinor with eigenvalue -n k"),
}


@dataclass
class SphereReport:
    check_id: str
    n: int
    r: float
    killing_sign: int
    points: int
    max_residual: float
    anchor: str
    tol: float = POINTWISE_TOL

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol

    def as_dict(self) -> dict:
        return {"check": self.check_id, "n": self.n, "r": self.r, "killing_sign": self.killing_sign,
                "points": self.points, "max_residual": self.max_residual, "tol": self.tol,
                "passed": self.passed, "anchor": self.anchor}


def sphere_check(check_id: str, spec: SphereSpec, sample_points=None, tol: float = POINTWISE_TOL) -> SphereReport:
    if check_id not in SPHERE_CHECKS:
        raise KeyError(f"unknown sphere check {check_id!r}")
    fn, anchor = SPHERE_CHECKS[check_id]
    pts = sphere_points(spec) if sample_points is None else sample_points
    worst = max(fn(spec, np.asarray(x, dtype=float)) for x in pts)
    return SphereReport(check_id, spec.n, spec.r, spec.killing_sign, len(pts), worst, anchor, tol)


def _exact_r(r):
    return Fraction(r).limit_denominator(10 ** 6) if isinstance(r, float) else Fraction(r)


def friedrich_saturation(n: int, r=1) -> dict:
    """Sphere ground state ``|lambda|^2 = n^2/(4 r^2)`` against the bound."""
    if n < 2:
        raise ValueError("n >= 2 required")
    rr = _exact_r(r)
    scal = Fraction(n * (n - 1)) / rr ** 2
    lam2 = Fraction(n * n, 4) / rr ** 2
    bound = bound_value("friedrich", ParameterSet(n=n, case_id="friedrich"), BoundInput(inf_R=scal)).value
    other = [Fraction(0), Fraction(1, 2), Fraction(2, n)]
    weaker = {str(s): scal / (4 * friedrich_polynomial(s, n)) for s in other if s != Fraction(1, n)}
    spec = SphereSpec(n, float(rr))
    killing = sphere_check("DIRAC", spec)
    return {
        "n": n, "r": str(rr), "R": str(scal), "lambda2": str(lam2), "bound": str(bound),
        "saturated": lam2 == bound,
        "weaker_s_strictly_smaller": all(v < bound for v in weaker.values()),
        "killing_eigen_residual": killing.max_residual,
        "passed": lam2 == bound and all(v < bound for v in weaker.values()) and killing.passed,
    }


def _sphere_dirac_levels(n, r, count=6):
    return [(n / 2 + j) / r for j in range(count)]


def prop0_saturation_on_sphere(n: int, r: float = 1.0, e: complex = 0.5j, tol: float = 1e-12) -> dict:
    """``D = nabla-slash + e`` on the round sphere with e imaginary.

    The spectrum is ``e +- i (n/2 + j)/r``; for ``|e| <= (n+1)/(2r)`` the
    margin over the bound is ``n (|e| - 1/(2r))^2``.
    """
    e = complex(e)
    if abs(e.real) > 0:
        raise ValueError("e must be imaginary")
    t = abs(e)
    lam2 = min((e.imag + s * mu) ** 2 for mu in _sphere_dirac_levels(n, r) for s in (1, -1))
    scal = n * (n - 1) / r ** 2
    bound = float(bound_value("prop0", ParameterSet(n=n, case_id="0-form", e=e, k=e),
                              BoundInput(inf_R=scal, f2=1.0)).value)
    margin = lam2 - bound
    closed = n * (t - 1 / (2 * r)) ** 2
    in_range = t <= (n + 1) / (2 * r)
    return {
        "n": n, "r": r, "e": [e.real, e.imag], "min_abs2": lam2, "bound": bound, "margin": margin,
        "closed_form_margin": closed if in_range else None,
        "passed": margin >= -tol and (not in_range or abs(margin - closed) <= tol),
    }


def yamabe_hijazi_check(n: int, r=1) -> dict:
    """On the round sphere the constant function is the first Yamabe
    eigenfunction, ``mu_1 = R``; the Hijazi bound then equals Friedrich's."""
    if n < 3:
        raise ValueError("the Yamabe coefficient 4(n-1)/(n-2) needs n >= 3")
    rr = _exact_r(r)
    scal = Fraction(n * (n - 1)) / rr ** 2
    mu1 = scal  # L 1 = R
    hij = bound_value("hijazi", ParameterSet(n=n, case_id="01-form"), BoundInput(extra={"mu1": mu1})).value
    fried = bound_value("friedrich", ParameterSet(n=n, case_id="friedrich"), BoundInput(inf_R=scal)).value
    hp = hijazi_parameters(n)
    cor = bound_value("weighted01", hp, BoundInput(inf_R=scal, extra={"lap_h_over_h": 0, "dlogh2": 0}))
    lam2 = Fraction(n * n, 4) / rr ** 2
    return {
        "n": n, "r": str(rr), "mu1": str(mu1), "hijazi": str(hij), "friedrich": str(fried),
        "weighted01_constant_h": str(cor.value), "lambda2": str(lam2),
        "passed": hij == fried == cor.value == lam2,
    }


def torus_weighted_bound_check(n: int = 3, radius: int = 3, samples: int = 64) -> dict:
    """Non-constant h on the flat torus: the corollary bound is <= 0 and so
    every Dirac eigenvalue satisfies it."""
    hp = hijazi_parameters(n)
    t = np.linspace(0, 1, samples, endpoint=False)
    h = 2 + np.sin(2 * np.pi * t)
    lap = -4 * np.pi ** 2 * np.sin(2 * np.pi * t)
    dh = 2 * np.pi * np.cos(2 * np.pi * t)
    inp = BoundInput(inf_R=np.zeros(samples), extra={"lap_h_over_h": lap / h, "dlogh2": (dh / h) ** 2})
    b = float(bound_value("weighted01", hp, inp).value)
    rep = torus_spectrum(TorusSpec(n, "dirac", radius=radius))
    return {"n": n, "bound": b, "min_abs2": float(rep.abs2.min()),
            "passed": b <= 1e-12 and float(rep.abs2.min()) >= b - SPECTRAL_TOL}
