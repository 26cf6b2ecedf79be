"""Exterior algebra at a point, flat orthonormal frame.

A p-form is stored as its full antisymmetric component array
``omega[i1, ..., ip]`` with ``omega = (1/p!) omega_{i1...ip} e^{i1}^...^e^{ip}``.
Indices are 0-based.  Degree-0 components are 0-d arrays.

All operations work on float arrays and on exact object arrays of
:class:`~mfdirac.scalars.Gq` alike.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .scalars import Gq, exact_array, is_exact, scale

__all__ = [
    "MultiForm",
    "FormJet",
    "DimensionMismatch",
    "perm_sign",
    "antisymmetrize",
    "sorted_components",
    "expand_sorted",
    "basis_form",
    "zero_array",
    "wedge",
    "inner_derivation",
    "adjoint_inner",
    "vee",
    "vee_by_basis",
    "adjoint_by_basis",
    "form_inner",
    "form_sq",
    "hodge_star",
    "star_wedge",
    "wedge_sorted",
    "star_sorted",
    "jet_d",
    "jet_delta",
    "d_from_gradient",
    "d_sorted",
    "delta_from_gradient",
    "close_gradient",
    "coclose_gradient",
    "levi_civita",
]


class DimensionMismatch(ValueError):
    pass


def perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def _signed_perms(p: int):
    return tuple((perm, perm_sign(perm)) for perm in itertools.permutations(range(p)))


def zero_array(n: int, p: int, exact: bool) -> np.ndarray:
    shape = (n,) * p
    if exact:
        out = np.empty(shape, dtype=object)
        out.fill(Gq(0)) if p else None
        if p == 0:
            return np.array(Gq(0), dtype=object)
        return out
    return np.zeros(shape, dtype=complex)


def sorted_components(arr: np.ndarray) -> dict:
    """``{(i1 < ... < ip): arr[i1, ..., ip]}`` for an antisymmetric array."""
    p = arr.ndim
    if p == 0:
        return {(): arr[()]}
    return {idx: arr[idx] for idx in itertools.combinations(range(arr.shape[0]), p)}


def expand_sorted(n: int, p: int, comps: dict, exact: bool) -> np.ndarray:
    """Inverse of :func:`sorted_components`; missing tuples are zero."""
    if p == 0:
        v = comps.get((), Gq(0) if exact else 0.0)
        return np.array(v, dtype=object if exact else complex)
    arr = zero_array(n, p, exact)
    perms = _signed_perms(p)
    for idx, c in comps.items():
        neg = -c
        for perm, sign in perms:
            arr[tuple(idx[k] for k in perm)] = c if sign > 0 else neg
    return arr


def _alt_full(t: np.ndarray) -> np.ndarray:
    p, n = t.ndim, t.shape[0]
    exact = t.dtype == object
    perms = _signed_perms(p)
    comps = {}
    for idx in itertools.combinations(range(n), p):
        acc = None
        for perm, sign in perms:
            v = t[tuple(idx[k] for k in perm)]
            v = v if sign > 0 else -v
            acc = v if acc is None else acc + v
        comps[idx] = scale(acc, 1, math.factorial(p))
    return expand_sorted(n, p, comps, exact)


def antisymmetrize(t: np.ndarray, axes=None) -> np.ndarray:
    """Average over signed permutations of ``axes`` (all axes by default)."""
    if axes is None:
        axes = tuple(range(t.ndim))
    axes = tuple(axes)
    p = len(axes)
    if p <= 1:
        return t
    if p == t.ndim and len(set(t.shape)) == 1:
        return _alt_full(t)
    total = None
    for perm, sign in _signed_perms(p):
        order = list(range(t.ndim))
        for slot, src in zip(axes, perm):
            order[slot] = axes[src]
        term = np.transpose(t, order)
        term = term if sign > 0 else -term
        total = term if total is None else total + term
    return scale(total, 1, math.factorial(p))


def levi_civita(n: int) -> np.ndarray:
    eps = np.zeros((n,) * n, dtype=int)
    for perm, sign in _signed_perms(n):
        eps[perm] = sign
    return eps


@dataclass
class MultiForm:
    """Graded antisymmetric coefficient arrays, one per degree."""

    n: int
    components: dict = field(default_factory=dict)

    def __post_init__(self):
        for p, arr in list(self.components.items()):
            if p < 0 or p > self.n:
                raise DimensionMismatch(f"degree {p} outside [0, {self.n}]")
            arr = np.asarray(arr, dtype=object if is_exact(arr) else complex)
            if arr.shape != (self.n,) * p:
                raise DimensionMismatch(f"degree {p} component has shape {arr.shape}")
            self.components[p] = arr

    # construction -----------------------------------------------------
    @classmethod
    def pure(cls, n: int, p: int, arr) -> "MultiForm":
        return cls(n, {p: arr})

    @classmethod
    def scalar(cls, n: int, value) -> "MultiForm":
        arr = np.array(value, dtype=object if isinstance(value, Gq) else complex)
        return cls(n, {0: arr})

    @classmethod
    def zero(cls, n: int) -> "MultiForm":
        return cls(n, {})

    # access -----------------------------------------------------------
    @property
    def degrees(self):
        return sorted(self.components)

    @property
    def exact(self) -> bool:
        return any(a.dtype == object for a in self.components.values())

    def degree(self) -> int:
        """The unique degree of a pure form."""
        if len(self.components) != 1:
            raise ValueError("not a form of pure degree")
        return next(iter(self.components))

    def part(self, p: int) -> "MultiForm":
        if p in self.components:
            return MultiForm(self.n, {p: self.components[p]})
        return MultiForm(self.n, {})

    def array(self, p: int, exact: bool | None = None) -> np.ndarray:
        if p in self.components:
            return self.components[p]
        return zero_array(self.n, p, self.exact if exact is None else exact)

    def is_zero(self) -> bool:
        return all(not np.any(a != 0) if a.dtype != object else all(not v for v in a.flat)
                   for a in self.components.values())

    def to_exact(self) -> "MultiForm":
        return MultiForm(self.n, {p: exact_array(a) for p, a in self.components.items()})

    # linear structure ---------------------------------------------------
    def _check(self, other):
        if not isinstance(other, MultiForm):
            raise TypeError("expected a MultiForm")
        if other.n != self.n:
            raise DimensionMismatch(f"forms live in dimensions {self.n} and {other.n}")

    def __add__(self, other):
        self._check(other)
        comps = dict(self.components)
        for p, a in other.components.items():
            comps[p] = comps[p] + a if p in comps else a
        return MultiForm(self.n, comps)

    def __neg__(self):
        return MultiForm(self.n, {p: -a for p, a in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return MultiForm(self.n, {p: a * c for p, a in self.components.items()})

    __rmul__ = __mul__

    def equals(self, other) -> bool:
        """Exact equality, treating missing degrees as zero."""
        self._check(other)
        diff = self - other
        return diff.is_zero()


def basis_form(n: int, indices, exact: bool = True) -> MultiForm:
    """``e^{i1} ^ ... ^ e^{ip}`` (0-based, any order)."""
    indices = tuple(indices)
    p = len(indices)
    if len(set(indices)) != p:
        return MultiForm(n, {p: zero_array(n, p, exact)})
    arr = np.zeros((n,) * p, dtype=int)
    for perm, sign in _signed_perms(p):
        arr[tuple(indices[k] for k in perm)] = sign
    # the sign above is relative to the given order; make e^{I} have
    # component +1 at position I
    if p:
        arr = arr * arr[indices]
    return MultiForm(n, {p: exact_array(arr) if exact else arr.astype(complex)})


def _pure_pairs(a: MultiForm, b: MultiForm):
    a._check(b)
    for p, x in a.components.items():
        for q, y in b.components.items():
            yield p, x, q, y


def _accumulate(comps: dict, p: int, arr):
    comps[p] = comps[p] + arr if p in comps else arr


def _outer(x, y):
    t = np.multiply.outer(x, y)
    return t if isinstance(t, np.ndarray) else np.array(t, dtype=x.dtype)


def _wedge_arrays(x, p, y, q):
    r = p + q
    coeff = math.comb(r, p)
    return scale(antisymmetrize(_outer(x, y)), coeff)


def wedge(a: MultiForm, b: MultiForm) -> MultiForm:
    """Graded-antisymmetric product; (e^1 ^ e^2)_{12} = 1."""
    comps: dict = {}
    for p, x, q, y in _pure_pairs(a, b):
        if p + q > a.n:
            continue
        _accumulate(comps, p + q, _wedge_arrays(x, p, y, q))
    return MultiForm(a.n, comps)


def _contract_first(x, y):
    """sum_k x[k, I] y[k, J] as an array indexed (I, J)."""
    return np.tensordot(x, y, axes=([0], [0]))


def inner_derivation(chi: MultiForm, omega: MultiForm, *, clip: bool = False) -> MultiForm:
    """``i_chi omega`` for an l-form chi and a p-form omega, degree p+l-2,
    normalized as ``p/(p!(l-1)!) chi^k_{I} omega_{kJ} e^I ^ e^J``.

    Degree-0 inputs raise unless ``clip`` is set, in which case they
    contribute nothing.
    """
    comps: dict = {}
    for l, x, p, y in _pure_pairs(chi, omega):
        if l == 0 or p == 0:
            if clip:
                continue
            raise ValueError("inner derivation needs degrees >= 1")
        r = p + l - 2
        if r > chi.n:
            continue
        t = _contract_first(x, y)
        num = math.factorial(r) * p
        den = math.factorial(p) * math.factorial(l - 1)
        _accumulate(comps, r, scale(antisymmetrize(t), num, den))
    return MultiForm(chi.n, comps)


def interior_vector(vec, omega: MultiForm) -> MultiForm:
    """``i_X omega`` for a vector given by its components."""
    comps: dict = {}
    for p, y in omega.components.items():
        if p == 0:
            continue
        comps[p - 1] = np.tensordot(np.asarray(vec, dtype=y.dtype), y, axes=([0], [0]))
    return MultiForm(omega.n, comps)


def _sorted_tuples(n: int, p: int):
    return itertools.combinations(range(n), p)


def _basis_component(arr, idx):
    return arr[idx] if len(idx) else arr[()]


def form_inner(a: MultiForm, b: MultiForm):
    """``<a, b> = (1/p!) a_I b^I`` summed over common degrees (bilinear)."""
    a._check(b)
    total = None
    for p, x in a.components.items():
        if p not in b.components:
            continue
        y = b.components[p]
        s = np.sum(x * y) if p else x[()] * y[()]
        s = scale(s, 1, math.factorial(p))
        total = s if total is None else total + s
    if total is None:
        return Gq(0) if (a.exact or b.exact) else 0.0
    return total


def form_inner_pure(a: MultiForm, b: MultiForm):
    """As :func:`form_inner` but refuses mixed degrees."""
    if a.degrees != b.degrees or len(a.degrees) > 1:
        raise ValueError("form_inner needs two forms of the same pure degree")
    return form_inner(a, b)


def form_sq(a: MultiForm):
    """Unnormalized square ``omega_I omega^I`` (no 1/p!)."""
    total = None
    for p, x in a.components.items():
        s = np.sum(x * x) if p else x[()] * x[()]
        total = s if total is None else total + s
    if total is None:
        return Gq(0) if a.exact else 0.0
    return total


def _from_basis_coefficients(n: int, q: int, coeffs: dict, exact: bool) -> np.ndarray:
    arr = zero_array(n, q, exact)
    if q == 0:
        return np.array(coeffs.get((), Gq(0) if exact else 0.0), dtype=object if exact else complex)
    for idx, c in coeffs.items():
        for perm, sign in _signed_perms(q):
            arr[tuple(idx[k] for k in perm)] = c if sign > 0 else -c
    return arr


def adjoint_inner(chi: MultiForm, omega: MultiForm) -> MultiForm:
    """``i^dagger_chi omega`` defined by <phi, i^dagger omega> = <i_chi phi, omega>.

    Closed form: for an l-form chi and p-form omega the result has degree
    q = p - l + 2 with components ``q/(l-1)! Alt(chi_{k I} omega_{I J})``.
    """
    chi._check(omega)
    n = chi.n
    comps: dict = {}
    for l, x, p, y in _pure_pairs(chi, omega):
        if l == 0:
            continue
        q = p - l + 2
        if q < 1 or q > n or l - 1 > p:
            continue
        m = l - 1
        t = np.tensordot(x, y, axes=(list(range(1, l)), list(range(m)))) if m else np.multiply.outer(x, y)
        _accumulate(comps, q, scale(antisymmetrize(t), q, math.factorial(m)))
    return MultiForm(n, comps)


def vee(omega: MultiForm, chi: MultiForm) -> MultiForm:
    """Adjoint of the wedge, <phi, omega v chi> = <omega ^ phi, chi>, i.e.
    ``(omega v chi)_J = (1/p!) omega^I chi_{IJ}``."""
    omega._check(chi)
    comps: dict = {}
    for p, x, q, y in _pure_pairs(omega, chi):
        if p > q:
            if len(omega.degrees) == 1 and len(chi.degrees) == 1:
                raise ValueError(f"vee needs deg(omega) <= deg(chi), got {p} > {q}")
            continue
        if p == 0:
            t = y * x[()]
        else:
            t = np.tensordot(x, y, axes=(list(range(p)), list(range(p))))
            t = scale(t, 1, math.factorial(p))
        if q - p == 0 and not isinstance(t, np.ndarray):
            t = np.array(t, dtype=y.dtype)
        _accumulate(comps, q - p, t)
    return MultiForm(omega.n, comps)


def adjoint_by_basis(chi: MultiForm, omega: MultiForm) -> MultiForm:
    """Brute-force :func:`adjoint_inner` solved against the orthonormal basis."""
    chi._check(omega)
    n = chi.n
    exact = chi.exact or omega.exact
    comps: dict = {}
    for l in chi.degrees:
        if l == 0:
            continue
        chi_l = chi.part(l)
        for p in omega.degrees:
            q = p - l + 2
            if q < 1 or q > n:
                continue
            om = omega.part(p)
            coeffs = {}
            for idx in _sorted_tuples(n, q):
                phi = basis_form(n, idx, exact)
                coeffs[idx] = form_inner(inner_derivation(chi_l, phi), om)
            _accumulate(comps, q, _from_basis_coefficients(n, q, coeffs, exact))
    return MultiForm(n, comps)


def vee_by_basis(omega: MultiForm, chi: MultiForm) -> MultiForm:
    """Brute-force :func:`vee` from the defining adjunction."""
    omega._check(chi)
    n = omega.n
    exact = omega.exact or chi.exact
    comps: dict = {}
    for p in omega.degrees:
        for q in chi.degrees:
            if p > q:
                continue
            r = q - p
            om, ch = omega.part(p), chi.part(q)
            coeffs = {}
            for idx in _sorted_tuples(n, r):
                phi = basis_form(n, idx, exact)
                coeffs[idx] = form_inner(wedge(om, phi), ch)
            _accumulate(comps, r, _from_basis_coefficients(n, r, coeffs, exact))
    return MultiForm(n, comps)


def hodge_star(omega: MultiForm) -> MultiForm:
    """Euclidean Hodge star, ``(*w)_J = (1/p!) w_I eps_{IJ}``."""
    n = omega.n
    eps = levi_civita(n)
    comps = {}
    for p, x in omega.components.items():
        e = eps.astype(object) if x.dtype == object else eps
        if x.dtype == object:
            e = exact_array(eps)
        t = np.tensordot(x, e, axes=(list(range(p)), list(range(p)))) if p else x[()] * e
        comps[n - p] = scale(t, 1, math.factorial(p))
    return MultiForm(n, comps)


def _merge_sign(first, second) -> int:
    """Sign of the permutation sorting the concatenation ``first + second``."""
    seq = list(first) + list(second)
    order = sorted(range(len(seq)), key=seq.__getitem__)
    return perm_sign(order)


def wedge_sorted(a: dict, p: int, b: dict, q: int, n: int) -> dict:
    """Sorted components of ``a ^ b`` from sorted components of a p-form
    and a q-form; no dense array of degree p+q is formed."""
    out = {}
    for K in itertools.combinations(range(n), p + q):
        acc = None
        for J in itertools.combinations(K, p):
            rest = tuple(k for k in K if k not in J)
            x, y = a.get(J), b.get(rest)
            if x is None or y is None:
                continue
            t = x * y if _merge_sign(J, rest) > 0 else -(x * y)
            acc = t if acc is None else acc + t
        if acc is not None:
            out[K] = acc
    return out


def star_sorted(comps: dict, p: int, n: int) -> dict:
    """Sorted components of the Hodge star of a p-form given sorted."""
    out = {}
    for idx, c in comps.items():
        rest = tuple(k for k in range(n) if k not in idx)
        out[rest] = c if _merge_sign(idx, rest) > 0 else -c
    return out


def star_wedge(a: MultiForm, b: MultiForm) -> MultiForm:
    """``*(a ^ b)`` for pure forms, usable when deg(a)+deg(b) is too large
    for a dense intermediate array (e.g. two 4-forms in nine dimensions)."""
    a._check(b)
    (p, x), = a.components.items()
    (q, y), = b.components.items()
    n = a.n
    exact = a.exact or b.exact
    if p + q > n:
        return MultiForm(n, {})
    w = wedge_sorted(sorted_components(x), p, sorted_components(y), q, n)
    r = n - p - q
    return MultiForm(n, {r: expand_sorted(n, r, star_sorted(w, p + q, n), exact)})


@dataclass
class FormJet:
    """Value and first derivatives of a multi-form at a point.

    ``gradient[p][i, j1, ..., jp] = d_i omega_{j1...jp}``.
    """

    value: MultiForm
    gradient: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.value.n

    def grad(self, p: int) -> np.ndarray:
        if p in self.gradient:
            return self.gradient[p]
        return zero_array(self.n, p + 1, self.value.exact)

    def directional(self, i: int) -> MultiForm:
        """``d_i omega`` as a multi-form."""
        return MultiForm(self.n, {p: g[i] for p, g in self.gradient.items()})


def d_from_gradient(g: np.ndarray) -> np.ndarray:
    """``(d w)_{i J} = (p+1) Alt(d_i w_J)`` from a gradient array."""
    return scale(antisymmetrize(g), g.ndim)


def d_sorted(g: np.ndarray) -> dict:
    """Sorted components of d w straight from the gradient, without the
    dense rank-(p+1) antisymmetrization."""
    n, p = g.shape[0], g.ndim - 1
    out = {}
    for K in itertools.combinations(range(n), p + 1):
        acc = None
        for s, k in enumerate(K):
            v = g[(k,) + K[:s] + K[s + 1:]]
            v = v if s % 2 == 0 else -v
            acc = v if acc is None else acc + v
        out[K] = acc
    return out


def delta_from_gradient(g: np.ndarray) -> np.ndarray:
    """``(delta w)_{J'} = - d^k w_{k J'}``, the formal adjoint of d."""
    return -np.trace(g, axis1=0, axis2=1) if g.ndim >= 2 else None


def jet_d(jet: FormJet) -> MultiForm:
    comps = {}
    for p, g in jet.gradient.items():
        if p + 1 <= jet.n:
            comps[p + 1] = d_from_gradient(g)
    return MultiForm(jet.n, comps)


def jet_delta(jet: FormJet) -> MultiForm:
    comps = {}
    for p, g in jet.gradient.items():
        if p >= 1:
            comps[p - 1] = delta_from_gradient(g)
    return MultiForm(jet.n, comps)


def close_gradient(g: np.ndarray) -> np.ndarray:
    """Project a form gradient onto the closed (d = 0) subspace."""
    return g - antisymmetrize(g)


def coclose_gradient(g: np.ndarray) -> np.ndarray:
    """Remove the trace part so that delta vanishes; preserves closedness."""
    if g.ndim < 2:
        return g
    n = g.shape[0]
    p = g.ndim - 1
    tr = np.trace(g, axis1=0, axis2=1)  # T_{j2..jp}
    exact = g.dtype == object
    eye = exact_array(np.eye(n, dtype=int)) if exact else np.eye(n)
    corr = None
    for s in range(p):
        # delta_{i j_s} T_{J \ j_s}, with sign (-1)^s
        t = _outer(eye, tr)  # indices (i, j_s, rest...)
        order = [0] + list(range(2, s + 2)) + [1] + list(range(s + 2, p + 1))
        inv = np.argsort(order)
        t = np.transpose(t, inv)
        t = t if s % 2 == 0 else -t
        corr = t if corr is None else corr + t
    return g - scale(corr, 1, n - p + 1)
