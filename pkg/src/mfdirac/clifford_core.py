"""Matrix representations of Cl(n) with (Gamma^i)^2 = +1 and hermitian
generators, the form-to-Clifford slash map and the Dirac inner product.

Generators are built from tensor products of 2x2 blocks so every entry is
in {0, +-1, +-i}; exact arithmetic on them is closed over Gaussian rationals.

Conventions:

* complex kind, n = 2m: Jordan-Wigner generators
  ``s3^(j) (x) s1 (x) 1`` and ``s3^(j) (x) s2 (x) 1``; size 2^m.
* complex kind, n = 2m+1: the first 2m as above and
  ``Gamma^n = s3 (x) ... (x) s3 = i^m Gamma^1...Gamma^{2m}``.
* real kind, n = 8: sixteen-dimensional real symmetric generators from
  tensor products of {1, s1, s3, i*s2}; n = 9 adds ``Gamma^9 = Gamma^1...Gamma^8``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exterior_forms import MultiForm, _signed_perms, sorted_components
from .scalars import Gq, exact_array, float_array, is_exact, conj

__all__ = [
    "CliffordAlgebra",
    "UnsupportedRepresentation",
    "ContractionError",
    "build_algebra",
    "slash",
    "slash_sorted",
    "dirac_inner",
    "contraction",
    "contract_connection",
    "clifford_product",
]


class UnsupportedRepresentation(ValueError):
    pass


class ContractionError(ArithmeticError):
    pass


_S0 = np.eye(2, dtype=complex)
_S1 = np.array([[0, 1], [1, 0]], dtype=complex)
_S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_S3 = np.array([[1, 0], [0, -1]], dtype=complex)
_EPS = np.array([[0, 1], [-1, 0]], dtype=complex)  # i*s2, real antisymmetric


def _kron(*mats):
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def _complex_gammas(n: int):
    m = n // 2
    gammas = []
    for j in range(m):
        left = [_S3] * j
        right = [_S0] * (m - j - 1)
        gammas.append(_kron(*left, _S1, *right))
        gammas.append(_kron(*left, _S2, *right))
    if n % 2:
        gammas.append(_kron(*([_S3] * m)))
    return gammas


def _anticommute_count(a, b):
    # factors from {1, s1, s3, eps}: two non-identity distinct factors anticommute
    return sum(1 for x, y in zip(a, b) if x and y and x != y)


@lru_cache(maxsize=None)
def _real8_words():
    """Eight mutually anticommuting symmetric words in {1,s1,s3,eps}^4."""
    letters = (0, 1, 2, 3)  # 1, s1, s3, eps
    words = [w for w in itertools.product(letters, repeat=4) if w.count(3) % 2 == 0 and any(w)]

    def search(chosen, start):
        if len(chosen) == 8:
            return chosen
        for idx in range(start, len(words)):
            w = words[idx]
            if all(_anticommute_count(w, c) % 2 == 1 for c in chosen):
                found = search(chosen + [w], idx + 1)
                if found:
                    return found
        return None

    found = search([], 0)
    assert found is not None
    return tuple(found)


def _real_gammas(n: int):
    table = {0: _S0, 1: _S1, 2: _S3, 3: _EPS}
    gammas = [_kron(*(table[c] for c in w)) for w in _real8_words()]
    if n == 9:
        vol = np.eye(16, dtype=complex)
        for g in gammas:
            vol = vol @ g
        gammas.append(vol)
    return gammas


@dataclass(frozen=True)
class CliffordAlgebra:
    """A concrete representation of Cl(n).

    ``gammas`` holds exact object matrices, ``fgammas`` the same matrices as
    complex floats.  ``chirality`` is Gamma^1...Gamma^n for even n (None for
    odd n) and ``chirality_square`` its square as +-1.
    """

    n: int
    field_kind: str
    gammas: tuple
    fgammas: tuple
    chirality: np.ndarray | None
    chirality_square: int | None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def size(self) -> int:
        return self.fgammas[0].shape[0]

    @property
    def real(self) -> bool:
        return self.field_kind == "real"

    def identity(self, exact: bool = True) -> np.ndarray:
        if exact:
            key = ("id",)
            if key not in self._cache:
                self._cache[key] = exact_array(np.eye(self.size, dtype=int))
            return self._cache[key]
        return np.eye(self.size, dtype=complex)

    def zero(self, exact: bool = True) -> np.ndarray:
        if exact:
            return np.full((self.size, self.size), Gq(0), dtype=object)
        return np.zeros((self.size, self.size), dtype=complex)

    def gamma(self, i: int, exact: bool = True) -> np.ndarray:
        return self.gammas[i] if exact else self.fgammas[i]

    def product(self, indices, exact: bool = True) -> np.ndarray:
        """Gamma^{i1} ... Gamma^{ip} (cached)."""
        key = ("prod", tuple(indices), exact)
        if key not in self._cache:
            out = self.identity(exact)
            for i in indices:
                out = out @ self.gamma(i, exact)
            self._cache[key] = out
        return self._cache[key]

    def monomial(self, indices):
        """``(cols, phases, fphases)`` with ``Gamma^I[r, cols[r]] = phases[r]``.

        Every product of generators has exactly one nonzero entry per row.
        """
        key = ("mono", tuple(indices))
        if key not in self._cache:
            m = self.size
            cols = np.arange(m)
            ph = np.ones(m, dtype=complex)
            for i in indices:
                g = self.fgammas[i]
                gc = np.argmax(np.abs(g), axis=1)
                ph = ph * g[cols, gc[cols]]
                cols = gc[cols]
            ph = np.round(ph.real) + 1j * np.round(ph.imag)
            self._cache[key] = (cols, exact_array(ph), ph)
        return self._cache[key]

    def antisym_product(self, indices, exact: bool = True) -> np.ndarray:
        """Gamma^{[i1} ... Gamma^{ip]} with unit weight normalization."""
        key = ("asym", tuple(indices), exact)
        if key not in self._cache:
            idx = tuple(indices)
            if len(set(idx)) == len(idx):
                out = self.product(idx, exact)
            else:
                out = self.zero(exact) if exact else np.zeros((self.size, self.size), complex)
            self._cache[key] = out
        return self._cache[key]


def build_algebra(n: int, field_kind: str = "complex") -> CliffordAlgebra:
    """Deterministic generators for Cl(n); real kind only for n in {8, 9}."""
    if not isinstance(n, int) or n < 1 or n > 10:
        raise UnsupportedRepresentation(f"dimension {n!r} outside 1..10")
    if field_kind == "complex":
        fg = _complex_gammas(n)
    elif field_kind == "real":
        if n not in (8, 9):
            raise UnsupportedRepresentation(f"real representation only for n in (8, 9), got {n}")
        fg = _real_gammas(n)
    else:
        raise UnsupportedRepresentation(f"unknown field kind {field_kind!r}")
    fg = tuple(np.asarray(g) for g in fg)
    eg = tuple(exact_array(np.round(g.real).astype(int) + 1j * np.round(g.imag).astype(int)) for g in fg)
    chir = None
    chir_sq = None
    if n % 2 == 0:
        chir = eg[0]
        for g in eg[1:]:
            chir = chir @ g
        chir_sq = (-1) ** (n * (n - 1) // 2)
    for g in fg:
        g.setflags(write=False)
    return CliffordAlgebra(n, field_kind, eg, fg, chir, chir_sq)


def _check_dims(form: MultiForm, algebra: CliffordAlgebra):
    if form.n != algebra.n:
        raise ValueError(f"form dimension {form.n} does not match Cl({algebra.n})")


def slash(form: MultiForm, algebra: CliffordAlgebra, exact: bool | None = None) -> np.ndarray:
    """``omega_{i1..ip} Gamma^{i1}...Gamma^{ip}`` summed over all index tuples
    (no 1/p!), added up over the degrees of a multi-form."""
    _check_dims(form, algebra)
    if exact is None:
        exact = form.exact or not form.components
    out = algebra.zero(exact)
    for p, arr in form.components.items():
        if arr.dtype != object and exact:
            arr = exact_array(arr)
        out = out + slash_sorted(sorted_components(arr), p, algebra, exact)
    return out


def slash_sorted(comps: dict, p: int, algebra: CliffordAlgebra, exact: bool = True) -> np.ndarray:
    """Slash of a pure p-form given by its sorted components."""
    out = algebra.zero(exact)
    rows = np.arange(algebra.size)
    weight = math.factorial(p)
    for idx, c in comps.items():
        if not c:
            continue
        cols, ph, fph = algebra.monomial(idx)
        out[rows, cols] = out[rows, cols] + (ph if exact else fph) * (c * weight)
    return out


def dirac_inner(eta: np.ndarray, eps: np.ndarray):
    """``<eta, eps> = eta^dagger eps`` (antilinear in the first slot)."""
    eta = np.asarray(eta)
    eps = np.asarray(eps)
    if eta.shape != eps.shape:
        raise ValueError(f"spinor sizes differ: {eta.shape} vs {eps.shape}")
    return np.sum(conj(eta) * eps)


def clifford_product(*mats):
    out = mats[0]
    for m in mats[1:]:
        out = out @ m
    return out


def contraction(omega_slash: np.ndarray, algebra: CliffordAlgebra, degree: int) -> np.ndarray:
    """``sum_i Gamma^i . omega_slash . Gamma^i``; checks it equals
    ``(-1)^p (n - 2p) omega_slash`` for a pure p-form image."""
    exact = is_exact(omega_slash)
    total = None
    for i in range(algebra.n):
        g = algebra.gamma(i, exact)
        t = g @ omega_slash @ g
        total = t if total is None else total + t
    expected = omega_slash * ((-1) ** degree * (algebra.n - 2 * degree))
    same = (all(not v for v in (total - expected).flat) if exact
            else np.allclose(total, expected, atol=1e-12))
    if not same:
        raise ContractionError(f"input is not the image of a pure {degree}-form")
    return total


# connection data per case: list of (degree, parameter name for the
# omega-slash-X coefficient, parameter name for the i_X omega coefficient)
_CONNECTION_CASES = {
    "0-form": ((0, "k", None),),
    "1-form": ((1, "k1", "k2"),),
    "2-form": ((2, "k1", "k2"),),
    "3-form": ((3, "k1", "k2"),),
    "4-form": ((4, "k1", "k2"),),
    "01-form": ((0, "k0", None), (1, "k1", "k2")),
    "02-form": ((0, "k0", None), (2, "k1", "k2")),
    "03-form": ((0, "k0", None), (3, "k1", "k2")),
}


def _horizon_terms(sign: int):
    q = lambda a, b: Gq(a) / b  # noqa: E731
    s = Gq(sign)
    # (degree, coefficient of omega.X, coefficient of i_X omega)
    return ((1, None, -s * q(1, 4)),
            (4, q(-1, 288), q(1, 72)),
            (2, s * q(1, 24), -s * q(1, 12)))


def _random_form(n, p, rng):
    from .scalars import random_rational
    arr = np.zeros((n,) * p, dtype=object)
    if p == 0:
        return MultiForm(n, {0: np.array(Gq(random_rational(rng)), dtype=object)})
    arr.fill(Gq(0))
    for idx in itertools.combinations(range(n), p):
        c = Gq(random_rational(rng))
        for perm, sign in _signed_perms(p):
            arr[tuple(idx[k] for k in perm)] = c if sign > 0 else -c
    return MultiForm(n, {p: arr})


def _trace_inner(a, b):
    return np.sum(conj(a) * b)


def contract_connection(case_id: str, params, algebra: CliffordAlgebra | None = None, seed: int = 0):
    """Effective coefficient(s) ``e_eff`` with ``sum_i Gamma^i Sigma_i = e_eff * omega_slash``.

    ``Sigma_X = c1 * omega_slash . X_slash + c2 * slash(i_X omega)`` per degree
    (``k f X_slash`` for a 0-form).  Random exact form data is drawn, the
    matrix is computed, and proportionality is asserted.  Returns a scalar
    for single-degree cases and a ``{degree: coefficient}`` dict for
    multi-degree cases (``(0,k)``-forms, ``horizon+`` / ``horizon-``).
    """
    import random

    from .exterior_forms import interior_vector

    rng = random.Random(seed)
    if case_id in ("horizon+", "horizon-"):
        n = 9
        algebra = algebra or build_algebra(9, "real")
        terms = _horizon_terms(1 if case_id == "horizon+" else -1)
    else:
        if case_id not in _CONNECTION_CASES:
            raise KeyError(f"unknown connection case {case_id!r}")
        n = params.n
        algebra = algebra or build_algebra(n)
        terms = []
        for deg, c1, c2 in _CONNECTION_CASES[case_id]:
            a = params.get(c1) if c1 else None
            b = params.get(c2) if c2 else None
            if (c1 and a is None) or (c2 and b is None):
                raise ValueError(f"parameters for {case_id} incomplete")
            terms.append((deg, a, b))
    if algebra.n != n:
        raise ValueError("algebra dimension mismatch")
    total = algebra.zero()
    slashes = {}
    for deg, a, b in terms:
        if deg > n:
            continue
        om = _random_form(n, deg, rng)
        om_sl = slash(om, algebra, exact=True)
        slashes[deg] = om_sl
        for i in range(n):
            g = algebra.gamma(i)
            sig = algebra.zero()
            if a is not None:
                sig = sig + (om_sl @ g) * a
            if b is not None and deg >= 1:
                e_i = np.array([Gq(int(j == i)) for j in range(n)], dtype=object)
                sig = sig + slash(interior_vector(e_i, om), algebra, exact=True) * b
            total = total + g @ sig
    coeffs = {}
    residual = total
    for deg, s in slashes.items():
        norm = _trace_inner(s, s)
        c = _trace_inner(s, total) / norm if norm else Gq(0)
        coeffs[deg] = c
        residual = residual - s * c
    if any(v for v in residual.flat):
        raise ContractionError(f"sum_i Gamma^i Sigma_i is not proportional to the form image ({case_id})")
    if len(coeffs) == 1:
        return next(iter(coeffs.values()))
    return coeffs
