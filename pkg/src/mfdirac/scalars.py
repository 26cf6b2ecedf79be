"""Exact Gaussian-rational scalars and small helpers shared by the exact and
floating-point code paths.

Arrays in the exact path are numpy ``object`` arrays holding :class:`Gq`
entries; arrays in the float path are ordinary ``complex128`` arrays.  The
helpers below dispatch on ``dtype`` so that the same algebra code serves both.
"""
from __future__ import annotations

import random
from fractions import Fraction
from numbers import Rational

import numpy as np
from gmpy2 import mpq

__all__ = [
    "Gq",
    "I",
    "as_gq",
    "exact_array",
    "float_array",
    "is_exact",
    "scale",
    "conj",
    "real_part",
    "imag_part",
    "is_zero",
    "max_abs",
    "random_rational",
    "random_gq",
]


def _q(x):
    if isinstance(x, type(mpq())):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, (int, np.integer)):
        return mpq(int(x))
    if isinstance(x, Rational):
        return mpq(x.numerator, x.denominator)
    raise TypeError(f"not an exact rational: {x!r}")


class Gq:
    """A Gaussian rational ``re + i*im`` with exact ``mpq`` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _q(re)
        self.im = _q(im)

    @classmethod
    def _raw(cls, re, im):
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Gq):
            return Gq._raw(self.re + other.re, self.im + other.im)
        try:
            return Gq._raw(self.re + _q(other), self.im)
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Gq):
            return Gq._raw(self.re - other.re, self.im - other.im)
        try:
            return Gq._raw(self.re - _q(other), self.im)
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        try:
            return Gq._raw(_q(other) - self.re, -self.im)
        except TypeError:
            return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Gq):
            a, b, c, d = self.re, self.im, other.re, other.im
            return Gq._raw(a * c - b * d, a * d + b * c)
        try:
            o = _q(other)
        except TypeError:
            return NotImplemented
        return Gq._raw(self.re * o, self.im * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Gq):
            den = other.re * other.re + other.im * other.im
            if den == 0:
                raise ZeroDivisionError("Gaussian rational division by zero")
            return self * Gq._raw(other.re / den, -other.im / den)
        try:
            o = _q(other)
        except TypeError:
            return NotImplemented
        return Gq._raw(self.re / o, self.im / o)

    def __rtruediv__(self, other):
        return Gq(other) / self

    def __neg__(self):
        return Gq._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Gq(1)
        for _ in range(k):
            out = out * self
        return out

    def conjugate(self):
        return Gq._raw(self.re, -self.im)

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def abs2(self):
        return self.re * self.re + self.im * self.im

    # comparison / conversion -----------------------------------------
    def __eq__(self, other):
        if isinstance(other, Gq):
            return self.re == other.re and self.im == other.im
        if isinstance(other, complex):
            return complex(self) == other
        try:
            return self.im == 0 and self.re == _q(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        if self.im == 0:
            return f"Gq({self.re})"
        return f"Gq({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


I = Gq(0, 1)


def as_gq(x) -> Gq:
    """Convert ints, rationals, Gaussian integers given as ``complex`` with
    integral parts, or ``Gq`` into a ``Gq``."""
    if isinstance(x, Gq):
        return x
    if isinstance(x, complex):
        if x.real != int(x.real) or x.imag != int(x.imag):
            raise TypeError(f"complex value {x!r} is not a Gaussian integer")
        return Gq(int(x.real), int(x.imag))
    if isinstance(x, float):
        if x != int(x):
            raise TypeError(f"float value {x!r} is not exact")
        return Gq(int(x))
    return Gq(x)


_as_gq_vec = np.frompyfunc(as_gq, 1, 1)


def exact_array(a) -> np.ndarray:
    """Object array of :class:`Gq` with the same shape as ``a``."""
    arr = np.asarray(a, dtype=object)
    if arr.ndim == 0:
        return np.array(as_gq(arr.item()), dtype=object)
    return _as_gq_vec(arr).astype(object)


def float_array(a) -> np.ndarray:
    arr = np.asarray(a)
    if arr.dtype == object:
        return np.vectorize(complex, otypes=[complex])(arr) if arr.size else np.zeros(arr.shape, complex)
    return arr.astype(complex)


def is_exact(a) -> bool:
    if isinstance(a, np.ndarray):
        return a.dtype == object
    return isinstance(a, (Gq, int, Rational)) or isinstance(a, type(mpq()))


def scale(a, num: int, den: int = 1):
    """Multiply ``a`` by ``num/den`` exactly on object arrays, in floating
    point otherwise."""
    if is_exact(a):
        return a * mpq(num, den)
    return a * (num / den)


def _conj1(x):
    return x.conjugate()


_conj_vec = np.frompyfunc(_conj1, 1, 1)


def conj(a):
    if isinstance(a, np.ndarray) and a.dtype == object:
        if a.ndim == 0:
            return np.array(a.item().conjugate(), dtype=object)
        return _conj_vec(a).astype(object)
    if isinstance(a, Gq):
        return a.conjugate()
    return np.conj(a)


def real_part(x):
    """Real part of a scalar (``Gq`` -> ``mpq``)."""
    if isinstance(x, Gq):
        return x.re
    if isinstance(x, np.ndarray) and x.dtype == object:
        return np.frompyfunc(lambda v: Gq(v.re), 1, 1)(x).astype(object)
    return np.real(x)


def imag_part(x):
    if isinstance(x, Gq):
        return x.im
    if isinstance(x, np.ndarray) and x.dtype == object:
        return np.frompyfunc(lambda v: Gq(v.im), 1, 1)(x).astype(object)
    return np.imag(x)


def is_zero(a) -> bool:
    """Exact zero test for exact data; ``False`` is never returned for
    floats that are exactly 0.0 either."""
    arr = np.asarray(a, dtype=object if is_exact(a) else None)
    if arr.dtype == object:
        return all(not v for v in arr.flat)
    return not np.any(arr)


def max_abs(a) -> float:
    arr = np.asarray(a)
    if arr.size == 0:
        return 0.0
    if arr.dtype == object:
        return max(abs(complex(v)) for v in arr.flat)
    return float(np.max(np.abs(arr)))


def random_rational(rng: random.Random, bound: int = 9):
    """Random rational p/q with |p| <= bound and 1 <= q <= bound."""
    return mpq(rng.randint(-bound, bound), rng.randint(1, bound))


def random_gq(rng: random.Random, bound: int = 9, real: bool = False) -> Gq:
    re = random_rational(rng, bound)
    im = mpq(0) if real else random_rational(rng, bound)
    return Gq._raw(re, im)
