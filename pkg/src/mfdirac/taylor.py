"""Truncated Taylor fields at a point of flat space.

A :class:`Field` stores the value of a (scalar, spinor or matrix valued)
quantity at the origin together with its first and, optionally, second
partial derivatives.  Products follow the Leibniz rule and are truncated at
the lower of the two orders, so every derived quantity carries exactly the
derivatives that are determined by the jet data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scalars import conj, is_exact

__all__ = ["Field", "constant", "bilinear", "matmul", "inner", "dirac", "laplacian", "divergence"]


@dataclass
class Field:
    c0: np.ndarray
    c1: np.ndarray | None = None  # c1[i] = d_i
    c2: np.ndarray | None = None  # c2[i][j] = d_i d_j

    @property
    def order(self) -> int:
        if self.c1 is None:
            return 0
        return 1 if self.c2 is None else 2

    @property
    def n(self) -> int:
        return len(self.c1)

    def truncate(self, order: int) -> "Field":
        return Field(self.c0, self.c1 if order >= 1 else None, self.c2 if order >= 2 else None)

    def d(self, i: int) -> "Field":
        if self.c1 is None:
            raise ValueError("derivative of an order-0 field is not determined")
        return Field(self.c1[i], None if self.c2 is None else self.c2[i], None)

    def _lin(self, other, op):
        order = min(self.order, other.order)
        c1 = [op(a, b) for a, b in zip(self.c1, other.c1)] if order >= 1 else None
        c2 = ([[op(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(self.c2, other.c2)]
              if order >= 2 else None)
        return Field(op(self.c0, other.c0), c1, c2)

    def __add__(self, other):
        return self._lin(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._lin(other, lambda a, b: a - b)

    def __neg__(self):
        return self.map(lambda a: -a)

    def map(self, fn) -> "Field":
        c1 = None if self.c1 is None else [fn(a) for a in self.c1]
        c2 = None if self.c2 is None else [[fn(a) for a in row] for row in self.c2]
        return Field(fn(self.c0), c1, c2)

    def scale(self, c) -> "Field":
        return self.map(lambda a: a * c)

    def conj(self) -> "Field":
        return self.map(conj)


def constant(value, n: int, order: int = 2) -> Field:
    zero = value * 0
    c1 = [zero] * n if order >= 1 else None
    c2 = [[zero] * n for _ in range(n)] if order >= 2 else None
    return Field(value, c1, c2)


def bilinear(a: Field, b: Field, op) -> Field:
    """Leibniz product for a bilinear ``op``."""
    order = min(a.order, b.order)
    c0 = op(a.c0, b.c0)
    c1 = c2 = None
    if order >= 1:
        n = a.n
        c1 = [op(a.c1[i], b.c0) + op(a.c0, b.c1[i]) for i in range(n)]
    if order >= 2:
        c2 = [[op(a.c2[i][j], b.c0) + op(a.c1[i], b.c1[j]) + op(a.c1[j], b.c1[i]) + op(a.c0, b.c2[i][j])
               for j in range(n)] for i in range(n)]
    return Field(c0, c1, c2)


def _matmul(x, y):
    return x @ y


def matmul(a: Field, b: Field) -> Field:
    return bilinear(a, b, _matmul)


def _inner(x, y):
    return np.sum(conj(x) * y)


def inner(a: Field, b: Field) -> Field:
    """Pointwise Dirac inner product ``<a, b>`` of spinor fields."""
    return bilinear(a, b, _inner)


def dirac(gammas, psi: Field) -> Field:
    """``Gamma^i d_i psi``."""
    out = None
    for i, g in enumerate(gammas):
        t = psi.d(i).map(lambda v, g=g: g @ v)
        out = t if out is None else out + t
    return out


def laplacian(s: Field):
    """``sum_i d_i d_i s`` at the point."""
    if s.order < 2:
        raise ValueError("laplacian needs a second-order field")
    out = None
    for i in range(s.n):
        out = s.c2[i][i] if out is None else out + s.c2[i][i]
    return out


def divergence(components) -> Field:
    """``sum_i d_i V_i`` for a list of fields (order drops by one)."""
    out = None
    for i, v in enumerate(components):
        t = v.d(i)
        out = t if out is None else out + t
    return out
