"""Exact rational matrices stored as an integer numerator array over one denominator."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .errors import SingularityError


def _as_object(a):
    return np.asarray(a).astype(object)


class RationalMatrix:
    """Dense matrix of exact rationals ``num / den``.

    ``num`` holds Python ints (object dtype) or int64; arithmetic always
    promotes to Python ints, so nothing can overflow.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        if den == 0:
            raise ZeroDivisionError("denominator is zero")
        num = np.asarray(num)
        if den < 0:
            num, den = -num, -den
        self.num = num
        self.den = int(den)

    @classmethod
    def from_fractions(cls, rows):
        rows = [[Fraction(x) for x in row] for row in rows]
        den = 1
        for row in rows:
            for x in row:
                den = lcm(den, x.denominator)
        num = np.array([[x.numerator * (den // x.denominator) for x in row] for row in rows], dtype=object)
        return cls(num, den)

    @classmethod
    def identity(cls, size):
        return cls(np.eye(size, dtype=np.int64), 1)

    @classmethod
    def constant(cls, value, shape):
        value = Fraction(value)
        return cls(np.full(shape, value.numerator, dtype=object), value.denominator)

    @property
    def shape(self):
        return self.num.shape

    def reduced(self):
        g = self.den
        for x in np.ravel(self.num):
            g = gcd(g, int(x))
            if g == 1:
                break
        if g in (0, 1):
            return self
        return RationalMatrix(_as_object(self.num) // g, self.den // g)

    def __getitem__(self, idx):
        sub = self.num[idx]
        if np.ndim(sub) == 0:
            return Fraction(int(sub), self.den)
        return RationalMatrix(sub, self.den)

    def entry(self, i, j):
        return Fraction(int(self.num[i, j]), self.den)

    def to_fractions(self):
        return [[Fraction(int(x), self.den) for x in row] for row in self.num]

    def to_float(self):
        return np.asarray(self.num, dtype=np.float64) / self.den

    def _align(self, other):
        d = lcm(self.den, other.den)
        return _as_object(self.num) * (d // self.den), _as_object(other.num) * (d // other.den), d

    def __add__(self, other):
        a, b, d = self._align(other)
        return RationalMatrix(a + b, d)

    def __sub__(self, other):
        a, b, d = self._align(other)
        return RationalMatrix(a - b, d)

    def __neg__(self):
        return RationalMatrix(-_as_object(self.num), self.den)

    def __matmul__(self, other):
        return RationalMatrix(_as_object(self.num) @ _as_object(other.num), self.den * other.den)

    def scale(self, c):
        c = Fraction(c)
        return RationalMatrix(_as_object(self.num) * c.numerator, self.den * c.denominator)

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        a, b, _ = self._align(other)
        return bool(np.all(a == b))

    __hash__ = None

    def is_zero(self):
        return bool(np.all(_as_object(self.num) == 0))

    def trace(self):
        return Fraction(int(sum(_as_object(np.diag(self.num)))), self.den)

    def transpose(self):
        return RationalMatrix(self.num.T, self.den)

    def __repr__(self):
        return f"RationalMatrix(shape={self.shape}, den={self.den})"


def solve_fractions(a, b):
    """Solve ``a x = b`` exactly by Gaussian elimination with Fraction entries.

    ``a`` is a square list of rows, ``b`` a list of right-hand-side rows (one
    per row of ``a``, any number of columns).  Raises SingularityError when
    ``a`` is singular.
    """
    size = len(a)
    aug = [[Fraction(x) for x in a[i]] + [Fraction(x) for x in b[i]] for i in range(size)]
    width = len(aug[0])
    for col in range(size):
        piv = next((r for r in range(col, size) if aug[r][col] != 0), None)
        if piv is None:
            raise SingularityError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        prow = [x / p for x in aug[col]]
        aug[col] = prow
        for r in range(size):
            if r == col:
                continue
            f = aug[r][col]
            if f:
                row = aug[r]
                aug[r] = [row[c] - f * prow[c] for c in range(width)]
    return [row[size:] for row in aug]
