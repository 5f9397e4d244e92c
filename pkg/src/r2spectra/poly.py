"""Dense complex-coefficient univariate polynomials.

Coefficients are stored in ascending order: ``coeffs[j]`` multiplies ``x**j``.
Values are immutable; every operation returns a new ``Poly``.
"""
from __future__ import annotations

import math
from numbers import Number

import numpy as np
from numpy.polynomial import polynomial as npoly


class Poly:
    __slots__ = ("_c",)

    def __init__(self, coeffs=()):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).ravel().copy()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        c.setflags(write=False)
        self._c = c

    # construction helpers
    @classmethod
    def const(cls, v) -> "Poly":
        return cls([v])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0.0, 1.0])

    @classmethod
    def linear(cls, root, scale=1.0) -> "Poly":
        """scale * (x - root)."""
        return cls([-scale * root, scale])

    @classmethod
    def from_roots(cls, roots, leading=1.0) -> "Poly":
        return cls(leading * npoly.polyfromroots(np.asarray(roots, dtype=complex)))

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self):
        """Highest power with a nonzero coefficient; -inf for the zero polynomial."""
        return len(self._c) - 1 if len(self._c) else -math.inf

    @property
    def lead(self) -> complex:
        return complex(self._c[-1]) if len(self._c) else 0j

    def is_zero(self) -> bool:
        return len(self._c) == 0

    def __call__(self, x):
        # Horner, works for scalars and arrays
        x = np.asarray(x, dtype=complex)
        acc = np.zeros_like(x)
        for a in self._c[::-1]:
            acc = acc * x + a
        return acc if acc.ndim else complex(acc)

    def deriv(self) -> "Poly":
        if len(self._c) <= 1:
            return Poly()
        return Poly(self._c[1:] * np.arange(1, len(self._c)))

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (Number, np.number)):
            return Poly([other])
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Poly(npoly.polyadd(self._pad(), o._pad()))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-self._c)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Poly(npoly.polysub(self._pad(), o._pad()))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, (Number, np.number)):
            return Poly(self._c * other)
        if not isinstance(other, Poly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Poly()
        return Poly(npoly.polymul(self._c, other._c))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, (Number, np.number)):
            return Poly(self._c / scalar)
        return NotImplemented

    def __pow__(self, k: int):
        out = Poly([1.0])
        for _ in range(k):
            out = out * self
        return out

    def _pad(self):
        return self._c if len(self._c) else np.zeros(1, complex)

    def divmod(self, divisor: "Poly"):
        """Long division; returns (quotient, remainder)."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        num = self._c.astype(complex).copy()
        d = divisor._c
        dd = len(d) - 1
        if len(num) - 1 < dd:
            return Poly(), Poly(num)
        q = np.zeros(len(num) - dd, complex)
        for i in range(len(q) - 1, -1, -1):
            q[i] = num[i + dd] / d[-1]
            num[i: i + dd + 1] -= q[i] * d
        return Poly(q), Poly(num[:dd])

    def deflate(self, root) -> tuple["Poly", complex]:
        """Synthetic division by (x - root); returns quotient and remainder value."""
        c = self._c
        if len(c) <= 1:
            return Poly(), complex(c[0]) if len(c) else 0j
        q = np.zeros(len(c) - 1, complex)
        acc = c[-1]
        for j in range(len(c) - 2, -1, -1):
            q[j] = acc
            acc = c[j] + acc * root
        return Poly(q), complex(acc)

    def deflate_stable(self, root) -> "Poly":
        """Quotient by (x - root), dividing from the top when |root| <= 1 and from
        the constant term otherwise; the remainder is discarded."""
        c = self._c
        if len(c) <= 1:
            return Poly()
        if abs(root) <= 1:
            return self.deflate(root)[0]
        q = np.zeros(len(c) - 1, complex)
        prev = 0j
        for j in range(len(q)):
            prev = (prev - c[j]) / root
            q[j] = prev
        return Poly(q)

    # transforms
    def conj(self) -> "Poly":
        return Poly(np.conj(self._c))

    def reversed(self, n: int | None = None) -> "Poly":
        """z^n * conj(p(1/conj(z))): conjugated coefficients in reverse order."""
        n = self.degree if n is None else n
        if n < 0:
            return Poly()
        c = np.zeros(n + 1, complex)
        c[: len(self._c)] = self._c
        return Poly(np.conj(c[::-1]))

    def shift(self, k: int) -> "Poly":
        """Multiply by x**k."""
        if self.is_zero():
            return Poly()
        return Poly(np.concatenate([np.zeros(k, complex), self._c]))

    def trim(self, tol: float = 0.0) -> "Poly":
        """Drop trailing coefficients with |c| <= tol * max|c|."""
        if self.is_zero():
            return self
        scale = np.abs(self._c).max()
        c = self._c.copy()
        while len(c) and abs(c[-1]) <= tol * scale:
            c = c[:-1]
        return Poly(c)

    def padded(self, n: int) -> np.ndarray:
        """Coefficient vector of length n (zero padded / checked)."""
        out = np.zeros(n, complex)
        m = min(n, len(self._c))
        out[:m] = self._c[:m]
        if np.any(self._c[m:] != 0):
            raise ValueError(f"degree {self.degree} does not fit in length {n}")
        return out

    def norm(self) -> float:
        return float(np.abs(self._c).max()) if len(self._c) else 0.0

    def allclose(self, other: "Poly", rtol=1e-12, atol=0.0) -> bool:
        return coeff_distance(self, other) <= atol + rtol * max(self.norm(), other.norm(), 1.0)

    def __repr__(self):
        return f"Poly({np.array2string(self._c, precision=6, separator=', ')})"


def coeff_distance(p: Poly, q: Poly) -> float:
    """Max absolute coefficient difference."""
    n = max(len(p.coeffs), len(q.coeffs), 1)
    return float(np.abs(p.padded(n) - q.padded(n)).max())


def rel_coeff_error(p: Poly, ref: Poly) -> float:
    return coeff_distance(p, ref) / max(ref.norm(), 1.0)
