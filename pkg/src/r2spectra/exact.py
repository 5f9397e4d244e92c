"""Exact polynomial arithmetic over Gaussian dyadic rationals.

Every double is an integer times a power of two, so sums and products of
polynomials built from double inputs can be carried out exactly with Python
integers and a shared binary exponent.  Used where an identity involves
cancellation far beyond double precision.
"""
from __future__ import annotations

import math

import numpy as np

from .poly import Poly


def _dyadic(v: float) -> tuple[int, int]:
    """(m, e) with v == m * 2**e exactly."""
    num, den = float(v).as_integer_ratio()
    return num, -(den.bit_length() - 1)


def _to_float(m: int, e: int) -> float:
    if m == 0:
        return 0.0
    extra = max(m.bit_length() if m > 0 else (-m).bit_length(), 1) - 62
    if extra > 0:
        m >>= extra
        e += extra
    return math.ldexp(float(m), e)


class DyadicPoly:
    """Polynomial with coefficients (re[j] + i im[j]) * 2**exp."""

    __slots__ = ("re", "im", "exp")

    def __init__(self, re, im, exp: int):
        re, im = list(re), list(im)
        n = max(len(re), len(im))
        re += [0] * (n - len(re))
        im += [0] * (n - len(im))
        while n and re[n - 1] == 0 and im[n - 1] == 0:
            n -= 1
        self.re, self.im, self.exp = re[:n], im[:n], exp

    @classmethod
    def zero(cls) -> "DyadicPoly":
        return cls([], [], 0)

    @classmethod
    def from_values(cls, values) -> "DyadicPoly":
        parts = []
        for v in values:
            z = complex(v)
            parts.append((_dyadic(z.real), _dyadic(z.imag)))
        if not parts:
            return cls.zero()
        e = min(min(r[1], i[1]) for r, i in parts)
        re = [r[0] << (r[1] - e) for r, _ in parts]
        im = [i[0] << (i[1] - e) for _, i in parts]
        return cls(re, im, e)

    @classmethod
    def from_poly(cls, p: Poly) -> "DyadicPoly":
        return cls.from_values(p.coeffs)

    def is_zero(self) -> bool:
        return not self.re

    @property
    def degree(self):
        return len(self.re) - 1 if self.re else -math.inf

    def _aligned(self, e: int):
        s = self.exp - e
        return [r << s for r in self.re], [i << s for i in self.im]

    def __add__(self, o: "DyadicPoly") -> "DyadicPoly":
        if self.is_zero():
            return o
        if o.is_zero():
            return self
        e = min(self.exp, o.exp)
        ar, ai = self._aligned(e)
        br, bi = o._aligned(e)
        n = max(len(ar), len(br))
        ar += [0] * (n - len(ar)); ai += [0] * (n - len(ai))
        br += [0] * (n - len(br)); bi += [0] * (n - len(bi))
        return DyadicPoly([x + y for x, y in zip(ar, br)], [x + y for x, y in zip(ai, bi)], e)

    def __neg__(self) -> "DyadicPoly":
        return DyadicPoly([-r for r in self.re], [-i for i in self.im], self.exp)

    def __sub__(self, o: "DyadicPoly") -> "DyadicPoly":
        return self + (-o)

    def __mul__(self, o: "DyadicPoly") -> "DyadicPoly":
        if self.is_zero() or o.is_zero():
            return DyadicPoly.zero()
        ar = np.array(self.re, dtype=object)
        ai = np.array(self.im, dtype=object)
        br = np.array(o.re, dtype=object)
        bi = np.array(o.im, dtype=object)
        re = np.convolve(ar, br) - np.convolve(ai, bi)
        im = np.convolve(ar, bi) + np.convolve(ai, br)
        return DyadicPoly([int(v) for v in re], [int(v) for v in im], self.exp + o.exp)

    def divexact(self, d: "DyadicPoly") -> tuple["DyadicPoly", bool]:
        """Quotient by d (real leading coefficient).  The flag is False when the
        division leaves a remainder or the quotient is not dyadic."""
        if d.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if d.im[-1] != 0:
            raise ValueError("divisor must have a real leading coefficient")
        dd = len(d.re) - 1
        if self.is_zero():
            return DyadicPoly.zero(), True
        qn = len(self.re) - dd
        if qn <= 0:
            return DyadicPoly.zero(), False
        lead = d.re[-1]
        t = (abs(lead) & -abs(lead)).bit_length() - 1
        # each long-division step can lower the exponent by at most t, so a
        # quotient unit of 2**(exp - d.exp - t*qn) keeps every coefficient integral
        # and puts the running numerator in units of 2**(exp - t*qn)
        up = t * qn
        nr = [v << up for v in self.re]
        ni = [v << up for v in self.im]
        qr, qi = [0] * qn, [0] * qn
        for j in range(qn - 1, -1, -1):
            tr, ti = nr[j + dd], ni[j + dd]
            if tr % lead or ti % lead:
                return DyadicPoly.zero(), False
            a, b = tr // lead, ti // lead
            qr[j], qi[j] = a, b
            for m in range(dd + 1):
                dr, di = d.re[m], d.im[m]
                nr[j + m] -= a * dr - b * di
                ni[j + m] -= a * di + b * dr
        exact = not any(nr) and not any(ni)
        return DyadicPoly(qr, qi, self.exp - d.exp - up), exact

    def to_poly(self) -> Poly:
        return Poly([complex(_to_float(r, self.exp), _to_float(i, self.exp)) for r, i in zip(self.re, self.im)])
