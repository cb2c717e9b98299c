"""Exact elements of the cyclotomic field Q(zeta_{p^s}).

Character values are p-power roots of unity, so sums of them weighted by
rationals live here.  Elements are kept in the power basis
``zeta^e, 0 <= e < (p-1) p^(s-1)``, which makes equality a dict comparison.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Optional

from .errors import DomainError


def _ppow(d: int) -> tuple[Optional[int], int]:
    """Split d = p**s; returns (None, 0) for d = 1."""
    if d == 1:
        return None, 0
    p = 2
    while d % p:
        p += 1
    s = 0
    while d % p == 0:
        d //= p
        s += 1
    if d != 1:
        raise DomainError("order is not a prime power")
    return p, s


class Cyclotomic:
    __slots__ = ("p", "s", "coeffs")

    def __init__(self, coeffs=None, p: Optional[int] = None, s: int = 0):
        if s == 0:
            p = None
        self.p = p
        self.s = s
        self.coeffs = self._reduce(dict(coeffs or {}))

    # -- construction -----------------------------------------------------

    @classmethod
    def rational(cls, q) -> "Cyclotomic":
        return cls({0: Fraction(q)})

    @classmethod
    def root_of_unity(cls, phase) -> "Cyclotomic":
        """exp(2 pi i * phase) for a rational phase with p-power denominator."""
        phase = Fraction(phase) % 1
        p, s = _ppow(phase.denominator)
        if s == 0:
            return cls({0: Fraction(1)})
        return cls({phase.numerator: Fraction(1)}, p, s)

    @property
    def order(self) -> int:
        return 1 if self.s == 0 else self.p ** self.s

    def _reduce(self, coeffs: dict) -> dict:
        out: dict = {}
        if self.s == 0:
            q = sum(coeffs.values(), Fraction(0))
            return {0: Fraction(q)} if q else {}
        p, D = self.p, self.p ** self.s
        step = D // p
        cut = (p - 1) * step
        for e, c in coeffs.items():
            if not c:
                continue
            e %= D
            if e < cut:
                out[e] = out.get(e, 0) + Fraction(c)
            else:
                r = e - cut
                for i in range(p - 1):
                    k = i * step + r
                    out[k] = out.get(k, 0) - Fraction(c)
        return {e: c for e, c in out.items() if c}

    def _lift(self, p: Optional[int], s: int) -> "Cyclotomic":
        if s == self.s:
            return self
        t = s - self.s
        mult = p ** t
        return Cyclotomic({e * mult: c for e, c in self.coeffs.items()}, p, s)

    def _common(self, other: "Cyclotomic"):
        if self.p is not None and other.p is not None and self.p != other.p:
            raise DomainError("mixing roots of unity of different primes")
        p = self.p or other.p
        s = max(self.s, other.s)
        return self._lift(p, s), other._lift(p, s)

    @staticmethod
    def _wrap(x):
        if isinstance(x, Cyclotomic):
            return x
        if isinstance(x, (int, Fraction)):
            return Cyclotomic.rational(x)
        return None

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        o = self._wrap(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) + other
            return NotImplemented
        a, b = self._common(o)
        c = dict(a.coeffs)
        for e, v in b.coeffs.items():
            c[e] = c.get(e, 0) + v
        return Cyclotomic(c, a.p, a.s)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic({e: -c for e, c in self.coeffs.items()}, self.p, self.s)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._wrap(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) * other
            return NotImplemented
        a, b = self._common(o)
        c: dict = {}
        for e1, v1 in a.coeffs.items():
            for e2, v2 in b.coeffs.items():
                c[e1 + e2] = c.get(e1 + e2, 0) + v1 * v2
        return Cyclotomic(c, a.p, a.s)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return Cyclotomic({e: c / other for e, c in self.coeffs.items()},
                              self.p, self.s)
        if isinstance(other, (float, complex)):
            return complex(self) / other
        return NotImplemented

    def conjugate(self) -> "Cyclotomic":
        if self.s == 0:
            return self
        D = self.order
        return Cyclotomic({(-e) % D: c for e, c in self.coeffs.items()}, self.p, self.s)

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_rational(self) -> bool:
        return not self.coeffs or set(self.coeffs) == {0}

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise DomainError("value is not rational")
        return self.coeffs.get(0, Fraction(0))

    def __complex__(self):
        if self.s == 0:
            return complex(float(self.coeffs.get(0, 0)), 0.0)
        D = self.order
        z = 0j
        for e, c in self.coeffs.items():
            z += float(c) * cmath.exp(2j * math.pi * e / D)
        return z

    def __eq__(self, other):
        o = self._wrap(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) == other
            return NotImplemented
        return (self - o).is_zero()

    __hash__ = None

    def __repr__(self):
        if self.s == 0:
            return f"Cyclotomic({self.coeffs.get(0, 0)})"
        terms = " + ".join(f"{c}*z^{e}" for e, c in sorted(self.coeffs.items()))
        return f"Cyclotomic({terms or 0}; z=zeta_{self.order})"


def combine_roots(terms, p: int):
    """sum of coef * exp(2 pi i phase) * value with a single reduction.

    ``terms`` holds (coef, phase, value) with rational coef and phase and value
    rational or Cyclotomic.  Rational results come back as Fraction.
    """
    terms = list(terms)
    s = 0
    for _, ph, v in terms:
        den = Fraction(ph).denominator
        if den > 1:
            q, k = _ppow(den)
            if q != p:
                raise DomainError("phase denominator is not a power of p")
            s = max(s, k)
        if isinstance(v, Cyclotomic):
            s = max(s, v.s)
    D = p ** s
    acc: dict = {}
    for coef, ph, v in terms:
        if not coef:
            continue
        shift = int(Fraction(ph) * D) % D if s else 0
        if isinstance(v, Cyclotomic):
            mult = D // v.order if v.s else D
            for e, c in v.coeffs.items():
                k = (e * mult + shift) % D if s else 0
                acc[k] = acc.get(k, 0) + coef * c
        elif v:
            acc[shift] = acc.get(shift, 0) + coef * Fraction(v)
    out = Cyclotomic(acc, p if s else None, s)
    return out.to_fraction() if out.is_rational() else out


def to_complex(v) -> complex:
    return complex(v)


def is_exact(v) -> bool:
    return isinstance(v, (int, Fraction, Cyclotomic))
