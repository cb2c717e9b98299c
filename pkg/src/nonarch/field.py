"""Finite-precision arithmetic in Q_p and F_p((theta)).

A nonzero element is stored as ``p**ord * unit`` where ``unit`` is known
modulo ``p**prec`` (``prec`` valid digits).  In characteristic p the unit is a
power series in theta; its digits are packed base-p into the same integer but
all arithmetic on them is carry-free.

Zero is the only element with ``ord == math.inf``.  A zero produced by
cancellation remembers the absolute precision it is known to.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .errors import DomainError, PrecisionError

CHAR_ZERO = "char-zero"
CHAR_P = "char-p"
DEFAULT_PRECISION = 12

INF = math.inf


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


@dataclass(frozen=True)
class FieldDescriptor:
    p: int
    kind: str = CHAR_ZERO

    def __post_init__(self):
        if self.kind not in (CHAR_ZERO, CHAR_P):
            raise DomainError(f"unknown field kind {self.kind!r}")
        if not is_prime(self.p):
            raise DomainError(f"p={self.p} is not prime")

    @property
    def char_p(self) -> bool:
        return self.kind == CHAR_P

    def __str__(self):
        return f"Q_{self.p}" if self.kind == CHAR_ZERO else f"F_{self.p}((t))"


def Qp(p: int) -> FieldDescriptor:
    return FieldDescriptor(p, CHAR_ZERO)


def Fpt(p: int) -> FieldDescriptor:
    return FieldDescriptor(p, CHAR_P)


# -- carry-free digit helpers for characteristic p ---------------------------

def _to_digits(n: int, p: int, length: int) -> list[int]:
    out = []
    for _ in range(length):
        n, r = divmod(n, p)
        out.append(r)
    return out


def _from_digits(ds: Iterable[int], p: int) -> int:
    n = 0
    for d in reversed(list(ds)):
        n = n * p + d
    return n


def _poly_add(a: list[int], b: list[int], p: int) -> list[int]:
    return [(x + y) % p for x, y in zip(a, b)]


def _poly_mul(a: list[int], b: list[int], p: int, length: int) -> list[int]:
    out = [0] * length
    for i, x in enumerate(a[:length]):
        if x:
            for j in range(length - i):
                out[i + j] = (out[i + j] + x * b[j]) % p
    return out


def _poly_inv(a: list[int], p: int, length: int) -> list[int]:
    # long division of 1 by a unit power series
    inv0 = pow(a[0], -1, p)
    out = [0] * length
    rem = [1] + [0] * (length - 1)
    for k in range(length):
        c = rem[k] * inv0 % p
        out[k] = c
        if c:
            for j in range(k, length):
                rem[j] = (rem[j] - c * a[j - k]) % p
    return out


def _valuation_int(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


Number = Union[int, Fraction]


class PAdic:
    """Element of Q_p or F_p((theta)) with an explicit valid-digit count."""

    __slots__ = ("field", "ord", "unit", "prec", "_abs")

    def __init__(self, field: FieldDescriptor, ord, unit: int, prec: int,
                 absprec=INF):
        object.__setattr__(self, "field", field)
        if ord == INF or unit == 0:
            object.__setattr__(self, "ord", INF)
            object.__setattr__(self, "unit", 0)
            object.__setattr__(self, "prec", prec)
            object.__setattr__(self, "_abs", absprec)
            return
        if prec < 1:
            raise PrecisionError("fewer than one valid digit")
        p = field.p
        if unit % p == 0:
            raise ValueError("unit must have nonzero leading digit")
        object.__setattr__(self, "ord", int(ord))
        object.__setattr__(self, "unit", unit % p ** prec)
        object.__setattr__(self, "prec", int(prec))
        object.__setattr__(self, "_abs", int(ord) + int(prec))

    def __setattr__(self, name, value):
        raise AttributeError("PAdic is immutable")

    __hash__ = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, field: FieldDescriptor, prec: int = DEFAULT_PRECISION):
        return cls(field, INF, 0, prec)

    @classmethod
    def from_digits(cls, field: FieldDescriptor, ord: int, digits):
        digits = list(digits)
        k = 0
        while k < len(digits) and digits[k] == 0:
            k += 1
        if k == len(digits):
            return cls(field, INF, 0, max(len(digits), 1), absprec=ord + len(digits))
        return cls(field, ord + k, _from_digits(digits[k:], field.p), len(digits) - k)

    @classmethod
    def from_rational(cls, value: Number, field: FieldDescriptor,
                      prec: int = DEFAULT_PRECISION) -> "PAdic":
        value = Fraction(value)
        return parse_rational(value.numerator, value.denominator, field, prec)

    # -- basic queries ------------------------------------------------------

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def absprec(self):
        return self._abs

    def is_zero(self) -> bool:
        return self.ord == INF

    @property
    def digits(self) -> list[int]:
        if self.is_zero():
            return [0] * self.prec
        return _to_digits(self.unit, self.p, self.prec)

    def digit(self, index: int) -> int:
        """Coefficient of p**index (or theta**index)."""
        if self.is_zero():
            if index >= self._abs:
                raise PrecisionError(f"digit {index} beyond known precision")
            return 0
        if index < self.ord:
            return 0
        if index >= self._abs:
            raise PrecisionError(f"digit {index} beyond known precision")
        return (self.unit // self.p ** (index - self.ord)) % self.p

    def norm(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.p) ** (-self.ord)

    def with_prec(self, prec: int) -> "PAdic":
        """Truncate to ``prec`` digits (never extends)."""
        if self.is_zero():
            return self
        prec = min(prec, self.prec)
        return PAdic(self.field, self.ord, self.unit % self.p ** prec, prec)

    def to_fraction(self) -> Fraction:
        """The rational number spelled by the known digits (char 0 only)."""
        if self.field.char_p:
            raise DomainError("no rational value in characteristic p")
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.ord

    # -- coercion -----------------------------------------------------------

    def _coerce(self, other) -> "PAdic":
        if isinstance(other, PAdic):
            if other.field != self.field:
                raise DomainError(f"field mismatch: {self.field} vs {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return PAdic.from_rational(other, self.field, max(self.prec, DEFAULT_PRECISION))
        return NotImplemented

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self):
        if self.is_zero():
            return self
        p = self.p
        if self.field.char_p:
            ds = [(-d) % p for d in self.digits]
            return PAdic(self.field, self.ord, _from_digits(ds, p), self.prec)
        return PAdic(self.field, self.ord, -self.unit, self.prec)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() and self._abs == INF:
            return other
        if other.is_zero() and other._abs == INF:
            return self
        A = min(self._abs, other._abs)
        lo = min(self.ord, other.ord)
        if lo >= A:
            return PAdic(self.field, INF, 0, self.prec, absprec=A)
        width = A - lo
        p = self.p
        if self.field.char_p:
            acc = [0] * width
            for x in (self, other):
                if x.is_zero():
                    continue
                shift = x.ord - lo
                for i, d in enumerate(x.digits):
                    if shift + i < width:
                        acc[shift + i] = (acc[shift + i] + d) % p
            k = 0
            while k < width and acc[k] == 0:
                k += 1
            if k == width:
                return PAdic(self.field, INF, 0, self.prec, absprec=A)
            return PAdic(self.field, lo + k, _from_digits(acc[k:], p), width - k)
        s = 0
        for x in (self, other):
            if not x.is_zero():
                s += x.unit * p ** (x.ord - lo)
        s %= p ** width
        if s == 0:
            return PAdic(self.field, INF, 0, self.prec, absprec=A)
        v = _valuation_int(s, p)
        return PAdic(self.field, lo + v, s // p ** v, width - v)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            a = self if self.is_zero() else other
            b = other if a is self else self
            absprec = a._abs + (b.ord if not b.is_zero() else 0) if a._abs != INF else INF
            return PAdic(self.field, INF, 0, self.prec, absprec=absprec)
        prec = min(self.prec, other.prec)
        p = self.p
        if self.field.char_p:
            ds = _poly_mul(self.digits[:prec], other.digits[:prec], p, prec)
            unit = _from_digits(ds, p)
        else:
            unit = self.unit * other.unit
        return PAdic(self.field, self.ord + other.ord, unit, prec)

    __rmul__ = __mul__

    def inverse(self) -> "PAdic":
        if self.is_zero():
            raise DomainError("division by zero")
        p = self.p
        if self.field.char_p:
            unit = _from_digits(_poly_inv(self.digits, p, self.prec), p)
        else:
            unit = pow(self.unit, -1, p ** self.prec)
        return PAdic(self.field, -self.ord, unit, self.prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = PAdic.from_rational(1, self.field, self.prec)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except DomainError:
            return False
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    # -- text ---------------------------------------------------------------

    def __repr__(self):
        return f"PAdic({format_padic(self)}, {self.field})"

    def __str__(self):
        return format_padic(self)


# -- parsing -------------------------------------------------------------------

def parse_rational(num: int, den: int, field: FieldDescriptor,
                   precision: int = DEFAULT_PRECISION) -> PAdic:
    """Expand ``num/den`` to ``precision`` digits.

    In characteristic p the integers are read digitwise, so ``n = sum d_k p^k``
    stands for ``sum d_k theta^k``; ``den`` must then have a nonzero constant
    digit.
    """
    if den == 0:
        raise DomainError("zero denominator")
    if precision < 1:
        raise DomainError("precision must be at least 1")
    p = field.p
    if num == 0:
        return PAdic(field, INF, 0, precision)
    if field.char_p:
        if num < 0 or den < 0:
            raise DomainError("characteristic-p parsing takes nonnegative digit strings")
        if den % p == 0:
            raise DomainError("denominator must be coprime to p in characteristic p")
        v = _valuation_int(num, p)
        n_ds = _to_digits(num // p ** v, p, precision)
        d_ds = _to_digits(den, p, precision)
        ds = _poly_mul(n_ds, _poly_inv(d_ds, p, precision), p, precision)
        return PAdic(field, v, _from_digits(ds, p), precision)
    q = Fraction(num, den)
    vn = _valuation_int(q.numerator, p)
    vd = _valuation_int(q.denominator, p)
    un = q.numerator // p ** vn
    ud = q.denominator // p ** vd
    mod = p ** precision
    unit = un * pow(ud, -1, mod) % mod
    return PAdic(field, vn - vd, unit, precision)


def arith(x: PAdic, y: PAdic, op: str) -> PAdic:
    if x.field != y.field:
        raise DomainError("field mismatch")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise DomainError(f"unknown operation {op!r}")


@dataclass(frozen=True)
class Phase:
    """Exact point of Q/Z standing for exp(2*pi*i*value)."""

    value: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value) % 1)

    def __add__(self, other: "Phase") -> "Phase":
        return Phase(self.value + other.value)

    def __neg__(self) -> "Phase":
        return Phase(-self.value)

    def __sub__(self, other: "Phase") -> "Phase":
        return Phase(self.value - other.value)

    def to_complex(self) -> complex:
        if self.value == 0:
            return 1 + 0j
        ang = 2 * math.pi * self.value
        return complex(math.cos(ang), math.sin(ang))

    def to_cyclotomic(self):
        from .cyclotomic import Cyclotomic
        return Cyclotomic.root_of_unity(self.value)


def frac_part(x: PAdic) -> Phase:
    """The fractional part that feeds the canonical additive character."""
    if x.is_zero():
        if x.absprec < 0:
            raise PrecisionError("negative digits of this zero are unknown")
        return Phase(0)
    if x.ord >= 0:
        return Phase(0)
    p = x.p
    if x.field.char_p:
        return Phase(Fraction(x.digit(-1), p))
    if x.absprec < 0:
        raise PrecisionError("not all negative-index digits are known")
    k = -x.ord
    return Phase(Fraction(x.unit % p ** k, p ** k))


@dataclass(frozen=True)
class Ball:
    """Closed ball {x : |x - center| <= p**(-m)}."""

    center: PAdic
    m: int

    @property
    def field(self) -> FieldDescriptor:
        return self.center.field

    def contains(self, x: PAdic) -> bool:
        d = x - self.center
        if d.is_zero():
            if d.absprec < self.m:
                raise PrecisionError("membership undecidable at this precision")
            return True
        return d.ord >= self.m

    def contains_ball(self, other: "Ball") -> bool:
        return other.m >= self.m and self.contains(other.center)

    def intersect(self, other: "Ball") -> Optional["Ball"]:
        if self.contains_ball(other):
            return other
        if other.contains_ball(self):
            return self
        return None

    def haar(self) -> Fraction:
        return haar_measure(self)

    def children(self) -> list["Ball"]:
        """The p balls of radius p**-(m+1) partitioning this one."""
        f = self.field
        step = PAdic(f, self.m, 1, max(self.center.prec, DEFAULT_PRECISION))
        out = []
        for d in range(f.p):
            out.append(Ball(self.center + step * d, self.m + 1))
        return out

    def __repr__(self):
        return f"Ball({format_padic(self.center)}, m={self.m})"


@dataclass(frozen=True)
class Shell:
    """S(j, n): the sphere |x| = p**-j for j < n, the ball |x| <= p**-n for j = n."""

    j: int
    n: int

    def __post_init__(self):
        if self.j > self.n:
            raise DomainError("shell index above window top")

    @property
    def terminal(self) -> bool:
        return self.j == self.n

    def contains(self, x: PAdic) -> bool:
        if self.terminal:
            return x.is_zero() or x.ord >= self.n
        return not x.is_zero() and x.ord == self.j

    def haar(self, p: int) -> Fraction:
        if self.terminal:
            return Fraction(p) ** (-self.n)
        return Fraction(p) ** (-self.j) * (1 - Fraction(1, p))


def shell_of(x: PAdic, window_top: int) -> Shell:
    if x.is_zero() or x.ord >= window_top:
        return Shell(window_top, window_top)
    return Shell(x.ord, window_top)


def haar_measure(b: Ball) -> Fraction:
    return Fraction(b.field.p) ** (-b.m)


def shell_volume(p: int, j: int, n: Optional[int] = None) -> Fraction:
    """Haar volume of S(j, n); a non-terminal shell when n is None or j < n."""
    if n is not None and j == n:
        return Fraction(p) ** (-n)
    return Fraction(p) ** (-j) * (1 - Fraction(1, p))


# -- encodings ----------------------------------------------------------------

def format_padic(x: PAdic) -> str:
    if x.is_zero():
        return "0"
    ds = " ".join(str(d) for d in x.digits)
    return f"{x.p}^{x.ord} * ({ds})_{x.p}"


_TEXT_RE = re.compile(r"^\s*(\d+)\^(-?\d+)\s*\*\s*\(([\d\s]*)\)_(\d+)\s*$")


def parse_padic(text: str, field: FieldDescriptor) -> PAdic:
    """Inverse of :func:`format_padic`; also accepts ``a/b`` and integers."""
    text = text.strip()
    if text == "0":
        return PAdic.zero(field)
    m = _TEXT_RE.match(text)
    if m:
        p, k, ds, p2 = m.groups()
        if int(p) != field.p or int(p2) != field.p:
            raise DomainError(f"encoded prime does not match {field}")
        digits = [int(d) for d in ds.split()]
        if any(d >= field.p for d in digits):
            raise DomainError("digit out of range")
        return PAdic.from_digits(field, int(k), digits)
    try:
        q = Fraction(text)
    except ValueError as exc:
        raise DomainError(f"cannot parse p-adic value {text!r}") from exc
    return parse_rational(q.numerator, q.denominator, field)


def reconstruct_rational(x: PAdic) -> Optional[Fraction]:
    """Smallest a/b whose expansion matches the known digits of ``x``, or None.

    Extended Euclid on (p^prec, unit), stopped at the square-root bound.
    """
    if x.field.char_p:
        return None
    if x.is_zero():
        return Fraction(0)
    M = x.p ** x.prec
    bound = math.isqrt(M // 2)
    r0, r1, t0, t1 = M, x.unit, 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound or math.gcd(t1, M) != 1:
        return None
    return Fraction(r1, t1) * Fraction(x.p) ** x.ord


def padic_to_json(x: PAdic) -> dict:
    return {"p": x.p, "kind": x.field.kind,
            "ord": None if x.is_zero() else x.ord,
            "digits": x.digits}


def padic_from_json(obj: dict) -> PAdic:
    field = FieldDescriptor(int(obj["p"]), obj.get("kind", CHAR_ZERO))
    if obj.get("ord") is None:
        return PAdic.zero(field, max(len(obj.get("digits", [])), 1))
    return PAdic.from_digits(field, int(obj["ord"]), obj["digits"])
