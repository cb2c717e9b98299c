"""Characters, locally constant functions, Haar integrals and Fourier transforms.

Values of locally constant functions may be exact (int, Fraction,
:class:`Cyclotomic`) or plain complex floats; sums stay exact as long as every
summand is exact.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional

from .cyclotomic import Cyclotomic, combine_roots, is_exact
from .errors import DivergenceError, DomainError
from .field import (Ball, FieldDescriptor, PAdic, Phase, frac_part,
                    haar_measure, padic_from_json, padic_to_json)

# relative digits carried by internally generated points
WORK_PREC = 40


# -- exact points and balls -----------------------------------------------------

def point(field: FieldDescriptor, value=0, prec: int = WORK_PREC) -> PAdic:
    """An exact-enough element from an int or Fraction (digitwise in char p)."""
    value = Fraction(value)
    if value == 0:
        return PAdic.zero(field, prec)
    from .field import parse_rational
    return parse_rational(value.numerator, value.denominator, field, prec)


def point_from_digits(field: FieldDescriptor, lo: int, digits,
                      prec: int = WORK_PREC) -> PAdic:
    digits = list(digits)
    k = 0
    while k < len(digits) and digits[k] == 0:
        k += 1
    if k == len(digits):
        return PAdic.zero(field, prec)
    ds = digits[k:]
    return PAdic.from_digits(field, lo + k, ds + [0] * max(0, prec - len(ds)))


def uniformizer_power(field: FieldDescriptor, k: int, prec: int = WORK_PREC) -> PAdic:
    return point_from_digits(field, k, [1], prec)


def center_digits(c: PAdic, m: int) -> tuple[int, tuple]:
    """Digits of ``c`` strictly below index ``m`` as (lowest index, digits)."""
    if c.is_zero() or c.ord >= m:
        return (m, ())
    return (c.ord, tuple(c.digit(i) for i in range(c.ord, m)))


def canonical_ball(b: Ball) -> Ball:
    lo, ds = center_digits(b.center, b.m)
    return Ball(point_from_digits(b.field, lo, ds), b.m)


def ball_key(b: Ball) -> tuple:
    lo, ds = center_digits(b.center, b.m)
    k = 0
    while k < len(ds) and ds[k] == 0:
        k += 1
    return (b.m, lo + k, ds[k:])


def sub_balls(b: Ball, m_fine: int) -> list[Ball]:
    """All balls of radius p**-m_fine inside ``b``."""
    if m_fine < b.m:
        raise DomainError("refinement level above the ball's own level")
    p = b.field.p
    lo, ds = center_digits(b.center, b.m)
    base = list(ds) + [0] * (b.m - lo - len(ds))
    out = []
    for tail in product(range(p), repeat=m_fine - b.m):
        out.append(Ball(point_from_digits(b.field, lo, base + list(tail)), m_fine))
    return out


# -- characters -----------------------------------------------------------------

def character_eval(xi: PAdic, x: PAdic) -> Phase:
    """Phase of chi_xi(x) = exp(2 pi i eta(xi x))."""
    if xi.field != x.field:
        raise DomainError("field mismatch")
    return frac_part(xi * x)


def character_value(xi: PAdic, x: PAdic) -> Cyclotomic:
    return character_eval(xi, x).to_cyclotomic()


def ball_character_integral(z: PAdic, m: int) -> Fraction:
    """Closed form of the integral of chi(z x) over B(0, p**-m)."""
    p = z.field.p
    if z.is_zero() or z.ord + m >= 0:
        return Fraction(p) ** (-m)
    return Fraction(0)


# -- locally constant functions ---------------------------------------------------

def _is_zero_value(v) -> bool:
    if isinstance(v, Cyclotomic):
        return v.is_zero()
    return v == 0


def _values_equal(a, b) -> bool:
    if is_exact(a) and is_exact(b):
        if isinstance(a, Cyclotomic):
            return a == b
        if isinstance(b, Cyclotomic):
            return b == a
        return a == b
    return complex(a) == complex(b)


class LocallyConstantFn:
    """Finite disjoint union of balls carrying constant values."""

    def __init__(self, pieces: Iterable = (), default=0,
                 field: Optional[FieldDescriptor] = None, check: bool = True):
        pieces = [(canonical_ball(b), v) for b, v in pieces]
        if field is None:
            if not pieces:
                raise DomainError("field required for a function with no pieces")
            field = pieces[0][0].field
        self.field = field
        self.pieces = tuple(pieces)
        self.default = default
        if check:
            for i, (a, _) in enumerate(self.pieces):
                if a.field != field:
                    raise DomainError("piece from another field")
                for b, _ in self.pieces[i + 1:]:
                    if a.intersect(b) is not None:
                        raise DomainError(f"overlapping pieces {a} and {b}")

    # constructors
    @classmethod
    def indicator(cls, b: Ball, value=1) -> "LocallyConstantFn":
        return cls([(b, value)], 0, b.field)

    @classmethod
    def constant(cls, field: FieldDescriptor, value) -> "LocallyConstantFn":
        return cls([], value, field)

    @classmethod
    def character_on(cls, z: PAdic, b: Ball) -> "LocallyConstantFn":
        """x -> chi(z x) restricted to ``b``, split at its constancy radius."""
        level = b.m if z.is_zero() else max(b.m, -z.ord)
        pieces = [(c, character_value(z, c.center)) for c in sub_balls(b, level)]
        return cls(pieces, 0, b.field, check=False)

    def __call__(self, x: PAdic):
        for b, v in self.pieces:
            if b.contains(x):
                return v
        return self.default

    # geometry
    def support_level(self) -> int:
        """Largest M such that every piece lies in B(0, p**-M)."""
        M = None
        for b, _ in self.pieces:
            k = b.m if b.center.is_zero() else min(b.m, b.center.ord)
            M = k if M is None else min(M, k)
        return 0 if M is None else M

    def resolution(self) -> int:
        return max((b.m for b, _ in self.pieces), default=0)

    def has_compact_support(self) -> bool:
        return _is_zero_value(self.default)

    # algebra through a common refinement
    def leaves(self, *others: "LocallyConstantFn", root: Optional[Ball] = None):
        """Balls on which self and ``others`` are all constant, covering ``root``."""
        fns = (self,) + others
        if root is None:
            M = min(f.support_level() for f in fns)
            root = Ball(point(self.field, 0), M)
        balls = [b for f in fns for b, _ in f.pieces]
        out = []

        def walk(cur: Ball):
            for b in balls:
                if b.m > cur.m and cur.contains(b.center):
                    for ch in cur.children():
                        walk(ch)
                    return
            out.append(cur)

        walk(root)
        return root, out

    def _combine(self, other: "LocallyConstantFn", op) -> "LocallyConstantFn":
        root, cells = self.leaves(other)
        pieces = [(c, op(self(c.center), other(c.center))) for c in cells]
        default = op(self.default, other.default)
        out = LocallyConstantFn(pieces, default, self.field, check=False)
        return out.simplify()

    def __add__(self, other):
        if isinstance(other, LocallyConstantFn):
            return self._combine(other, lambda a, b: a + b)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, LocallyConstantFn):
            return self._combine(other, lambda a, b: a - b)
        return NotImplemented

    def scale(self, alpha) -> "LocallyConstantFn":
        return LocallyConstantFn([(b, alpha * v) for b, v in self.pieces],
                                 alpha * self.default, self.field, check=False)

    def __neg__(self):
        return self.scale(-1)

    def translate(self, a: PAdic) -> "LocallyConstantFn":
        """x -> f(x + a)."""
        return LocallyConstantFn([(Ball(b.center - a, b.m), v) for b, v in self.pieces],
                                 self.default, self.field, check=False)

    def reflect(self) -> "LocallyConstantFn":
        """x -> f(-x)."""
        return LocallyConstantFn([(Ball(-b.center, b.m), v) for b, v in self.pieces],
                                 self.default, self.field, check=False)

    def simplify(self) -> "LocallyConstantFn":
        """Drop pieces equal to the default and merge full sibling families."""
        p = self.field.p
        pieces = [(b, v) for b, v in self.pieces if not _values_equal(v, self.default)]
        changed = True
        while changed:
            changed = False
            groups: dict = {}
            for b, v in pieces:
                parent = canonical_ball(Ball(b.center, b.m - 1))
                groups.setdefault(ball_key(parent), (parent, []))[1].append((b, v))
            merged = []
            for parent, kids in groups.values():
                if len(kids) == p and all(_values_equal(kids[0][1], v) for _, v in kids):
                    merged.append((parent, kids[0][1]))
                    changed = True
                else:
                    merged.extend(kids)
            pieces = merged
        pieces.sort(key=lambda bv: ball_key(bv[0]))
        return LocallyConstantFn(pieces, self.default, self.field, check=False)

    def equals(self, other: "LocallyConstantFn") -> bool:
        if not _values_equal(self.default, other.default):
            return False
        _, cells = self.leaves(other)
        return all(_values_equal(self(c.center), other(c.center)) for c in cells)

    def __repr__(self):
        body = ", ".join(f"{b}: {v}" for b, v in self.pieces)
        return f"LocallyConstantFn([{body}], default={self.default})"

    # json
    def to_json(self) -> dict:
        def enc(v):
            c = complex(v)
            return c.real, c.imag
        pieces = []
        for b, v in self.pieces:
            re, im = enc(v)
            pieces.append({"center": padic_to_json(b.center), "m": b.m, "re": re, "im": im})
        re, im = enc(self.default)
        return {"p": self.field.p, "kind": self.field.kind, "pieces": pieces,
                "default": {"re": re, "im": im}}

    @classmethod
    def from_json(cls, obj: dict) -> "LocallyConstantFn":
        field = FieldDescriptor(int(obj["p"]), obj.get("kind", "char-zero"))

        def dec(re, im):
            if im == 0 and float(re).is_integer():
                return int(re)
            if im == 0:
                return Fraction(re).limit_denominator(10 ** 12)
            return complex(re, im)
        pieces = []
        for pc in obj.get("pieces", []):
            c = pc["center"]
            if isinstance(c, dict):
                c = padic_from_json(c)
            else:
                c = point(field, Fraction(c))
            pieces.append((Ball(c, int(pc["m"])), dec(pc.get("re", 0), pc.get("im", 0))))
        d = obj.get("default", 0)
        default = dec(d.get("re", 0), d.get("im", 0)) if isinstance(d, dict) else d
        return cls(pieces, default, field)


# -- integration and transforms ----------------------------------------------------

def integrate_lc(f: LocallyConstantFn, region: Optional[Ball] = None):
    """Haar integral of ``f`` over ``region`` (the whole field when None)."""
    total = Fraction(0)
    if region is None:
        if not f.has_compact_support():
            raise DivergenceError("nonzero default value over the whole field")
        for b, v in f.pieces:
            total = total + v * haar_measure(b)
        return total
    covered = Fraction(0)
    for b, v in f.pieces:
        inter = b.intersect(region)
        if inter is not None:
            h = haar_measure(inter)
            total = total + v * h
            covered += h
    rest = haar_measure(region) - covered
    if rest and not _is_zero_value(f.default):
        total = total + f.default * rest
    return total


def fourier_lc(f: LocallyConstantFn) -> LocallyConstantFn:
    """F(f)(xi) = integral of chi(xi x) f(x) dx, evaluated piecewise in closed form."""
    if not f.has_compact_support():
        raise DomainError("Fourier transform needs compact support")
    field = f.field
    if not f.pieces:
        return LocallyConstantFn([], 0, field)
    R = f.resolution()
    level = -R
    for b, _ in f.pieces:
        level = max(level, -b.m)
        if not b.center.is_zero():
            level = max(level, -b.center.ord)
    root = Ball(point(field, 0), -R)
    pieces = []
    for cell in sub_balls(root, level):
        xi = cell.center
        terms = [(haar_measure(b), character_eval(xi, b.center).value, v)
                 for b, v in f.pieces if xi.is_zero() or xi.ord >= -b.m]
        pieces.append((cell, combine_roots(terms, field.p) if terms else Fraction(0)))
    return LocallyConstantFn(pieces, 0, field, check=False).simplify()


# -- Gaussian-like radial weights --------------------------------------------------

def gaussian_normalizer(xi_norm, q: int, field: FieldDescriptor, tol: float = 1e-15) -> float:
    """C_q(xi) for the density C exp(-|x xi|^2) on K^q.

    The inverse is the shell series sum_l (p^{lq} - p^{(l-1)q}) exp(-p^{2l}|xi|^2);
    the l < L0 part telescopes to at most p^{(L0-1)q}.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if q < 1:
        raise DomainError("q must be a positive integer")
    xi_norm = Fraction(xi_norm)
    if xi_norm <= 0:
        raise DomainError("|xi| must be positive")
    p = field.p
    e = round(math.log(float(xi_norm), p))
    if Fraction(p) ** e != xi_norm:
        raise DomainError("|xi| must be an integral power of p")
    L0 = 0
    while float(p) ** ((L0 - 1) * q) >= tol / 2:
        L0 -= 1
    L0 = min(L0, -e)
    terms = []
    l = L0
    prev = None
    while True:
        t = (float(p) ** (l * q) - float(p) ** ((l - 1) * q)) * math.exp(-float(p) ** (2 * (l + e)))
        terms.append(t)
        if l >= -e and (t == 0.0 or (prev is not None and t < prev / 2 and t < tol / 4)):
            break
        prev = t
        l += 1
    return 1.0 / math.fsum(terms)


def gaussian_shell_weight(p: int, j: int, xi_ord: int, C: float) -> float:
    """nu_xi mass of the shell |x| = p^-j in K (q = 1), |xi| = p^-xi_ord."""
    vol = float(p) ** (-j) * (1 - 1 / p)
    return C * vol * math.exp(-float(p) ** (-2 * (j + xi_ord)))


def gaussian_fourier_radial(p: int, s, xi_ord: int, C: float, depth: int = 80) -> float:
    """F(gamma_xi)(x) for |x| = p^-s (s = inf at x = 0).

    The transform of a radial density is radial: shell j contributes its mass
    when j + s >= 0, minus 1/(p-1) of it when j + s = -1.
    """
    top = -xi_ord + depth
    if s == math.inf:
        lo = -xi_ord - depth
    else:
        lo = -s - 1
        if lo >= top:
            return 0.0
    terms = []
    for j in range(int(lo), int(top)):
        w = gaussian_shell_weight(p, j, xi_ord, C)
        if s != math.inf and j == -s - 1:
            terms.append(-w / (p - 1))
        else:
            terms.append(w)
    # shells past ``top`` carry exp(...) = 1 to double precision
    terms.append(C * float(p) ** (-top))
    return math.fsum(terms)
