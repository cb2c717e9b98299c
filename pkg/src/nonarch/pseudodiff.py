"""Pseudo-differentiation of locally constant functions and of shell measures,
Vladimirov operators D^b, and logarithmic pseudo-derivatives.

Integrals over K are organised by shells |y - x| = p^l.  Shells inside the
constancy radius cancel and are never visited; shells beyond the support are
summed in closed form.  Integer orders with exact inputs stay in Fractions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from .errors import CoverageError, DivergenceError, DomainError
from .field import Ball, PAdic, Shell
from .fourier import LocallyConstantFn, integrate_lc, point, point_from_digits
from .measures import (Annulus, BallUnion, CylinderSet, DensityValue, ProductMeasure, ShellMeasure1D,
                       UNDEFINED, measure_mass)


def _ord(y: PAdic):
    return math.inf if y.is_zero() else y.ord


def _is_int_order(b) -> bool:
    if isinstance(b, complex):
        return b.imag == 0 and float(b.real).is_integer()
    return float(b) == int(b) if isinstance(b, (int, Fraction, float)) else False


def _exact(b, *values) -> bool:
    return _is_int_order(b) and all(isinstance(v, (int, Fraction)) for v in values)


def _pow(p: int, e, exact: bool):
    """p ** e, as a Fraction when exact, else complex."""
    if exact:
        e = int(e.real) if isinstance(e, complex) else int(e)
        return Fraction(p) ** e
    return complex(float(p) ** complex(e))


def _re(b) -> float:
    return b.real if isinstance(b, complex) else float(b)


def _as_order(b):
    """Normalise b: ints stay ints, integral floats/complex become ints."""
    if _is_int_order(b):
        return int(b.real) if isinstance(b, complex) else int(b)
    return complex(b) if isinstance(b, complex) else b


def _geom_tail(p: int, b, L: int, exact: bool):
    """sum_{l >= L} p^(-l b)."""
    if _re(b) <= 0:
        raise DivergenceError("outer shells diverge for Re b <= 0")
    return _pow(p, -L * b, exact) / (1 - _pow(p, -b, exact))


def vladimirov_constant(p: int, b):
    """K_b = (p^b - 1) / (1 - p^(-1-b)); D^b = K_b PD(b, .) for Re b > 0."""
    b = _as_order(b)
    exact = isinstance(b, int)
    num = _pow(p, b, exact) - 1
    den = 1 - _pow(p, -1 - b, exact)
    if den == 0:
        raise DomainError("b = -1 needs the logarithmic kernel")
    return num / den


@dataclass
class PDResult:
    value: object
    tail_bound: float
    shells: tuple

    def __complex__(self):
        return complex(self.value)


# -- PD of locally constant functions ------------------------------------------------

def _outer_level(f: LocallyConstantFn, x: PAdic, l_in: int) -> int:
    """First shell index beyond which every piece sits inside B(x, p^(l-1))."""
    L = l_in
    for b, _ in f.pieces:
        L = max(L, -b.m + 1)
        d = b.center - x
        if not d.is_zero():
            L = max(L, -d.ord + 1)
    return L


def _clip_unit(b: Ball) -> Optional[Ball]:
    unit = Ball(point(b.field, 0), 0)
    return unit.intersect(b)


def pd(b, f: LocallyConstantFn, x: PAdic, region: str = "whole", tol: float = 1e-12) -> PDResult:
    """PD(b, f)(x) = integral of (f(x) - f(y)) |x - y|^(-1-b) dy.

    ``region`` is "whole" (y over K) or "unit" (y over the unit ball).
    """
    if region not in ("whole", "unit"):
        raise DomainError("region must be 'whole' or 'unit'")
    b = _as_order(b)
    p = f.field.p
    fx = f(x)
    if not f.pieces:
        return PDResult(0, 0.0, (0, 0))
    exact = _exact(b, fx, f.default, *[v for _, v in f.pieces])
    R = f.resolution()
    l_in = -R + 1
    L = _outer_level(f, x, l_in)
    if region == "unit":
        L = max(L, 1, (-x.ord + 1) if not x.is_zero() else 1)

    def ball_int(l):
        ball = Ball(x, -l)
        if region == "unit":
            ball = _clip_unit(ball)
            if ball is None:
                return 0, Fraction(0)
        return integrate_lc(f, ball), ball.haar()

    total = 0
    prev_int, prev_vol = ball_int(l_in - 1)
    for l in range(l_in, L):
        cur_int, cur_vol = ball_int(l)
        shell_int = cur_int - prev_int
        shell_vol = cur_vol - prev_vol
        total = total + _pow(p, -l * (1 + b), exact) * (fx * shell_vol - shell_int)
        prev_int, prev_vol = cur_int, cur_vol
    if region == "whole":
        diff = fx - f.default
        if diff != 0:
            total = total + (1 - Fraction(1, p)) * diff * _geom_tail(p, b, L, exact)
    return PDResult(total, 0.0, (l_in, L))


# -- Vladimirov operators ----------------------------------------------------------------

def _log_moment(p: int, M: int) -> Fraction:
    """sum_{k >= M} k p^(-k), exact."""
    q = Fraction(1, p)
    return q ** M * (M - (M - 1) * q) / (1 - q) ** 2


def vladimirov(b, psi: LocallyConstantFn, x: PAdic, tol: float = 1e-12):
    """D^b psi(x) for compactly supported locally constant psi."""
    b = _as_order(b)
    p = psi.field.p
    if b == 0:
        return psi(x)
    if _re(b) > 0:
        return vladimirov_constant(p, b) * pd(b, psi, x).value
    if psi.default != 0:
        raise DomainError("negative orders need compact support")
    if not psi.pieces:
        return 0
    if _re(b) == 0:
        raise DomainError("purely imaginary orders are not supported")
    R = psi.resolution()
    l_in = -R + 1
    L = _outer_level(psi, x, l_in)
    psix = psi(x)
    exact = _exact(b, *[v for _, v in psi.pieces])
    c = 1 - Fraction(1, p)
    shells = []
    prev = integrate_lc(psi, Ball(x, -(l_in - 1)))
    for l in range(l_in, L):
        cur = integrate_lc(psi, Ball(x, -l))
        shells.append((l, cur - prev))
        prev = cur
    if b == -1:
        # kernel -(1 - 1/p) log_p |x - y|
        inner = psix * c * (-_log_moment(p, R))
        acc = inner + sum((l * s for l, s in shells), 0)
        return -c * acc
    # Riesz kernel |x - y|^(-1-b) / Gamma_p(-b) with 1/Gamma_p(-b) = -K_b
    inner = psix * c * _pow(p, R * b, exact) / (1 - _pow(p, b, exact))
    acc = inner + sum((_pow(p, -l * (1 + b), exact) * s for l, s in shells), 0)
    return -vladimirov_constant(p, b) * acc


class RadialTailFn:
    """Values on the cells of radius p^-R inside B(0, p^L0), radial outside.

    ``tail`` is ("zero",), ("power", C, s) for C p^(-l s) at |x| = p^l, or
    ("log", C) for C l.
    """

    def __init__(self, field, R: int, L0: int, values: dict, tail: tuple):
        self.field = field
        self.R = R
        self.L0 = L0
        self.values = values
        self.tail = tail
        self._sums: dict = {}
        for key, v in values.items():
            for k in range(len(key) + 1):
                self._sums[key[:k]] = self._sums.get(key[:k], 0) + v

    def _key(self, x: PAdic) -> tuple:
        return tuple(0 if x.is_zero() else x.digit(i) for i in range(-self.L0, self.R))

    def tail_value(self, l: int):
        kind = self.tail[0]
        if kind == "zero":
            return 0
        if kind == "power":
            _, C, s = self.tail
            exact = isinstance(C, (int, Fraction)) and isinstance(s, int)
            return C * _pow(self.field.p, -l * s, exact)
        return self.tail[1] * l

    def __call__(self, x: PAdic):
        if not x.is_zero() and x.ord < -self.L0:
            return self.tail_value(-x.ord)
        return self.values[self._key(x)]

    def ball_integral(self, x: PAdic, l: int):
        """Integral over B(x, p^l) for l <= L0 and x in the grid."""
        if l > self.L0:
            raise CoverageError("ball leaves the grid")
        key = self._key(x)[: self.L0 - l]
        return self._sums.get(key, 0) * Fraction(self.field.p) ** (-self.R)


def apply_vladimirov(b, psi: LocallyConstantFn, L0: int) -> RadialTailFn:
    """D^b psi tabulated on B(0, p^L0) at the resolution of psi."""
    b = _as_order(b)
    field = psi.field
    p = field.p
    if psi.default != 0:
        raise DomainError("psi must have compact support")
    for ball, _ in psi.pieces:
        if -ball.m > L0 or (not ball.center.is_zero() and ball.center.ord < -L0):
            raise CoverageError("psi is not supported in the grid ball")
    R = max(psi.resolution(), -L0) if psi.pieces else 0
    values = {}
    for ds in product(range(p), repeat=L0 + R):
        x = point_from_digits(field, -L0, ds)
        values[tuple(ds)] = vladimirov(b, psi, x)
    I = integrate_lc(psi)
    if b == 0 or I == 0:
        tail = ("zero",)
    elif b == -1:
        tail = ("log", -(1 - Fraction(1, p)) * I)
    else:
        tail = ("power", -vladimirov_constant(p, b) * I, 1 + b)
    return RadialTailFn(field, R, L0, values, tail)


def vladimirov_on(a, phi: RadialTailFn, x: PAdic):
    """D^a phi(x) for Re a > 0 and x inside the grid ball."""
    a = _as_order(a)
    if _re(a) <= 0:
        raise DomainError("outer order must have positive real part")
    p = phi.field.p
    if not x.is_zero() and x.ord < -phi.L0:
        raise CoverageError("x lies outside the grid ball")
    exact = isinstance(a, int) and all(isinstance(v, (int, Fraction)) for v in phi.values.values())
    fx = phi(x)
    l_in = -phi.R + 1
    total = 0
    prev = phi.ball_integral(x, l_in - 1)
    for l in range(l_in, phi.L0 + 1):
        cur = phi.ball_integral(x, l)
        vol = Fraction(p) ** l * (1 - Fraction(1, p))
        total = total + _pow(p, -l * (1 + a), exact) * (fx * vol - (cur - prev))
        prev = cur
    M = phi.L0 + 1
    c = 1 - Fraction(1, p)
    outer = fx * _geom_tail(p, a, M, exact)
    kind = phi.tail[0]
    if kind == "power":
        _, C, s = phi.tail
        ex2 = exact and isinstance(C, (int, Fraction)) and isinstance(s, int)
        outer = outer - C * _geom_tail(p, a + s, M, ex2)
    elif kind == "log":
        C = phi.tail[1]
        q = _pow(p, -a, exact)
        outer = outer - C * q ** M * (M - (M - 1) * q) / (1 - q) ** 2
    total = total + c * outer
    return vladimirov_constant(p, a) * total


def composition_gap(a, b, psi: LocallyConstantFn, xs: Sequence[PAdic], L0: int = 2) -> float:
    """max |D^a(D^b psi)(x) - D^(a+b) psi(x)| over the sample points."""
    inner = apply_vladimirov(b, psi, L0)
    worst = 0.0
    for x in xs:
        left = complex(vladimirov_on(a, inner, x))
        right = complex(vladimirov(_as_order(a) + _as_order(b), psi, x))
        worst = max(worst, abs(left - right))
    return worst


# -- PD of measures ----------------------------------------------------------------------

def _ball_terms(c) -> list:
    """A constraint as a signed list of (Ball, coefficient)."""
    if c is None:
        return [(None, 1)]
    if isinstance(c, Ball):
        return [(c, 1)]
    if isinstance(c, Annulus):
        if c.j >= c.top:
            return [(Ball(c.center, c.top), 1)]
        return [(Ball(c.center, c.j), 1), (Ball(c.center, c.j + 1), -1)]
    if isinstance(c, Shell):
        raise DomainError("give shells as Annulus with an explicit center")
    if isinstance(c, BallUnion):
        return list(c.terms)
    raise DomainError(f"unsupported constraint {c!r}")


def _mass_at_ord(m: ShellMeasure1D, o, mb: int):
    """Mass of a radius-p^-mb ball whose center has ord o relative to m's center."""
    p = m.p
    if o >= mb:
        if mb > m.n:
            return m.density(m.n) * Fraction(p) ** (-mb)
        return m.total() - m.mass_below(mb)
    j = m.n if o >= m.n else o
    return m.density(j) * Fraction(p) ** (-mb)


class _Factor:
    """t -> mu_j(ball - t z_j), which depends only on ord(w - t z), capped."""

    def __init__(self, m: ShellMeasure1D, ball: Ball, z: PAdic):
        self.m = m
        self.mb = ball.m
        self.w = ball.center - m.center
        self.z = z
        self.e = _ord(z)
        self.K = min(ball.m, m.n)
        a = _ord(self.w)
        self.a = min(a, self.K)

    def at_ord(self, o):
        return _mass_at_ord(self.m, min(o, self.K), self.mb)

    def at(self, t: PAdic):
        return self.at_ord(_ord(self.w - t * self.z))


def _coset_reps(field, l: int, R_t: int):
    """Representatives of {ord t = -l} modulo p^R_t, each of Haar mass p^-R_t."""
    p = field.p
    n = R_t + l
    if n <= 0:
        raise DomainError("resolution coarser than the shell")
    for rest in product(range(p), repeat=n - 1):
        for lead in range(1, p):
            yield point_from_digits(field, -l, (lead,) + rest)


def _pd_ball_product(b, factors: list, p: int, exact: bool, max_cosets: int):
    active = [f for f in factors if f.e != math.inf]
    g0 = 1
    for f in factors:
        g0 = g0 * f.at_ord(f.a)
    if not active:
        return 0, (0, 0)
    l_in = min(f.e - f.K for f in active) + 1
    L = max([l_in] + [f.e - f.a + 1 for f in active])
    static = 1
    for f in factors:
        if f.e == math.inf:
            static = static * f.at_ord(f.a)
    total = 0
    field = active[0].m.field
    if L > l_in:
        R_t = max(f.K - f.e for f in active)
        for l in range(l_in, L):
            count = (p - 1) * p ** (R_t + l - 1)
            if count > max_cosets:
                raise CoverageError("too many cosets in a middle shell")
            acc = 0
            for t in _coset_reps(field, l, R_t):
                g = static
                for f in active:
                    g = g * f.at(t)
                acc = acc + g
            vol = Fraction(p) ** l * (1 - Fraction(1, p))
            mean_int = acc * Fraction(p) ** (-R_t)
            total = total + _pow(p, -l * (1 + b), exact) * (g0 * vol - mean_int)

    # beyond L every active ord(u) equals e - l
    def P(l):
        out = static
        for f in active:
            out = out * f.at_ord(f.e - l)
        return out

    L_far = max([L] + [f.e - f.m.j_min + 1 for f in active])
    c = 1 - Fraction(1, p)
    outer = 0
    if g0 != 0:
        outer = g0 * _geom_tail(p, b, L, exact)
    for l in range(L, L_far):
        outer = outer - _pow(p, -l * b, exact) * P(l)
    P0, P1, P2 = P(L_far), P(L_far + 1), P(L_far + 2)
    if P0 != 0:
        ratio = P1 / P0
        if P2 * P0 != P1 * P1:
            raise CoverageError("outer masses are not geometric")
        q = _pow(p, -b, exact) * ratio
        if abs(complex(q)) >= 1:
            raise DivergenceError("outer shell series diverges")
        outer = outer - _pow(p, -L_far * b, exact) * P0 / (1 - q)
    elif P1 != 0:
        raise CoverageError("outer masses are not geometric")
    total = total + c * outer
    return total, (l_in, L_far)


def _as_product(mu) -> ProductMeasure:
    return ProductMeasure([mu]) if isinstance(mu, ShellMeasure1D) else mu


def _as_cylinder(S) -> CylinderSet:
    return S if isinstance(S, CylinderSet) else CylinderSet((S,))


def measure_pd(b, mu, z, S, tol: float = 1e-12, max_cosets: int = 200000) -> PDResult:
    """PD(b, g)(0) for g(t) = mu(-t z + S)."""
    b = _as_order(b)
    mu = _as_product(mu)
    S = _as_cylinder(S)
    z = [z] if isinstance(z, PAdic) else list(z)
    if S.base_dim > mu.d or len(z) > mu.d:
        raise CoverageError("cylinder or direction beyond the truncation dimension")
    p = mu.field.p
    weights = [w for c in mu.components for w in list(c.weights.values()) + [c.tail]]
    exact = _exact(b, *weights)
    per_coord = []
    for i, comp in enumerate(mu.components):
        c = S.constraints[i] if i < len(S.constraints) else None
        zi = z[i] if i < len(z) else PAdic.zero(mu.field)
        terms = _ball_terms(c)
        per_coord.append([(None if ball is None else _Factor(comp, ball, zi), coef)
                          for ball, coef in terms])
    total = 0
    lo, hi = math.inf, -math.inf
    for combo in product(*per_coord):
        coef = 1
        factors = []
        for fac, k in combo:
            coef = coef * k
            if fac is not None:
                factors.append(fac)
        if not factors:
            continue
        v, (a, bnd) = _pd_ball_product(b, factors, p, exact, max_cosets)
        total = total + coef * v
        lo, hi = min(lo, a), max(hi, bnd)
    shells = (lo, hi) if lo != math.inf else (0, 0)
    return PDResult(total, 0.0, shells)


@dataclass
class PseudoDiffMeasure:
    mu: ProductMeasure
    direction: list
    b: object
    cells: list
    values: list = dc_field(default_factory=list)

    def total_variation(self) -> float:
        return math.fsum(abs(complex(v)) for v in self.values)

    def value_of(self, i: int):
        return self.values[i]


def tilde_D_measure(b, mu, a, cells: Sequence, tol: float = 1e-12) -> PseudoDiffMeasure:
    """nu(E) = integral over K of [mu(-lambda a + E) - mu(E)] |lambda|^(-1-b) d lambda."""
    mu = _as_product(mu)
    a = [a] if isinstance(a, PAdic) else list(a)
    vals = [-measure_pd(b, mu, a, E, tol).value for E in cells]
    return PseudoDiffMeasure(mu, a, b, list(cells), vals)


def log_pseudo_derivative(mu, a, cell) -> DensityValue:
    """(D~^1_a mu)(cell) / mu(cell)."""
    mu = _as_product(mu)
    m = measure_mass(mu, _as_cylinder(cell))
    if m == 0:
        return UNDEFINED
    nu = tilde_D_measure(1, mu, a, [cell]).values[0]
    return DensityValue(nu / m)


def shell_partition(m: ShellMeasure1D, lo: Optional[int] = None) -> list:
    """Annuli of m's window around its center, from ``lo`` (default j_min) to the top."""
    lo = m.j_min if lo is None else lo
    return [Annulus(m.center, j, m.n) for j in range(lo, m.n + 1)]


# -- shift identity through the logarithmic kernel ------------------------------------------

def _log_kernel_ball(p: int, sigma: PAdic, m: int) -> Fraction:
    """Integral over B(sigma, p^-m) of k(s) = -(1 - 1/p) log_p |s|."""
    c = 1 - Fraction(1, p)
    if not sigma.is_zero() and sigma.ord < m:
        return c * sigma.ord * Fraction(p) ** (-m)
    return c * c * _log_moment(p, m)


def shift_identity(mu: ShellMeasure1D, a: PAdic, S: Ball, lam: PAdic):
    """Both sides of mu(S - lam a) - mu(S) = -K_1 sum_cells H(cell) nu(cell).

    nu = D~^1_a mu on the cells of radius |S| and H(x) is the integral of
    k(lam - s) - k(s) over {s : x + s a in S}, with k the D^(-1) kernel.
    """
    if a.is_zero() or lam.is_zero():
        raise DomainError("direction and step must be nonzero")
    p = mu.p
    field = mu.field
    lhs = mu.mass_ball(Ball(S.center - lam * a, S.m)) - mu.mass_ball(S)
    m_s = S.m - a.ord
    top = min(S.m, lam.ord + a.ord)
    base = Ball(S.center, top)
    from .fourier import sub_balls
    cells = sub_balls(base, S.m)
    nu = tilde_D_measure(1, mu, a, cells)
    K1 = vladimirov_constant(p, 1)
    rhs = 0
    for cell, v in zip(cells, nu.values):
        sigma = (S.center - cell.center) / a
        H = _log_kernel_ball(p, sigma - lam, m_s) - _log_kernel_ball(p, sigma, m_s)
        rhs = rhs + H * v
    return lhs, -K1 * rhs


# -- smallness trend ---------------------------------------------------------------------

def smallness_slope(mu, z, S, ts: Sequence[PAdic]) -> tuple[float, list]:
    """Least-squares slope of log|mu(t z + S) - mu(S)| against log|t|."""
    mu = _as_product(mu)
    S = _as_cylinder(S)
    z = [z] if isinstance(z, PAdic) else list(z)
    base = measure_mass(mu, S)
    xs, ys = [], []
    for t in ts:
        shifted = []
        for i, c in enumerate(S.constraints):
            if c is None:
                shifted.append(None)
            elif isinstance(c, Ball):
                zi = z[i] if i < len(z) else PAdic.zero(mu.field)
                shifted.append(Ball(c.center + t * zi, c.m))
            else:
                raise DomainError("smallness trend needs ball constraints")
        diff = abs(float(measure_mass(mu, CylinderSet(tuple(shifted))) - base))
        if diff == 0:
            raise DomainError("shift does not move the set")
        xs.append(float(-t.ord) * math.log(mu.field.p))
        ys.append(math.log(diff))
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)
    return slope, ys
