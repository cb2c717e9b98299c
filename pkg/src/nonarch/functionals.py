"""Characteristic functionals of shell measures and the checks built on them."""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from typing import Callable, Optional, Sequence

import numpy as np

from .cyclotomic import Cyclotomic
from .errors import DomainError
from .field import Ball, PAdic
from .fourier import (LocallyConstantFn, character_value, gaussian_fourier_radial,
                      gaussian_normalizer, point)
from .measures import ProductMeasure, ShellMeasure1D, gaussian_like_measure


def _ord(y: PAdic):
    return math.inf if y.is_zero() else y.ord


def shell_average(p: int, s, t):
    """Mean of chi(x c) over |x| = p^-s when ord(c) = t (t = inf for c = 0)."""
    if t == math.inf or s + t >= 0:
        return Fraction(1)
    if s + t == -1:
        return Fraction(-1, p - 1)
    return Fraction(0)


def radial_charfun(m: ShellMeasure1D, s):
    """theta of the centered copy of m at any z with ord(z) = s."""
    if s == math.inf:
        return m.total()
    k = -s
    if k > m.n:
        return Fraction(0) if m.exact else 0.0
    base = m.total() - m.mass_below(k)
    return base - m.shell_weight(k - 1) / (m.p - 1)


def charfun_1d(m: ShellMeasure1D, z: PAdic):
    """theta(z) = integral of chi(z x) dm(x); exact for rational weights."""
    base = radial_charfun(m, _ord(z))
    if z.is_zero() or m.center.is_zero():
        return base
    phase = character_value(z, m.center)
    return phase * base


def charfun(mu, z):
    """theta_mu(z) for a product measure and coordinate vector z."""
    if isinstance(mu, ShellMeasure1D):
        return charfun_1d(mu, z if isinstance(z, PAdic) else z[0])
    if len(z) > mu.d:
        raise DomainError("more coordinates than the truncation dimension")
    out = Fraction(1)
    for comp, zj in zip(mu.components, z):
        out = out * charfun_1d(comp, zj)
    return out


class CharFunctional:
    """theta_mu with an evaluation cache keyed by the digits of z."""

    def __init__(self, mu):
        self.mu = mu
        self._cache: dict = {}

    @staticmethod
    def _key(z) -> tuple:
        zs = [z] if isinstance(z, PAdic) else list(z)
        return tuple((None, ()) if v.is_zero() else (v.ord, tuple(v.digits)) for v in zs)

    def __call__(self, z):
        k = self._key(z)
        if k not in self._cache:
            self._cache[k] = charfun(self.mu, z)
        return self._cache[k]


def as_complex(v) -> complex:
    return complex(v)


def _diff(a, b):
    if isinstance(a, PAdic):
        return a - b
    return [x - y for x, y in zip(a, b)]


def gram_matrix(theta: Callable, zs: Sequence) -> np.ndarray:
    n = len(zs)
    G = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            G[i, j] = complex(theta(_diff(zs[i], zs[j])))
    return G


def positive_definite_probe(theta: Callable, zs: Sequence) -> float:
    """Smallest eigenvalue of the Hermitian matrix theta(z_l - z_j)."""
    if not zs:
        raise DomainError("no sample points")
    G = gram_matrix(theta, zs)
    G = (G + G.conj().T) / 2
    return float(np.linalg.eigvalsh(G).min())


# -- integration of radial functions of ord(x) ------------------------------------------

def ord_distribution(m: ShellMeasure1D, t_lo: int, t_hi: int):
    """[(prob, t)] for t_lo < t < t_hi plus lumps {ord <= t_lo} and {ord >= t_hi}."""
    out = [(m.total() - m.ord_at_least(t_lo + 1), t_lo)]
    for t in range(t_lo + 1, t_hi):
        out.append((m.ord_mass(t), t))
    out.append((m.ord_at_least(t_hi), t_hi))
    return out


def integrate_radial(m: ShellMeasure1D, F: Callable[[int], float], t_lo: int, t_hi: int):
    """Integral of F(ord x) dm for F constant on t <= t_lo and on t >= t_hi."""
    return sum((w * F(t) for w, t in ord_distribution(m, t_lo, t_hi)), 0.0)


def integrate_lc_against(m: ShellMeasure1D, f: LocallyConstantFn):
    """Integral of a locally constant function against a shell measure."""
    total = 0
    covered = 0
    for b, v in f.pieces:
        w = m.mass_ball(b)
        total = total + v * w
        covered = covered + w
    return total + f.default * (m.total() - covered)


# -- concentration ---------------------------------------------------------------------

def standard_test_function(field) -> LocallyConstantFn:
    """1 on B(0, p^-4) plus 1/2 on the unit ball."""
    zero = point(field, 0)
    f = LocallyConstantFn.indicator(Ball(zero, 4), Fraction(1))
    g = LocallyConstantFn.indicator(Ball(zero, 0), Fraction(1, 2))
    return f + g


def _logsumexp(xs: Sequence[float]) -> float:
    xs = [x for x in xs if x != -math.inf]
    if not xs:
        return -math.inf
    top = max(xs)
    return top + math.log(math.fsum(math.exp(x - top) for x in xs))


def gaussian_log_weights(p: int, xi_ord: int, window: tuple = (-6, 6)) -> dict:
    """log of the renormalized nu_xi shell masses on the window (terminal = window top)."""
    j_min, n = window

    def raw(j):
        return -j * math.log(p) + math.log(1 - 1 / p) - float(p) ** (-2 * (j + xi_ord))

    logs = {j: raw(j) for j in range(j_min, n)}
    logs[n] = _logsumexp([raw(j) for j in range(n, n + 200)])
    norm = _logsumexp(list(logs.values()))
    return {j: v - norm for j, v in logs.items()}


def weak_convergence_log_gaps(field, f: Optional[LocallyConstantFn] = None,
                              powers: Sequence[int] = range(1, 7),
                              window: tuple = (-6, 6)) -> list[float]:
    """log |integral f d nu_xi - f(0)| along |xi| = p^k, for f radial about 0.

    Summed in log space so that gaps far below the double-precision range stay
    comparable.
    """
    f = standard_test_function(field) if f is None else f
    p = field.p
    zero = point(field, 0)
    f0 = complex(f(zero))
    n = window[1]
    if f.resolution() > n:
        raise DomainError("f varies inside the terminal ball of the window")
    deltas = {}
    for j in range(window[0], n + 1):
        x = zero if j == n else point(field, Fraction(p) ** j)
        deltas[j] = complex(f(x)) - f0
    out = []
    for k in powers:
        logs = gaussian_log_weights(p, -k, window)
        pos = [logs[j] + math.log(abs(d)) for j, d in deltas.items() if d.real > 0]
        neg = [logs[j] + math.log(abs(d)) for j, d in deltas.items() if d.real < 0]
        if pos and neg:
            val = abs(math.exp(_logsumexp(pos)) - math.exp(_logsumexp(neg)))
            out.append(math.log(val) if val > 0 else -math.inf)
        else:
            out.append(_logsumexp(pos or neg))
    return out


def weak_convergence_gaps(field, f: Optional[LocallyConstantFn] = None,
                          powers: Sequence[int] = range(1, 7),
                          window: tuple = (-6, 6)) -> list[float]:
    """|integral f d nu_xi - f(0)| along |xi| = p^k (direct shell-mass route)."""
    f = standard_test_function(field) if f is None else f
    f0 = complex(f(point(field, 0)))
    out = []
    for k in powers:
        xi = point(field, Fraction(1, field.p ** k))
        nu = gaussian_like_measure(xi, 1, window)
        out.append(abs(complex(integrate_lc_against(nu, f)) - f0))
    return out


def smoothing_factor(m: ShellMeasure1D, xi: PAdic, span: int = 40) -> float:
    """Integral over m of the Fourier transform of gamma_xi."""
    p = m.p
    e = xi.ord
    C = gaussian_normalizer(Fraction(p) ** (-e), 1, m.field)

    def F(t):
        return gaussian_fourier_radial(p, t, e, C)

    lo = min(e - span, m.j_min - 1)
    hi = max(e + span, m.n + 1)
    return float(integrate_radial(m, F, lo, hi))


def smoothing_mass(mu: ProductMeasure, xi: PAdic, n: Optional[int] = None) -> float:
    """Pairing of F(gamma_{xi,n}) with mu on the first n coordinates."""
    n = mu.d if n is None else n
    if n > mu.d:
        raise DomainError("n exceeds the truncation dimension")
    out = 1.0
    for comp in mu.components[:n]:
        out *= smoothing_factor(comp, xi)
    return out


# -- level-set inequality --------------------------------------------------------------------------

def _nu_radial_table(nu: ShellMeasure1D):
    """(t_lo, t_hi, G) with G(t) = nu-hat at ord t, constant beyond both ends."""
    if not nu.center.is_zero():
        raise DomainError("nu must be centered at 0")
    if nu.tail:
        raise DomainError("nu must be tail free")
    t_lo = -nu.n - 1
    t_hi = -nu.j_min

    def G(t):
        return float(radial_charfun(nu, t))
    return t_lo, t_hi, G


def _theta_against_radial(m: ShellMeasure1D, nu: ShellMeasure1D, depth: int = 60) -> float:
    """Integral of theta_m over nu, shell by shell of nu."""
    p = nu.p
    tc = _ord(m.center)
    acc = []
    for s in range(nu.j_min, nu.n):
        w = nu.weights.get(s, 0)
        if w:
            acc.append(float(w) * float(shell_average(p, s, tc)) * float(radial_charfun(m, s)))
    wn = nu.weights.get(nu.n, 0)
    if wn:
        left = float(wn)
        for t in range(nu.n, nu.n + depth):
            part = float(wn) * (1 - 1 / p) * float(p) ** (nu.n - t)
            left -= part
            acc.append(part * float(shell_average(p, t, tc)) * float(radial_charfun(m, t)))
        acc.append(left * float(m.total()))
    return math.fsum(acc)


def level_set_check(mu: ProductMeasure, nu: ProductMeasure,
                 levels: Sequence[float] = tuple(k / 10 for k in range(1, 10))):
    """Compare mu({nu-hat <= l}) with integral(1 - mu-hat) dnu / (1 - l).

    Returns (rows, lhs_pairing, rhs_pairing) where rows are (l, left, right) and
    the pairings are the two sides of the Fubini identity.
    """
    if mu.d != nu.d:
        raise DomainError("dimension mismatch")
    per = []
    for mc, nc in zip(mu.components, nu.components):
        t_lo, t_hi, G = _nu_radial_table(nc)
        per.append([(float(w), G(t)) for w, t in ord_distribution(mc, t_lo, t_hi)])
    pairing_a = 1.0
    for rows in per:
        pairing_a *= math.fsum(w * g for w, g in rows)
    pairing_b = 1.0
    for mc, nc in zip(mu.components, nu.components):
        pairing_b *= _theta_against_radial(mc, nc)
    out = []
    for l in levels:
        left = []
        for combo in product(*per):
            g = 1.0
            w = 1.0
            for wi, gi in combo:
                g *= gi
                w *= wi
            if g <= l:
                left.append(w)
        out.append((l, math.fsum(left), (1 - pairing_b) / (1 - l)))
    return out, pairing_a, pairing_b


# -- Minlos probe --------------------------------------------------------------------------

def minlos_probe(theta: Callable, S_c: Sequence[PAdic], pairs) -> float:
    """sup |Re(theta(y) - theta(x))| over pairs with max_j |s_j (x_j - y_j)| < 1."""
    best = 0.0
    for x, y in pairs:
        ok = True
        for s, xj, yj in zip(S_c, x, y):
            d = s * (xj - yj)
            if not d.is_zero() and d.ord <= 0:
                ok = False
                break
        if ok:
            best = max(best, abs(complex(theta(y)).real - complex(theta(x)).real))
    return best
