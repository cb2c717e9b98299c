import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nonarch.errors import DivergenceError, DomainError
from nonarch.field import Ball, Qp, Fpt
from nonarch.fourier import LocallyConstantFn, point, sub_balls, uniformizer_power
from nonarch.measures import custom_measure, exp_measure, geometric_shell_measure
from nonarch.pseudodiff import (composition_gap, log_pseudo_derivative, measure_pd, pd,
                                shell_partition, shift_identity, smallness_slope,
                                tilde_D_measure, vladimirov, vladimirov_constant)
from nonarch.suites import double_sum_pd


def brute_pd(b, f, x, L=3, levels=400):
    """Shell sum of (f(x) - f(y)) |x - y|^(-1-b) with one Haar-weighted cell per sub-ball.

    Shells with |y - x| >= p^L must lie outside the support of f - f.default.
    """
    F = f.field
    p = F.p
    R = f.resolution()
    total = 0j
    for l in range(-R + 1, L):
        # sub-balls of the sphere |y - x| = p^l at level R
        for cell in sub_balls(Ball(x, -l), R):
            y = cell.center
            d = y - x
            if d.is_zero() or d.ord != -l:
                continue
            total += complex(f(x) - f(y)) * float(cell.haar()) * p ** (-l * (1 + b))
    diff = complex(f(x) - f.default)
    total += (1 - 1 / p) * diff * sum(p ** (l * 1 - l * (1 + b)) for l in range(L, L + levels))
    return total


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("b", [0.5, 1, 1.5, 1 + 1j])
def test_closed_form_on_unit_ball(p, b):
    F = Qp(p)
    Z = LocallyConstantFn.indicator(Ball(point(F, 0), 0))
    got = complex(pd(b, Z, point(F, 1)).value)
    bb = complex(b)
    assert abs(got - (1 - 1 / p) * p ** (-bb) / (1 - p ** (-bb))) < 1e-12


def test_exact_rational_for_integer_order():
    F = Qp(3)
    Z = LocallyConstantFn.indicator(Ball(point(F, 0), 0))
    assert pd(1, Z, point(F, 1)).value == Fraction(2, 3) * Fraction(1, 3) / (1 - Fraction(1, 3))


@given(st.sampled_from([Qp(2), Qp(3), Fpt(2)]), st.integers(-3, 3))
def test_constant_function_has_zero_derivative(F, k):
    c = LocallyConstantFn.constant(F, 7)
    assert pd(1, c, uniformizer_power(F, k)).value == 0


@pytest.mark.parametrize("F", [Qp(2), Qp(3)])
def test_pd_against_brute_shell_sum(F):
    zero, one = point(F, 0), point(F, 1)
    f = (LocallyConstantFn.indicator(Ball(zero, 0), Fraction(2)) +
         LocallyConstantFn.indicator(Ball(one, 2), Fraction(-1)))
    for x in (zero, one, point(F, Fraction(1, F.p)), point(F, F.p)):
        for b in (1, 0.5):
            assert abs(complex(pd(b, f, x).value) - brute_pd(b, f, x)) < 1e-9


def test_divergent_tail():
    F = Qp(2)
    Z = LocallyConstantFn.indicator(Ball(point(F, 0), 0))
    with pytest.raises(DivergenceError):
        pd(-0.5, Z, point(F, 4))


def test_vladimirov_constant():
    assert vladimirov_constant(2, 1) == Fraction(1) / (1 - Fraction(1, 4))
    with pytest.raises(DomainError):
        vladimirov_constant(3, -1)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_order_zero_is_identity(p):
    F = Qp(p)
    psi = LocallyConstantFn.indicator(Ball(point(F, 1), 1), Fraction(3))
    for x in (point(F, 0), point(F, 1), point(F, p + 1)):
        assert vladimirov(0, psi, x) == psi(x)


@pytest.mark.parametrize("p", [2, 3])
def test_vladimirov_of_ball_indicator(p):
    # D^b 1_{Z_p} = K_b * PD = (p^b - 1)/(1 - p^(-1-b)) * (1 - 1/p) p^-b / (1 - p^-b) at a unit
    F = Qp(p)
    Z = LocallyConstantFn.indicator(Ball(point(F, 0), 0))
    got = vladimirov(2, Z, point(F, 1))
    assert got == vladimirov_constant(p, 2) * (1 - Fraction(1, p)) * Fraction(1, p * p) / (1 - Fraction(1, p * p))


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (1, -1), (1, 1), (2, -1)])
def test_composition(a, b):
    F = Qp(3)
    psi = (LocallyConstantFn.indicator(Ball(point(F, 0), 1)) +
           LocallyConstantFn.indicator(Ball(point(F, 1), 1), Fraction(-1, 2)))
    xs = [point(F, 0), point(F, 1), point(F, Fraction(1, 3)), point(F, 3)]
    assert composition_gap(a, b, psi, xs) < 1e-6


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_measure_pd_against_double_sum(p, n):
    F = Qp(p)
    m = geometric_shell_measure(F, n, j_min=n - 6)
    S = Ball(point(F, 0), n)
    for b, z in ((1, point(F, 1)), (0.5, point(F, 1)), (1, point(F, p))):
        got = complex(measure_pd(b, m, z, S).value)
        assert abs(got - double_sum_pd(m, z, complex(b))) < 1e-9


@given(st.sampled_from([Qp(2), Qp(3)]), st.integers(0, 2), st.integers(0, 2))
def test_tilde_D_is_finitely_additive(F, c, lvl):
    m = geometric_shell_measure(F, 2, j_min=-3)
    parent = Ball(point(F, c), lvl)
    a = point(F, 1)
    nu = tilde_D_measure(1, m, a, [parent] + parent.children())
    assert nu.values[0] == sum(nu.values[1:], Fraction(0))


def test_tilde_D_on_shell_partition():
    # shells around the center are shift-invariant for shifts inside the window
    F = Qp(3)
    m = geometric_shell_measure(F, 2, j_min=-3)
    nu = tilde_D_measure(1, m, point(F, 1), shell_partition(m))
    assert nu.total_variation() > 0
    assert sum(nu.values[1:], Fraction(0)) == tilde_D_measure(
        1, m, point(F, 1), [Ball(point(F, 0), -2)]).values[0]


def test_log_derivative_is_ratio():
    F = Qp(2)
    m = geometric_shell_measure(F, 2, j_min=-3)
    cell = Ball(point(F, 1), 2)
    nu = tilde_D_measure(1, m, point(F, 1), [cell]).values[0]
    r = log_pseudo_derivative(m, point(F, 1), cell)
    assert r.value == nu / m.mass_ball(cell)


@pytest.mark.parametrize("F", [Qp(2), Qp(3)])
def test_shift_identity(F):
    m = geometric_shell_measure(F, 2, j_min=-4)
    lhs, rhs = shift_identity(m, point(F, 1), Ball(point(F, 1), 2), point(F, F.p))
    assert lhs == rhs


def test_smallness_slope_quadratic():
    F = Qp(2)
    # |mu(t z + S) - mu(S)| ~ |t|^2 for a small ball S at the peak of exp(-|x|^2)
    m = exp_measure(F, point(F, 1), q=2, window=(-10, 12))
    ts = [uniformizer_power(F, k) for k in range(3, 8)]
    slope, _ = smallness_slope(m, point(F, 1), Ball(point(F, 0), 14), ts)
    assert abs(slope - 2) < 0.01
