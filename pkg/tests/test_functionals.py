import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nonarch.errors import DomainError
from nonarch.field import Ball, Qp, Fpt
from nonarch.fourier import character_value, point, point_from_digits, sub_balls, uniformizer_power
from nonarch.functionals import (CharFunctional, charfun, minlos_probe, positive_definite_probe,
                                 level_set_check, smoothing_mass, weak_convergence_gaps,
                                 weak_convergence_log_gaps)
from nonarch.measures import (ProductMeasure, convolve, custom_measure, geometric_product,
                              geometric_shell_measure)

FIELDS = st.sampled_from([Qp(2), Qp(3), Qp(5), Fpt(2)])


def brute_charfun(m, z, level):
    """Sum over the cells of B(center, p^-j_min) at ``level`` of mass * chi(z x)."""
    F = m.field
    total = 0j
    for cell in sub_balls(Ball(m.center, m.j_min), level):
        w = m.mass_ball(cell)
        if w:
            total += float(w) * complex(character_value(z, cell.center))
    return total


@given(FIELDS, st.integers(-3, 2), st.integers(1, 8))
def test_charfun_against_cell_sum(F, k, u):
    center = point(F, 1)
    m = custom_measure(F, {-1: 1, 0: 2, 1: 3}, center=center)
    if u % F.p == 0:
        u += 1
    z = point(F, u) * uniformizer_power(F, k)
    level = max(m.n, -z.ord)
    if level - m.j_min > 6:
        return
    assert abs(complex(charfun(m, z)) - brute_charfun(m, z, level)) < 1e-12


@given(FIELDS, st.integers(-5, 5))
def test_charfun_normalized_and_bounded(F, k):
    m = geometric_shell_measure(F, 2, j_min=-4)
    assert charfun(m, point(F, 0)) == 1
    assert abs(complex(charfun(m, uniformizer_power(F, k)))) <= 1 + 1e-15


@given(st.sampled_from([Qp(2), Qp(3)]), st.integers(-5, 5), st.integers(1, 20))
def test_convolution_factorizes(F, k, u):
    m1 = custom_measure(F, {0: 1, 1: 2})
    m2 = custom_measure(F, {-1: 1, 0: 1}, center=point(F, 1))
    z = uniformizer_power(F, k) * point(F, u)
    a = complex(charfun(convolve(m1, m2), z))
    b = complex(charfun(m1, z)) * complex(charfun(m2, z))
    assert abs(a - b) < 1e-12


def test_positive_definite():
    F = Qp(3)
    m = geometric_shell_measure(F, 2)
    zs = [uniformizer_power(F, k) * point(F, u) for k in range(-3, 2) for u in (1, 2, 4, 5)]
    assert positive_definite_probe(CharFunctional(m), zs) >= -1e-10
    with pytest.raises(DomainError):
        positive_definite_probe(CharFunctional(m), [])


def test_product_charfun_and_dimension_guard():
    F = Qp(2)
    mu = geometric_product(F, 2)
    z = [uniformizer_power(F, -1), point(F, 0)]
    assert charfun(mu, z) == charfun(mu.components[0], z[0])
    with pytest.raises(DomainError):
        charfun(mu, z + [point(F, 1)])


@pytest.mark.parametrize("p", [2, 3, 5])
def test_weak_convergence_routes_agree(p):
    F = Qp(p)
    logs = weak_convergence_log_gaps(F, powers=range(1, 3))
    direct = weak_convergence_gaps(F, powers=range(1, 3))
    for lg, d in zip(logs, direct):
        assert abs(math.exp(lg) - d) < 1e-12 + 1e-9 * d


@pytest.mark.parametrize("p", [2, 3, 5])
def test_weak_convergence_decreases(p):
    logs = weak_convergence_log_gaps(Qp(p))
    assert all(b < a for a, b in zip(logs, logs[1:]))
    assert logs[-1] < math.log(1e-3)


@pytest.mark.parametrize("p,floor", [(2, 0.998), (3, 0.9999), (5, 0.999998)])
def test_smoothing_mass_near_one(p, floor):
    sm = smoothing_mass(geometric_product(Qp(p), 3), point(Qp(p), Fraction(1, p ** 6)))
    assert floor < sm <= 1 + 1e-12


def test_level_set_inequality():
    F = Qp(3)
    nu = ProductMeasure([custom_measure(F, {0: 1, 1: 2, 2: 1})])
    mu = ProductMeasure([geometric_shell_measure(F, 1, j_min=-6)])
    rows, pa, pb = level_set_check(mu, nu)
    assert abs(pa - pb) < 1e-12
    assert all(left <= right + 1e-12 for _, left, right in rows)


def test_minlos_probe_respects_admissibility():
    F = Qp(2)
    m = geometric_product(F, 2)
    theta = CharFunctional(m)
    S = [point(F, 1), point(F, 1)]
    x = [point(F, 0), point(F, 0)]
    far = [point(F, Fraction(1, 8)), point(F, 0)]
    near = [point(F, 2), point(F, 4)]
    # pairs outside the admissible set are ignored
    assert minlos_probe(theta, S, [(x, far)]) == 0.0
    want = abs(complex(theta(near)).real - 1)
    assert minlos_probe(theta, S, [(x, near), (x, far)]) == pytest.approx(want, abs=1e-15)
