from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nonarch.errors import DomainError
from nonarch.field import (Ball, FieldDescriptor, Fpt, PAdic, Qp, frac_part, format_padic,
                           parse_padic, reconstruct_rational, shell_of, shell_volume)
from nonarch.fourier import point, point_from_digits

from oracles import frac_p, poly_mul_mod, vp

PRIMES = st.sampled_from([2, 3, 5, 7])
nonzero_q = st.fractions(min_value=-10**6, max_value=10**6).filter(lambda q: q != 0)


@given(PRIMES, nonzero_q, nonzero_q)
def test_arithmetic_matches_rationals(p, a, b):
    F = Qp(p)
    x, y = point(F, a), point(F, b)
    for got, want in ((x + y, a + b), (x - y, a - b), (x * y, a * b), (x / y, a / b)):
        if want == 0:
            assert got.is_zero()
            continue
        assert got.ord == vp(want, p)
        # digits agree up to the known precision
        assert vp(got.to_fraction() - want, p) >= got.absprec


@given(PRIMES, nonzero_q)
def test_valuation_and_norm(p, a):
    x = point(Qp(p), a)
    assert x.ord == vp(a, p)
    assert x.norm() == Fraction(p) ** (-vp(a, p))


@given(PRIMES, nonzero_q, nonzero_q)
def test_ultrametric_inequality(p, a, b):
    F = Qp(p)
    s = point(F, a) + point(F, b)
    if not s.is_zero():
        assert s.norm() <= max(point(F, a).norm(), point(F, b).norm())


@given(st.sampled_from([2, 3, 5]), st.lists(st.integers(0, 4), min_size=1, max_size=12),
       st.lists(st.integers(0, 4), min_size=1, max_size=12))
def test_char_p_is_carry_free(p, da, db):
    F = Fpt(p)
    da = [d % p for d in da] + [0] * 12
    db = [d % p for d in db] + [0] * 12
    x = point_from_digits(F, 0, da[:12], 12)
    y = point_from_digits(F, 0, db[:12], 12)
    s = x + y
    want = [(u + v) % p for u, v in zip(da[:12], db[:12])]
    got = [s.digit(i) for i in range(12)] if not s.is_zero() else [0] * 12
    assert got == want
    prod = x * y
    want = poly_mul_mod(da[:12], db[:12], p, 12)
    got = [prod.digit(i) for i in range(12)] if not prod.is_zero() else [0] * 12
    assert got[:min(x.prec, y.prec)] == want[:min(x.prec, y.prec)]


@given(st.sampled_from([2, 3, 5]), st.integers(1, 10**6))
def test_char_p_has_characteristic_p(p, n):
    F = Fpt(p)
    x = point(F, n)
    assert sum([x] * p, PAdic.zero(F)).is_zero()


@given(PRIMES, nonzero_q)
def test_fractional_part_matches_oracle(p, a):
    assert frac_part(point(Qp(p), a)).value == frac_p(a, p)


@given(PRIMES, nonzero_q)
def test_text_round_trip(p, a):
    F = Qp(p)
    x = point(F, a, prec=10)
    y = parse_padic(format_padic(x), F)
    assert y.ord == x.ord and y.digits == x.digits


def test_parse_rejects_bad_input():
    with pytest.raises(DomainError):
        parse_padic("3^1 * (1 2)_5", Qp(3))
    with pytest.raises(DomainError):
        parse_padic("3^1 * (1 7)_3", Qp(3))
    with pytest.raises(DomainError):
        parse_padic("hello", Qp(3))


def test_field_descriptor_validation():
    with pytest.raises(DomainError):
        FieldDescriptor(4)
    with pytest.raises(DomainError):
        FieldDescriptor(3, "char-q")


@given(PRIMES, st.integers(-3, 3), nonzero_q)
def test_children_partition_the_ball(p, m, a):
    F = Qp(p)
    b = Ball(point(F, a), m)
    kids = b.children()
    assert len(kids) == p
    assert sum(k.haar() for k in kids) == b.haar()
    for i, k in enumerate(kids):
        assert b.contains_ball(k)
        for other in kids[i + 1:]:
            assert not k.contains(other.center)


@given(st.integers(-3, 3))
def test_children_in_char_p_below_zero(m):
    F = Fpt(3)
    kids = Ball(point(F, 0), m).children()
    assert len({(k.center.ord if not k.center.is_zero() else None,
                 tuple(k.center.digits[:1])) for k in kids}) == 3


def test_shells():
    F = Qp(3)
    assert shell_of(point(F, 9), 1).terminal
    assert shell_of(point(F, Fraction(1, 3)), 2).j == -1
    assert shell_volume(3, 2, 2) == Fraction(1, 9)
    assert shell_volume(3, 0) == Fraction(2, 3)


@given(PRIMES, st.fractions(min_value=-10**4, max_value=10**4, max_denominator=10**4))
def test_rational_reconstruction(p, a):
    x = point(Qp(p), a)
    assert reconstruct_rational(x) == a


def test_reconstruction_gives_up_on_noise():
    x = PAdic.from_digits(Qp(5), 0, [1, 2, 3, 4, 0, 1, 3, 2, 4, 1])
    q = reconstruct_rational(x)
    assert q is None or (point(Qp(5), q, 10) - x).is_zero()
    assert reconstruct_rational(point(Fpt(3), 5)) is None
