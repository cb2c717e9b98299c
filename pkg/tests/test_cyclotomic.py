import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nonarch.cyclotomic import Cyclotomic, combine_roots
from nonarch.errors import DomainError


def test_sum_of_pth_roots_vanishes():
    for p in (2, 3, 5, 7):
        s = sum((Cyclotomic.root_of_unity(Fraction(k, p)) for k in range(p)), Cyclotomic.rational(0))
        assert s.is_zero()


@given(st.sampled_from([2, 3, 5]), st.integers(1, 3), st.integers(0, 200), st.integers(0, 200))
def test_root_products_add_phases(p, s, a, b):
    d = p ** s
    x = Cyclotomic.root_of_unity(Fraction(a, d))
    y = Cyclotomic.root_of_unity(Fraction(b, d))
    assert x * y == Cyclotomic.root_of_unity(Fraction(a + b, d))
    assert abs(complex(x) - cmath.exp(2j * math.pi * a / d)) < 1e-12


@given(st.sampled_from([2, 3]), st.lists(st.tuples(st.integers(-4, 4), st.integers(0, 26)),
                                       min_size=1, max_size=6))
def test_combine_roots_agrees_with_complex(p, terms):
    d = p ** 3
    items = [(Fraction(c), Fraction(k, d), 1) for c, k in terms]
    got = combine_roots(items, p)
    want = sum(c * cmath.exp(2j * math.pi * float(k)) for c, k, _ in items)
    assert abs(complex(got) - want) < 1e-9


def test_combine_roots_rejects_foreign_denominator():
    with pytest.raises(DomainError):
        combine_roots([(1, Fraction(1, 6), 1)], 3)
