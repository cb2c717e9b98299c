"""Small reference implementations used only by the tests.

They work from integers and Fractions directly and share no code with the
package, so agreement is a real cross-check.
"""
import cmath
import math
from fractions import Fraction
from itertools import permutations


def vp(q, p):
    """p-adic valuation of a nonzero rational."""
    q = Fraction(q)
    if q == 0:
        return math.inf
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def frac_p(q, p):
    """Fractional part {q}_p: the unique r in [0, 1) with p-power denominator and q - r in Z_p."""
    q = Fraction(q)
    v = vp(q, p)
    if v >= 0:
        return Fraction(0)
    k = -v
    # q = a / (p^k u) with u a unit; r = a u^{-1} mod p^k over p^k
    a = q.numerator
    u = q.denominator // p ** k
    return Fraction(a * pow(u, -1, p ** k) % p ** k, p ** k)


def poly_mul_mod(a, b, p, n):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        for j, y in enumerate(b[:n - i]):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def leibniz_det(rows):
    n = len(rows)
    total = Fraction(0)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(-1 if inv % 2 else 1)
        for i in range(n):
            term *= rows[i][perm[i]]
        total += term
    return total


def chi(q, p):
    return cmath.exp(2j * math.pi * float(frac_p(q, p)))
