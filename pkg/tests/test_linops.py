from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from nonarch.errors import BoundaryError, CoverageError, DomainError, NoLimitError
from nonarch.field import Ball, Qp
from nonarch.fourier import point, uniformizer_power
from nonarch.linops import (DiagonalCompact, MatrixK, PolygonalMap, PolygonalPiece,
                            affine_as_polygonal, det_limit, scde_decompose, support_membership,
                            support_norm)

from oracles import leibniz_det

entries = st.fractions(min_value=-20, max_value=20, max_denominator=6)


@st.composite
def rational_matrices(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    return [[draw(entries) for _ in range(n)] for _ in range(n)]


@given(st.sampled_from([2, 3, 5]), rational_matrices())
def test_det_matches_leibniz(p, rows):
    D = MatrixK.from_rationals(Qp(p), rows).det()
    want = leibniz_det(rows)
    assert D == point(Qp(p), want) if want != 0 else D.is_zero()


@given(st.sampled_from([2, 3]), rational_matrices(), rational_matrices())
def test_det_is_multiplicative(p, a, b):
    assume(len(a) == len(b))
    F = Qp(p)
    A, B = MatrixK.from_rationals(F, a), MatrixK.from_rationals(F, b)
    assert (A @ B).det() == A.det() * B.det()


@given(st.sampled_from([2, 3, 5]), rational_matrices())
def test_inverse(p, rows):
    assume(leibniz_det(rows) != 0)
    F = Qp(p)
    A = MatrixK.from_rationals(F, rows)
    assert (A @ A.inverse()).equals(MatrixK.identity(F, A.n))


@given(st.sampled_from([2, 3, 5]), rational_matrices(max_n=5))
def test_scde_reconstructs(p, rows):
    assume(leibniz_det(rows) != 0)
    F = Qp(p)
    A = MatrixK.from_rationals(F, rows, 12)
    f = scde_decompose(A)
    assert f.reconstruct().equals(A)
    assert f.C.is_lower_unitriangular() and f.E.is_upper_unitriangular()
    assert f.C.det() == 1 and f.E.det() == 1
    assert f.S.det() * f.D.det() == A.det()


def test_scde_forced_pivot():
    F = Qp(3)
    A = MatrixK.from_rationals(F, [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    f = scde_decompose(A)
    assert f.transpositions == [(0, 1)]
    assert f.reconstruct().equals(A)


def test_scde_symmetric():
    F = Qp(5)
    A = MatrixK.from_rationals(F, [[2, 1, 0], [1, 3, 1], [0, 1, 4]])
    f = scde_decompose(A)
    assert not f.transpositions and f.E.equals(f.C.transpose())


def test_scde_singular():
    F = Qp(2)
    with pytest.raises(DomainError):
        scde_decompose(MatrixK.from_rationals(F, [[1, 2], [2, 4]]))


def test_det_limit_stabilizes():
    F = Qp(3)
    n = 14
    rows = [[Fraction(int(i == j)) + (Fraction(3) ** (i + j + 2) if i == j else 0)
             for j in range(n)] for i in range(n)]
    d, cert = det_limit(MatrixK.from_rationals(F, rows))
    assert cert.stable and d == cert.dets[-1]
    moving = [[Fraction(int(i == j)) * (1 + (2 if i == n - 1 else 0)) for j in range(n)]
              for i in range(n)]
    with pytest.raises(NoLimitError):
        det_limit(MatrixK.from_rationals(F, moving))


def test_support_norm():
    F = Qp(2)
    T = DiagonalCompact([uniformizer_power(F, 2 * j) for j in range(1, 6)],
                        ord_profile=lambda j: 2 * j)
    a = [uniformizer_power(F, -3 * j) for j in range(1, 6)]
    assert support_norm(T, a) == Fraction(2) ** 5
    assert support_norm(MatrixK.identity(F, 5), a) == Fraction(2) ** 15
    # a_j = p^-j against t_j = p^2j: |t_j a_j| = p^-j stays bounded
    bounded, _ = support_membership(T.norm, lambda j: uniformizer_power(F, -j).norm())
    # a_j = p^-3j: |t_j a_j| = p^j grows
    grows, _ = support_membership(T.norm, lambda j: uniformizer_power(F, -3 * j).norm())
    assert bounded and not grows
    with pytest.raises(CoverageError):
        DiagonalCompact([point(F, 1)]).norm(3)


def test_polygonal_map_checks():
    F = Qp(2)
    I = MatrixK.identity(F, 1)
    zero, one = point(F, 0), point(F, 1)
    with pytest.raises(DomainError):
        PolygonalMap([PolygonalPiece((Ball(zero, 0),), [zero], I),
                      PolygonalPiece((Ball(zero, 1),), [one], I)])
    P = PolygonalMap([PolygonalPiece((Ball(zero, 1),), [one], I)])
    assert P([point(F, 2)])[0] == 3
    with pytest.raises(BoundaryError):
        P([one])
    A = affine_as_polygonal(MatrixK.from_rationals(F, [[3]]), [one])
    assert A([one])[0] == 4


def test_matrix_json_round_trip():
    F = Qp(5)
    A = MatrixK.from_rationals(F, [[1, Fraction(1, 5)], [7, 0]])
    assert MatrixK.from_json(A.to_json()).equals(A)
