"""Finite blocks of I + compact operators: determinants, SCDE factors, support
norms and change-of-variables densities for affine and piecewise-affine maps."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import BoundaryError, CoverageError, DomainError, NoLimitError
from .field import (Ball, FieldDescriptor, PAdic, padic_from_json, padic_to_json)
from .fourier import point
from .measures import DensityValue, ProductMeasure, UNDEFINED, product_rho


def _norm(x: PAdic) -> Fraction:
    return x.norm()


class MatrixK:
    def __init__(self, rows, field: Optional[FieldDescriptor] = None, tail=None):
        rows = [list(r) for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DomainError("matrix must be square")
        if field is None:
            if n == 0:
                raise DomainError("field required for an empty matrix")
            field = rows[0][0].field
        if any(e.field != field for r in rows for e in r):
            raise DomainError("entries from different fields")
        self.field = field
        self.n = n
        self.rows = rows
        self.tail = tail
        self._det = None

    # constructors
    @classmethod
    def from_rationals(cls, field: FieldDescriptor, rows, prec: int = 40) -> "MatrixK":
        return cls([[point(field, Fraction(v), prec) for v in r] for r in rows], field)

    @classmethod
    def identity(cls, field: FieldDescriptor, n: int, prec: int = 40) -> "MatrixK":
        return cls.from_rationals(field, [[int(i == j) for j in range(n)] for i in range(n)], prec)

    @classmethod
    def diagonal(cls, entries: Sequence[PAdic]) -> "MatrixK":
        f = entries[0].field
        z = PAdic.zero(f)
        return cls([[entries[i] if i == j else z for j in range(len(entries))]
                    for i in range(len(entries))], f)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __repr__(self):
        return f"MatrixK(n={self.n}, {self.field})"

    def copy_rows(self):
        return [list(r) for r in self.rows]

    def transpose(self) -> "MatrixK":
        return MatrixK([[self.rows[j][i] for j in range(self.n)] for i in range(self.n)], self.field)

    def __matmul__(self, other: "MatrixK") -> "MatrixK":
        if other.n != self.n:
            raise DomainError("dimension mismatch")
        n = self.n
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = PAdic.zero(self.field)
                for k in range(n):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            out.append(row)
        return MatrixK(out, self.field)

    def apply(self, v: Sequence[PAdic]) -> list[PAdic]:
        out = []
        for i in range(self.n):
            acc = PAdic.zero(self.field)
            for j in range(self.n):
                acc = acc + self.rows[i][j] * v[j]
            out.append(acc)
        return out

    def truncate(self, k: int) -> "MatrixK":
        return MatrixK([r[:k] for r in self.rows[:k]], self.field)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "MatrixK":
        return MatrixK([[self.rows[i][j] for j in cols] for i in rows], self.field)

    def minor(self, rows: Sequence[int], cols: Sequence[int]) -> PAdic:
        return _det_rows([[self.rows[i][j] for j in cols] for i in rows], self.field)

    def det(self) -> PAdic:
        if self._det is None:
            self._det = _det_rows(self.copy_rows(), self.field)
        return self._det

    def inverse(self) -> "MatrixK":
        n = self.n
        one = point(self.field, 1)
        zero = PAdic.zero(self.field)
        a = [r[:] + [one if i == j else zero for j in range(n)] for i, r in enumerate(self.rows)]
        for k in range(n):
            piv = _pivot(a, k, k)
            if piv is None:
                raise DomainError("singular matrix")
            a[k], a[piv] = a[piv], a[k]
            inv = a[k][k].inverse()
            a[k] = [e * inv for e in a[k]]
            for i in range(n):
                if i != k and not a[i][k].is_zero():
                    f = a[i][k]
                    a[i] = [e - f * g for e, g in zip(a[i], a[k])]
        return MatrixK([r[n:] for r in a], self.field)

    def equals(self, other: "MatrixK") -> bool:
        return self.n == other.n and all(
            self.rows[i][j] == other.rows[i][j] for i in range(self.n) for j in range(self.n))

    def max_distance(self, other: "MatrixK") -> Fraction:
        """Largest |a_ij - b_ij| (zero when equal at the known precision)."""
        return max((_norm(self.rows[i][j] - other.rows[i][j])
                    for i in range(self.n) for j in range(self.n)), default=Fraction(0))

    def is_upper_unitriangular(self) -> bool:
        return all((self.rows[i][j].is_zero() if i > j else
                    (self.rows[i][j] == 1 if i == j else True))
                   for i in range(self.n) for j in range(self.n))

    def is_lower_unitriangular(self) -> bool:
        return self.transpose().is_upper_unitriangular()

    def to_json(self) -> dict:
        out = {"n": self.n, "entries": [[padic_to_json(e) for e in r] for r in self.rows]}
        if self.tail is not None:
            out["tail"] = self.tail
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "MatrixK":
        rows = [[padic_from_json(e) for e in r] for r in obj["entries"]]
        return cls(rows, tail=obj.get("tail"))


def _pivot(a, k: int, col: int):
    """Row index >= k whose entry in ``col`` has the smallest valuation."""
    best, best_ord = None, math.inf
    for i in range(k, len(a)):
        e = a[i][col]
        if not e.is_zero() and e.ord < best_ord:
            best, best_ord = i, e.ord
    return best


def _det_rows(a, field: FieldDescriptor) -> PAdic:
    n = len(a)
    if n == 0:
        return point(field, 1)
    a = [r[:] for r in a]
    sign = 1
    det = point(field, 1)
    for k in range(n):
        piv = _pivot(a, k, k)
        if piv is None:
            absprec = min((e.absprec for i in range(k, n) for e in [a[i][k]]), default=math.inf)
            return PAdic(field, math.inf, 0, 1, absprec=absprec)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        pk = a[k][k]
        det = det * pk
        inv = pk.inverse()
        for i in range(k + 1, n):
            if a[i][k].is_zero():
                continue
            f = a[i][k] * inv
            a[i] = a[i][:k + 1] + [a[i][j] - f * a[k][j] for j in range(k + 1, n)]
    return det if sign == 1 else -det


def det_cofactor(rows) -> Fraction:
    """Laplace expansion along the first row over exact rationals."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(rows[0][0])
    total = Fraction(0)
    for j in range(n):
        if rows[0][j] == 0:
            continue
        sub = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * Fraction(rows[0][j]) * det_cofactor(sub)
    return total


# -- determinant of I + compact ------------------------------------------------------------

@dataclass
class DetCertificate:
    dets: list
    diffs: list
    tol: Fraction
    stable: bool


def det_limit(seq, tol: Optional[Fraction] = None) -> tuple[PAdic, DetCertificate]:
    """Determinant of the largest truncation with a stabilization certificate.

    ``seq`` is a list of nested truncations or one matrix (its leading blocks
    are used).  The last two steps must move the determinant by at most ``tol``
    in p-adic norm.
    """
    if isinstance(seq, MatrixK):
        seq = [seq.truncate(k) for k in range(1, seq.n + 1)]
    seq = list(seq)
    if not seq:
        raise DomainError("empty sequence")
    p = seq[0].field.p
    tol = Fraction(p) ** -10 if tol is None else Fraction(tol)
    for a, b in zip(seq, seq[1:]):
        k = a.n
        if b.n < k or not b.truncate(k).equals(a):
            raise DomainError("truncations are not nested")
    dets = [m.det() for m in seq]
    diffs = [(b - a).norm() for a, b in zip(dets, dets[1:])]
    tail = diffs[-2:]
    stable = all(d <= tol for d in tail)
    cert = DetCertificate(dets, diffs, tol, stable)
    if not stable:
        raise NoLimitError(f"determinants still moving: last steps {[str(d) for d in tail]}")
    return dets[-1], cert


# -- SCDE --------------------------------------------------------------------------------

@dataclass
class SCDE:
    transpositions: list   # row swaps (i, j), 0-based, applied in order
    C: MatrixK
    D: MatrixK
    E: MatrixK
    minors: list

    @property
    def S(self) -> MatrixK:
        n = self.C.n
        f = self.C.field
        perm = list(range(n))
        # S = T_1 T_2 ... T_m acting on rows
        for i, j in reversed(self.transpositions):
            perm[i], perm[j] = perm[j], perm[i]
        return MatrixK.from_rationals(f, [[int(perm[i] == j) for j in range(n)] for i in range(n)])

    def reconstruct(self) -> MatrixK:
        return self.S @ self.C @ self.D @ self.E


def scde_decompose(A: MatrixK) -> SCDE:
    """A = S C D E from ratios of leading minors, with row swaps when a minor vanishes."""
    n = A.n
    f = A.field
    rows = A.copy_rows()
    swaps = []
    minors = [point(f, 1)]
    for k in range(1, n + 1):
        Mk = _det_rows([r[:k] for r in rows[:k]], f)
        if Mk.is_zero():
            for g in range(k, n):
                trial = rows[:k - 1] + [rows[g]]
                Mg = _det_rows([r[:k] for r in trial], f)
                if not Mg.is_zero():
                    rows[k - 1], rows[g] = rows[g], rows[k - 1]
                    swaps.append((k - 1, g))
                    Mk = Mg
                    break
            else:
                raise DomainError("singular matrix: no row restores a nonzero leading minor")
        minors.append(Mk)
    Ap = MatrixK(rows, f)
    zero = PAdic.zero(f)
    one = point(f, 1)
    C = [[one if i == j else zero for j in range(n)] for i in range(n)]
    E = [[one if i == j else zero for j in range(n)] for i in range(n)]
    D = [[zero] * n for _ in range(n)]
    for k in range(1, n + 1):
        D[k - 1][k - 1] = minors[k] / minors[k - 1]
        head = list(range(k - 1))
        for g in range(k, n):
            C[g][k - 1] = Ap.minor(head + [g], list(range(k))) / minors[k]
            E[k - 1][g] = Ap.minor(list(range(k)), head + [g]) / minors[k]
    return SCDE(swaps, MatrixK(C, f), MatrixK(D, f), MatrixK(E, f), minors[1:])


# -- support norms --------------------------------------------------------------------------

class DiagonalCompact:
    """diag(t_1, t_2, ...): explicit leading entries, optional valuation profile beyond."""

    def __init__(self, entries: Sequence[PAdic], ord_profile: Optional[Callable[[int], int]] = None):
        self.entries = list(entries)
        self.ord_profile = ord_profile

    def norm(self, j: int) -> Fraction:
        """|t_j| (1-based)."""
        if j <= len(self.entries):
            return self.entries[j - 1].norm()
        if self.ord_profile is None:
            raise CoverageError("entry beyond the explicit block without a profile")
        p = self.entries[0].field.p if self.entries else 2
        return Fraction(p) ** (-self.ord_profile(j))

    @property
    def injective(self) -> bool:
        return all(not t.is_zero() for t in self.entries)

    def as_matrix(self) -> MatrixK:
        return MatrixK.diagonal(self.entries)


def column_sups(T) -> list[Fraction]:
    if isinstance(T, DiagonalCompact):
        return [t.norm() for t in T.entries]
    return [max(T.rows[k][j].norm() for k in range(T.n)) for j in range(T.n)]


def support_norm(T, a: Sequence[PAdic]) -> Fraction:
    """sup_j D_j |a_j| with D_j = sup_k |T_kj|."""
    D = column_sups(T)
    if len(a) > len(D):
        raise CoverageError("vector longer than the operator block")
    return max((Dj * aj.norm() for Dj, aj in zip(D, a)), default=Fraction(0))


def support_membership(t_norm: Callable[[int], Fraction], a_norm: Callable[[int], Fraction],
                       horizon: int = 40) -> tuple[bool, list]:
    """Trend test for sup_j |t_j||a_j| < inf over j = 1..horizon.

    Bounded means the second half of the horizon never exceeds the first half.
    """
    vals = [t_norm(j) * a_norm(j) for j in range(1, horizon + 1)]
    h = horizon // 2
    return max(vals[h:]) <= max(vals[:h]), vals


# -- change of variables ---------------------------------------------------------------------

def _abs_det(U: MatrixK) -> Fraction:
    d = U.det()
    if d.is_zero():
        raise DomainError("map is not invertible")
    return d.norm()


def affine_cov_density(U: MatrixK, c: Sequence[PAdic], mu: ProductMeasure,
                       x: Sequence[PAdic], U_inv: Optional[MatrixK] = None) -> DensityValue:
    """d nu / d mu at x for nu(A) = mu(V^{-1} A), V(y) = U y + c.

    The image of Haar measure scales by |det U|, so the density is
    |det U|^{-1} rho(x - U^{-1}(x - c), x).
    """
    if U.n != mu.d:
        raise DomainError("operator and measure dimensions differ")
    U_inv = U.inverse() if U_inv is None else U_inv
    y = U_inv.apply([xi - ci for xi, ci in zip(x, c)])
    shift = [xi - yi for xi, yi in zip(x, y)]
    rho, _ = product_rho(mu, shift, x)
    if not rho.defined:
        return UNDEFINED
    return DensityValue(rho.value / _abs_det(U))


@dataclass
class PolygonalPiece:
    region: tuple          # per-coordinate Ball or None (whole line)
    shift: list            # a(i)
    V: MatrixK
    V_inv: Optional[MatrixK] = None

    def contains(self, y: Sequence[PAdic]) -> bool:
        return all(b is None or b.contains(yj) for b, yj in zip(self.region, y))

    def inverse_matrix(self) -> MatrixK:
        if self.V_inv is None:
            self.V_inv = self.V.inverse()
        return self.V_inv


class PolygonalMap:
    """U(y) = a(i) + V(i) y on the piece Y(i)."""

    def __init__(self, pieces: Sequence[PolygonalPiece]):
        if not pieces:
            raise DomainError("no pieces")
        self.pieces = list(pieces)
        self.d = pieces[0].V.n
        for pc in self.pieces:
            if pc.V.det().is_zero():
                raise DomainError("piece matrix is singular")
        for i, a in enumerate(self.pieces):
            for b in self.pieces[i + 1:]:
                if _regions_meet(a.region, b.region):
                    raise DomainError("piece regions overlap")

    def __call__(self, y: Sequence[PAdic]) -> list[PAdic]:
        hits = [pc for pc in self.pieces if pc.contains(y)]
        if len(hits) != 1:
            raise BoundaryError(f"point lies in {len(hits)} pieces")
        pc = hits[0]
        return [a + b for a, b in zip(pc.shift, pc.V.apply(y))]

    def preimage(self, x: Sequence[PAdic]):
        """(piece, y) with U(y) = x; exactly one piece must match."""
        found = []
        for pc in self.pieces:
            y = pc.inverse_matrix().apply([xi - ai for xi, ai in zip(x, pc.shift)])
            if pc.contains(y):
                found.append((pc, y))
        if len(found) != 1:
            raise BoundaryError(f"inverse image found in {len(found)} pieces")
        return found[0]


def _regions_meet(r1, r2) -> bool:
    for a, b in zip(r1, r2):
        if a is None or b is None:
            continue
        if a.intersect(b) is None:
            return False
    return True


def polygonal_cov_density(P: PolygonalMap, mu: ProductMeasure,
                          x: Sequence[PAdic]) -> DensityValue:
    """d nu / d mu at x for nu(A) = mu(U^{-1} A) with U piecewise affine."""
    pc, y = P.preimage(x)
    shift = [xi - yi for xi, yi in zip(x, y)]
    rho, _ = product_rho(mu, shift, x)
    if not rho.defined:
        return UNDEFINED
    return DensityValue(rho.value / _abs_det(pc.V))


def affine_as_polygonal(U: MatrixK, c: Sequence[PAdic]) -> PolygonalMap:
    return PolygonalMap([PolygonalPiece(tuple([None] * U.n), list(c), U)])
