"""Random affine / piecewise-affine maps of Z_p^d and an exhaustive cell check of
the measure-transport identity nu(A) = mu(U^{-1} A) = integral_A density dmu."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Optional, Sequence

from .errors import DomainError
from .field import Ball, FieldDescriptor, PAdic
from .fourier import point, point_from_digits, uniformizer_power
from .linops import (MatrixK, PolygonalMap, PolygonalPiece, affine_cov_density,
                     polygonal_cov_density)
from .measures import ProductMeasure, custom_measure


def random_compact_product(field: FieldDescriptor, d: int, rng: random.Random,
                           n_max: int = 2) -> ProductMeasure:
    """Product of radial measures on Z_p with positive mass on every shell 0..n."""
    comps = []
    for _ in range(d):
        n = rng.randint(1, n_max)
        comps.append(custom_measure(field, {j: rng.randint(1, 6) for j in range(n + 1)}))
    return ProductMeasure(comps)


def _unit(field, rng, prec=40) -> PAdic:
    p = field.p
    ds = [rng.randint(1, p - 1)] + [rng.randrange(p) for _ in range(3)]
    return point_from_digits(field, 0, ds, prec)


def _integer(field, rng, digits=3) -> PAdic:
    return point_from_digits(field, 0, [rng.randrange(field.p) for _ in range(digits)])


def _unitriangular(field, d, rng, lower: bool) -> list:
    zero, one = point(field, 0), point(field, 1)
    rows = []
    for i in range(d):
        row = []
        for j in range(d):
            if i == j:
                row.append(one)
            elif (i > j) == lower:
                row.append(_integer(field, rng))
            else:
                row.append(zero)
        rows.append(row)
    return rows


def random_matrix(field: FieldDescriptor, d: int, rng: random.Random,
                  scale_ords: Sequence[int]) -> MatrixK:
    """P L diag(u_j p^{e_j}) R with unitriangular integral L, R and a random permutation P."""
    L = MatrixK(_unitriangular(field, d, rng, True), field)
    R = MatrixK(_unitriangular(field, d, rng, False), field)
    diag = [_unit(field, rng) * uniformizer_power(field, e) for e in scale_ords]
    D = MatrixK.diagonal(diag)
    perm = list(range(d))
    rng.shuffle(perm)
    P = MatrixK.from_rationals(field, [[int(perm[i] == j) for j in range(d)] for i in range(d)])
    return P @ L @ D @ R


def expansion(M: MatrixK) -> int:
    """max(0, -min ord of entries): how far M can spread a ball of radius p^-R."""
    ords = [e.ord for r in M.rows for e in r if not e.is_zero()]
    return max(0, -min(ords)) if ords else 0


@dataclass
class TransportCase:
    label: str
    mu: ProductMeasure
    forward: Callable          # y -> U(y)
    density: Callable          # x -> DensityValue
    abs_det: Callable          # x -> |det U'(U^{-1} x)|
    expand: int                # forward expansion exponent
    expand_inv: int            # inverse expansion exponent
    grain: int                 # cells at this level lie inside one piece (domain and image)
    conserving: bool           # U maps Z_p^d into itself, so the pushforward keeps all mass


def affine_case(mu: ProductMeasure, U: MatrixK, c: Sequence[PAdic], label: str = "affine"
                ) -> TransportCase:
    U_inv = U.inverse()
    d = U.n
    abs_det = U.det().norm()

    def forward(y):
        return [a + b for a, b in zip(U.apply(y), c)]

    integral = expansion(U) == 0 and all(ci.is_zero() or ci.ord >= 0 for ci in c)
    return TransportCase(label, mu, forward,
                         lambda x: affine_cov_density(U, c, mu, x, U_inv),
                         lambda x: abs_det, expansion(U), expansion(U_inv), 0,
                         integral)


def polygonal_case(mu: ProductMeasure, P: PolygonalMap, label: str = "polygonal"
                   ) -> TransportCase:
    e = max(expansion(pc.V) for pc in P.pieces)
    e_inv = max(expansion(pc.inverse_matrix()) for pc in P.pieces)
    grain = 0
    for pc in P.pieces:
        for b in pc.region:
            if b is not None:
                grain = max(grain, b.m)
    # image pieces: forward image of a piece ball in coordinate 1
    for pc in P.pieces:
        b = pc.region[0]
        if b is not None:
            grain = max(grain, b.m + pc.V.rows[0][0].ord)

    def jac(x):
        pc, _ = P.preimage(x)
        return pc.V.det().norm()

    return TransportCase(label, mu, P, lambda x: polygonal_cov_density(P, mu, x), jac,
                         e, e_inv, grain, True)


def _ball_centers(field, R: int) -> list[PAdic]:
    return [point_from_digits(field, 0, ds) for ds in product(range(field.p), repeat=R)]


def _key(v: PAdic, R: int):
    """Digits 0..R-1 of v, or None when v is outside Z_p."""
    if v.is_zero():
        return (0,) * R
    if v.ord < 0:
        return None
    return tuple(v.digit(i) for i in range(R))


@dataclass
class TransportReport:
    label: str
    cells: int
    max_error: float
    total: Fraction
    lhs: dict
    rhs: dict


def check_transport(case: TransportCase, R_A: int, jacobian_power: int = -1) -> TransportReport:
    """Exhaustive comparison on the partition of Z_p^d into balls of radius p^-R_A.

    Left side: push the cells of a fine partition through U and add their
    mu-masses.  Right side: integrate the density over a fine partition of each
    target cell.  ``jacobian_power = 1`` swaps in |det U'| instead of its inverse.
    """
    mu = case.mu
    field = mu.field
    d = mu.d
    n_max = max(c.n for c in mu.components)
    R_C = max(R_A + case.expand, case.grain, 0)
    R_D = max(n_max + case.expand_inv, case.grain, R_A, n_max)

    def cell_masses(R):
        cs = _ball_centers(field, R)
        per = [[comp.mass_ball(Ball(c, R)) for c in cs] for comp in mu.components]
        return cs, per

    lhs: dict = {}
    cs, per = cell_masses(R_C)
    idx = range(len(cs))
    for combo in product(idx, repeat=d):
        w = Fraction(1)
        for j, k in enumerate(combo):
            w *= per[j][k]
        if w == 0:
            continue
        v = case.forward([cs[k] for k in combo])
        key = tuple(_key(vj, R_A) for vj in v)
        if any(k is None for k in key):
            continue
        lhs[key] = lhs.get(key, 0) + w

    rhs: dict = {}
    cs, per = cell_masses(R_D)
    count = 0
    for combo in product(range(len(cs)), repeat=d):
        w = Fraction(1)
        for j, k in enumerate(combo):
            w *= per[j][k]
        x = [cs[k] for k in combo]
        dens = case.density(x)
        if not dens.defined:
            raise DomainError("density undefined inside the support")
        val = dens.value
        if jacobian_power != -1:
            val = val * case.abs_det(x) ** (jacobian_power + 1)
        key = tuple(_key(xj, R_A) for xj in x)
        rhs[key] = rhs.get(key, 0) + val * w
        count += 1
    keys = set(lhs) | set(rhs)
    err = max(abs(float(lhs.get(k, 0) - rhs.get(k, 0))) for k in keys)
    return TransportReport(case.label, count, err, sum(rhs.values(), Fraction(0)), lhs, rhs)


# -- generators -----------------------------------------------------------------

def random_affine_case(field, d: int, rng: random.Random, mode: str = "mixed",
                       n_max: int = 2) -> TransportCase:
    if mode == "unimodular":
        ords = [0] * d
    elif mode == "contracting":
        ords = [rng.choice([0, 1]) for _ in range(d)]
    elif mode == "expanding":
        ords = [rng.choice([0, -1]) for _ in range(d)]
    else:
        ords = [rng.choice([-1, 0, 1]) for _ in range(d)]
    mu = random_compact_product(field, d, rng, n_max)
    U = random_matrix(field, d, rng, ords)
    c = [_integer(field, rng) for _ in range(d)]
    return affine_case(mu, U, c, f"affine-{mode}-d{d}")


def random_ball_partition(field, rng: random.Random, pieces: int) -> list[Ball]:
    p = field.p
    if (pieces - 1) % (p - 1):
        raise DomainError("piece count must be 1 mod p-1")
    balls = [Ball(point(field, 0), 0)]
    while len(balls) < pieces:
        b = balls.pop(rng.randrange(len(balls)))
        balls.extend(b.children())
    return balls


def random_polygonal_case(field, d: int, rng: random.Random, pieces: int,
                          n_max: int = 2) -> TransportCase:
    src = random_ball_partition(field, rng, pieces)
    dst = random_ball_partition(field, rng, pieces)
    rng.shuffle(dst)
    zero = point(field, 0)
    unit_ball = Ball(zero, 0)
    out = []
    for b, b2 in zip(src, dst):
        u = _unit(field, rng) * uniformizer_power(field, b2.m - b.m)
        rows = [[u] + [zero] * (d - 1)]
        if d > 1:
            W = random_matrix(field, d - 1, rng, [0] * (d - 1))
            for i in range(d - 1):
                rows.append([_integer(field, rng)] + W.rows[i])
        V = MatrixK(rows, field)
        shift = [b2.center - u * b.center] + [zero] * (d - 1)
        out.append(PolygonalPiece((b,) + (unit_ball,) * (d - 1), shift, V))
    mu = random_compact_product(field, d, rng, n_max)
    return polygonal_case(mu, PolygonalMap(out), f"polygonal-{pieces}-d{d}")


def swap_case(field, d: int = 1, n_max: int = 2, rng: Optional[random.Random] = None
              ) -> TransportCase:
    """Two pieces: B(0, 1/p) and B(1, 1/p) exchanged by the shifts +1 and -1."""
    rng = rng or random.Random(0)
    zero, one = point(field, 0), point(field, 1)
    I = MatrixK.identity(field, d)
    unit_ball = Ball(zero, 0)
    rest = (unit_ball,) * (d - 1)
    if field.p != 2:
        raise DomainError("the two-ball swap needs p = 2")
    pieces = [PolygonalPiece((Ball(zero, 1),) + rest, [one] + [zero] * (d - 1), I),
              PolygonalPiece((Ball(one, 1),) + rest, [-one] + [zero] * (d - 1), I)]
    mu = random_compact_product(field, d, rng, n_max)
    return polygonal_case(mu, PolygonalMap(pieces), f"swap-d{d}")
