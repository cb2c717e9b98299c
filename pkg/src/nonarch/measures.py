"""Shell measures on K, their finite products, densities of shifts and moments.

A :class:`ShellMeasure1D` puts mass ``w_j`` on each shell
``{y : ord(y) = j}`` (``y = x - center``) for ``j_min <= j < n`` and ``w_n`` on
the ball ``p^n O``; inside each piece the mass is spread like Haar measure.
Mass on shells below ``j_min`` is carried as one number ``tail``; its split
over shells is only available when the measure came from a closed-form family.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .errors import CoverageError, DivergenceError, DomainError
from .field import Ball, FieldDescriptor, PAdic, Shell, shell_volume
from .fourier import character_value, gaussian_normalizer, point

Weight = Union[Fraction, float]


def _ord(y: PAdic):
    return math.inf if y.is_zero() else y.ord


@dataclass(frozen=True)
class DensityValue:
    value: Weight = Fraction(1)
    defined: bool = True

    def __mul__(self, other: "DensityValue") -> "DensityValue":
        if not (self.defined and other.defined):
            return DensityValue(Fraction(0), False)
        return DensityValue(self.value * other.value, True)


UNDEFINED = DensityValue(Fraction(0), False)


@dataclass(frozen=True)
class BallUnion:
    """Signed combination of balls; its mass is sum(coef * mass(ball))."""

    terms: tuple

    @classmethod
    def of(cls, *balls: Ball) -> "BallUnion":
        return cls(tuple((b, 1) for b in balls))


@dataclass(frozen=True)
class Annulus:
    """{x : ord(x - center) = j} for j < top, {ord(x - center) >= top} for j = top."""

    center: PAdic
    j: int
    top: int


Constraint = Union[None, Ball, Shell, Annulus, BallUnion]


@dataclass(frozen=True)
class CylinderSet:
    """Product set: coordinate i is constrained by ``constraints[i]`` (None = free)."""

    constraints: tuple

    @property
    def base_dim(self) -> int:
        k = 0
        for i, c in enumerate(self.constraints):
            if c is not None:
                k = i + 1
        return k


class ShellMeasure1D:
    def __init__(self, field: FieldDescriptor, center: PAdic, j_min: int, n: int,
                 weights: dict, tail: Weight = 0, form: Optional[dict] = None,
                 offset: int = 0):
        if j_min > n:
            raise DomainError("window floor above window top")
        if any(j < j_min or j > n for j in weights):
            raise DomainError("weight outside the window")
        if any(w < 0 for w in weights.values()) or tail < 0:
            raise DomainError("negative weight")
        self.field = field
        self.center = center
        self.j_min = j_min
        self.n = n
        self.weights = {j: w for j, w in weights.items() if w != 0}
        self.tail = tail
        self.form = form or {"kind": "custom"}
        self.offset = offset

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def kind(self) -> str:
        return self.form["kind"]

    @property
    def exact(self) -> bool:
        return all(isinstance(w, (int, Fraction)) for w in self.weights.values()) \
            and isinstance(self.tail, (int, Fraction))

    def total(self) -> Weight:
        return self.tail + sum(self.weights.values(), Fraction(0))

    def __repr__(self):
        return (f"ShellMeasure1D({self.kind}, p={self.p}, window=[{self.j_min},{self.n}], "
                f"tail={self.tail})")

    # -- per-shell data ------------------------------------------------------

    def _tail_shell(self, j: int) -> Weight:
        if self.tail == 0:
            return Fraction(0)
        if self.kind == "geometric":
            return geometric_raw_mass(self.p, self.form["r"], self.form["n"], j - self.offset) \
                / self.form["Z"]
        raise CoverageError(f"shell {j} lies in an unresolved tail")

    def shell_weight(self, j: int) -> Weight:
        if j > self.n:
            raise DomainError("shell index above the window top")
        if j >= self.j_min:
            return self.weights.get(j, Fraction(0))
        return self._tail_shell(j)

    def mass_below(self, k) -> Weight:
        """Mass of {ord(x - center) < k}."""
        if k == math.inf or k > self.n:
            return self.total()
        if k >= self.j_min:
            return self.tail + sum((w for j, w in self.weights.items() if j < k), Fraction(0))
        if self.tail == 0:
            return Fraction(0)
        if self.kind == "geometric":
            r, n0 = self.form["r"], self.form["n"]
            i = k - self.offset
            # geometric sum of a(i', n0) over i' < i
            return r ** (n0 * (i - 1 - n0)) * (1 - Fraction(1, self.p)) \
                * Fraction(self.p) ** (-n0) / self.form["Z"]
        raise CoverageError(f"mass below shell {k} lies in an unresolved tail")

    def density(self, j: int) -> Weight:
        """Density with respect to Haar measure on shell j (j = n: terminal ball)."""
        return self.shell_weight(j) / shell_volume(self.p, j, self.n)

    def rel_shell(self, x: PAdic) -> int:
        y = x - self.center
        if y.is_zero() or y.ord >= self.n:
            return self.n
        return y.ord

    def density_at(self, x: PAdic) -> Weight:
        return self.density(self.rel_shell(x))

    # -- masses of sets --------------------------------------------------------

    def mass_ball(self, b: Ball) -> Weight:
        if b.field != self.field:
            raise DomainError("field mismatch")
        m = b.m
        t = _ord(b.center - self.center)
        if t < m:
            j = self.n if t >= self.n else t
            return self.density(j) * Fraction(self.p) ** (-m)
        if m > self.n:
            return self.density(self.n) * Fraction(self.p) ** (-m)
        return self.total() - self.mass_below(m)

    def mass_annulus(self, a: Annulus) -> Weight:
        if a.j >= a.top:
            return self.mass_ball(Ball(a.center, a.top))
        return self.mass_ball(Ball(a.center, a.j)) - self.mass_ball(Ball(a.center, a.j + 1))

    def mass(self, s: Constraint) -> Weight:
        if s is None:
            return self.total()
        if isinstance(s, Ball):
            return self.mass_ball(s)
        if isinstance(s, Shell):
            return self.mass_annulus(Annulus(point(self.field, 0), s.j, s.n))
        if isinstance(s, Annulus):
            return self.mass_annulus(s)
        if isinstance(s, BallUnion):
            return sum((c * self.mass_ball(b) for b, c in s.terms), Fraction(0))
        raise DomainError(f"unsupported set {s!r}")

    def ord_mass(self, t: int) -> Weight:
        """Mass of {x : ord(x) = t}."""
        zero = point(self.field, 0)
        return self.mass_ball(Ball(zero, t)) - self.mass_ball(Ball(zero, t + 1))

    def ord_at_least(self, t: int) -> Weight:
        return self.mass_ball(Ball(point(self.field, 0), t))

    # -- transformations -----------------------------------------------------

    def translate(self, a: PAdic) -> "ShellMeasure1D":
        return ShellMeasure1D(self.field, self.center + a, self.j_min, self.n,
                              self.weights, self.tail, self.form, self.offset)

    def scaled(self, lam: PAdic) -> "ShellMeasure1D":
        """Image under x -> lam * x."""
        if lam.is_zero():
            raise DomainError("scaling by zero")
        s = lam.ord
        return ShellMeasure1D(self.field, self.center * lam, self.j_min + s, self.n + s,
                              {j + s: w for j, w in self.weights.items()}, self.tail,
                              self.form, self.offset + s)

    def reflect(self) -> "ShellMeasure1D":
        """Image under x -> -x."""
        return ShellMeasure1D(self.field, -self.center, self.j_min, self.n,
                              self.weights, self.tail, self.form, self.offset)

    def perturbed(self, factors: dict) -> "ShellMeasure1D":
        """Multiply shell masses by 1 + h_j with |h_j| <= p^-n, then renormalize."""
        bound = Fraction(self.p) ** (-self.n)
        if any(abs(h) > bound for h in factors.values()):
            raise DomainError("perturbation exceeds p^-n relative size")
        w = {j: v * (1 + factors.get(j, 0)) for j, v in self.weights.items()}
        tot = self.tail + sum(w.values(), Fraction(0))
        return ShellMeasure1D(self.field, self.center, self.j_min, self.n,
                              {j: v / tot for j, v in w.items()}, self.tail / tot,
                              {"kind": "custom"} if self.tail else dict(self.form),
                              self.offset)

    # -- json ----------------------------------------------------------------

    def to_json(self) -> dict:
        from .field import padic_to_json
        ws = []
        for j in range(self.j_min, self.n + 1):
            w = self.weights.get(j, Fraction(0))
            if isinstance(w, Fraction) or isinstance(w, int):
                w = Fraction(w)
                ws.append({"j": j, "w_num": w.numerator, "w_den": w.denominator})
            else:
                ws.append({"j": j, "w": float(w)})
        params = {}
        for k, v in self.form.items():
            if k == "kind":
                continue
            params[k] = str(v) if isinstance(v, Fraction) else v
        tail = self.tail
        tail_js = ({"num": Fraction(tail).numerator, "den": Fraction(tail).denominator}
                   if isinstance(tail, (int, Fraction)) else float(tail))
        return {"kind": self.kind, "p": self.p, "field_kind": self.field.kind,
                "center": padic_to_json(self.center), "params": params,
                "offset": self.offset, "window": [self.j_min, self.n],
                "tail": tail_js, "weights": ws}

    @classmethod
    def from_json(cls, obj: dict) -> "ShellMeasure1D":
        from .field import padic_from_json
        field = FieldDescriptor(int(obj["p"]), obj.get("field_kind", "char-zero"))
        center = padic_from_json(obj["center"]) if "center" in obj else point(field, 0)
        j_min, n = obj["window"]
        weights = {}
        for w in obj["weights"]:
            if "w_num" in w:
                weights[int(w["j"])] = Fraction(int(w["w_num"]), int(w["w_den"]))
            else:
                weights[int(w["j"])] = float(w["w"])
        t = obj.get("tail", 0)
        tail = Fraction(t["num"], t["den"]) if isinstance(t, dict) else t
        form = {"kind": obj.get("kind", "custom")}
        for k, v in obj.get("params", {}).items():
            form[k] = Fraction(v) if isinstance(v, str) else v
        return cls(field, center, int(j_min), int(n), weights, tail, form,
                   int(obj.get("offset", 0)))


# -- constructors ---------------------------------------------------------------

def geometric_raw_mass(p: int, r: Fraction, n: int, j: int) -> Fraction:
    """Unnormalized shell mass a(j, n) of the locally constant construction."""
    if j < n:
        return r ** (n * (j - n)) * (1 - r ** (-n)) * (1 - Fraction(1, p)) * Fraction(p) ** (-n)
    if j == n:
        return (1 - r ** (-2 * n)) * Fraction(p) ** (-n)
    raise DomainError("shell index above n")


def geometric_total_mass(p: int, r: Fraction, n: int) -> Fraction:
    return Fraction(p) ** (-n) * (r ** (-n) * (1 - Fraction(1, p)) + 1 - r ** (-2 * n))


def geometric_shell_measure(field: FieldDescriptor, n: int, r=None, j_min: Optional[int] = None,
                         center: Optional[PAdic] = None) -> ShellMeasure1D:
    """Shell masses proportional to a(j, n), renormalized exactly to total mass 1."""
    p = field.p
    r = Fraction(p) if r is None else Fraction(r)
    if r <= 1:
        raise DivergenceError("r must exceed 1 for the lower tail to converge")
    if n < 1:
        raise DomainError("n must be a positive integer")
    if j_min is None:
        j_min = n - 8
    if j_min > n:
        raise DomainError("window floor above n")
    Z = geometric_total_mass(p, r, n)
    weights = {j: geometric_raw_mass(p, r, n, j) / Z for j in range(j_min, n + 1)}
    # a(i, n) summed over i < j_min is a geometric series with ratio r^-n
    tail = r ** (n * (j_min - 1 - n)) * (1 - Fraction(1, p)) * Fraction(p) ** (-n) / Z
    center = point(field, 0) if center is None else center
    return ShellMeasure1D(field, center, j_min, n, weights, tail,
                          {"kind": "geometric", "r": r, "n": n, "Z": Z})


def custom_measure(field: FieldDescriptor, weights: dict, center: Optional[PAdic] = None,
                   tail: Weight = 0, normalize: bool = True) -> ShellMeasure1D:
    if not weights:
        raise DomainError("no weights")
    j_min, n = min(weights), max(weights)
    weights = {j: (Fraction(w) if isinstance(w, (int, Fraction, str)) else w)
               for j, w in weights.items()}
    for j in range(j_min, n + 1):
        weights.setdefault(j, Fraction(0))
    if normalize:
        tot = tail + sum(weights.values(), Fraction(0))
        if tot == 0:
            raise DomainError("zero total mass")
        weights = {j: w / tot for j, w in weights.items()}
        tail = tail / tot
    center = point(field, 0) if center is None else center
    return ShellMeasure1D(field, center, j_min, n, weights, tail, {"kind": "custom"})


def dirac(field: FieldDescriptor, n: int, center: Optional[PAdic] = None) -> ShellMeasure1D:
    """All mass spread over the ball center + p^n O; a point mass as n grows."""
    center = point(field, 0) if center is None else center
    return ShellMeasure1D(field, center, n, n, {n: Fraction(1)}, 0, {"kind": "custom"})


def _radial_float_measure(field, center, window, raw: Callable[[int], float],
                          tol: float, form: dict) -> ShellMeasure1D:
    p = field.p
    j_min, n = window
    if j_min > n:
        raise DomainError("window floor above window top")
    inner = {j: raw(j) for j in range(j_min, n)}
    # the terminal ball collects every shell j >= n
    deep = []
    j = n
    while True:
        t = raw(j)
        deep.append(t)
        if j > n + 5 and t <= 1e-30 * (deep[0] or 1.0):
            break
        if j > n + 4000:
            break
        j += 1
    inner[n] = math.fsum(deep)
    below = []
    j = j_min - 1
    while True:
        t = raw(j)
        below.append(t)
        if t == 0.0 or (len(below) > 3 and t < 1e-30):
            break
        if len(below) > 4000:
            raise CoverageError("lower tail does not decay")
        j -= 1
    window_mass = math.fsum(inner.values())
    tail_mass = math.fsum(below)
    if tail_mass > tol * (window_mass + tail_mass):
        raise CoverageError(
            f"window [{j_min},{n}] misses {tail_mass / (window_mass + tail_mass):.3g} of the mass")
    weights = {j: w / window_mass for j, w in inner.items()}
    return ShellMeasure1D(field, center, j_min, n, weights, 0.0, form)


def exp_measure(field: FieldDescriptor, xi: PAdic, x0: Optional[PAdic] = None, q: int = 2,
                window: tuple = (-6, 6), tol: float = 1e-12) -> ShellMeasure1D:
    """Density proportional to exp(-|(x - x0)/xi|^q), as shell masses around x0."""
    if xi.is_zero():
        raise DomainError("xi must be nonzero")
    if q < 1:
        raise DomainError("q must be a positive integer")
    p = field.p
    e = xi.ord

    def raw(j):
        return float(shell_volume(p, j)) * math.exp(-float(p) ** (q * (e - j)))

    x0 = point(field, 0) if x0 is None else x0
    return _radial_float_measure(field, x0, window, raw, tol,
                                 {"kind": "exp", "xi_ord": e, "q": q})


def gaussian_like_measure(xi: PAdic, q: int = 1, window: tuple = (-6, 6),
                          tol: float = 1e-12) -> ShellMeasure1D:
    """nu_xi(dx) = C(xi) exp(-|x xi|^2) dx on K, in shell form around 0."""
    if xi.is_zero():
        raise DomainError("xi must be nonzero")
    if q != 1:
        raise DomainError("only the scalar case q = 1 has a shell measure on K")
    field = xi.field
    p = field.p
    e = xi.ord
    C = gaussian_normalizer(Fraction(p) ** (-e), 1, field)

    def raw(j):
        return C * float(shell_volume(p, j)) * math.exp(-float(p) ** (-2 * (j + e)))

    return _radial_float_measure(field, point(field, 0), window, raw, tol,
                                 {"kind": "gaussian", "xi_ord": e, "C": C})


# -- products ---------------------------------------------------------------------

class ProductMeasure:
    def __init__(self, components: Sequence[ShellMeasure1D]):
        components = list(components)
        if not components:
            raise DomainError("empty product")
        f = components[0].field
        if any(c.field != f for c in components):
            raise DomainError("components over different fields")
        self.components = components
        self.field = f

    @property
    def d(self) -> int:
        return len(self.components)

    def truncate(self, k: int) -> "ProductMeasure":
        if not 1 <= k <= self.d:
            raise DomainError("truncation outside 1..d")
        return ProductMeasure(self.components[:k])

    def __repr__(self):
        return f"ProductMeasure(d={self.d}, {self.components[0]!r}, ...)"

    def to_json(self) -> dict:
        return {"kind": "product", "components": [c.to_json() for c in self.components]}

    @classmethod
    def from_json(cls, obj: dict) -> "ProductMeasure":
        return cls([ShellMeasure1D.from_json(c) for c in obj["components"]])


def geometric_product(field: FieldDescriptor, d: int, r=None,
                   k: Callable[[int], int] = lambda j: j,
                   j_min: Optional[int] = None) -> ProductMeasure:
    """Coordinate j (1-based) gets window top n_j = k(j); default r = p."""
    comps = []
    for j in range(1, d + 1):
        n = k(j)
        comps.append(geometric_shell_measure(field, n, r, n - 8 if j_min is None else j_min))
    return ProductMeasure(comps)


def measure_mass(m, s) -> Weight:
    if isinstance(m, ShellMeasure1D):
        if isinstance(s, CylinderSet):
            if len(s.constraints) > 1 and any(c is not None for c in s.constraints[1:]):
                raise DomainError("cylinder constrains coordinates beyond dimension 1")
            s = s.constraints[0] if s.constraints else None
        return m.mass(s)
    if isinstance(m, ProductMeasure):
        if s is None:
            s = CylinderSet(())
        if not isinstance(s, CylinderSet):
            s = CylinderSet((s,))
        if s.base_dim > m.d:
            raise CoverageError("cylinder base exceeds the truncation dimension")
        out = Fraction(1)
        for i, comp in enumerate(m.components):
            c = s.constraints[i] if i < len(s.constraints) else None
            out = out * comp.mass(c)
        return out
    raise DomainError("unsupported measure type")


# -- shift densities -----------------------------------------------------------------

def shift_density(m: ShellMeasure1D, a: PAdic, x: PAdic) -> DensityValue:
    """d(m; a, x) = f(x - a) / f(x) for the shell density f of m."""
    t = m.rel_shell(x)
    u = m.rel_shell(x - a)
    if t == u:
        if t >= m.j_min or m.tail == 0 or m.kind == "geometric":
            if m.density(t) == 0:
                return UNDEFINED
        return DensityValue(Fraction(1) if m.exact else 1.0)
    fx = m.density(t)
    if fx == 0:
        return UNDEFINED
    return DensityValue(m.density(u) / fx)


def product_rho(mu: ProductMeasure, z: Sequence[PAdic], x: Sequence[PAdic],
                N: Optional[int] = None) -> tuple[DensityValue, bool]:
    """Partial product of per-coordinate shift densities up to N.

    The flag reports whether every factor past N is identically 1 (z_j = 0).
    """
    N = mu.d if N is None else N
    if N > mu.d:
        raise CoverageError("truncation beyond the measure's dimension")
    out = DensityValue(Fraction(1))
    for j in range(N):
        zj = z[j] if j < len(z) else None
        if zj is None or zj.is_zero():
            continue
        out = out * shift_density(mu.components[j], zj, x[j])
        if not out.defined:
            return out, False
    tail_one = all(zz.is_zero() for zz in z[N:])
    return out, tail_one


def joint_cells(m: ShellMeasure1D, a: PAdic):
    """Cells (t, u, vol) of y = x - center with ord(y) -> t, ord(y - a) -> u.

    Indices are capped at the window top.  Shells below ``lo`` are all on the
    diagonal and are returned as a single lumped mass.
    """
    p, n = m.p, m.n
    s = _ord(a)
    if s >= n:
        lo = m.j_min
        cells = [(t, t, shell_volume(p, t, n)) for t in range(lo, n + 1)]
        return cells, m.mass_below(lo)
    if s < m.j_min and not (m.tail == 0 or m.kind == "geometric"):
        raise CoverageError("shift reaches into an unresolved tail")
    lo = min(m.j_min, s)
    cells = [(t, t, shell_volume(p, t)) for t in range(lo, s)]
    for t in range(s + 1, n):
        cells.append((t, s, shell_volume(p, t)))
    cells.append((n, s, Fraction(p) ** (-n)))
    for u in range(s + 1, n):
        cells.append((s, u, shell_volume(p, u)))
    cells.append((s, n, Fraction(p) ** (-n)))
    cells.append((s, s, Fraction(p) ** (-s) * (1 - Fraction(2, p))))
    return cells, m.mass_below(lo)


def _safe_density(m: ShellMeasure1D, j: int) -> Weight:
    if j < m.j_min and m.tail == 0:
        return Fraction(0)
    return m.density(j)


def shifted_total(m: ShellMeasure1D, a: PAdic) -> Weight:
    """Integral of d(m; a, .) dm, summed cell by cell."""
    cells, lump = joint_cells(m, a)
    out = lump
    for t, u, vol in cells:
        if _safe_density(m, t) == 0:
            continue
        out = out + vol * _safe_density(m, u)
    return out


def hellinger_beta(m: ShellMeasure1D, a: PAdic) -> float:
    """beta = integral of sqrt(d(m; a, .)) dm."""
    if _ord(a) >= m.n:
        # the shift stays inside the terminal ball, so d = 1 everywhere
        return 1.0
    cells, lump = joint_cells(m, a)
    acc = [float(lump)]
    for t, u, vol in cells:
        acc.append(float(vol) * math.sqrt(float(_safe_density(m, t)) * float(_safe_density(m, u))))
    return min(1.0, math.fsum(acc))


@dataclass
class KakutaniResult:
    betas: list
    partial_products: list
    verdict: str


SINGULAR_LEVEL = 1e-6
STABLE_RATIO = 0.999


def kakutani_verdict(partials: Sequence[float]) -> str:
    """Trend rule on the partial products P_1..P_h of beta_j."""
    if not partials:
        return "inconclusive"
    h = len(partials)
    Ph = partials[-1]
    if Ph < SINGULAR_LEVEL:
        return "singular-trend"
    half = partials[max(h // 2 - 1, 0)]
    if half > 0 and Ph / half > STABLE_RATIO:
        return "equivalent-trend"
    return "inconclusive"


def kakutani_check(components: Sequence[ShellMeasure1D], shifts: Sequence[PAdic],
                   horizon: Optional[int] = None) -> KakutaniResult:
    horizon = min(len(components), len(shifts)) if horizon is None else horizon
    if horizon > min(len(components), len(shifts)):
        raise CoverageError("horizon exceeds the supplied sequence")
    betas, partials = [], []
    P = 1.0
    for j in range(horizon):
        b = hellinger_beta(components[j], shifts[j])
        betas.append(b)
        P *= b
        partials.append(P)
    return KakutaniResult(betas, partials, kakutani_verdict(partials))


# -- moments ----------------------------------------------------------------------------

def _terminal_moment(p: int, t: int, q) -> Weight:
    """Mean of |y|^q for y uniform on p^t O."""
    if isinstance(q, int):
        P = Fraction(p)
        return (1 - 1 / P) * P ** (-t * q) / (1 - P ** (-1 - q))
    return (1 - 1 / p) * float(p) ** (-t * q) / (1 - float(p) ** (-1 - q))


def radial_moment(m: ShellMeasure1D, q) -> Weight:
    """Integral of |x|^q dm(x), exact for integer q and rational weights."""
    p, n = m.p, m.n
    P = Fraction(p) if isinstance(q, int) else float(p)
    t0 = _ord(m.center)
    out = Fraction(0)
    # lower tail: shells below the window keep their index if below t0
    if m.tail:
        if m.kind != "geometric":
            raise CoverageError("moment needs the tail shell split")
        ratio = m.form["r"] ** (-m.form["n"]) * P ** q
        if ratio >= 1:
            raise DivergenceError("moment diverges on the lower tail")
        top = min(m.j_min, t0) if t0 != math.inf else m.j_min
        first = m._tail_shell(top - 1) * P ** (-(top - 1) * q)
        out = out + first / (1 - ratio)
        # tail shells between t0 and j_min collapse onto ord t0
        if t0 != math.inf and t0 < m.j_min:
            for j in range(t0, m.j_min):
                w = m._tail_shell(j)
                out = out + _shell_moment(p, j, t0, w, q, P)
    for j, w in m.weights.items():
        if j == n:
            if t0 >= n:
                out = out + w * _terminal_moment(p, n, q)
            else:
                out = out + w * P ** (-t0 * q)
        else:
            out = out + _shell_moment(p, j, t0, w, q, P)
    return out


def _shell_moment(p, j, t0, w, q, P):
    if j < t0:
        return w * P ** (-j * q)
    if j > t0:
        return w * P ** (-t0 * q)
    # same shell as the center: ord(y + c) = t0 unless the leading digit cancels
    frac = Fraction(1, p - 1) if isinstance(P, Fraction) else 1 / (p - 1)
    return w * ((1 - frac) * P ** (-j * q) + frac * _terminal_moment(p, j + 1, q))


def convolve(m1: ShellMeasure1D, m2: ShellMeasure1D) -> ShellMeasure1D:
    """Law of X1 + X2 for independent X1 ~ m1, X2 ~ m2."""
    if m1.field != m2.field:
        raise DomainError("field mismatch")
    if m1.tail and m2.tail:
        raise CoverageError("both measures carry unresolved lower tails")
    if m2.tail:
        m1, m2 = m2, m1
    if m1.tail and m1.j_min > m2.j_min:
        raise CoverageError("tailed measure must have the lower window floor")
    p = m1.p
    n = min(m1.n, m2.n)
    J = m1.j_min if m1.tail else min(m1.j_min, m2.j_min)
    exact = m1.exact and m2.exact
    one = Fraction(1) if exact else 1.0
    stay = one * (p - 2) / (p - 1)
    move = one / (p - 1)
    w: dict = {j: 0 * one for j in range(J, n + 1)}
    for i, wi in m1.weights.items():
        for k, wk in m2.weights.items():
            mass = wi * wk
            if i != k or i >= n:
                w[min(i, k, n)] += mass
                continue
            w[i] += stay * mass
            rest = move * mass
            for u in range(0, n - i - 1):
                w[i + 1 + u] += rest * (1 - one / p) * (one / p) ** u
            w[n] += rest * (one / p) ** (n - i - 1)
    form = dict(m1.form) if m1.tail else {"kind": "custom"}
    return ShellMeasure1D(m1.field, m1.center + m2.center, J, n, w,
                          m1.tail * m2.total(), form, m1.offset if m1.tail else 0)


def linear_image(mu: ProductMeasure, z: Sequence[PAdic]) -> ShellMeasure1D:
    """Law of sum_j z_j x_j under mu."""
    parts = [c.scaled(zj) for c, zj in zip(mu.components, z) if not zj.is_zero()]
    if not parts:
        return dirac(mu.field, 0)
    out = parts[0]
    for m in parts[1:]:
        out = convolve(out, m)
    return out


def moment_psi(mu: ProductMeasure, z: Sequence[PAdic], q=2) -> Weight:
    """psi(z) = integral of |z(x)|^q dmu(x) for the linear functional z(x) = sum z_j x_j."""
    if all(zj.is_zero() for zj in z):
        return Fraction(0)
    return radial_moment(linear_image(mu, z), q)
