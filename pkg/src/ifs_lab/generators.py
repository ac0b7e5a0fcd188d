"""Primitive circle maps: rigid rotations, the flip, north-south maps,
piecewise-linear homeomorphisms and linear expanding maps.

Every generator exposes an exact evaluation on the circle, a monotone lift
on the real line, an analytic derivative of that lift, and an inverse when
one exists.  Images of arcs are computed from lift values at the endpoints,
so they stay consistent with wraparound.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .circle import Arc, CirclePoint, as_value, circ_dist, normalize


class NonInvertible(Exception):
    """Raised when an inverse is requested from a non-injective map."""


class NotDifferentiable(Exception):
    """Raised at a corner point; carries the one-sided slopes."""

    def __init__(self, location: float, left: float, right: float):
        super().__init__(f"one-sided slopes {left}/{right} at {location}")
        self.location = location
        self.left = left
        self.right = right


class Generator:
    """Base class: a continuous self-map of the circle with a monotone lift."""

    invertible: bool = True
    # Degree of the lift: lift(t + 1) = lift(t) + degree.
    degree: int = 1

    def lift(self, t: float) -> float:
        raise NotImplementedError

    def lift_array(self, t: np.ndarray) -> np.ndarray:
        return np.array([self.lift(float(v)) for v in t])

    def eval(self, x: float) -> float:
        """Value on the circle; accepts any real, returns the canonical angle."""
        return normalize(self.lift(x))

    def eval_array(self, x: np.ndarray) -> np.ndarray:
        v = self.lift_array(x) % 1.0
        v[v >= 1.0 - 1e-15] = 0.0
        return v

    def derivative(self, x: float) -> float:
        """Signed derivative of the lift at x (periodic in x)."""
        raise NotImplementedError

    def inverse(self) -> "Generator":
        raise NonInvertible(f"{self!r} has no inverse")

    @property
    def orientation(self) -> int:
        return 1 if self.degree > 0 else -1


@dataclass(frozen=True, slots=True)
class Rotation(Generator):
    """x -> x + alpha (mod 1)."""

    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", normalize(self.alpha))

    def lift(self, t: float) -> float:
        return t + self.alpha

    def lift_array(self, t: np.ndarray) -> np.ndarray:
        return t + self.alpha

    def derivative(self, x: float) -> float:
        return 1.0

    def inverse(self) -> "Rotation":
        return Rotation(-self.alpha)


@dataclass(frozen=True, slots=True)
class Flip(Generator):
    """The orientation-reversing involution x -> -x (mod 1)."""

    def lift(self, t: float) -> float:
        return -t

    def lift_array(self, t: np.ndarray) -> np.ndarray:
        return -t

    def derivative(self, x: float) -> float:
        return -1.0

    def inverse(self) -> "Flip":
        return self


Flip.degree = -1


@dataclass(frozen=True, slots=True)
class NorthSouth(Generator):
    """Hyperbolic north-south map: repelling fixed point q with multiplier
    lam > 1, attracting fixed point antipodal to q with multiplier 1/lam.

    The canonical model with q = 0 has lift t -> atan(lam * tan(pi t)) / pi,
    extended continuously across the half-integers; a general q conjugates
    that model by the rotation taking 0 to q.  Both fixed points and both
    multipliers are exact in this parameterization.
    """

    q: float
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "q", normalize(self.q))
        if not self.lam > 1.0:
            raise ValueError(f"multiplier must exceed 1, got {self.lam}")

    @property
    def attractor(self) -> float:
        return normalize(self.q + 0.5)

    def _core(self, s: float) -> float:
        # s in [-1/2, 1/2); the cotangent form keeps precision near +-1/2.
        if abs(s) <= 0.25:
            return math.atan(self.lam * math.tan(math.pi * s)) / math.pi
        sp = 0.5 - abs(s)
        u = 0.5 - math.atan(math.tan(math.pi * sp) / self.lam) / math.pi
        return u if s > 0 else -u

    def lift(self, t: float) -> float:
        tq = t - self.q
        n = math.floor(tq + 0.5)
        return self.q + n + self._core(tq - n)

    def lift_array(self, t: np.ndarray) -> np.ndarray:
        tq = t - self.q
        n = np.floor(tq + 0.5)
        s = tq - n
        out = np.empty_like(s)
        inner = np.abs(s) <= 0.25
        si = s[inner]
        out[inner] = np.arctan(self.lam * np.tan(np.pi * si)) / np.pi
        so = s[~inner]
        sp = 0.5 - np.abs(so)
        u = 0.5 - np.arctan(np.tan(np.pi * sp) / self.lam) / np.pi
        out[~inner] = np.where(so > 0, u, -u)
        return self.q + n + out

    def derivative(self, x: float) -> float:
        tq = x - self.q
        s = tq - math.floor(tq + 0.5)
        if abs(s) <= 0.25:
            T = math.tan(math.pi * s) ** 2
            return self.lam * (1.0 + T) / (1.0 + self.lam * self.lam * T)
        Tp = math.tan(math.pi * (0.5 - abs(s))) ** 2
        return self.lam * (1.0 + Tp) / (self.lam * self.lam + Tp)

    def inverse(self) -> "NorthSouth":
        # Swapping the roles of the two fixed points inverts the map exactly.
        return NorthSouth(self.q + 0.5, self.lam)


@dataclass(frozen=True, slots=True)
class PiecewiseLinear(Generator):
    """Circle homeomorphism given by breakpoints of its lift on [0, 1].

    Breakpoints are (x_i, y_i) with x_0 = 0, x_n = 1, strictly increasing x,
    strictly monotone y, and y_n - y_0 = +1 (orientation-preserving) or -1
    (orientation-reversing).
    """

    breakpoints: tuple
    _xs: tuple = field(init=False, repr=False, compare=False, default=())
    _ys: tuple = field(init=False, repr=False, compare=False, default=())
    _deg: int = field(init=False, repr=False, compare=False, default=1)

    def __post_init__(self):
        bps = tuple((float(x), float(y)) for x, y in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        xs = [x for x, _ in bps]
        ys = [y for _, y in bps]
        if len(bps) < 2:
            raise ValueError("need at least two breakpoints")
        if xs[0] != 0.0 or xs[-1] != 1.0:
            raise ValueError("breakpoint x-values must run from 0 to 1")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoint x-values must increase strictly")
        span = ys[-1] - ys[0]
        if abs(abs(span) - 1.0) > 1e-12:
            raise ValueError("lift must satisfy lift(x+1) = lift(x) +- 1")
        deg = 1 if span > 0 else -1
        if any((b - a) * deg <= 0 for a, b in zip(ys, ys[1:])):
            raise ValueError("lift must be strictly monotone")
        object.__setattr__(self, "_xs", tuple(xs))
        object.__setattr__(self, "_ys", tuple(ys))
        object.__setattr__(self, "_deg", deg)

    @property
    def degree(self) -> int:  # type: ignore[override]
        return self._deg

    def _segment(self, s: float) -> int:
        i = bisect.bisect_right(self._xs, s) - 1
        return min(max(i, 0), len(self._xs) - 2)

    def lift(self, t: float) -> float:
        n = math.floor(t)
        s = t - n
        i = self._segment(s)
        x0, x1 = self._xs[i], self._xs[i + 1]
        y0, y1 = self._ys[i], self._ys[i + 1]
        return n * self._deg + y0 + (s - x0) * (y1 - y0) / (x1 - x0)

    def lift_array(self, t: np.ndarray) -> np.ndarray:
        n = np.floor(t)
        s = t - n
        return n * self._deg + np.interp(s, self._xs, self._ys)

    def derivative(self, x: float) -> float:
        s = x - math.floor(x)
        if s in self._xs:
            i = self._xs.index(s)
            slopes = self._slopes()
            left = slopes[i - 1] if i > 0 else slopes[-1]
            right = slopes[i] if i < len(slopes) else slopes[0]
            raise NotDifferentiable(s, left, right)
        i = self._segment(s)
        return self._slope(i)

    def _slope(self, i: int) -> float:
        x0, x1 = self._xs[i], self._xs[i + 1]
        y0, y1 = self._ys[i], self._ys[i + 1]
        return (y1 - y0) / (x1 - x0)

    def _slopes(self) -> list:
        return [self._slope(i) for i in range(len(self._xs) - 1)]

    def inverse(self) -> "PiecewiseLinear":
        # Knots of the inverse lift over two periods, cut back to y in [0, 1].
        pairs = list(zip(self._ys, self._xs))
        if self._deg > 0:
            ext = [(y - 1.0, x - 1.0) for y, x in pairs[:-1]] + pairs
        else:
            asc = list(reversed(pairs))
            ext = asc[:-1] + [(y + 1.0, x - 1.0) for y, x in asc]
        out = []
        for (y0, x0), (y1, x1) in zip(ext, ext[1:]):
            if y1 <= 0.0 or y0 >= 1.0:
                continue
            lo, hi = max(y0, 0.0), min(y1, 1.0)
            g = (x1 - x0) / (y1 - y0)
            if not out:
                out.append((lo, x0 + (lo - y0) * g))
            out.append((hi, x0 + (hi - y0) * g))
        knots = [(round(y, 15), x) for y, x in out]
        knots[0] = (0.0, knots[0][1])
        knots[-1] = (1.0, knots[-1][1])
        return PiecewiseLinear(tuple(knots))


@dataclass(frozen=True, slots=True)
class Expanding(Generator):
    """The standard m-fold covering x -> m x (mod 1), m >= 2."""

    m: int

    invertible = False

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"expanding factor must be an integer >= 2, got {self.m}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def degree(self) -> int:  # type: ignore[override]
        return self.m

    def lift(self, t: float) -> float:
        return self.m * t

    def lift_array(self, t: np.ndarray) -> np.ndarray:
        return self.m * t

    def derivative(self, x: float) -> float:
        return float(self.m)


# ---------------------------------------------------------------------------
# spec-level operations


def eval_map(g: Generator, x) -> CirclePoint:
    return CirclePoint(g.eval(as_value(x)))


def eval_inverse(g: Generator, y) -> CirclePoint:
    if not g.invertible:
        raise NonInvertible(f"{g!r} is not injective")
    return CirclePoint(g.inverse().eval(as_value(y)))


def eval_derivative(g: Generator, x) -> float:
    return g.derivative(as_value(x))


def map_arc(g: Generator, a: Arc) -> Arc:
    """Image of an arc; endpoint images plus orientation fix the result."""
    s = a.start.value
    if isinstance(g, Expanding):
        return Arc(CirclePoint(g.eval(s)), min(g.m * a.length, 1.0))
    lo = g.lift(s)
    hi = g.lift(s + a.length)
    length = min(abs(hi - lo), 1.0)
    start = lo if g.orientation > 0 else hi
    return Arc(CirclePoint(start), length)


@dataclass(frozen=True, slots=True)
class FixedPointRecord:
    """A fixed point with its one-sided multipliers, type and local basin."""

    location: CirclePoint
    one_sided_multipliers: tuple
    classification: str
    basin_estimate: Arc


# Non-hyperbolicity margin for classifying multipliers against 1.
_CLASS_TOL = 1e-9
_FP_GRID = 4096


def _lift_fixed_values(lift, tol: float, identity_samples: int):
    """Roots in [0, 1) of lift(x) - x - m over all integer branches m.

    Returns (values, identity) where identity=True means the map fixes every
    point up to tol; in that case `values` is a uniform sample.
    """
    n = _FP_GRID
    xs = [i / n for i in range(n + 1)]
    phi = [lift(x) - x for x in xs]
    lo = math.ceil(min(phi) - tol)
    hi = math.floor(max(phi) + tol)
    roots = []
    for m in range(lo, hi + 1):
        psi = [p - m for p in phi]
        if max(abs(p) for p in psi) <= tol:
            return [(i + 0.5) / identity_samples for i in range(identity_samples)], True
        for i in range(n):
            a, b = psi[i], psi[i + 1]
            if a == 0.0:
                roots.append(xs[i])
            elif a * b < 0.0:
                ra, rb = xs[i], xs[i + 1]
                fa = a
                for _ in range(64):
                    mid = 0.5 * (ra + rb)
                    fm = lift(mid) - mid - m
                    if fm == 0.0 or rb - ra <= tol * 0.5:
                        ra = rb = mid
                        break
                    if fa * fm < 0.0:
                        rb = mid
                    else:
                        ra, fa = mid, fm
                roots.append(0.5 * (ra + rb))
        if abs(psi[n]) <= tol * 0.5 and not any(abs(r - 1.0) <= 4 * tol for r in roots):
            roots.append(1.0)
    out = []
    for r in sorted(normalize(r) for r in roots):
        if not out or r - out[-1] > max(tol, 1e-11):
            out.append(r)
    if len(out) > 1 and (1.0 - out[-1] + out[0]) <= max(tol, 1e-11):
        out.pop()
    return out, False


def _one_sided_multipliers(g: Generator, x: float) -> tuple:
    try:
        d = g.derivative(x)
        return abs(d), abs(d)
    except NotDifferentiable as nd:
        return abs(nd.left), abs(nd.right)


def _classify(mult: tuple) -> str:
    left, right = mult
    if abs(left - 1.0) <= _CLASS_TOL or abs(right - 1.0) <= _CLASS_TOL:
        return "nonhyperbolic"
    if left > 1.0 and right > 1.0:
        return "repelling"
    if left < 1.0 and right < 1.0:
        return "attracting"
    return "semistable"


def _nearest_preimage(g: Generator, y: float, near: float) -> float:
    """The preimage of y closest to `near` (the local inverse branch)."""
    if g.invertible:
        return g.inverse().eval(y)
    m = g.degree
    best = None
    for j in range(m):
        cand = normalize((y + j) / m)
        if best is None or circ_dist(cand, near) < circ_dist(best, near):
            best = cand
    return best


def _basin_arc(g: Generator, p: float, classification: str) -> Arc:
    """Grow a symmetric arc around p verified to converge to p under the map
    (attracting) or its local inverse (repelling)."""
    if classification == "attracting":
        step = g.eval
    elif classification == "repelling":
        step = lambda y: _nearest_preimage(g, y, p)  # noqa: E731
    else:
        return Arc(CirclePoint(p), 0.0)

    def converges(y: float) -> bool:
        for _ in range(500):
            if circ_dist(y, p) <= 1e-9:
                return True
            y = step(y)
        return circ_dist(y, p) <= 1e-9

    good = 0.0
    r = 1e-4
    while r < 0.49:
        if converges(normalize(p - r)) and converges(normalize(p + r)):
            good = r
            r *= 2.0
        else:
            break
    if good == 0.0:
        return Arc(CirclePoint(p), 0.0)
    return Arc(CirclePoint(p - good), min(2.0 * good, 1.0))


def fixed_points(g: Generator, tol: float = 1e-12, identity_samples: int = 512):
    """All fixed points of the map, classified by one-sided multipliers."""
    values, identity = _lift_fixed_values(g.lift, tol, identity_samples)
    records = []
    for v in values:
        if identity:
            records.append(
                FixedPointRecord(CirclePoint(v), (1.0, 1.0), "nonhyperbolic", Arc(CirclePoint(v), 0.0))
            )
            continue
        mult = _one_sided_multipliers(g, v)
        cls = _classify(mult)
        records.append(FixedPointRecord(CirclePoint(v), mult, cls, _basin_arc(g, v, cls)))
    return records
