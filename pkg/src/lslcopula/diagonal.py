"""Diagonals in D^LSL: representations, evaluation, validation and generation.

A diagonal is an immutable object that can be called on scalars or arrays.
The canonical form is :class:`PiecewiseLinear` (linear interpolation of knots
``(x, delta(x))``).  Star products are projected onto :class:`PiecewiseRatio`,
which interpolates ``delta(x)/x`` linearly instead; that class is closed under
the membership constraints and contains the idempotent diagonals exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

import numpy as np

from ._pieces import Pieces, gl_integral, quad_breaks
from .errors import DomainError, MalformedKnots

INTEGRANDS = ("delta", "ratio", "moment", "square")


def _scalar_or_array(x, out):
    if np.ndim(x) == 0:
        return float(out)
    return out


class Diagonal:
    """Base class for all diagonal representations."""

    kind = "abstract"

    def __call__(self, x):
        x = np.asarray(x, float)
        return _scalar_or_array(x, self._eval(x))

    def _eval(self, x):
        return self.pieces(x)

    def slope(self, x):
        """Measurable version of the derivative.

        Right slope at interior kinks, left slope at ``x = 1``.
        """
        x = np.asarray(x, float)
        return _scalar_or_array(x, self._slope(x))

    def _slope(self, x):
        return self._dpieces(x)

    @cached_property
    def _dpieces(self):
        return self.pieces.derivative()

    @property
    def pieces(self) -> Pieces | None:
        """The diagonal as a piecewise monomial sum, or None if unavailable."""
        return None

    @property
    def breakpoints(self) -> np.ndarray:
        p = self.pieces
        if p is None:
            return np.empty(0)
        return p.edges[1:-1]

    @property
    def phi0(self) -> float:
        """Limit of delta(x)/x as x -> 0."""
        raise NotImplementedError

    def ratio_derivative(self):
        """Derivative of ``u -> delta(u)/u`` as a callable on (0, 1]."""
        p = self.pieces
        if p is not None:
            return p.shift(-1).derivative()

        def dphi(u):
            u = np.asarray(u, float)
            return (self._slope(u) - self._eval(u) / u) / u
        return dphi

    def integral(self, integrand, lo=0.0, hi=1.0):
        """Integral over ``[lo, hi]`` of ``delta`` ("delta"), ``delta/x``
        ("ratio"), ``x*delta`` ("moment") or ``delta**2/x`` ("square")."""
        p = self.pieces
        if p is not None:
            f = {
                "delta": lambda: p,
                "ratio": lambda: p.shift(-1),
                "moment": lambda: p.shift(1),
                "square": lambda: (p * p).shift(-1),
            }[integrand]()
            return f.integral(lo, hi)
        funcs = {
            "delta": lambda u: self._eval(u),
            "ratio": lambda u: self._eval(u) / u,
            "moment": lambda u: self._eval(u) * u,
            "square": lambda u: self._eval(u) ** 2 / u,
        }
        return gl_integral(funcs[integrand], quad_breaks(self.breakpoints), lo, hi)

    def to_dict(self) -> dict:
        raise NotImplementedError


def _knot_arrays(knots):
    arr = np.array(knots, dtype=float).reshape(-1, 2)
    arr.setflags(write=False)
    return arr[:, 0], arr[:, 1]


@dataclass(frozen=True)
class PiecewiseLinear(Diagonal):
    """Linear interpolation of knots ``(x_i, delta(x_i))``."""

    knots: tuple

    kind = "pwl"

    @cached_property
    def _xy(self):
        return _knot_arrays(self.knots)

    @property
    def x(self):
        return self._xy[0]

    @property
    def y(self):
        return self._xy[1]

    @cached_property
    def segments(self):
        """Per-segment slope ``m`` and intercept ``c`` with delta = m*x + c."""
        x, y = self.x, self.y
        m = np.diff(y) / np.diff(x)
        c = y[:-1] - m * x[:-1]
        # first segment passes through the origin
        c[0] = 0.0
        m[0] = y[1] / x[1]
        return m, c

    @cached_property
    def pieces(self):
        m, c = self.segments
        return Pieces.build(self.x, np.column_stack([m, c]),
                            np.tile([1.0, 0.0], (len(m), 1)))

    def _eval(self, x):
        return np.interp(x, self.x, self.y)

    def _slope(self, x):
        m, _ = self.segments
        j = np.clip(np.searchsorted(self.x, x, side="right") - 1, 0, len(m) - 1)
        return m[j]

    @property
    def breakpoints(self):
        return np.asarray(self.x[1:-1])

    @property
    def phi0(self):
        return float(self.segments[0][0])

    def to_dict(self):
        return {"type": "pwl", "knots": [[float(a), float(b)] for a, b in self.knots]}


@dataclass(frozen=True)
class PiecewiseRatio(Diagonal):
    """delta(x) = x * phi(x) with phi linear between knots ``(x_i, phi_i)``.

    ``phi_0`` at ``x = 0`` is the limit of delta(x)/x at the origin.
    """

    knots: tuple

    kind = "pwl_ratio"

    @cached_property
    def _xp(self):
        return _knot_arrays(self.knots)

    @property
    def x(self):
        return self._xp[0]

    @property
    def phi_values(self):
        return self._xp[1]

    @cached_property
    def pieces(self):
        x, p = self.x, self.phi_values
        b = np.diff(p) / np.diff(x)
        a = p[:-1] - b * x[:-1]
        return Pieces.build(x, np.column_stack([a, b]),
                            np.tile([1.0, 2.0], (len(b), 1)))

    def _eval(self, x):
        return x * np.interp(x, self.x, self.phi_values)

    @property
    def breakpoints(self):
        return np.asarray(self.x[1:-1])

    @property
    def phi0(self):
        return float(self.phi_values[0])

    def to_dict(self):
        return {"type": "pwl_ratio",
                "knots": [[float(a), float(b)] for a, b in self.knots]}


@dataclass(frozen=True)
class LowerL(Diagonal):
    """l_a(x) = a*x for x <= a and x**2 otherwise."""

    a: float

    kind = "l"

    @cached_property
    def pieces(self):
        a = self.a
        if a <= 0.0:
            return Pieces.build([0.0, 1.0], [1.0], [2.0])
        if a >= 1.0:
            return Pieces.build([0.0, 1.0], [1.0], [1.0])
        return Pieces.build([0.0, a, 1.0], [a, 1.0], [1.0, 2.0])

    def _eval(self, x):
        return np.where(x <= self.a, self.a * x, x * x)

    @property
    def phi0(self):
        return float(self.a)

    def to_dict(self):
        return {"type": "l", "a": float(self.a)}


@dataclass(frozen=True)
class UpperU(Diagonal):
    """u_a(x) = x**2/a for x <= a and x otherwise."""

    a: float

    kind = "u"

    @cached_property
    def pieces(self):
        a = self.a
        if a <= 0.0:
            return Pieces.build([0.0, 1.0], [1.0], [1.0])
        if a >= 1.0:
            return Pieces.build([0.0, 1.0], [1.0], [2.0])
        return Pieces.build([0.0, a, 1.0], [1.0 / a, 1.0], [2.0, 1.0])

    def _eval(self, x):
        if self.a <= 0.0:
            return x.copy()
        return np.where(x <= self.a, x * x / self.a, x)

    @property
    def phi0(self):
        return 1.0 if self.a <= 0.0 else 0.0

    def to_dict(self):
        return {"type": "u", "a": float(self.a)}


@dataclass(frozen=True)
class Power(Diagonal):
    """delta(x) = x**p; p = 1 gives the diagonal of M, p = 2 that of Pi."""

    p: float

    kind = "power"

    @cached_property
    def pieces(self):
        return Pieces.build([0.0, 1.0], [1.0], [self.p])

    def _eval(self, x):
        return x ** self.p

    @property
    def phi0(self):
        return 1.0 if self.p == 1.0 else 0.0

    def to_dict(self):
        return {"type": "power", "p": float(self.p)}


def _expm1_ratio(z):
    """(exp(z) - 1)/z with the removable singularity at 0 filled in."""
    z = np.asarray(z, float)
    small = np.abs(z) < 1e-8
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 + 0.5 * z, np.expm1(safe) / safe)


@dataclass(frozen=True)
class MarshallOlkinStar(Diagonal):
    """Diagonal of the star product of M_{beta,alpha} with M_{alpha,beta}.

    Written as ``x**2 * (1 - alpha*beta*L*E(e*L))`` with ``L = log x``,
    ``e = beta*(1 - 2*alpha)/alpha`` and ``E(z) = expm1(z)/z``; this single
    expression covers the generic case, alpha = 1/2 (E = 1) and alpha = 1.
    """

    alpha: float
    beta: float

    kind = "mo"

    @property
    def _is_pi(self):
        return self.alpha == 0.0 or self.beta == 0.0

    def _parts(self, x):
        e = self.beta * (1.0 - 2.0 * self.alpha) / self.alpha
        with np.errstate(divide="ignore", invalid="ignore"):
            L = np.log(x)
            g = self.alpha * self.beta * L * _expm1_ratio(e * L)
        return e, L, g

    def _eval(self, x):
        if self._is_pi:
            return x * x
        pos = x > 0.0
        xs = np.where(pos, x, 1.0)
        _, _, g = self._parts(xs)
        return np.where(pos, xs * xs * (1.0 - g), 0.0)

    def _slope(self, x):
        if self._is_pi:
            return 2.0 * x
        pos = x > 0.0
        xs = np.where(pos, x, 1.0)
        e, L, g = self._parts(xs)
        # d/dx [x^2 (1 - g)] with x g'(x) = alpha*beta*x**e
        ab = self.alpha * self.beta
        val = 2.0 * xs * (1.0 - g) - xs * ab * np.exp(e * L)
        return np.where(pos, val, 0.0)

    @property
    def phi0(self):
        return 1.0 if (self.alpha == 1.0 and self.beta == 1.0) else 0.0

    def to_dict(self):
        return {"type": "mo", "alpha": float(self.alpha), "beta": float(self.beta)}


@dataclass(frozen=True)
class ConvexMix(Diagonal):
    """Pointwise ``weight*left + (1 - weight)*right``."""

    left: Diagonal
    right: Diagonal
    weight: float

    kind = "mix"

    @cached_property
    def pieces(self):
        pl, pr = self.left.pieces, self.right.pieces
        if pl is None or pr is None:
            return None
        return pl.scale(self.weight) + pr.scale(1.0 - self.weight)

    def _eval(self, x):
        w = self.weight
        return w * self.left._eval(x) + (1.0 - w) * self.right._eval(x)

    def _slope(self, x):
        w = self.weight
        return w * self.left._slope(x) + (1.0 - w) * self.right._slope(x)

    @property
    def breakpoints(self):
        return np.union1d(self.left.breakpoints, self.right.breakpoints)

    @property
    def phi0(self):
        w = self.weight
        return w * self.left.phi0 + (1.0 - w) * self.right.phi0

    def to_dict(self):
        return {"type": "mix", "w": float(self.weight),
                "left": self.left.to_dict(), "right": self.right.to_dict()}


DELTA_M = PiecewiseLinear(((0.0, 0.0), (1.0, 1.0)))
DELTA_PI = Power(2.0)


# -- construction -----------------------------------------------------------

def _check_knots(knots):
    try:
        pts = [(float(x), float(y)) for x, y in knots]
    except (TypeError, ValueError) as exc:
        raise MalformedKnots(f"knots must be (x, y) pairs: {exc}") from None
    if len(pts) < 2:
        raise MalformedKnots("need at least two knots")
    if not all(math.isfinite(v) for p in pts for v in p):
        raise MalformedKnots("knots must be finite")
    if pts[0] != (0.0, 0.0):
        raise MalformedKnots(f"first knot must be (0, 0), got {pts[0]}")
    xs = [p[0] for p in pts]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise MalformedKnots("knot abscissae must be strictly increasing")
    return pts


def make_pwl(knots) -> PiecewiseLinear:
    """Piecewise-linear diagonal through ``knots``.

    Only the shape of the knot list is checked; membership in D^LSL is a
    separate question answered by :func:`validate_dlsl`.
    """
    pts = _check_knots(knots)
    if pts[-1] != (1.0, 1.0):
        raise MalformedKnots(f"last knot must be (1, 1), got {pts[-1]}")
    if any(not 0.0 <= y <= 1.0 for _, y in pts):
        raise MalformedKnots("knot ordinates must lie in [0, 1]")
    return PiecewiseLinear(tuple(pts))


def make_ratio(knots) -> PiecewiseRatio:
    """Diagonal with delta(x)/x interpolating knots ``(x_i, phi_i)`` linearly."""
    try:
        pts = [(float(x), float(p)) for x, p in knots]
    except (TypeError, ValueError) as exc:
        raise MalformedKnots(f"knots must be (x, phi) pairs: {exc}") from None
    if len(pts) < 2 or pts[0][0] != 0.0 or pts[-1] != (1.0, 1.0):
        raise MalformedKnots("ratio knots must start at x=0 and end at (1, 1)")
    xs = [p[0] for p in pts]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise MalformedKnots("knot abscissae must be strictly increasing")
    if any(not (math.isfinite(p) and 0.0 <= p <= 1.0) for _, p in pts):
        raise MalformedKnots("ratio values must lie in [0, 1]")
    return PiecewiseRatio(tuple(pts))


def lower_l(a) -> LowerL:
    return LowerL(float(a))


def upper_u(a) -> UpperU:
    return UpperU(float(a))


def power(p) -> Power:
    return Power(float(p))


def mix(d1: Diagonal, d2: Diagonal, w: float) -> Diagonal:
    """Pointwise convex combination ``w*d1 + (1 - w)*d2``.

    Two piecewise-linear inputs give a piecewise-linear result on the union of
    their abscissae (likewise for two ratio-interpolated inputs).
    """
    w = float(w)
    if not 0.0 <= w <= 1.0:
        raise DomainError(f"mixing weight must lie in [0, 1], got {w}")
    if isinstance(d1, PiecewiseLinear) and isinstance(d2, PiecewiseLinear):
        x = np.union1d(d1.x, d2.x)
        y = w * d1(x) + (1.0 - w) * d2(x)
        y[0], y[-1] = 0.0, 1.0
        return snap_pwl(PiecewiseLinear(tuple(zip(x.tolist(), y.tolist()))))
    if isinstance(d1, PiecewiseRatio) and isinstance(d2, PiecewiseRatio):
        x = np.union1d(d1.x, d2.x)
        p = (w * np.interp(x, d1.x, d1.phi_values)
             + (1.0 - w) * np.interp(x, d2.x, d2.phi_values))
        p[-1] = 1.0
        return PiecewiseRatio(tuple(zip(x.tolist(), p.tolist())))
    return ConvexMix(d1, d2, w)


# -- pointwise quantities ---------------------------------------------------

def evaluate(d: Diagonal, x):
    return d(x)


def _positive(x, name):
    arr = np.asarray(x, float)
    if np.any(arr <= 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{name} is defined on (0, 1] only")
    return arr


def w_delta(d: Diagonal, x):
    _positive(x, "w_delta")
    return d.slope(x)


def phi(d: Diagonal, x):
    """delta(x)/x."""
    arr = _positive(x, "phi")
    return _scalar_or_array(arr, d(arr) / arr)


def eta(d: Diagonal, x):
    """delta(x)/x**2."""
    arr = _positive(x, "eta")
    return _scalar_or_array(arr, d(arr) / arr ** 2)


# -- validation -------------------------------------------------------------

class Violation(NamedTuple):
    condition: str
    x: float
    lhs: float
    rhs: float


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple
    tol: float

    @property
    def is_member(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.is_member

    def to_dict(self):
        return {
            "is_member": self.is_member,
            "tol": self.tol,
            "violations": [v._asdict() for v in self.violations],
        }


class _Checker:
    """Collects ``lhs <= rhs`` style checks, exactly or with a tolerance."""

    def __init__(self, tol):
        self.tol = tol
        self.found = []

    def le(self, cond, x, lhs, rhs):
        if self.tol == 0.0:
            ok = lhs <= rhs
        else:
            ok = float(lhs) <= float(rhs) + self.tol
        if not ok:
            self.found.append(Violation(cond, float(x), float(lhs), float(rhs)))


def _validate_pwl(d: PiecewiseLinear, chk: _Checker):
    exact = chk.tol == 0.0
    num = Fraction if exact else float
    xs = [num(v) for v in d.x]
    ys = [num(v) for v in d.y]
    chk.le("endpoint", xs[0], abs(ys[0]), 0)
    chk.le("endpoint", xs[-1], abs(ys[-1] - 1), 0)
    for xi, yi in zip(xs, ys):
        chk.le("below_identity", xi, yi, xi)
        chk.le("range", xi, 0, yi)
    for i in range(len(xs) - 1):
        x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
        m = (y1 - y0) / (x1 - x0)
        c = y0 - m * x0
        chk.le("monotone", x0, 0, m)
        chk.le("lipschitz", x0, m, 2)
        # phi non-decreasing on the segment
        chk.le("phi", x0, c, 0)
        # eta non-increasing: m*x + 2c >= 0 at both ends
        chk.le("eta", x0, 0, m * x0 + 2 * c)
        chk.le("eta", x1, 0, m * x1 + 2 * c)


def _validate_ratio(d: PiecewiseRatio, chk: _Checker):
    exact = chk.tol == 0.0
    num = Fraction if exact else float
    xs = [num(v) for v in d.x]
    ps = [num(v) for v in d.phi_values]
    chk.le("endpoint", xs[-1], abs(ps[-1] - 1), 0)
    for xi, pi in zip(xs, ps):
        chk.le("below_identity", xi, pi, 1)
        chk.le("range", xi, 0, pi)
    for i in range(len(xs) - 1):
        chk.le("phi", xs[i], ps[i], ps[i + 1])
        # intercept of phi's chord must be >= 0 for eta to be non-increasing
        chk.le("eta", xs[i], ps[i + 1] * xs[i], ps[i] * xs[i + 1])


def _validate_dense(d: Diagonal, chk: _Checker, n=20001):
    x = np.linspace(0.0, 1.0, n)[1:]
    y = d(x)
    ph = y / x
    et = y / x ** 2
    tol = max(chk.tol, 1e-12)
    for name, bad in (("phi", np.diff(ph) < -tol),
                      ("eta", np.diff(et) > tol * np.maximum(1.0, et[1:])),
                      ("below_identity", y > x + tol),
                      ("endpoint", np.array([abs(y[-1] - 1.0) > tol]))):
        if bad.any():
            i = int(np.argmax(bad))
            chk.found.append(Violation(name, float(x[min(i + 1, len(x) - 1)]),
                                       float(ph[i]), float(ph[min(i + 1, len(x) - 1)])))


def _validate(d: Diagonal, chk: _Checker):
    if isinstance(d, PiecewiseLinear):
        _validate_pwl(d, chk)
    elif isinstance(d, PiecewiseRatio):
        _validate_ratio(d, chk)
    elif isinstance(d, (LowerL, UpperU)):
        chk.le("param", 0.0, 0.0, d.a)
        chk.le("param", 0.0, d.a, 1.0)
    elif isinstance(d, Power):
        chk.le("param", 0.0, 1.0, d.p)
        chk.le("param", 0.0, d.p, 2.0)
    elif isinstance(d, MarshallOlkinStar):
        for v in (d.alpha, d.beta):
            chk.le("param", 0.0, 0.0, v)
            chk.le("param", 0.0, v, 1.0)
        if not chk.found:
            _validate_dense(d, chk)
    elif isinstance(d, ConvexMix):
        chk.le("param", 0.0, 0.0, d.weight)
        chk.le("param", 0.0, d.weight, 1.0)
        _validate(d.left, chk)
        _validate(d.right, chk)
    else:
        _validate_dense(d, chk)


def default_tol(d: Diagonal) -> float:
    if isinstance(d, (PiecewiseLinear, PiecewiseRatio)):
        return 0.0
    return 1e-12


def validate_dlsl(d: Diagonal, tol: float | None = None) -> ValidationReport:
    """Check membership of ``d`` in D^LSL.

    Piecewise-linear and ratio-interpolated diagonals are checked segment by
    segment; with ``tol = 0`` (their default) the comparisons are carried out
    in exact rational arithmetic on the stored floats.  Parametric families
    are certified by their parameter ranges.
    """
    if tol is None:
        tol = default_tol(d)
    chk = _Checker(float(tol))
    _validate(d, chk)
    return ValidationReport(tuple(chk.found), float(tol))


def dense_check(d: Diagonal, n: int = 10001, tol: float = 1e-12) -> bool:
    """Numerical membership check on a uniform grid (independent of the
    segment algebra used by :func:`validate_dlsl`)."""
    x = np.linspace(0.0, 1.0, n)[1:]
    y = d(x)
    if abs(float(d(0.0))) > tol or abs(y[-1] - 1.0) > tol:
        return False
    ph = y / x
    et = y / x ** 2
    return bool(np.all(np.diff(y) >= -tol)
                and np.all(np.diff(y) <= 2.0 * np.diff(x) + tol)
                and np.all(y <= x + tol)
                and np.all(np.diff(ph) >= -tol)
                and np.all(np.diff(et) <= tol * np.maximum(1.0, et[1:])))


# -- random generation ------------------------------------------------------

def _fix_between(y, lo_num, lo_den, hi_num, hi_den):
    """Move float ``y`` into [lo_num/lo_den, hi_num/hi_den], checked exactly.

    Values outside are first clamped to the rounded bounds, then nudged by
    ulps until the exact comparison holds.
    """
    lo = Fraction(lo_num) / Fraction(lo_den)
    hi = Fraction(hi_num) / Fraction(hi_den)
    y = min(max(y, float(lo)), float(hi))
    for _ in range(64):
        fy = Fraction(y)
        if fy < lo:
            y = math.nextafter(y, math.inf)
        elif fy > hi:
            y = math.nextafter(y, -math.inf)
        else:
            return y
    raise ArithmeticError("could not place knot inside its feasible interval")


def _segment_bounds(x0, x1, y1):
    """Exact feasible interval for y0 given the right end of a segment.

    phi non-decreasing needs y0 <= y1*x0/x1; eta non-increasing (slope at
    most 2*y0/x0) needs y0 >= y1*x0/(2*x1 - x0).  Monotonicity, the
    Lipschitz bound and y <= x follow from these and phi(1) = 1.
    """
    fx0, fx1, fy1 = Fraction(x0), Fraction(x1), Fraction(y1)
    return fy1 * fx0, 2 * fx1 - fx0, fy1 * fx0, fx1


def snap_pwl(d: PiecewiseLinear, max_shift: float = 1e-12) -> PiecewiseLinear:
    """Move knot ordinates by at most ``max_shift`` so that ``d`` passes the
    exact membership check.

    Meant for knots produced by floating-point arithmetic from a valid
    diagonal (interpolation, mixing).  If some knot would have to move
    further, ``d`` is returned unchanged.
    """
    xs = d.x.tolist()
    ys = d.y.tolist()
    out = list(ys)
    out[-1] = 1.0
    for i in range(len(xs) - 2, 0, -1):
        out[i] = _fix_between(ys[i], *_segment_bounds(xs[i], xs[i + 1], out[i + 1]))
        if abs(out[i] - ys[i]) > max_shift:
            return d
    return PiecewiseLinear(tuple(zip(xs, out)))


def random_dlsl(seed: int, n_knots: int) -> PiecewiseLinear:
    """Random piecewise-linear member of D^LSL with ``n_knots`` knots.

    The ratio phi_i = y_i/x_i is drawn backwards from phi = 1 at x = 1; each
    step keeps phi non-decreasing and the segment's eta condition satisfied.
    Every knot is then placed inside its feasible interval in exact arithmetic,
    so the result passes :func:`validate_dlsl` with ``tol = 0``.
    """
    if n_knots < 2:
        raise DomainError("n_knots must be at least 2")
    rng = np.random.default_rng(seed)
    if n_knots == 2:
        return DELTA_M
    while True:
        inner = np.sort(rng.uniform(0.0, 1.0, n_knots - 2))
        xs = np.concatenate([[0.0], inner, [1.0]])
        if np.all(np.diff(xs) > 1e-6):
            break
    xs_l = xs.tolist()
    ys = [0.0] * n_knots
    ys[-1] = 1.0
    for i in range(n_knots - 2, 0, -1):
        x0, x1, y1 = xs_l[i], xs_l[i + 1], ys[i + 1]
        u = rng.uniform()
        # t = 0: flat phi (l_a-like); t = 1: tight eta (u_a-like)
        t = 0.0 if u < 0.1 else 1.0 if u < 0.2 else rng.uniform()
        r = 2.0 - x0 / x1
        phi1 = y1 / x1
        y = x0 * phi1 * r ** (-t)
        # feasible: y1*x0/(2*x1 - x0) <= y <= y1*x0/x1
        ys[i] = _fix_between(y, *_segment_bounds(x0, x1, y1))
    return PiecewiseLinear(tuple(zip(xs_l, ys)))


# -- JSON interchange -------------------------------------------------------

def to_dict(d: Diagonal) -> dict:
    return d.to_dict()


def from_dict(obj: dict) -> Diagonal:
    """Inverse of :func:`to_dict`; raises MalformedKnots on bad input."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise MalformedKnots("diagonal JSON must be an object with a 'type'")
    t = obj["type"]
    try:
        if t == "pwl":
            return make_pwl(obj["knots"])
        if t == "pwl_ratio":
            return make_ratio(obj["knots"])
        if t == "l":
            return LowerL(float(obj["a"]))
        if t == "u":
            return UpperU(float(obj["a"]))
        if t == "power":
            return Power(float(obj["p"]))
        if t == "mo":
            return MarshallOlkinStar(float(obj["alpha"]), float(obj["beta"]))
        if t == "mix":
            return ConvexMix(from_dict(obj["left"]), from_dict(obj["right"]),
                             float(obj["w"]))
    except KeyError as exc:
        raise MalformedKnots(f"missing field {exc} for type {t!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MalformedKnots):
            raise
        raise MalformedKnots(f"bad value for type {t!r}: {exc}") from None
    raise MalformedKnots(f"unknown diagonal type {t!r}")


# -- distances and fits -----------------------------------------------------

def eval_grid(*diagonals: Diagonal, n: int = 4097) -> np.ndarray:
    """Uniform grid merged with every breakpoint of the given diagonals."""
    pts = [np.linspace(0.0, 1.0, n)]
    pts.extend(d.breakpoints for d in diagonals)
    return np.unique(np.concatenate(pts))


def sup_distance(d1: Diagonal, d2: Diagonal, grid=None) -> float:
    if (isinstance(d1, PiecewiseRatio) and isinstance(d2, PiecewiseRatio)
            and d1.x.shape == d2.x.shape and np.array_equal(d1.x, d2.x)):
        return _ratio_sup(d1.x, d1.phi_values - d2.phi_values)
    if grid is None:
        grid = eval_grid(d1, d2)
    return float(np.max(np.abs(d1(grid) - d2(grid))))


def _ratio_sup(x, dphi):
    """Exact sup over [0, 1] of |x * interp(dphi)|: per segment the function
    is a quadratic, so check the ends and the stationary point."""
    best = float(np.max(np.abs(x * dphi)))
    b = np.diff(dphi) / np.diff(x)
    a = dphi[:-1] - b * x[:-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = -a / (2.0 * b)
    inside = (b != 0.0) & (xs > x[:-1]) & (xs < x[1:])
    if inside.any():
        v = xs[inside] * (a[inside] + b[inside] * xs[inside])
        best = max(best, float(np.max(np.abs(v))))
    return best


def fit_family(d: Diagonal, family, grid=None, coarse: int = 201) -> tuple:
    """Best sup-norm fit of ``family(a)`` to ``d`` over a in [0, 1].

    Coarse scan followed by golden-section refinement inside the best
    bracket.  Returns ``(a, residual)``.
    """
    if grid is None:
        grid = eval_grid(d)
    target = d(grid)

    def dist(a):
        return float(np.max(np.abs(family(a)(grid) - target)))

    aa = np.linspace(0.0, 1.0, coarse)
    vals = np.array([dist(a) for a in aa])
    k = int(np.argmin(vals))
    lo, hi = aa[max(k - 1, 0)], aa[min(k + 1, coarse - 1)]
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c, e = hi - g * (hi - lo), lo + g * (hi - lo)
    fc, fe = dist(c), dist(e)
    while hi - lo > 1e-13:
        if fc <= fe:
            hi, e, fe = e, c, fc
            c = hi - g * (hi - lo)
            fc = dist(c)
        else:
            lo, c, fc = c, e, fe
            e = lo + g * (hi - lo)
            fe = dist(e)
    best_a, best_v = min(((lo, dist(lo)), (hi, dist(hi)), (aa[k], vals[k])),
                         key=lambda t: t[1])
    return float(best_a), float(best_v)


# -- the diagonal used to show that LSL copulas need not be SI ---------------

#: Knots as printed; the second one exceeds the identity and two later
#: segments have a slightly decreasing delta(x)/x.
SI_EXAMPLE_PRINTED_KNOTS = (
    (0.0, 0.0), (1 / 8, 7 / 10), (1 / 4, 1 / 5), (3 / 8, 3 / 10), (1 / 2, 23 / 50),
    (5 / 8, 287 / 500), (3 / 4, 73 / 100), (7 / 8, 17 / 20), (1.0, 1.0),
)

#: Same construction with delta(x)/x exactly constant on every second
#: interval: 7/10 is read as the ratio on [0, 1/8] and the right end of the
#: two nearly-flat intervals is placed on the flat line.
SI_EXAMPLE_KNOTS = (
    (0.0, 0.0), (1 / 8, 7 / 80), (1 / 4, 1 / 5), (3 / 8, 3 / 10), (1 / 2, 23 / 50),
    (5 / 8, 23 / 40), (3 / 4, 73 / 100), (7 / 8, 511 / 600), (1.0, 1.0),
)


def si_counterexample() -> PiecewiseLinear:
    """Diagonal whose LSL copula is PQD and LTD but not SI.

    Decimal knots are not exact in binary; they are snapped by a few ulps so
    that delta(x)/x is exactly constant-or-increasing on every interval.
    """
    return snap_pwl(make_pwl(SI_EXAMPLE_KNOTS))
