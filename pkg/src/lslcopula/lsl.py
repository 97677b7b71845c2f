"""LSL copula surface, Markov kernel, singular mass, sampling and
dependence-property probes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagonal import Diagonal
from .errors import DomainError

DEFAULT_GRID = 257
BISECTION_TOL = 1e-12


def _ratio(d: Diagonal, x):
    """delta(x)/x with 0/0 := 0."""
    x = np.asarray(x, float)
    pos = x > 0.0
    xs = np.where(pos, x, 1.0)
    return np.where(pos, d._eval(xs) / xs, 0.0)


def surface(d: Diagonal, x, y):
    """S_delta(x, y): y*delta(x)/x below the diagonal, x*delta(y)/y above."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    out = lo * _ratio(d, hi)
    return float(out) if out.ndim == 0 else out


def _open_unit(x, name):
    arr = np.asarray(x, float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError(f"{name} requires x in (0, 1)")
    return arr


def _kernel(d: Diagonal, x, y):
    # x in (0, 1] assumed; broadcasting over x and y
    dx = d._eval(x)
    slope = d._slope(x) / x - dx / (x * x)
    return np.where(y < x, y * slope, _ratio(d, y))


def kernel_cdf(d: Diagonal, x, y):
    """K(x, [0, y]): the conditional distribution function of V given U = x.

    Linear on [0, x) with slope ``w(x)/x - delta(x)/x**2``, then
    ``delta(y)/y`` from y = x onwards.
    """
    x = _open_unit(x, "kernel_cdf")
    y = np.asarray(y, float)
    out = _kernel(d, x, y)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ConditionalLaw:
    """Distribution of V given U = x: uniform part on [0, x), one atom at x and
    the tail ``delta(y)/y`` on [x, 1]."""

    x: float
    cdf_left_slope: float
    atom_at_x: float
    diagonal: Diagonal

    def tail_cdf(self, y):
        return _ratio(self.diagonal, y)

    def cdf(self, y):
        y = np.asarray(y, float)
        out = np.where(y < self.x, self.cdf_left_slope * y, _ratio(self.diagonal, y))
        out = np.where(y < 0.0, 0.0, out)
        return float(out) if out.ndim == 0 else out


def conditional_law(d: Diagonal, x: float) -> ConditionalLaw:
    x = float(_open_unit(x, "conditional_law"))
    dx = float(d(x))
    w = float(d.slope(x))
    return ConditionalLaw(x, w / x - dx / x ** 2, 2.0 * dx / x - w, d)


def singular_mass(d: Diagonal) -> float:
    """Mass of the singular component (all of it sits on the main diagonal)."""
    return 2.0 * d.integral("ratio") - 1.0


def absolutely_continuous_mass(d: Diagonal) -> float:
    return 1.0 - singular_mass(d)


# -- sampling ---------------------------------------------------------------

@dataclass(frozen=True)
class SampleBatch:
    points: np.ndarray
    seed: int

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def u(self):
        return self.points[:, 0]

    @property
    def v(self):
        return self.points[:, 1]


def _invert_ratio(d: Diagonal, t, lo, tol=BISECTION_TOL):
    """Smallest y in [lo, 1] with delta(y)/y >= t (vectorised bisection)."""
    a = np.array(lo, float)
    b = np.ones_like(a)
    while True:
        if np.all(b - a <= tol):
            return b
        m = 0.5 * (a + b)
        ok = _ratio(d, m) >= t
        b = np.where(ok, m, b)
        a = np.where(ok, a, m)


def sample(d: Diagonal, n: int, seed: int) -> SampleBatch:
    """Draw ``n`` points from S_delta by the conditional distribution method."""
    rng = np.random.default_rng(seed)
    u = 1.0 - rng.random(n)
    t = rng.random(n)
    du = d._eval(u)
    slope = d._slope(u) / u - du / (u * u)
    ratio_u = du / u
    v = np.empty(n)
    linear = t < slope * u
    atom = ~linear & (t <= ratio_u)
    tail = ~linear & ~atom
    v[linear] = t[linear] / slope[linear]
    v[atom] = u[atom]
    if tail.any():
        v[tail] = _invert_ratio(d, t[tail], u[tail])
    return SampleBatch(np.column_stack([u, v]), int(seed))


# -- dependence probes ------------------------------------------------------

@dataclass(frozen=True)
class PropertyReport:
    name: str
    passed: bool
    worst: float
    at: tuple

    def to_dict(self):
        return {"property": self.name, "passed": self.passed,
                "worst": self.worst, "at": list(self.at)}


def _grid(grid_n):
    return np.linspace(0.0, 1.0, grid_n)


def check_pqd(d: Diagonal, grid_n: int = DEFAULT_GRID, tol: float = 1e-12) -> PropertyReport:
    """S_delta(x, y) >= x*y on the grid."""
    g = _grid(grid_n)
    X, Y = np.meshgrid(g, g, indexing="ij")
    gap = surface(d, X, Y) - X * Y
    k = np.unravel_index(np.argmin(gap), gap.shape)
    worst = float(gap[k])
    return PropertyReport("PQD", worst >= -tol, worst, (float(g[k[0]]), float(g[k[1]])))


def check_ltd(d: Diagonal, grid_n: int = DEFAULT_GRID, tol: float = 1e-12) -> PropertyReport:
    """x -> S_delta(x, y)/x non-increasing for every grid y."""
    g = _grid(grid_n)[1:]
    X, Y = np.meshgrid(g, g, indexing="ij")
    q = surface(d, X, Y) / X
    rise = np.diff(q, axis=0)
    k = np.unravel_index(np.argmax(rise), rise.shape)
    worst = float(rise[k])
    return PropertyReport("LTD", worst <= tol, worst, (float(g[k[0]]), float(g[k[1]])))


@dataclass(frozen=True)
class SIProfile:
    """x -> K(x, [0, y]) on a grid, with the stretches where it increases."""

    y: float
    x: np.ndarray
    k: np.ndarray
    increasing: list

    @property
    def is_non_increasing(self) -> bool:
        return not self.increasing


def si_profile(d: Diagonal, y: float, grid_n: int = DEFAULT_GRID,
               tol: float = 1e-12) -> SIProfile:
    """Stochastic-increasingness probe at level ``y``.

    An SI copula has x -> K(x, [0, y]) non-increasing for every y; each grid
    interval on which the profile rises by more than ``tol`` is reported as
    ``(x_left, x_right)``.
    """
    y = float(y)
    if not 0.0 < y < 1.0:
        raise DomainError("si_profile requires y in (0, 1)")
    x = _grid(grid_n)[1:-1]
    k = _kernel(d, x, np.full_like(x, y))
    up = np.flatnonzero(np.diff(k) > tol)
    return SIProfile(y, x, k, [(float(x[i]), float(x[i + 1])) for i in up])
