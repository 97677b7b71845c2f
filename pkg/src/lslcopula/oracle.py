"""Brute-force reference computations.

Nothing here uses the closed-form integrals of the other modules; only the
copula surface and the Markov kernel are evaluated, on midpoint grids.  The
functions are meant for tests and spot checks, not for production numbers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagonal import Diagonal
from .errors import ResolutionMismatch
from .lsl import _kernel, _ratio, surface


def _midpoints(n):
    return (np.arange(n) + 0.5) / n


def rho_quadrature(d: Diagonal, n: int = 2000) -> float:
    """12 * mean of S over an n x n midpoint grid - 3."""
    g = _midpoints(n)
    r = _ratio(d, g)
    # S(x, y) = min * phi(max); sum row by row to keep memory at O(n)
    total = 0.0
    for i in range(n):
        lo = np.minimum(g[i], g)
        total += float(np.sum(lo * r[np.where(g > g[i], np.arange(n), i)]))
    return 12.0 * total / n ** 2 - 3.0


def _cells(d: Diagonal, n):
    """Midpoints and widths of the uniform n-partition refined by d's
    breakpoints, so that no cell straddles a kink of delta."""
    edges = np.union1d(np.linspace(0.0, 1.0, n + 1), d.breakpoints)
    edges = edges[(edges >= 0.0) & (edges <= 1.0)]
    return 0.5 * (edges[:-1] + edges[1:]), np.diff(edges)


def tau_quadrature(d: Diagonal, n: int = 2000) -> float:
    """1 - 4 * midpoint double sum of K(x, [0, y]) K(y, [0, x]).

    Off the diagonal the integrand is y*phi'(x)*phi(x) for y < x (and the
    mirror image above).  phi' jumps at the knots of delta, so the cell edges
    include them; on the diagonal cells both one-sided limits agree and the
    atom of the kernel is not counted.
    """
    g, w = _cells(d, n)
    K = _kernel(d, g[:, None], g[None, :])
    prod = K * K.T
    dg = d._eval(g)
    slope = d._slope(g) / g - dg / g ** 2
    # y*phi'(x)*phi(x) at y = x
    np.fill_diagonal(prod, slope * dg)
    return 1.0 - 4.0 * float(w @ prod @ w)


def star_kernel_quadrature(d1: Diagonal, d2: Diagonal, x: float, y: float,
                           n: int = 10_000) -> float:
    """int_0^1 K1(s, [0, x]) K2(s, [0, y]) ds by the midpoint rule.

    LSL copulas are symmetric, so the transposed kernel is the kernel itself.
    """
    s = _midpoints(n)
    k1 = _kernel(d1, s, np.full_like(s, x))
    k2 = _kernel(d2, s, np.full_like(s, y))
    return float(np.mean(k1 * k2))


@dataclass(frozen=True)
class Checkerboard:
    """Cell masses of a copula on the uniform n x n partition."""

    n: int
    mass: np.ndarray

    def surface_at_nodes(self):
        """Copula values on the (n+1) x (n+1) node grid."""
        c = np.zeros((self.n + 1, self.n + 1))
        c[1:, 1:] = self.mass.cumsum(axis=0).cumsum(axis=1)
        return c

    def diagonal_at_nodes(self):
        return np.diag(self.surface_at_nodes())


def checkerboard(d: Diagonal, n: int) -> Checkerboard:
    g = np.linspace(0.0, 1.0, n + 1)
    S = surface(d, g[:, None], g[None, :])
    mass = S[1:, 1:] - S[:-1, 1:] - S[1:, :-1] + S[:-1, :-1]
    return Checkerboard(n, mass)


def checkerboard_compose(A: Checkerboard, B: Checkerboard) -> Checkerboard:
    """Matrix analogue of the star product: n * (A @ B) on the cell masses."""
    if A.n != B.n:
        raise ResolutionMismatch(f"cannot compose resolutions {A.n} and {B.n}")
    return Checkerboard(A.n, A.n * (A.mass @ B.mass))
