"""Star (Markov) product of LSL diagonals, iteration to idempotent limits and
the diagonal obtained from two Marshall-Olkin copulas.

For diagonals d1, d2 in D^LSL

    (d1 * d2)(x) = d1(x) d2(x) / x + x**2 * int_x^1 phi1'(u) phi2'(u) du

with phi_i(u) = d_i(u)/u.  When both inputs are piecewise monomial sums the
integral is evaluated in closed form; otherwise a Gauss-Legendre rule on a
partition refined geometrically towards 0 is used.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from ._pieces import gl_integral_from, quad_breaks
from .diagonal import (
    Diagonal,
    MarshallOlkinStar,
    PiecewiseRatio,
    Power,
    UpperU,
    fit_family,
    sup_distance,
    validate_dlsl,
)
from .errors import DomainError, InvalidInput, NoConvergence

log = logging.getLogger(__name__)

STAR_GRID = 513
ITER_GRID = 1025
ITER_TOL = 1e-8
ITER_MAX = 200


def _require_valid(*ds):
    for d in ds:
        rep = validate_dlsl(d)
        if not rep.is_member:
            v = rep.violations[0]
            raise InvalidInput(f"{d.kind} diagonal is not in D^LSL: {v.condition} "
                               f"fails at x={v.x:.6g} ({v.lhs:.6g} vs {v.rhs:.6g})")


def _tail_integral(d1: Diagonal, d2: Diagonal) -> Callable:
    """x -> int_x^1 phi1' phi2' du, vectorised."""
    p1, p2 = d1.pieces, d2.pieces
    if p1 is not None and p2 is not None:
        prod = d1.ratio_derivative() * d2.ratio_derivative()
        return prod.integral_from
    f1, f2 = d1.ratio_derivative(), d2.ratio_derivative()
    edges = quad_breaks(d1.breakpoints, d2.breakpoints)
    return lambda x: gl_integral_from(lambda u: f1(u) * f2(u), x, edges)


def _star_values(d1, d2, x, tail=None):
    if tail is None:
        tail = _tail_integral(d1, d2)
    x = np.asarray(x, float)
    pos = x > 0.0
    xs = np.where(pos, x, 1.0)
    val = d1._eval(xs) * d2._eval(xs) / xs + xs * xs * tail(xs)
    return np.where(pos, val, 0.0)


def star_eval(d1: Diagonal, d2: Diagonal, x):
    """Exact value of (d1 * d2)(x); no validation, no projection."""
    out = _star_values(d1, d2, x)
    return float(out) if np.ndim(out) == 0 else out


def star_surface(d1: Diagonal, d2: Diagonal, x, y, check: bool = True):
    """(S_d1 * S_d2)(x, y) from the two-branch closed formula."""
    if check:
        _require_valid(d1, d2)
    tail = _tail_integral(d1, d2)
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    hi = np.maximum(x, y)
    lo = np.minimum(x, y)
    pos = hi > 0.0
    h = np.where(pos, hi, 1.0)
    val = lo / (h * h) * d1._eval(h) * d2._eval(h) + h * lo * tail(h)
    out = np.where(pos, val, 0.0)
    return float(out) if out.ndim == 0 else out


# -- projection -------------------------------------------------------------

def _repair_ratio(x, p):
    """Restore the ratio-form membership constraints broken by roundoff.

    Walk down from phi(1) = 1 and move each value into
    ``[phi_{i+1} x_i / x_{i+1}, phi_{i+1}]`` using exact rational checks.
    Returns the repaired values and the largest change.
    """
    p = p.copy()
    p[-1] = 1.0
    orig = p.copy()
    for i in range(len(p) - 2, -1, -1):
        lo = Fraction(p[i + 1]) * Fraction(x[i]) / Fraction(x[i + 1])
        hi = Fraction(p[i + 1])
        v = float(p[i])
        if v > float(hi):
            v = float(hi)
        if v < float(lo):
            v = float(lo)
        fv = Fraction(v)
        while fv > hi:
            v = math.nextafter(v, -math.inf)
            fv = Fraction(v)
        while fv < lo:
            v = math.nextafter(v, math.inf)
            fv = Fraction(v)
        p[i] = v
    return p, float(np.max(np.abs(p - orig)))


def _ratio_needs_repair(x, p):
    if p[-1] != 1.0 or p[0] < 0.0:
        return True
    # float prefilter, exact check only near the boundary of the cone
    mono = np.diff(p)
    eta = p[:-1] * x[1:] - p[1:] * x[:-1]
    if np.any(mono < 0.0) or np.any(eta < 0.0):
        return True
    near = np.flatnonzero((mono < 1e-13) | (eta < 1e-13))
    for i in near:
        if Fraction(p[i]) > Fraction(p[i + 1]):
            return True
        if Fraction(p[i]) * Fraction(x[i + 1]) < Fraction(p[i + 1]) * Fraction(x[i]):
            return True
    return False


def project_ratio(x, values, phi0):
    """PiecewiseRatio through ``(x_i, values_i/x_i)``; x must start at 0 and
    end at 1.  Returns the diagonal and the size of any repair."""
    x = np.asarray(x, float)
    p = np.empty_like(x)
    p[0] = phi0
    p[1:] = values[1:] / x[1:]
    repair = 0.0
    if _ratio_needs_repair(x, p):
        p, repair = _repair_ratio(x, p)
        if repair > 0.0:
            log.debug("ratio projection repaired by %.3g", repair)
    return PiecewiseRatio(tuple(zip(x.tolist(), p.tolist()))), repair


def _interp_bound(x, p):
    """Bound on sup |delta - P(delta)| for the ratio interpolation.

    On [x_i, x_{i+1}] phi is monotone and phi' <= eta(x_i) = phi_i/x_i, so the
    interpolation error of phi is at most min(phi_{i+1} - phi_i,
    phi_i h_i / (2 x_i)); multiply by x_{i+1} for delta.
    """
    h = np.diff(x)
    dp = np.abs(np.diff(p))
    with np.errstate(divide="ignore", invalid="ignore"):
        lip = np.where(x[:-1] > 0.0, p[:-1] * h / (2.0 * x[:-1]), np.inf)
    return float(np.max(x[1:] * np.minimum(dp, lip)))


def _grid(grid_n, *ds):
    pts = [np.linspace(0.0, 1.0, grid_n)] + [d.breakpoints for d in ds]
    return np.unique(np.concatenate(pts))


@dataclass(frozen=True)
class StarResult:
    """Star product: projected diagonal, exact evaluator and error bound."""

    product: PiecewiseRatio
    exact_eval: Callable = field(repr=False)
    projection_error_bound: float
    repair: float = 0.0

    def to_dict(self):
        return {"product": self.product.to_dict(),
                "projection_error_bound": self.projection_error_bound}


def _star_result(d1, d2, grid_n):
    tail = _tail_integral(d1, d2)
    x = _grid(grid_n, d1, d2)
    vals = _star_values(d1, d2, x, tail)
    prod, repair = project_ratio(x, vals, d1.phi0 * d2.phi0)

    def exact(t):
        out = _star_values(d1, d2, t, tail)
        return float(out) if np.ndim(out) == 0 else out

    bound = _interp_bound(prod.x, prod.phi_values) + repair + 1e-15
    return StarResult(prod, exact, bound, repair)


def star(d1: Diagonal, d2: Diagonal, grid_n: int = STAR_GRID) -> StarResult:
    """Star product of two members of D^LSL.

    ``exact_eval`` evaluates the product formula directly.  ``product``
    interpolates delta/x linearly at the union of a uniform grid of
    ``grid_n`` points and both inputs' breakpoints, which keeps it inside
    D^LSL; ``projection_error_bound`` bounds the sup-norm gap between the two.
    """
    _require_valid(d1, d2)
    return _star_result(d1, d2, grid_n)


# -- idempotents and iteration ---------------------------------------------

@dataclass(frozen=True)
class IdempotenceCheck:
    idempotent: bool
    fitted_a: float | None
    star_residual: float
    fit_residual: float

    def __iter__(self):
        yield self.idempotent
        yield self.fitted_a


def _check_points(d: Diagonal, n=2049):
    g = np.linspace(0.0, 1.0, n)
    bp = d.breakpoints
    mids = 0.5 * (bp[:-1] + bp[1:]) if len(bp) > 1 else np.empty(0)
    return np.unique(np.concatenate([g, bp, mids]))


def is_idempotent(d: Diagonal, tol: float = 1e-10) -> IdempotenceCheck:
    """Whether d * d = d in sup-norm within ``tol``.

    Idempotent members of D^LSL are exactly the u_a, so on success a is
    fitted by minimising the sup-norm distance to u_a; the fit residual must
    be within ``tol`` as well.
    """
    x = _check_points(d)
    res = float(np.max(np.abs(_star_values(d, d, x) - d._eval(x))))
    a, fit = fit_family(d, UpperU, grid=x)
    ok = res <= tol and fit <= tol
    return IdempotenceCheck(ok, a if ok else None, res, fit)


@dataclass
class IterationTrace:
    iterates: list
    sup_deltas: list
    limit: Diagonal
    fitted_a: float | None
    converged: bool
    idempotence: IdempotenceCheck | None = None

    @property
    def n_iter(self) -> int:
        return len(self.sup_deltas)


def iterate_star(d: Diagonal, tol: float = ITER_TOL, max_iter: int = ITER_MAX,
                 grid_n: int = ITER_GRID, keep_iterates: bool = True,
                 scheme: str = "squaring") -> IterationTrace:
    """Star powers of ``d`` until successive iterates are within ``tol`` in
    sup-norm.

    With ``scheme="squaring"`` (default) each step squares the current
    iterate, so step k holds the power d^{*2^k}; ``scheme="linear"`` walks
    d, d*d, d*d*d, ... one factor at a time.  Both visit the same
    non-increasing sequence, but the linear walk needs on the order of
    1/(1 - phi(0+)) steps for diagonals close to the identity.

    Emits a :class:`NoConvergence` warning (and returns the partial trace)
    when ``max_iter`` is reached first.
    """
    if scheme not in ("squaring", "linear"):
        raise ValueError(f"unknown scheme {scheme!r}")
    _require_valid(d)
    iterates = [d]
    deltas = []
    cur: Diagonal = d
    converged = False
    for _ in range(max_iter):
        other = cur if scheme == "squaring" else d
        nxt = _star_result(cur, other, grid_n).product
        deltas.append(sup_distance(nxt, cur))
        if keep_iterates:
            iterates.append(nxt)
        else:
            iterates[-1:] = [nxt]
        cur = nxt
        if deltas[-1] < tol:
            converged = True
            break
    if not converged:
        warnings.warn(NoConvergence(
            f"star iteration did not reach tol={tol:g} in {max_iter} steps "
            f"(last step {deltas[-1]:.3g})"), stacklevel=2)
        return IterationTrace(iterates, deltas, cur, None, False)
    chk = is_idempotent(cur, 10.0 * tol)
    return IterationTrace(iterates, deltas, cur, chk.fitted_a, True, chk)


# -- Marshall-Olkin ---------------------------------------------------------

def mo_star_diagonal(alpha: float, beta: float) -> Diagonal:
    """Diagonal of M_{beta,alpha} * M_{alpha,beta} for Marshall-Olkin copulas.

    alpha = 0 (or beta = 0) gives the independence diagonal and alpha = 1 the
    power x**(2 - beta); both are returned in closed power form.
    """
    alpha, beta = float(alpha), float(beta)
    if not (0.0 <= alpha <= 1.0 and 0.0 <= beta <= 1.0):
        raise DomainError("alpha and beta must lie in [0, 1]")
    if alpha == 0.0 or beta == 0.0:
        return Power(2.0)
    if alpha == 1.0:
        return Power(2.0 - beta)
    return MarshallOlkinStar(alpha, beta)
