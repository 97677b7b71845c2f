"""Concordance measures of LSL copulas, bound checks, (tau, rho)-region
scanning and the midpoint construction behind convexity of the region."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._pieces import Pieces, gl_integral, quad_breaks
from .diagonal import (
    Diagonal,
    lower_l,
    mix,
    random_dlsl,
    sup_distance,
    upper_u,
)
from .errors import DegenerateInput, SearchFailure
from .lsl import singular_mass

FLAG_TOL = 1e-12


def tau(d: Diagonal) -> float:
    """Kendall's tau: 4 * int delta(x)**2/x dx - 1."""
    return 4.0 * d.integral("square") - 1.0


def rho(d: Diagonal) -> float:
    """Spearman's rho: 12 * int x*delta(x) dx - 3."""
    return 12.0 * d.integral("moment") - 3.0


def rho_minus_tau(d: Diagonal) -> float:
    """rho - tau as 4 * int (delta(x) - x**2) * x * phi'(x) dx.

    The integrand is non-negative for every member of D^LSL, so unlike the
    difference of the two separately computed measures this form keeps its
    sign under roundoff (each piece is clipped at zero).
    """
    p = d.pieces
    if p is not None:
        excess = p + Pieces.build([0.0, 1.0], [-1.0], [2.0])
        f = (excess * d.ratio_derivative()).shift(1)
        return 4.0 * float(np.sum(np.maximum(f.piece_integrals(), 0.0)))
    dphi = d.ratio_derivative()
    edges = quad_breaks(d.breakpoints)
    return 4.0 * max(gl_integral(
        lambda u: (d._eval(u) - u * u) * u * dphi(u), edges), 0.0)


def footrule(d: Diagonal) -> float:
    """Spearman's footrule: 6 * int delta - 2.

    Written as 1 - 6 * int (x - delta) with the non-negative integrand
    clipped per piece, which is exact wherever delta(x) = x.
    """
    p = d.pieces
    if p is None:
        return 6.0 * d.integral("delta") - 2.0
    gap = Pieces.build([0.0, 1.0], [1.0], [1.0]) + p.scale(-1.0)
    return 1.0 - 6.0 * float(np.sum(np.maximum(gap.piece_integrals(), 0.0)))


def blomqvist(d: Diagonal) -> float:
    """Blomqvist's beta: 4 * delta(1/2) - 1."""
    return 4.0 * float(d(0.5)) - 1.0


def gamma(d: Diagonal) -> float:
    """Gini's gamma.

    The reflected term x*delta(1-x)/(1-x) on [0, 1/2] is moved to [1/2, 1]
    by t = 1 - x, which leaves integrals of delta and delta/x only.
    """
    lo = d.integral("delta", 0.0, 0.5)
    hi = d.integral("delta", 0.5, 1.0)
    r = d.integral("ratio", 0.5, 1.0)
    return 4.0 * lo - 4.0 * hi + 8.0 * r - 2.0


def upper_boundary(t):
    """Conjectured upper boundary rho = 1 - (1 - tau)**(3/2) of the region."""
    # tau may exceed 1 by an ulp for delta_M-like inputs
    return 1.0 - np.maximum(1.0 - np.asarray(t, float), 0.0) ** 1.5


@dataclass(frozen=True)
class ConcordanceReport:
    tau: float
    rho: float
    gamma: float
    footrule: float
    blomqvist: float
    sing: float
    lower_bound_ok: bool
    upper_conjecture_ok: bool

    def to_dict(self):
        return {
            "tau": self.tau, "rho": self.rho, "gamma": self.gamma,
            "footrule": self.footrule, "blomqvist": self.blomqvist,
            "sing": self.sing, "lower_bound_ok": self.lower_bound_ok,
            "upper_conjecture_ok": self.upper_conjecture_ok,
        }


def report(d: Diagonal) -> ConcordanceReport:
    """All measures plus the tau <= rho check and the conjectured upper bound
    (a flag only; the bound is not proven)."""
    t, r = tau(d), rho(d)
    return ConcordanceReport(
        tau=t, rho=r, gamma=gamma(d), footrule=footrule(d),
        blomqvist=blomqvist(d), sing=singular_mass(d),
        lower_bound_ok=bool(t <= r + FLAG_TOL),
        upper_conjecture_ok=bool(r <= float(upper_boundary(t)) + FLAG_TOL),
    )


# -- region scan ------------------------------------------------------------

@dataclass(frozen=True)
class RegionPoint:
    tau: float
    rho: float
    source: str


FAMILIES = ("random", "l", "u", "mix")


def _scan_one(family, i, n, child):
    if family == "l":
        a = i / (n - 1) if n > 1 else 0.5
        return lower_l(a), f"l(a={a:.17g})"
    if family == "u":
        a = i / (n - 1) if n > 1 else 0.5
        return upper_u(a), f"u(a={a:.17g})"
    rng = np.random.default_rng(child)
    if family == "random":
        k = int(rng.integers(2, 21))
        s = int(rng.integers(2 ** 63))
        return random_dlsl(s, k), f"random(seed={s},knots={k})"
    s1, s2 = (int(v) for v in rng.integers(2 ** 63, size=2))
    k1, k2 = (int(v) for v in rng.integers(2, 21, size=2))
    w = float(rng.uniform())
    d = mix(random_dlsl(s1, k1), random_dlsl(s2, k2), w)
    return d, f"mix(seed={s1}/{s2},knots={k1}/{k2},w={w:.17g})"


def region_scan(n: int, seed: int = 0, families=("random",)) -> list:
    """(tau, rho) points of ``n`` diagonals per requested family.

    Random draws use one child seed per index, so results do not depend on
    evaluation order.  Output is sorted by tau, then rho.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    families = tuple(families)
    bad = set(families) - set(FAMILIES)
    if bad:
        raise ValueError(f"unknown families {sorted(bad)}; choose from {FAMILIES}")
    pts = []
    for fi, fam in enumerate(families):
        children = np.random.SeedSequence([seed, fi]).spawn(n)
        for i in range(n):
            d, src = _scan_one(fam, i, n, children[i])
            pts.append(RegionPoint(tau(d), rho(d), src))
    pts.sort(key=lambda p: (p.tau, p.rho))
    return pts


@dataclass(frozen=True)
class RegionSummary:
    n: int
    lower_violations: int
    upper_violations: int
    max_upper_excess: float

    @property
    def upper_violation_fraction(self):
        return self.upper_violations / self.n if self.n else 0.0


def summarize_region(points) -> RegionSummary:
    t = np.array([p.tau for p in points])
    r = np.array([p.rho for p in points])
    excess = r - upper_boundary(t)
    return RegionSummary(len(points), int(np.sum(t > r + FLAG_TOL)),
                         int(np.sum(excess > FLAG_TOL)),
                         float(excess.max()) if len(points) else 0.0)


# -- convexity --------------------------------------------------------------

def _distinct(d1, d2, tol=1e-12):
    if sup_distance(d1, d2) <= tol:
        raise DegenerateInput("the two diagonals coincide within tolerance")


def tau_convexity_gap(d1: Diagonal, d2: Diagonal, w: float) -> float:
    """w*tau(d1) + (1-w)*tau(d2) - tau(w*d1 + (1-w)*d2); positive for
    distinct inputs because tau is strictly convex along mixtures."""
    w = float(w)
    if not 0.0 < w < 1.0:
        raise ValueError("w must lie in (0, 1)")
    _distinct(d1, d2)
    # the gap equals 4*w*(1-w)*int (d1 - d2)**2/x, which avoids cancellation
    p1, p2 = d1.pieces, d2.pieces
    if p1 is not None and p2 is not None:
        diff = p1 + p2.scale(-1.0)
        return 4.0 * w * (1.0 - w) * (diff * diff).shift(-1).integral()
    return w * tau(d1) + (1.0 - w) * tau(d2) - tau(mix(d1, d2, w))


def _bisect(f, lo, hi, tol=1e-10):
    flo = f(lo)
    while hi - lo > tol:
        m = 0.5 * (lo + hi)
        fm = f(m)
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = m, fm
        else:
            hi = m
    return 0.5 * (lo + hi)


def midpoint_construct(d1: Diagonal, d2: Diagonal) -> Diagonal:
    """Diagonal whose (tau, rho) is the midpoint of the inputs' pairs.

    Candidates are h(alpha, a) = (1 - alpha)*d3 + alpha*l_a with
    d3 = (d1 + d2)/2.  Since rho is affine along mixtures and rho(d3) is
    already the target, a is pinned by rho(l_a) = a**4 = rho target; along
    that curve tau rises from tau(d3), which is below the target by strict
    convexity, to tau(l_a) = rho target, which is at or above it.  The crossing
    is located by bisection in alpha.
    """
    _distinct(d1, d2)
    t1, r1, t2, r2 = tau(d1), rho(d1), tau(d2), rho(d2)
    tm, rm = 0.5 * (t1 + t2), 0.5 * (r1 + r2)
    d3 = mix(d1, d2, 0.5)
    rm = min(max(rm, 0.0), 1.0)
    a = rm ** 0.25
    la = lower_l(a)
    if tm >= rm - FLAG_TOL:
        # both inputs sit on the lower boundary: the answer is l_a itself
        return la

    def f(alpha):
        return tau(mix(la, d3, alpha)) - tm

    f0, f1 = f(0.0), f(1.0)
    if f0 >= 0.0:
        return d3
    if f1 < 0.0:
        raise SearchFailure(
            f"no crossing on [0, 1]: tau ranges over [{f0 + tm:.6g}, {f1 + tm:.6g}] "
            f"for a={a:.6g}, target tau={tm:.6g}")
    alpha = _bisect(f, 0.0, 1.0)
    return mix(la, d3, alpha)
