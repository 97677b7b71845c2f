"""Piecewise sums of monomials on [0, 1] with closed-form integration.

A :class:`Pieces` object represents

    f(u) = sum_t coef[j, t] * u ** power[j, t]     for u in [edges[j], edges[j+1])

Every diagonal family used in the package except the Marshall-Olkin one is of
this form, as are the derived integrands (delta/x, delta*x, delta**2/x and the
derivative of delta/x).  Products, sums and integrals stay inside the class, so
all concordance integrals and the star-product integral are evaluated exactly
up to floating-point roundoff.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)
# Geometric breaks towards 0 keep Gauss-Legendre accurate for x**p type
# behaviour near the origin.
_GEOMETRIC_BREAKS = 2.0 ** -np.arange(1, 60)


def mono_int(coef, power, lo, hi):
    """Elementwise ``coef * integral_lo^hi u**power du`` (broadcasting).

    Terms with a zero coefficient contribute exactly zero, even where the
    monomial itself would not be integrable.
    """
    coef, power, lo, hi = np.broadcast_arrays(
        np.asarray(coef, float), np.asarray(power, float),
        np.asarray(lo, float), np.asarray(hi, float))
    out = np.zeros(coef.shape)
    live = (coef != 0.0) & (hi > lo)
    if not live.any():
        return out
    c, q1, a, b = coef[live], power[live] + 1.0, lo[live], hi[live]
    res = np.empty(c.shape)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        at_zero = a == 0.0
        # lower limit 0: only integrable powers reach this branch
        res[at_zero] = b[at_zero] ** q1[at_zero] / q1[at_zero]
        pos = ~at_zero
        ap, bp, qp = a[pos], b[pos], q1[pos]
        logr = np.log1p((bp - ap) / ap)
        is_log = np.abs(qp) < 1e-14
        safe_q = np.where(is_log, 1.0, qp)
        generic = ap ** qp * np.expm1(qp * logr) / safe_q
        res[pos] = np.where(is_log, logr, generic)
    out[live] = c * res
    return out


def _piece_index(edges, x):
    """Index of the piece containing ``x``; right-continuous, last piece at 1."""
    idx = np.searchsorted(edges, x, side="right") - 1
    return np.clip(idx, 0, len(edges) - 2)


@dataclass(frozen=True)
class Pieces:
    edges: np.ndarray
    coef: np.ndarray
    power: np.ndarray

    @classmethod
    def build(cls, edges, coef, power):
        edges = np.asarray(edges, float)
        coef = np.asarray(coef, float).reshape(len(edges) - 1, -1)
        power = np.asarray(power, float).reshape(len(edges) - 1, -1)
        keep = np.diff(edges) > 0.0
        if not keep.all():
            edges = np.concatenate([edges[:-1][keep], edges[-1:]])
            coef, power = coef[keep], power[keep]
        return cls(edges, coef, power)

    @property
    def n_pieces(self):
        return len(self.edges) - 1

    def on(self, edges):
        """Re-express on a finer partition ``edges`` (a superset of ours)."""
        mids = 0.5 * (edges[:-1] + edges[1:])
        j = _piece_index(self.edges, mids)
        return Pieces(edges, self.coef[j], self.power[j])

    def __add__(self, other):
        edges = np.union1d(self.edges, other.edges)
        a, b = self.on(edges), other.on(edges)
        return Pieces(edges, np.hstack([a.coef, b.coef]),
                      np.hstack([a.power, b.power]))

    def scale(self, k):
        return Pieces(self.edges, self.coef * k, self.power)

    def shift(self, dp):
        """Multiply by ``u ** dp``."""
        return Pieces(self.edges, self.coef, self.power + dp)

    def __mul__(self, other):
        edges = np.union1d(self.edges, other.edges)
        a, b = self.on(edges), other.on(edges)
        coef = (a.coef[:, :, None] * b.coef[:, None, :]).reshape(len(edges) - 1, -1)
        power = (a.power[:, :, None] + b.power[:, None, :]).reshape(len(edges) - 1, -1)
        return Pieces(edges, coef, power)

    def derivative(self):
        return Pieces(self.edges, self.coef * self.power, self.power - 1.0)

    def __call__(self, x):
        x = np.asarray(x, float)
        j = _piece_index(self.edges, x)
        c, p = self.coef[j], self.power[j]
        xe = x[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(c == 0.0, 0.0, c * xe ** p)
        return vals.sum(axis=-1)

    def piece_integrals(self):
        lo = self.edges[:-1, None]
        hi = self.edges[1:, None]
        return mono_int(self.coef, self.power, lo, hi).sum(axis=1)

    def integral(self, lo=0.0, hi=1.0):
        """Integral over ``[lo, hi]`` (clipped to the partition)."""
        a = np.clip(self.edges[:-1], lo, hi)[:, None]
        b = np.clip(self.edges[1:], lo, hi)[:, None]
        return float(mono_int(self.coef, self.power, a, b).sum())

    def integral_from(self, x):
        """Vectorised ``integral_x^1 f(u) du``."""
        x = np.asarray(x, float)
        full = self.piece_integrals()
        suffix = np.concatenate([np.cumsum(full[::-1])[::-1], [0.0]])
        j = _piece_index(self.edges, x)
        part = mono_int(self.coef[j], self.power[j], x[..., None],
                        self.edges[j + 1][..., None]).sum(axis=-1)
        return part + suffix[j + 1]


def quad_breaks(*breaks):
    """Partition of [0, 1] from the given breakpoints plus geometric refinement."""
    pts = [np.array([0.0, 1.0]), _GEOMETRIC_BREAKS]
    pts.extend(np.asarray(b, float) for b in breaks)
    e = np.unique(np.concatenate(pts))
    return e[(e >= 0.0) & (e <= 1.0)]


def gl_integral(f, edges, lo=0.0, hi=1.0):
    """Gauss-Legendre integral of ``f`` over ``[lo, hi]`` on a given partition."""
    a = np.clip(edges[:-1], lo, hi)
    b = np.clip(edges[1:], lo, hi)
    keep = b > a
    a, b = a[keep], b[keep]
    half = 0.5 * (b - a)
    u = (0.5 * (a + b))[:, None] + half[:, None] * _GL_NODES[None, :]
    return float(np.sum(half[:, None] * _GL_WEIGHTS[None, :] * f(u)))


def gl_integral_from(f, x, edges):
    """Vectorised Gauss-Legendre ``integral_x^1 f`` on a given partition."""
    x = np.asarray(x, float)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    u = (0.5 * (a + b))[:, None] + half[:, None] * _GL_NODES[None, :]
    full = np.sum(half[:, None] * _GL_WEIGHTS[None, :] * f(u), axis=1)
    suffix = np.concatenate([np.cumsum(full[::-1])[::-1], [0.0]])
    j = _piece_index(edges, x)
    end = edges[j + 1]
    h = 0.5 * (end - x)
    up = (0.5 * (x + end))[..., None] + h[..., None] * _GL_NODES
    part = np.sum(h[..., None] * _GL_WEIGHTS * f(up), axis=-1)
    return part + suffix[j + 1]
