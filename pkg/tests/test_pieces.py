from __future__ import annotations

import numpy as np
import pytest
from scipy import integrate

from lslcopula._pieces import Pieces, gl_integral, mono_int, quad_breaks


def test_mono_int_matches_power_rule():
    assert mono_int(3.0, 2.0, 0.0, 1.0) == pytest.approx(1.0)
    assert mono_int(1.0, -1.0, 0.5, 1.0) == pytest.approx(np.log(2.0))
    # non-integrable power with zero coefficient contributes nothing
    assert mono_int(0.0, -3.0, 0.0, 1.0) == 0.0


def test_mono_int_small_interval_no_cancellation():
    a, h = 0.7, 1e-9
    got = mono_int(1.0, -4.0, a, a + h)
    assert got == pytest.approx(h / a ** 4, rel=1e-6)


def test_pieces_integral_against_scipy():
    p = Pieces.build([0.0, 0.3, 1.0], [[2.0, 1.0], [0.5, -0.1]], [[1.0, 3.0], [0.5, -1.0]])
    ref = integrate.quad(lambda u: float(p(u)), 0.0, 1.0, points=[0.3])[0]
    assert p.integral() == pytest.approx(ref, abs=1e-12)
    xs = np.array([0.0, 0.1, 0.3, 0.65, 1.0])
    ref_from = [integrate.quad(lambda u: float(p(u)), t, 1.0, points=[0.3])[0] for t in xs]
    np.testing.assert_allclose(p.integral_from(xs), ref_from, atol=1e-12)


def test_product_and_derivative():
    a = Pieces.build([0.0, 0.5, 1.0], [[1.0], [2.0]], [[1.0], [2.0]])
    b = Pieces.build([0.0, 0.25, 1.0], [[3.0], [1.0]], [[0.0], [1.0]])
    x = np.linspace(0.01, 0.99, 37)
    np.testing.assert_allclose((a * b)(x), a(x) * b(x), rtol=1e-14)
    np.testing.assert_allclose((a + b)(x), a(x) + b(x), rtol=1e-14)
    np.testing.assert_allclose(a.derivative()(x), np.where(x < 0.5, 1.0, 4.0 * x))


def test_gauss_legendre_on_geometric_partition():
    f = lambda u: u ** 0.3 * np.log(u) ** 2
    ref = integrate.quad(f, 0.0, 1.0)[0]
    assert gl_integral(f, quad_breaks()) == pytest.approx(ref, rel=1e-10)
