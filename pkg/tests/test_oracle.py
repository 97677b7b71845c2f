from __future__ import annotations

import numpy as np
import pytest

from lslcopula import (
    DELTA_M, DELTA_PI, MarshallOlkinStar, lower_l, power, random_dlsl, rho,
    star_surface, surface, tau, upper_u,
)
from lslcopula.errors import ResolutionMismatch
from lslcopula.oracle import (
    checkerboard, checkerboard_compose, rho_quadrature, star_kernel_quadrature,
    tau_quadrature,
)
from lslcopula.star import star_eval


class TestRhoQuadrature:
    def test_independence(self):
        assert rho_quadrature(DELTA_PI, 500) == pytest.approx(0.0, abs=1e-4)

    def test_upper_u(self):
        assert rho_quadrature(upper_u(0.5), 2000) == pytest.approx(0.875, abs=1e-3)

    def test_lower_l(self):
        assert rho_quadrature(lower_l(0.5), 2000) == pytest.approx(0.0625, abs=1e-3)


class TestTauQuadrature:
    def test_identity(self):
        assert tau_quadrature(DELTA_M, 2000) == pytest.approx(1.0, abs=2e-3)

    def test_lower_l(self):
        assert tau_quadrature(lower_l(0.5), 2000) == pytest.approx(0.0625, abs=2e-3)

    def test_power(self):
        assert tau_quadrature(power(1.5), 2000) == pytest.approx(1 / 3, abs=2e-3)


def _order(f, d, exact, ns=(64, 128, 256)):
    e = [abs(f(d, n) - exact) for n in ns]
    return np.log2(e[0] / e[1]), np.log2(e[1] / e[2])


@pytest.mark.parametrize("d", [upper_u(0.3), power(1.5), lower_l(0.375)])
def test_rho_order(d):
    assert min(_order(rho_quadrature, d, rho(d))) >= 1.8


@pytest.mark.parametrize("d", [power(1.5), power(1.8), MarshallOlkinStar(0.3, 0.6)])
def test_tau_order(d):
    assert min(_order(tau_quadrature, d, tau(d))) >= 1.8


class TestStarKernel:
    def test_unit(self):
        d = random_dlsl(4, 7)
        for x, y in [(0.2, 0.7), (0.5, 0.5), (0.9, 0.1)]:
            assert star_kernel_quadrature(DELTA_M, d, x, y) == pytest.approx(
                surface(d, x, y), abs=1e-3)

    def test_null(self):
        d = random_dlsl(5, 7)
        for x, y in [(0.2, 0.7), (0.5, 0.5), (0.9, 0.1)]:
            assert star_kernel_quadrature(DELTA_PI, d, x, y) == pytest.approx(x * y, abs=1e-3)

    def test_lower_l(self):
        assert star_kernel_quadrature(lower_l(0.5), lower_l(0.5), 0.25, 0.25) == \
            pytest.approx(0.09375, abs=1e-3)

    def test_agrees_with_closed_form(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            d1 = random_dlsl(int(rng.integers(1 << 30)), int(rng.integers(2, 12)))
            d2 = random_dlsl(int(rng.integers(1 << 30)), int(rng.integers(2, 12)))
            x, y = rng.random(2)
            assert star_kernel_quadrature(d1, d2, x, y) == pytest.approx(
                star_surface(d1, d2, x, y), abs=5e-3)


class TestCheckerboard:
    def test_independence_uniform(self):
        cb = checkerboard(DELTA_PI, 16)
        np.testing.assert_allclose(cb.mass, 1 / 256, atol=1e-16)

    def test_identity_unit(self):
        n = 32
        B = checkerboard(random_dlsl(2, 6), n)
        C = checkerboard_compose(checkerboard(DELTA_M, n), B)
        np.testing.assert_allclose(C.mass, B.mass, atol=1e-16)

    def test_lower_l_square(self):
        cb = checkerboard(lower_l(0.5), 256)
        diag = checkerboard_compose(cb, cb).diagonal_at_nodes()
        g = np.linspace(0, 1, 257)
        assert np.max(np.abs(diag - star_eval(lower_l(0.5), lower_l(0.5), g))) <= 5e-3

    def test_random_pair_against_star(self):
        d1, d2 = random_dlsl(31, 8), random_dlsl(32, 5)
        n = 256
        diag = checkerboard_compose(checkerboard(d1, n), checkerboard(d2, n)).diagonal_at_nodes()
        g = np.linspace(0, 1, n + 1)
        assert np.max(np.abs(diag - star_eval(d1, d2, g))) <= 5e-3

    @pytest.mark.parametrize("seed", range(5))
    def test_doubly_stochastic(self, seed):
        cb = checkerboard(random_dlsl(seed, 10), 257)
        np.testing.assert_allclose(cb.mass.sum(axis=0), 1 / 257, atol=1e-12)
        np.testing.assert_allclose(cb.mass.sum(axis=1), 1 / 257, atol=1e-12)
        assert cb.mass.min() >= -1e-12

    def test_resolution_mismatch(self):
        with pytest.raises(ResolutionMismatch):
            checkerboard_compose(checkerboard(DELTA_M, 4), checkerboard(DELTA_M, 5))
