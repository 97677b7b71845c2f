from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import diagonals
from lslcopula import (
    DELTA_M, DELTA_PI, DegenerateInput, MarshallOlkinStar, blomqvist, footrule, gamma,
    lower_l, midpoint_construct, mix, power, random_dlsl, region_scan, report, rho,
    rho_minus_tau, tau, tau_convexity_gap, upper_u,
)
from lslcopula.concordance import summarize_region, upper_boundary
from lslcopula.diagonal import fit_family, LowerL

A_GRID = [0.0, 0.25, 0.5, 0.75, 1.0]


class TestTauRho:
    @pytest.mark.parametrize("a", A_GRID)
    def test_families(self, a):
        assert tau(lower_l(a)) == pytest.approx(a ** 4, abs=1e-12)
        assert rho(lower_l(a)) == pytest.approx(a ** 4, abs=1e-12)
        assert tau(upper_u(a)) == pytest.approx(1 - a ** 2, abs=1e-12)
        assert rho(upper_u(a)) == pytest.approx(1 - a ** 3, abs=1e-12)

    def test_extremes(self):
        assert tau(DELTA_PI) == pytest.approx(0.0, abs=1e-15)
        assert tau(DELTA_M) == pytest.approx(1.0)
        assert rho(DELTA_PI) == pytest.approx(0.0, abs=1e-15)

    def test_lower_l_three_quarters(self):
        assert rho(lower_l(0.75)) == pytest.approx(0.31640625, abs=1e-14)

    @pytest.mark.parametrize("p", [1.0, 1.25, 1.5, 2.0])
    def test_power(self, p):
        assert tau(power(p)) == pytest.approx(2 / p - 1, abs=1e-14)
        assert rho(power(p)) == pytest.approx(12 / (p + 2) - 3, abs=1e-14)

    def test_frozen_values(self, si_diag, tight):
        # symbolic integration with exact rational knots
        assert tau(si_diag) == pytest.approx(0.72559366684020576483, abs=1e-14)
        assert rho(si_diag) == pytest.approx(0.80203125, abs=1e-14)
        assert tau(tight) == pytest.approx(0.46660849392498290919, abs=1e-14)
        assert rho(tight) == pytest.approx(0.578125, abs=1e-14)

    def test_mo_alpha_one_is_power(self):
        d = MarshallOlkinStar(1.0, 0.4)
        assert tau(d) == pytest.approx(tau(power(1.6)), abs=1e-12)


class TestAppendixMeasures:
    @pytest.mark.parametrize("a", A_GRID)
    def test_footrule_lower_l(self, a):
        assert footrule(lower_l(a)) == pytest.approx(a ** 3, abs=1e-12)

    def test_blomqvist_upper_u(self):
        assert blomqvist(upper_u(0.5)) == 1.0

    def test_gamma_extremes(self):
        assert gamma(DELTA_PI) == pytest.approx(0.0, abs=1e-15)
        assert gamma(DELTA_M) == pytest.approx(1.0, abs=1e-15)

    def test_frozen_values(self, si_diag, tight):
        assert footrule(si_diag) == pytest.approx(0.778125, abs=1e-14)
        assert gamma(si_diag) == pytest.approx(0.79429529614371881416, abs=1e-14)
        assert footrule(tight) == pytest.approx(0.53125, abs=1e-14)
        assert gamma(tight) == pytest.approx(0.55120563888010938117, abs=1e-14)

    def test_gamma_matches_direct_reflection_form(self):
        # integrate the unreflected expression on a fine midpoint grid
        d = random_dlsl(8, 9)
        n = 400_000
        lo = (np.arange(n) + 0.5) / (2 * n)
        hi = 0.5 + lo
        direct = (4 * np.mean(d(lo) + lo * d(1 - lo) / (1 - lo)) / 2
                  + 4 * np.mean(d(hi) / hi) / 2 - 2)
        assert gamma(d) == pytest.approx(direct, abs=1e-9)


class TestReport:
    def test_lower_l_on_lower_boundary(self):
        r = report(lower_l(0.6))
        assert r.tau == pytest.approx(r.rho, abs=1e-14) and r.lower_bound_ok

    def test_upper_u_on_conjectured_boundary(self):
        for a in A_GRID:
            r = report(upper_u(a))
            assert r.rho == pytest.approx(float(upper_boundary(r.tau)), abs=1e-12)

    def test_identity(self):
        r = report(DELTA_M)
        assert (r.tau, r.rho) == pytest.approx((1.0, 1.0))
        assert r.lower_bound_ok and r.upper_conjecture_ok

    def test_keys(self):
        assert list(report(DELTA_PI).to_dict()) == [
            "tau", "rho", "gamma", "footrule", "blomqvist", "sing",
            "lower_bound_ok", "upper_conjecture_ok"]


class TestRegion:
    def test_lower_family_on_diagonal(self):
        pts = region_scan(11, families=("l",))
        assert all(p.tau == pytest.approx(p.rho, abs=1e-14) for p in pts)

    def test_upper_family_on_boundary(self):
        pts = region_scan(11, families=("u",))
        assert all(p.rho == pytest.approx(float(upper_boundary(p.tau)), abs=1e-12)
                   for p in pts)

    def test_random_inside(self):
        pts = region_scan(500, seed=3, families=("random", "mix"))
        s = summarize_region(pts)
        assert s.n == 1000 and s.lower_violations == 0
        assert all(0 <= p.tau <= 1 + 1e-15 and 0 <= p.rho <= 1 + 1e-15 for p in pts)

    def test_deterministic_and_sorted(self):
        a = region_scan(50, seed=1)
        assert a == region_scan(50, seed=1)
        keys = [(p.tau, p.rho) for p in a]
        assert keys == sorted(keys)

    def test_bad_family(self):
        with pytest.raises(ValueError):
            region_scan(3, families=("nope",))


class TestConvexity:
    def test_identity_independence(self):
        gap = tau_convexity_gap(DELTA_M, DELTA_PI, 0.5)
        assert gap == pytest.approx(0.5 - tau(mix(DELTA_M, DELTA_PI, 0.5)), abs=1e-14)
        assert gap > 0

    def test_lower_pair(self):
        gap = tau_convexity_gap(lower_l(0.2), lower_l(0.8), 0.5)
        direct = 0.5 * 0.2 ** 4 + 0.5 * 0.8 ** 4 - tau(mix(lower_l(0.2), lower_l(0.8), 0.5))
        assert gap == pytest.approx(direct, abs=1e-14) and gap > 0

    def test_degenerate(self, tight):
        with pytest.raises(DegenerateInput):
            tau_convexity_gap(tight, tight, 0.3)


class TestMidpoint:
    def test_two_lower_ls(self):
        h = midpoint_construct(lower_l(0.3), lower_l(0.7))
        m = (0.3 ** 4 + 0.7 ** 4) / 2
        assert tau(h) == pytest.approx(m, abs=1e-12)
        assert rho(h) == pytest.approx(m, abs=1e-12)

    def test_equal_rho(self):
        # different diagonals with the same rho: the plain mix is off in tau
        d1 = upper_u(0.5)
        d2 = mix(DELTA_M, lower_l(0.0), 0.875)
        assert rho(d1) == pytest.approx(rho(d2), abs=1e-14)
        h = midpoint_construct(d1, d2)
        assert tau(h) == pytest.approx((tau(d1) + tau(d2)) / 2, abs=1e-9)
        assert rho(h) == pytest.approx(rho(d1), abs=1e-12)

    def test_random_pair(self):
        d1, d2 = random_dlsl(1, 6), random_dlsl(2, 9)
        h = midpoint_construct(d1, d2)
        assert tau(h) == pytest.approx((tau(d1) + tau(d2)) / 2, abs=1e-4)
        assert rho(h) == pytest.approx((rho(d1) + rho(d2)) / 2, abs=1e-4)

    def test_degenerate(self, tight):
        with pytest.raises(DegenerateInput):
            midpoint_construct(tight, tight)


# -- properties -------------------------------------------------------------

@given(diagonals())
def test_measures_in_unit_interval(d):
    for f in (tau, rho, gamma, footrule, blomqvist):
        v = f(d)
        assert -1e-14 <= v <= 1 + 1e-14


@given(diagonals())
def test_rho_minus_tau_identity(d):
    g = rho_minus_tau(d)
    assert g >= 0.0
    assert g == pytest.approx(rho(d) - tau(d), abs=1e-13)


@given(diagonals(), diagonals(), st.floats(0.0, 1.0))
def test_rho_affine(d1, d2, w):
    assert rho(mix(d1, d2, w)) == pytest.approx(w * rho(d1) + (1 - w) * rho(d2), abs=1e-12)


@given(diagonals(), diagonals(), st.floats(0.01, 0.99))
def test_tau_strictly_convex(d1, d2, w):
    from lslcopula.diagonal import sup_distance
    if sup_distance(d1, d2) <= 1e-12:
        return
    assert tau_convexity_gap(d1, d2, w) > 0


def test_equality_only_for_lower_family():
    hits = 0
    for s in range(3000):
        d = random_dlsl(s, 2 + s % 9)
        if rho_minus_tau(d) <= 1e-9:
            hits += 1
            _, res = fit_family(d, LowerL)
            assert res <= 1e-5, s
    assert hits > 0
