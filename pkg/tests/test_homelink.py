import math

import numpy as np
import pytest
from scipy import integrate

from mmshare import (
    HomeLinkDistribution,
    LinkType,
    exclusion_radius,
    normalized_power_moments,
    sample_home_links,
)


@pytest.fixture(scope="module")
def dist(channel):
    return HomeLinkDistribution(channel, primary_user_density=30e-6)


class TestNormalization:
    def test_node_mass(self, dist):
        assert abs(dist.total_mass() - 1.0) < 1e-6

    def test_quadrature_mass(self, dist):
        total = 0.0
        for t in LinkType:
            val, _ = integrate.quad(
                lambda r: dist.pdf(r, t), 0.0, dist.support_radius, limit=300
            )
            total += val
        assert abs(total - 1.0) < 1e-6

    def test_unit_expectation(self, dist):
        assert dist.expect_power(lambda x: np.ones_like(x)) == pytest.approx(1.0, abs=1e-6)


class TestPdfFormula:
    def test_direct_reconstruction(self, dist, channel):
        # independent evaluation: density of the nearest same-type user times
        # the void probability of the other type's exclusion disk
        lam = dist.primary_user_density
        for t in LinkType:
            for r in (20.0, 75.0, 150.0):
                expo = 0.0
                for other in LinkType:
                    e = exclusion_radius(channel, t, other, r)
                    vol, _ = integrate.quad(
                        lambda u: channel.p_type(other, u) * u, 0.0, e
                    )
                    expo += 2.0 * math.pi * vol
                expected = (
                    2.0 * math.pi * lam * channel.p_type(t, r) * r * math.exp(-lam * expo)
                )
                assert dist.pdf(r, t) == pytest.approx(expected, rel=1e-9)

    def test_dense_limit_concentrates_and_goes_los(self, channel):
        sparse = HomeLinkDistribution(channel, 10e-6)
        dense = HomeLinkDistribution(channel, 5000e-6)
        mean_r = lambda d: d.expect(lambda r, t: r)
        assert mean_r(dense) < mean_r(sparse) / 5.0
        los_mass = lambda d: d.expect(
            lambda r, t: np.ones_like(r) if t is LinkType.LOS else np.zeros_like(r)
        )
        assert los_mass(dense) > 0.95


class TestMoments:
    def test_equal_parameter_mean_square_distance(self, equal_channel):
        # with one exponent the winner is the nearest user of a PPP, whose
        # squared distance is exponential with rate pi*lambda
        lam = 40e-6
        d = HomeLinkDistribution(equal_channel, lam)
        alpha = equal_channel.alpha[LinkType.LOS]
        c = equal_channel.near_gain[LinkType.LOS]
        val = d.expect_power(lambda x: x ** (2.0 / alpha)) * c ** (2.0 / alpha)
        assert val == pytest.approx(1.0 / (math.pi * lam), rel=1e-9)

    def test_node_vs_adaptive_quadrature(self, dist):
        for f in (lambda x: x, lambda x: x**0.6, lambda x: np.log1p(x)):
            fast = dist.expect_power(f)
            slow = dist.expect_power_quad(f)
            assert fast == pytest.approx(slow, rel=1e-7)

    def test_module_level_alias(self, dist):
        assert normalized_power_moments(dist, lambda x: x) == pytest.approx(
            dist.mean_normalized_power(), rel=1e-14
        )

    def test_matches_monte_carlo_mean(self, channel):
        lam = 30e-6
        d = HomeLinkDistribution(channel, lam)
        r, is_los = sample_home_links(channel, lam, 4000, seed=9)
        a_l, a_n = channel.alpha[LinkType.LOS], channel.alpha[LinkType.NLOS]
        c_l, c_n = channel.near_gain[LinkType.LOS], channel.near_gain[LinkType.NLOS]
        xbar = np.where(is_los, r**a_l / c_l, r**a_n / c_n)
        f = lambda x: x ** 0.5
        samples = f(xbar)
        se = samples.std(ddof=1) / math.sqrt(samples.size)
        assert abs(samples.mean() - d.expect_power(f)) < 3.0 * se


class TestAgainstSampler:
    def test_subdistribution_ks(self, channel):
        lam = 30e-6
        d = HomeLinkDistribution(channel, lam)
        n = 4000
        r, is_los = sample_home_links(channel, lam, n, seed=21)
        worst = 0.0
        for t, mask in ((LinkType.LOS, is_los), (LinkType.NLOS, ~is_los)):
            grid, cdf = d.subdistribution(t)
            analytic = np.interp(np.sort(r[mask]), grid, cdf)
            below = np.arange(0, mask.sum()) / n
            above = np.arange(1, mask.sum() + 1) / n
            emp_gap = np.maximum(np.abs(analytic - below), np.abs(analytic - above))
            worst = max(worst, float(emp_gap.max()))
        # KS fluctuation at n=4000 is ~0.02; allow a conservative margin
        assert worst < 0.035

    def test_sampler_is_deterministic(self, channel):
        r1, t1 = sample_home_links(channel, 30e-6, 50, seed=3)
        r2, t2 = sample_home_links(channel, 30e-6, 50, seed=3)
        assert np.array_equal(r1, r2) and np.array_equal(t1, t2)

    def test_sampler_respects_support(self, channel):
        d = HomeLinkDistribution(channel, 30e-6)
        r, _ = sample_home_links(channel, 30e-6, 200, seed=4)
        assert np.all(r <= d.support_radius)
        assert np.all(r > 0)


class TestValidation:
    def test_density_positive(self, channel):
        with pytest.raises(ValueError):
            HomeLinkDistribution(channel, 0.0)

    def test_negative_distance(self, dist):
        with pytest.raises(ValueError):
            dist.pdf(-1.0, LinkType.LOS)
