import math
from dataclasses import replace

import numpy as np
import pytest

from mmshare import (
    AntennaPattern,
    ChannelModel,
    FixedPower,
    LinkType,
    Realization,
    associate_and_power,
    empirical_coverage,
    pathloss,
    sample_realization,
    sinr_samples,
    typical_user_sinr,
    uncoordinated_mode,
    HomeLinkDistribution,
)
from mmshare.montecarlo import substream
from conftest import make_scenario


@pytest.fixture(scope="module")
def mc_scenario(channel):
    return make_scenario(channel, seed=5, n_realizations=200, window=600.0)


class TestSampling:
    def test_poisson_counts(self, channel):
        sc = make_scenario(channel, seed=8, window=600.0)
        counts = [
            sample_realization(sc, i).primary_bs.shape[0] for i in range(1000)
        ]
        expected = sc.primary.bs_density * math.pi * sc.window_radius**2
        se = math.sqrt(expected / 1000.0)
        assert abs(np.mean(counts) - expected) < 3.0 * se

    def test_same_seed_bit_identical(self, mc_scenario):
        a = sample_realization(mc_scenario, 17)
        b = sample_realization(mc_scenario, 17)
        assert np.array_equal(a.primary_bs, b.primary_bs)
        assert np.array_equal(a.fade_sb_s, b.fade_sb_s)
        assert np.array_equal(a.los_home, b.los_home)

    def test_distinct_streams_differ(self, mc_scenario):
        a = sample_realization(mc_scenario, 0)
        b = sample_realization(mc_scenario, 1)
        assert a.primary_bs.shape != b.primary_bs.shape or not np.array_equal(
            a.primary_bs, b.primary_bs
        )

    def test_los_fraction_near_decay_length(self, channel):
        sc = make_scenario(channel, seed=12, window=600.0)
        hits, total = 0, 0
        for i in range(400):
            real = sample_realization(sc, i)
            d = np.hypot(real.primary_bs[:, 0], real.primary_bs[:, 1])
            band = (d > 140.0) & (d < 160.0)
            hits += int(real.los_pb_p[band].sum())
            total += int(band.sum())
        frac = hits / total
        se = math.sqrt(frac * (1 - frac) / total)
        assert abs(frac - math.exp(-1.0)) < max(3.0 * se, 0.02)

    def test_interferer_gain_mixture(self, channel):
        pattern = AntennaPattern.sectored(math.pi / 4, 6.0)
        sc = make_scenario(channel, seed=3, pattern_p=pattern, window=600.0)
        main, total = 0, 0
        for i in range(300):
            real = sample_realization(sc, i)
            gains = pattern.gain(real.angle_pb_p)
            main += int((gains == pattern.main_gain).sum())
            total += gains.size
        frac = main / total
        se = math.sqrt(frac * (1 - frac) / total)
        assert abs(frac - pattern.main_prob) < 3.0 * se


class TestAssociation:
    def test_cap_inversion_exact(self, channel, mc_scenario):
        xi = mc_scenario.interference_cap
        for i in range(20):
            real = associate_and_power(sample_realization(mc_scenario, i), mc_scenario)
            for j in range(real.secondary_bs.shape[0]):
                t = LinkType.LOS if real.home_is_los[j] else LinkType.NLOS
                assert pathloss(channel, t, real.home_distance[j]) * real.tx_power[
                    j
                ] == pytest.approx(xi, rel=1e-12)

    def test_single_user_wins_all(self, channel, mc_scenario):
        real = sample_realization(mc_scenario, 4)
        real.primary_users = np.array([[50.0, -20.0]])
        real.los_home = real.los_home[:, :1]
        associate_and_power(real, mc_scenario)
        assert np.all(real.home_index == 0)

    def test_home_law_matches_analytic(self, channel):
        sc = make_scenario(channel, seed=31, window=900.0)
        dist = HomeLinkDistribution(channel, sc.primary.user_density)
        rs, los = [], []
        for i in range(250):
            real = associate_and_power(sample_realization(sc, i), sc)
            keep = np.hypot(real.secondary_bs[:, 0], real.secondary_bs[:, 1]) < 450.0
            rs.append(real.home_distance[keep])
            los.append(real.home_is_los[keep])
        rs = np.concatenate(rs)
        los = np.concatenate(los)
        n = rs.size
        worst = 0.0
        for t, mask in ((LinkType.LOS, los), (LinkType.NLOS, ~los)):
            grid, cdf = dist.subdistribution(t)
            srt = np.sort(rs[mask])
            analytic = np.interp(srt, grid, cdf)
            emp_hi = np.arange(1, mask.sum() + 1) / n
            emp_lo = np.arange(0, mask.sum()) / n
            worst = max(
                worst,
                float(np.max(np.abs(analytic - emp_hi))),
                float(np.max(np.abs(analytic - emp_lo))),
            )
        assert worst < 0.05

    def test_requires_primary_users(self, mc_scenario):
        real = sample_realization(mc_scenario, 0)
        real.primary_users = np.empty((0, 2))
        real.los_home = real.los_home[:, :0]
        with pytest.raises(ValueError):
            associate_and_power(real, mc_scenario)


class TestSinr:
    def test_infinite_sentinel_without_noise_or_interferers(self, channel):
        sc = make_scenario(channel, noise=0.0)
        real = sample_realization(sc, 0)
        real.primary_bs = np.array([[30.0, 0.0]])
        real.los_pb_p = np.array([True])
        real.fade_pb_p = np.array([1.0])
        real.angle_pb_p = np.array([0.0])
        real.secondary_bs = np.empty((0, 2))
        real.los_sb_p = np.empty(0, dtype=bool)
        real.fade_sb_p = np.empty(0)
        real.angle_sb_p = np.empty(0)
        real.los_home = np.empty((0, real.primary_users.shape[0]), dtype=bool)
        associate_and_power(real, sc)
        assert typical_user_sinr(real, sc, "primary") == math.inf

    def test_single_tier_sir_distribution(self):
        # all links unblocked, one exponent, omnidirectional: the coverage
        # has the known closed form 1/(1 + sqrt(tau) * arctan(sqrt(tau)))
        ch = ChannelModel(
            beta=150.0,
            alpha={LinkType.LOS: 4.0, LinkType.NLOS: 4.0},
            near_gain={LinkType.LOS: 1e-6, LinkType.NLOS: 1e-6},
            los_prob=lambda r: np.ones_like(np.asarray(r, dtype=float)),
        )
        sc = make_scenario(
            ch,
            lam_p=50e-6,
            lam_s=1e-30,
            noise=0.0,
            pattern_p=AntennaPattern.omni(),
            pattern_s=AntennaPattern.omni(),
            window=800.0,
            seed=23,
        )
        sinr = []
        for i in range(3000):
            real = associate_and_power(sample_realization(sc, i), sc)
            if real.primary_bs.shape[0] == 0:
                continue
            sinr.append(typical_user_sinr(real, sc, "primary"))
        sinr = np.array(sinr)
        for tau in (0.25, 1.0, 4.0):
            mc = float((sinr > tau).mean())
            closed = 1.0 / (1.0 + math.sqrt(tau) * math.atan(math.sqrt(tau)))
            ci = 1.96 * math.sqrt(mc * (1 - mc) / sinr.size)
            assert abs(mc - closed) < ci + 0.015

    def test_serving_bs_excluded_from_interference(self, channel, mc_scenario):
        real = associate_and_power(sample_realization(mc_scenario, 9), mc_scenario)
        # with exactly one primary BS the own-tier interference must vanish
        real.primary_bs = real.primary_bs[:1]
        for name in ("los_pb_p", "fade_pb_p", "angle_pb_p"):
            setattr(real, name, getattr(real, name)[:1])
        real.secondary_bs = np.empty((0, 2))
        real.los_sb_p = np.empty(0, dtype=bool)
        real.fade_sb_p = np.empty(0)
        real.angle_sb_p = np.empty(0)
        real.aug_power = np.empty(0)
        sc = replace(mc_scenario)
        sinr = typical_user_sinr(real, sc, "primary")
        d = float(np.hypot(real.primary_bs[0, 0], real.primary_bs[0, 1]))
        t = LinkType.LOS if real.los_pb_p[0] else LinkType.NLOS
        expected = (
            sc.primary.antenna.main_gain
            * real.fade_pb_p[0]
            * 10.0
            * pathloss(sc.channel, t, d)
            / sc.primary.noise_power
        )
        assert sinr == pytest.approx(expected, rel=1e-12)


class TestCoverageCurves:
    def test_threshold_zero_limit_and_monotone(self, channel):
        sc = make_scenario(channel, seed=2, n_realizations=300)
        taus = 10 ** (np.arange(-30.0, 31.0, 5.0) / 10.0)
        cp, cs, diag = empirical_coverage(sc, taus)
        for curve in (cp, cs):
            assert np.all(np.diff(curve.values) <= 0)
            assert curve.values[0] > 0.97
        assert diag.rejection_fraction < 0.001

    def test_determinism_across_thread_counts(self, channel):
        sc = make_scenario(channel, seed=4, n_realizations=40)
        sp1, ss1, _ = sinr_samples(sc, threads=1)
        sp2, ss2, _ = sinr_samples(sc, threads=2)
        assert np.array_equal(sp1, sp2)
        assert np.array_equal(ss1, ss2)

    def test_unsorted_thresholds_rejected(self, channel):
        sc = make_scenario(channel, n_realizations=2)
        with pytest.raises(ValueError):
            empirical_coverage(sc, np.array([1.0, 0.5]))

    def test_rejections_counted(self, channel):
        # user density tuned so an empty-user window happens often
        lam_empty = math.log(2.0) / (math.pi * 600.0**2)
        sc = make_scenario(
            channel, lam_pu=lam_empty, seed=6, n_realizations=30, window=600.0
        )
        _, _, diag = sinr_samples(sc)
        assert diag.rejected_no_primary_user > 0
        assert diag.n_realizations == 30


class TestWindowConvergence:
    def test_doubling_window_changes_little(self, channel):
        # coupled comparison: the small-window run reuses the large window's
        # draws restricted to the inner disk, so the difference isolates the
        # truncation effect
        big = make_scenario(channel, seed=14, window=1500.0)
        small_radius = 750.0
        taus = np.array([0.1, 1.0, 10.0])
        n = 1500
        cov_big = np.zeros(3)
        cov_small = np.zeros(3)
        kept = 0
        for i in range(n):
            real = sample_realization(big, i)
            if (
                real.primary_users.shape[0] == 0
                or real.primary_bs.shape[0] == 0
                or real.secondary_bs.shape[0] == 0
            ):
                continue
            associate_and_power(real, big)
            s_big = (
                typical_user_sinr(real, big, "primary"),
                typical_user_sinr(real, big, "secondary"),
            )
            shrunk = _restrict(real, small_radius)
            if (
                shrunk.primary_users.shape[0] == 0
                or shrunk.primary_bs.shape[0] == 0
                or shrunk.secondary_bs.shape[0] == 0
            ):
                continue
            associate_and_power(shrunk, big)
            s_small = (
                typical_user_sinr(shrunk, big, "primary"),
                typical_user_sinr(shrunk, big, "secondary"),
            )
            kept += 1
            cov_big += 0.5 * ((s_big[0] > taus) + (s_big[1] > taus))
            cov_small += 0.5 * ((s_small[0] > taus) + (s_small[1] > taus))
        gap = np.max(np.abs(cov_big - cov_small)) / kept
        assert gap < 0.005


def _restrict(real: Realization, radius: float) -> Realization:
    """Drop all points beyond ``radius`` while keeping the surviving links'
    draws, coupling the two window sizes sample-by-sample."""
    mask_pb = np.hypot(real.primary_bs[:, 0], real.primary_bs[:, 1]) <= radius
    mask_sb = np.hypot(real.secondary_bs[:, 0], real.secondary_bs[:, 1]) <= radius
    mask_pu = np.hypot(real.primary_users[:, 0], real.primary_users[:, 1]) <= radius
    mask_su = np.hypot(real.secondary_users[:, 0], real.secondary_users[:, 1]) <= radius
    return Realization(
        primary_bs=real.primary_bs[mask_pb],
        secondary_bs=real.secondary_bs[mask_sb],
        primary_users=real.primary_users[mask_pu],
        secondary_users=real.secondary_users[mask_su],
        los_pb_p=real.los_pb_p[mask_pb],
        los_sb_p=real.los_sb_p[mask_sb],
        fade_pb_p=real.fade_pb_p[mask_pb],
        fade_sb_p=real.fade_sb_p[mask_sb],
        angle_pb_p=real.angle_pb_p[mask_pb],
        angle_sb_p=real.angle_sb_p[mask_sb],
        los_pb_s=real.los_pb_s[mask_pb],
        los_sb_s=real.los_sb_s[mask_sb],
        fade_pb_s=real.fade_pb_s[mask_pb],
        fade_sb_s=real.fade_sb_s[mask_sb],
        angle_pb_s=real.angle_pb_s[mask_pb],
        angle_sb_s=real.angle_sb_s[mask_sb],
        los_home=real.los_home[np.ix_(mask_sb, mask_pu)],
    )


class TestUncoordinatedMode:
    def test_matched_power_equals_sample_mean(self, channel):
        sc = make_scenario(channel, seed=19)
        unc = uncoordinated_mode(sc)
        matched = unc.secondary.power_rule.watts
        powers = []
        for i in range(300):
            real = sample_realization(sc, i)
            if real.primary_users.shape[0] == 0 or real.secondary_bs.shape[0] == 0:
                continue
            associate_and_power(real, sc)
            keep = (
                np.hypot(real.secondary_bs[:, 0], real.secondary_bs[:, 1])
                < sc.window_radius / 2
            )
            powers.append(real.tx_power[keep])
        powers = np.concatenate(powers)
        se = powers.std(ddof=1) / math.sqrt(powers.size)
        # home powers within one realization are correlated; allow for an
        # effective sample size several times smaller than the raw count
        assert abs(powers.mean() - matched) < 3.0 * se * 3.0

    def test_cap_enters_only_through_matched_power(self, channel):
        a = uncoordinated_mode(make_scenario(channel, xi=1e-12))
        b = uncoordinated_mode(make_scenario(channel, xi=2e-12))
        assert b.secondary.power_rule.watts == pytest.approx(
            2.0 * a.secondary.power_rule.watts, rel=1e-12
        )
        assert isinstance(a.secondary.power_rule, FixedPower)

    def test_already_uncoordinated_rejected(self, channel):
        sc = uncoordinated_mode(make_scenario(channel))
        with pytest.raises(ValueError):
            uncoordinated_mode(sc)


class TestSubstreams:
    def test_attempt_budget(self):
        with pytest.raises(RuntimeError):
            substream(1, 0, attempt=64)

    def test_distinct_attempts_differ(self):
        g1 = substream(1, 5, 0).random(4)
        g2 = substream(1, 5, 1).random(4)
        assert not np.array_equal(g1, g2)
