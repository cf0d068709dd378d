import math

import numpy as np
import pytest
from scipy import integrate

from mmshare import (
    AntennaPattern,
    ChannelModel,
    LinkType,
    antenna_gain,
    exclusion_radius,
    los_probability,
    normalized_tx_power,
    pathloss,
    secondary_tx_power,
    ula_pattern,
)
from mmshare.geometry import TWO_PI


class TestLosProbability:
    def test_zero_distance(self, channel):
        assert los_probability(channel, 0.0) == 1.0

    def test_decay_length(self, channel):
        # exp(-150/150) = e^-1
        assert los_probability(channel, 150.0) == pytest.approx(math.exp(-1.0), rel=1e-14)

    def test_far_limit(self, channel):
        assert los_probability(channel, 1e6) < 1e-100

    def test_negative_distance_rejected(self, channel):
        with pytest.raises(ValueError):
            los_probability(channel, -1.0)

    def test_monotone_and_complementary(self, channel):
        r = np.linspace(0.0, 2000.0, 200)
        p = los_probability(channel, r)
        assert np.all(np.diff(p) <= 0)
        assert np.allclose(p + channel.p_type(LinkType.NLOS, r), 1.0, atol=1e-15)

    def test_pluggable_blockage(self):
        ch = ChannelModel(
            beta=150.0,
            alpha={LinkType.LOS: 2.5, LinkType.NLOS: 3.5},
            near_gain={LinkType.LOS: 1e-6, LinkType.NLOS: 1e-6},
            los_prob=lambda r: np.full_like(np.asarray(r, dtype=float), 0.25),
        )
        assert los_probability(ch, 123.0) == 0.25


class TestPathloss:
    def test_near_gain_at_one_meter(self, channel):
        assert pathloss(channel, LinkType.LOS, 1.0) == pytest.approx(1e-6, rel=1e-15)

    def test_inverse_square(self):
        ch = ChannelModel(
            beta=150.0,
            alpha={LinkType.LOS: 2.0001, LinkType.NLOS: 2.0001},
            near_gain={LinkType.LOS: 1.0, LinkType.NLOS: 1.0},
        )
        # alpha must exceed 2; an inverse-square check with alpha -> 2
        assert pathloss(ch, LinkType.LOS, 10.0) == pytest.approx(0.01, rel=1e-3)

    def test_nlos_value(self, channel):
        # 1e-6 * 100^-3.5 = 1e-13
        assert pathloss(channel, LinkType.NLOS, 100.0) == pytest.approx(1e-13, rel=1e-12)

    def test_zero_distance_singular(self, channel):
        with pytest.raises(ValueError):
            pathloss(channel, LinkType.LOS, 0.0)

    def test_strictly_decreasing(self, channel):
        r = np.linspace(1.0, 500.0, 100)
        for t in LinkType:
            assert np.all(np.diff(pathloss(channel, t, r)) < 0)


class TestAntennaPattern:
    def test_omni_normalization(self):
        omni = AntennaPattern.omni()
        theta = np.linspace(-math.pi, math.pi, 33)
        assert np.all(antenna_gain(omni, theta) == 1.0)

    def test_derived_side_gain_zero(self):
        # main gain 10 over a 2*pi/10 beam exhausts the power budget
        pat = AntennaPattern.sectored(math.pi / 5, 10.0)
        assert pat.side_gain == pytest.approx(0.0, abs=1e-12)
        assert antenna_gain(pat, math.pi / 2) == 0.0

    def test_power_conservation_enforced(self):
        with pytest.raises(ValueError):
            AntennaPattern(main_gain=10.0, side_gain=1.0, beamwidth=math.pi / 6)

    def test_gain_budget_grid(self):
        for bw in (math.pi / 12, math.pi / 6, math.pi, TWO_PI / 1.5):
            cap = TWO_PI / bw
            for g1 in (1.0, 0.5 * (1.0 + cap), cap):
                pat = AntennaPattern.sectored(bw, g1)
                budget = (
                    pat.main_gain * pat.beamwidth
                    + pat.side_gain * (TWO_PI - pat.beamwidth)
                ) / TWO_PI
                assert abs(budget - 1.0) <= 1e-12

    def test_angle_wrapping(self):
        pat = AntennaPattern.sectored(math.pi / 3, 3.0)
        # 2*pi - 0.1 wraps to -0.1, inside the main lobe
        assert antenna_gain(pat, TWO_PI - 0.1) == pat.main_gain
        assert antenna_gain(pat, math.pi) == pat.side_gain

    def test_mixture_weights(self):
        pat = AntennaPattern.sectored(math.pi / 4, 6.0)
        (w1, g1), (w2, g2) = pat.mixture
        assert w1 == pytest.approx(1.0 / 8.0)
        assert w1 + w2 == pytest.approx(1.0)
        assert g1 == 6.0 and g2 == pat.side_gain


class TestUlaPattern:
    def test_single_element_is_omni(self):
        pat = ula_pattern(1, 1.0)
        assert pat.main_gain == 1.0 and pat.beamwidth == TWO_PI

    def test_ten_elements(self):
        pat = ula_pattern(10, 0.5)
        assert pat.main_gain == 10.0
        assert pat.main_prob == pytest.approx(0.05, rel=1e-14)
        assert pat.side_gain == pytest.approx(0.5 * 10.0 / 9.5, rel=1e-14)

    def test_full_kappa_zeroes_side_lobe(self):
        assert ula_pattern(64, 1.0).side_gain == 0.0

    def test_power_conservation_all(self):
        for n in (1, 2, 8, 64, 257):
            for kappa in (0.1, 0.5, 1.0):
                pat = ula_pattern(n, kappa)
                budget = (
                    pat.main_gain * pat.beamwidth
                    + pat.side_gain * (TWO_PI - pat.beamwidth)
                ) / TWO_PI
                assert abs(budget - 1.0) <= 1e-12

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            ula_pattern(0, 0.5)
        with pytest.raises(ValueError):
            ula_pattern(4, 1.5)
        with pytest.raises(ValueError):
            ula_pattern(4, 0.0)


class TestExclusionRadius:
    def test_same_type_identity(self, channel):
        for t in LinkType:
            assert exclusion_radius(channel, t, t, 37.5) == 37.5

    def test_cross_type_value(self, channel):
        # equal near gains: r^(alpha_T/alpha_t) = 10^(2.5/3.5)
        expected = 10.0 ** (2.5 / 3.5)
        got = exclusion_radius(channel, LinkType.LOS, LinkType.NLOS, 10.0)
        assert got == pytest.approx(expected, rel=1e-14)
        assert got == pytest.approx(5.179474679231213, rel=1e-12)

    def test_zero(self, channel):
        assert exclusion_radius(channel, LinkType.NLOS, LinkType.LOS, 0.0) == 0.0

    def test_inverts_radio_ordering(self, channel):
        # equal average gain at the exclusion boundary
        for r in (3.0, 10.0, 80.0, 400.0):
            for home in LinkType:
                for t in LinkType:
                    e = exclusion_radius(channel, home, t, r)
                    assert pathloss(channel, t, e) == pytest.approx(
                        pathloss(channel, home, r), rel=1e-12
                    )


class TestSecondaryTxPower:
    def test_reference_value(self, channel):
        # 1e-12 * 100^2.5 / 1e-6 = 0.1 W
        p = secondary_tx_power(channel, 1e-12, 100.0, LinkType.LOS)
        assert p == pytest.approx(0.1, rel=1e-13)

    def test_exact_cap_inversion(self, channel):
        rng = np.random.default_rng(5)
        for _ in range(50):
            r = rng.uniform(0.5, 500.0)
            t = LinkType.LOS if rng.random() < 0.5 else LinkType.NLOS
            xi = 10.0 ** rng.uniform(-14, -9)
            p = secondary_tx_power(channel, xi, r, t)
            assert pathloss(channel, t, r) * p == pytest.approx(xi, rel=1e-13)

    def test_normalized_power_independent_of_cap(self, channel):
        r, t = 63.0, LinkType.NLOS
        base = normalized_tx_power(channel, r, t)
        for xi in (1e-14, 1e-12, 1e-10):
            assert secondary_tx_power(channel, xi, r, t) / xi == pytest.approx(
                base, rel=1e-14
            )

    def test_zero_distance_singular(self, channel):
        with pytest.raises(ValueError):
            secondary_tx_power(channel, 1e-12, 0.0, LinkType.LOS)


class TestBlockageVolume:
    def test_closed_form_matches_quadrature(self, channel):
        for t in LinkType:
            for r in (10.0, 150.0, 600.0):
                direct, _ = integrate.quad(
                    lambda u: channel.p_type(t, u) * u, 0.0, r, epsabs=1e-12, epsrel=1e-12
                )
                assert channel.volume(t, r) == pytest.approx(
                    TWO_PI * direct, rel=1e-10, abs=1e-12
                )

    def test_volumes_partition_disk(self, channel):
        r = np.array([25.0, 150.0, 900.0])
        total = channel.volume(LinkType.LOS, r) + channel.volume(LinkType.NLOS, r)
        assert np.allclose(total, math.pi * r * r, rtol=1e-12)

    def test_custom_blockage_quadrature_path(self):
        ch = ChannelModel(
            beta=150.0,
            alpha={LinkType.LOS: 2.5, LinkType.NLOS: 3.5},
            near_gain={LinkType.LOS: 1e-6, LinkType.NLOS: 1e-6},
            los_prob=lambda r: np.ones_like(np.asarray(r, dtype=float)),
        )
        assert ch.volume(LinkType.LOS, 10.0) == pytest.approx(math.pi * 100.0, rel=1e-9)
        assert ch.volume(LinkType.NLOS, 10.0) == pytest.approx(0.0, abs=1e-9)


class TestValidation:
    def test_alpha_must_exceed_two(self):
        with pytest.raises(ValueError):
            ChannelModel(
                beta=150.0,
                alpha={LinkType.LOS: 2.0, LinkType.NLOS: 3.5},
                near_gain={LinkType.LOS: 1e-6, LinkType.NLOS: 1e-6},
            )

    def test_beta_positive(self):
        with pytest.raises(ValueError):
            ChannelModel(
                beta=0.0,
                alpha={LinkType.LOS: 2.5, LinkType.NLOS: 3.5},
                near_gain={LinkType.LOS: 1e-6, LinkType.NLOS: 1e-6},
            )

    def test_link_type_complement(self):
        assert LinkType.LOS.other is LinkType.NLOS
        assert LinkType.NLOS.other is LinkType.LOS
