import math

import pytest

from mmshare import (
    AntennaPattern,
    ChannelModel,
    FixedPower,
    InterferenceCap,
    LinkType,
    OperatorConfig,
    Scenario,
)


@pytest.fixture(scope="session")
def channel():
    """Reference channel: exponential blockage, mmWave-style exponents."""
    return ChannelModel(
        beta=150.0,
        alpha={LinkType.LOS: 2.5, LinkType.NLOS: 3.5},
        near_gain={LinkType.LOS: 1e-6, LinkType.NLOS: 1e-6},
    )


@pytest.fixture(scope="session")
def equal_channel():
    """Identical LOS/NLOS parameters (single-exponent reduction)."""
    return ChannelModel(
        beta=150.0,
        alpha={LinkType.LOS: 3.0, LinkType.NLOS: 3.0},
        near_gain={LinkType.LOS: 1e-6, LinkType.NLOS: 1e-6},
    )


def make_scenario(
    channel,
    lam_p=30e-6,
    lam_s=60e-6,
    lam_pu=30e-6,
    lam_su=60e-6,
    xi=1e-12,
    p_power=10.0,
    noise=1e-11,
    pattern_p=None,
    pattern_s=None,
    window=750.0,
    seed=1,
    n_realizations=1,
):
    pattern_p = pattern_p or AntennaPattern.sectored(math.pi / 6, 10.0)
    pattern_s = pattern_s or AntennaPattern.sectored(math.pi / 6, 10.0)
    return Scenario(
        primary=OperatorConfig(lam_p, lam_pu, pattern_p, FixedPower(p_power), noise),
        secondary=OperatorConfig(lam_s, lam_su, pattern_s, InterferenceCap(xi), noise),
        channel=channel,
        window_radius=window,
        guard_radius=window / 2,
        seed=seed,
        n_realizations=n_realizations,
    )


@pytest.fixture(scope="session")
def small_scenario(channel):
    return make_scenario(channel)
