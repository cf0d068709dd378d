"""Geometric and channel primitives shared by the simulator and the
analytic engine: blockage, pathloss, sectored antennas, exclusion radii and
the interference-capped power-control law of the secondary operator.

All types are immutable after construction and all functions are pure, so
everything here is safe to share across workers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

TWO_PI = 2.0 * math.pi


class LinkType(enum.Enum):
    """Link blockage state between a BS and a user."""

    LOS = "LOS"
    NLOS = "NLOS"

    @property
    def other(self) -> "LinkType":
        return LinkType.NLOS if self is LinkType.LOS else LinkType.LOS


@dataclass(frozen=True)
class ChannelModel:
    """Blockage and pathloss model.

    The default blockage law is exponential, ``p_los(r) = exp(-r / beta)``
    with ``beta`` a LOS decay length in meters.  A custom LOS-probability
    function may be plugged in via ``los_prob``; it must be vectorized over
    distance and map into [0, 1].

    ``alpha`` and ``near_gain`` hold per-link-type pathloss exponents and
    linear near-field gains.  Exponents must exceed 2 for the interference
    integrals downstream to converge.
    """

    beta: float
    alpha: dict[LinkType, float]
    near_gain: dict[LinkType, float]
    los_prob: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self) -> None:
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        for t in LinkType:
            if self.alpha[t] <= 2:
                raise ValueError(
                    f"pathloss exponent for {t.value} must exceed 2, got {self.alpha[t]}"
                )
            if self.near_gain[t] <= 0:
                raise ValueError(
                    f"near-field gain for {t.value} must be positive, got {self.near_gain[t]}"
                )

    @property
    def has_exponential_blockage(self) -> bool:
        return self.los_prob is None

    def p_type(self, t: LinkType, r):
        """Probability that a link of length ``r`` has type ``t``."""
        p_los = los_probability(self, r)
        return p_los if t is LinkType.LOS else 1.0 - p_los

    def volume(self, t: LinkType, r):
        """Blockage-weighted disk volume ``V_t(r) = 2*pi*int_0^r p_t(u) u du``.

        Closed form for the exponential blockage law; adaptive quadrature
        otherwise.
        """
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("volume requires r >= 0")
        if self.has_exponential_blockage:
            b = self.beta
            x = r / b
            # 2*pi*b^2*(1 - e^-x (1+x)); expm1-based form stays accurate near 0
            v_los = TWO_PI * b * b * (-np.expm1(-x) - x * np.exp(-x))
            if t is LinkType.LOS:
                out = v_los
            else:
                out = math.pi * r * r - v_los
            return out if out.shape else float(out)

        def _one(radius: float) -> float:
            if radius == 0.0:
                return 0.0
            val, _ = integrate.quad(
                lambda u: self.p_type(t, u) * u, 0.0, radius, epsabs=1e-10, epsrel=1e-10
            )
            return TWO_PI * val

        out = np.vectorize(_one)(r)
        return out if out.shape else float(out)


def los_probability(channel: ChannelModel, r):
    """LOS probability of a link of length ``r`` (meters)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("distance must be non-negative")
    if channel.los_prob is not None:
        p = np.asarray(channel.los_prob(r), dtype=float)
    else:
        p = np.exp(-r / channel.beta)
    return p if p.shape else float(p)


def pathloss(channel: ChannelModel, t: LinkType, r):
    """Average channel gain ``C_t * r^-alpha_t`` of a type-``t`` link."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("pathloss is singular at r = 0; exclude zero-distance links")
    g = channel.near_gain[t] * r ** (-channel.alpha[t])
    return g if g.shape else float(g)


def exclusion_radius(channel: ChannelModel, home_type: LinkType, t: LinkType, r):
    """Radius around a secondary BS inside which no type-``t`` primary user
    can exist, given that the home user sits at radio distance ``(r, T)``.

    Inverts the radio-distance ordering: a type-``t`` point at this radius
    has exactly the same average gain as the home user.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("distance must be non-negative")
    if home_type is t:
        return r if r.shape else float(r)
    a_t = channel.alpha[t]
    ratio = channel.near_gain[t] / channel.near_gain[home_type]
    out = ratio ** (1.0 / a_t) * r ** (channel.alpha[home_type] / a_t)
    return out if out.shape else float(out)


def secondary_tx_power(channel: ChannelModel, xi: float, r, t: LinkType):
    """Transmit power of a secondary BS whose home user is at ``(r, t)``.

    Chosen so the average interference at the home user equals ``xi``
    exactly: ``P = xi * r^alpha_t / C_t``.
    """
    if xi <= 0:
        raise ValueError("interference cap xi must be positive")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("power control is singular at r = 0")
    p = xi * r ** channel.alpha[t] / channel.near_gain[t]
    return p if p.shape else float(p)


def normalized_tx_power(channel: ChannelModel, r, t: LinkType):
    """Cap-normalized transmit power ``r^alpha_t / C_t`` (independent of xi)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("distance must be non-negative")
    p = r ** channel.alpha[t] / channel.near_gain[t]
    return p if p.shape else float(p)


@dataclass(frozen=True)
class AntennaPattern:
    """Two-level sectored beam pattern.

    ``main_gain`` applies within ``beamwidth`` around boresight, ``side_gain``
    elsewhere.  Construction enforces power conservation:
    ``main_gain * beamwidth + side_gain * (2*pi - beamwidth) = 2*pi``.
    """

    main_gain: float
    side_gain: float
    beamwidth: float

    _POWER_TOL = 1e-12

    def __post_init__(self) -> None:
        if not (0.0 < self.beamwidth <= TWO_PI):
            raise ValueError(f"beamwidth must lie in (0, 2*pi], got {self.beamwidth}")
        if self.side_gain < 0 or self.main_gain < self.side_gain:
            raise ValueError("gains must satisfy main_gain >= side_gain >= 0")
        budget = (
            self.main_gain * self.beamwidth + self.side_gain * (TWO_PI - self.beamwidth)
        ) / TWO_PI
        if abs(budget - 1.0) > self._POWER_TOL:
            raise ValueError(
                f"antenna pattern violates power conservation: weighted gain {budget!r} != 1"
            )

    @property
    def main_prob(self) -> float:
        """Probability that a uniformly oriented beam covers an observer."""
        return self.beamwidth / TWO_PI

    @property
    def mixture(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """(weight, gain) pairs of the random-orientation gain mixture."""
        a1 = self.main_prob
        return ((a1, self.main_gain), (1.0 - a1, self.side_gain))

    def gain(self, theta):
        """Gain toward an observer at angle ``theta`` off boresight.

        Angles outside [-pi, pi] are wrapped (normalization, not an error).
        """
        theta = np.asarray(theta, dtype=float)
        wrapped = np.mod(theta + math.pi, TWO_PI) - math.pi
        g = np.where(np.abs(wrapped) <= self.beamwidth / 2.0, self.main_gain, self.side_gain)
        return g if g.shape else float(g)

    @classmethod
    def omni(cls) -> "AntennaPattern":
        return cls(main_gain=1.0, side_gain=1.0, beamwidth=TWO_PI)

    @classmethod
    def sectored(cls, beamwidth: float, main_gain: float) -> "AntennaPattern":
        """Build a pattern from beamwidth and main-lobe gain, deriving the
        side-lobe gain from power conservation."""
        if beamwidth == TWO_PI:
            if not math.isclose(main_gain, 1.0, rel_tol=0, abs_tol=1e-12):
                raise ValueError("an omnidirectional pattern forces main_gain = 1")
            return cls.omni()
        side = (TWO_PI - main_gain * beamwidth) / (TWO_PI - beamwidth)
        if side < 0:
            if side < -1e-9:
                raise ValueError(
                    f"main_gain {main_gain} exceeds the power budget for beamwidth {beamwidth}"
                )
            side = 0.0  # rounding residue of an exactly exhausted budget
        return cls(main_gain=main_gain, side_gain=side, beamwidth=beamwidth)


def antenna_gain(pattern: AntennaPattern, theta):
    """Module-level alias of :meth:`AntennaPattern.gain`."""
    return pattern.gain(theta)


def ula_pattern(n_antennas: int, kappa: float) -> AntennaPattern:
    """Sectored approximation of an ``n_antennas``-element uniform linear
    array: main lobe of width ``2*pi*kappa/n`` with gain ``n``, side lobe
    gain ``(1-kappa)*n/(n-kappa)``.
    """
    if n_antennas < 1:
        raise ValueError("n_antennas must be at least 1")
    if not (0.0 < kappa <= 1.0):
        raise ValueError("kappa must lie in (0, 1]")
    n = float(n_antennas)
    if n_antennas == 1 and kappa == 1.0:
        return AntennaPattern.omni()
    side = (1.0 - kappa) * n / (n - kappa)
    return AntennaPattern(main_gain=n, side_gain=side, beamwidth=TWO_PI * kappa / n)


@dataclass(frozen=True)
class FixedPower:
    """Constant transmit power rule (the primary operator, or the
    power-matched uncoordinated secondary)."""

    watts: float

    def __post_init__(self) -> None:
        if self.watts <= 0:
            raise ValueError("transmit power must be positive")


@dataclass(frozen=True)
class InterferenceCap:
    """Restricted-license rule: per-BS power set so the average interference
    at the BS's home primary user equals ``xi`` watts."""

    xi: float

    def __post_init__(self) -> None:
        if self.xi <= 0:
            raise ValueError("interference cap must be positive")


PowerRule = FixedPower | InterferenceCap


@dataclass(frozen=True)
class OperatorConfig:
    """Densities, antenna and power rule of one operator."""

    bs_density: float
    user_density: float
    antenna: AntennaPattern
    power_rule: PowerRule
    noise_power: float = 0.0

    def __post_init__(self) -> None:
        if self.bs_density <= 0 or self.user_density <= 0:
            raise ValueError("densities must be positive")
        if self.noise_power < 0:
            raise ValueError("noise power must be non-negative")
