"""Analytic coverage engine.

Evaluates the coverage probability of both operators by numerical quadrature
of the point-process functionals: blockage-weighted kernels of the serving
and interfering tiers, Laplace transforms of the aggregate interference,
and the outer integral over the serving radio distance.

Conventions: ``u`` and ``v`` are radio-normalized distances.  For a
fixed-power tier the normalization maps a BS at physical distance ``x`` with
link type ``t`` to ``u = x / (P C_t)^(1/alpha_t)`` so its average received
power is ``u^-alpha_t``; for the interference-capped secondary tier the
per-BS random power folds into the same normalization and the received
power becomes ``xi * u^-alpha_t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache, cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .geometry import (
    TWO_PI,
    AntennaPattern,
    ChannelModel,
    FixedPower,
    InterferenceCap,
    LinkType,
)
from .homelink import HomeLinkDistribution
from .quadrature import QuadratureSpec, adaptive_panels, geometric_edges
from .scenario import AnalyticProvenance, CoverageCurve, Scenario

_VOID_EXPONENT_CUTOFF = 60.0  # exp(-60) ~ 9e-27: outer truncation point
_RHO_SPLIT = 2.0              # quadrature below, alternating series above
_RHO_TERMS = 48


# --------------------------------------------------------------------- rho


def _rho_series(y: np.ndarray, alpha: float) -> np.ndarray:
    """Tail integral int_y^inf 2v/(1+v^alpha) dv for y >= _RHO_SPLIT via the
    alternating series in y^-alpha."""
    k = np.arange(1, _RHO_TERMS + 1, dtype=float)
    sign = np.where(k % 2 == 1, 1.0, -1.0)
    with np.errstate(under="ignore"):
        terms = sign * 2.0 * y[..., None] ** (2.0 - k * alpha) / (k * alpha - 2.0)
    return terms.sum(axis=-1)


def rho(alpha: float, tau: float = math.inf, method: str = "auto") -> float:
    """Interference integral ``rho(alpha, tau) = int_{tau^(-1/alpha)}^inf
    2v/(1+v^alpha) dv``; ``tau = inf`` gives the full integral.

    ``method='auto'`` uses the arctangent closed form when ``alpha == 4``;
    ``method='quadrature'`` always takes the adaptive-quadrature route with
    the series tail.
    """
    if alpha <= 2:
        raise ValueError(f"rho diverges for alpha <= 2 (got {alpha})")
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if tau == 0.0:
        return 0.0
    if method == "auto" and alpha == 4.0:
        return math.pi / 2.0 if math.isinf(tau) else float(np.arctan(math.sqrt(tau)))
    if method not in ("auto", "quadrature"):
        raise ValueError(f"unknown rho method {method!r}")
    y0 = 0.0 if math.isinf(tau) else tau ** (-1.0 / alpha)
    total = 0.0
    if y0 < _RHO_SPLIT:
        spec = QuadratureSpec(rtol=1e-13, atol=1e-16)
        val, _ = adaptive_panels(
            lambda v: 2.0 * v / (1.0 + v**alpha),
            np.linspace(y0, _RHO_SPLIT, 9),
            spec,
        )
        total += float(val[0])
    total += float(_rho_series(np.array(max(y0, _RHO_SPLIT)), alpha))
    return total


class RhoEvaluator:
    """Vectorized rho(alpha, .) built on a spline antiderivative below the
    series split point.  Agrees with :func:`rho` to ~1e-12."""

    def __init__(self, alpha: float, n_grid: int = 4001):
        if alpha <= 2:
            raise ValueError(f"rho diverges for alpha <= 2 (got {alpha})")
        self.alpha = alpha
        v = np.linspace(0.0, _RHO_SPLIT, n_grid)
        self._anti = CubicSpline(v, 2.0 * v / (1.0 + v**alpha)).antiderivative()
        self._full_below = float(self._anti(_RHO_SPLIT) - self._anti(0.0))

    def __call__(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        scalar = tau.ndim == 0
        tau = np.atleast_1d(tau)
        out = np.zeros_like(tau)
        pos = tau > 0.0
        with np.errstate(divide="ignore", over="ignore"):
            y0 = np.where(pos, tau ** (-1.0 / self.alpha), np.inf)
        y0 = np.where(np.isinf(tau), 0.0, y0)
        below = pos & (y0 < _RHO_SPLIT)
        if np.any(below):
            out[below] = self._full_below - (self._anti(y0[below]) - self._anti(0.0))
        out[pos] += _rho_series(np.maximum(y0[pos], _RHO_SPLIT), self.alpha)
        return float(out[0]) if scalar else out


@lru_cache(maxsize=32)
def _rho_evaluator(alpha: float) -> RhoEvaluator:
    return RhoEvaluator(alpha)


# ------------------------------------------------------------------ kernels


class Kernel:
    """Distance kernel of one link type for one interfering/serving tier.

    Has the form ``k(v) = sum_j c_j p_t(v s_j)``: a fixed-power tier carries
    a single node ``s = (P C_t)^(1/alpha_t)`` with ``c = s^2``; the
    power-controlled secondary tier carries quadrature nodes of the home
    distance law with ``s_j = (X_j C_t)^(1/alpha_t)``.
    """

    def __init__(self, channel: ChannelModel, t: LinkType, scales, coefs):
        keep = np.asarray(coefs) > 0.0
        self.channel = channel
        self.t = t
        self.alpha = channel.alpha[t]
        self.scales = np.asarray(scales, dtype=float)[keep]
        self.coefs = np.asarray(coefs, dtype=float)[keep]

    @classmethod
    def power_controlled(cls, dist: HomeLinkDistribution, t: LinkType) -> "Kernel":
        ch = dist.channel
        xbar, w = dist.power_nodes
        s = (xbar * ch.near_gain[t]) ** (1.0 / ch.alpha[t])
        return cls(ch, t, s, w * s * s)

    @classmethod
    def fixed_power(cls, channel: ChannelModel, power: float, t: LinkType) -> "Kernel":
        s = (power * channel.near_gain[t]) ** (1.0 / channel.alpha[t])
        return cls(channel, t, np.array([s]), np.array([s * s]))

    def __call__(self, v):
        v = np.atleast_1d(np.asarray(v, dtype=float))
        p = self.channel.p_type(self.t, np.outer(v, self.scales))
        return p @ self.coefs

    @cached_property
    def at_zero(self) -> float:
        return float(self(np.array([0.0]))[0])

    @cached_property
    def limit(self) -> float:
        """Value as v -> inf (the blockage probability saturates)."""
        p_inf = float(self.channel.p_type(self.t, np.array([1e9 * self.channel.beta]))[0])
        return p_inf * float(self.coefs.sum())

    def cumulative(self, a):
        """``int_0^a k(v) v dv`` via the closed-form blockage volumes."""
        a = np.atleast_1d(np.asarray(a, dtype=float))
        vols = self.channel.volume(self.t, np.outer(a, self.scales))
        return (vols @ (self.coefs / (self.scales * self.scales))) / TWO_PI


class KernelInterpolant:
    """Fast spline evaluator of a kernel on a log grid, with constant
    extensions beyond the resolved range.  Construction verifies the
    interpolation error against direct evaluation."""

    _REL_TOL = 1e-9

    def __init__(self, kernel: Kernel, n_grid: int = 800):
        self.kernel = kernel
        ref = max(abs(kernel.at_zero), abs(kernel.limit))
        if ref == 0.0:
            ref = float(kernel(np.array([kernel.channel.beta]))[0])
        self.ref = ref
        beta = kernel.channel.beta
        s_hi = float(kernel.scales.max())
        s_lo = float(kernel.scales.min())
        v_lo = max(beta / s_hi * 1e-4, 1e-300)
        while abs(float(kernel(np.array([v_lo]))[0]) - kernel.at_zero) > 1e-11 * ref:
            v_lo /= 4.0
        v_hi = max(beta / s_lo * 1e-2, v_lo * 4.0)
        for _ in range(80):
            if abs(float(kernel(np.array([v_hi]))[0]) - kernel.limit) <= 1e-10 * ref:
                break
            v_hi *= 2.0
        else:
            raise RuntimeError("kernel did not converge to its limit")
        self.v_lo, self.v_hi = v_lo, v_hi
        self.k_lo = float(kernel(np.array([v_lo]))[0])
        n = n_grid
        while True:
            x = np.linspace(math.log(v_lo), math.log(v_hi), n)
            spline = CubicSpline(x, kernel(np.exp(x)))
            mids = 0.5 * (x[:-1] + x[1:])
            err = np.max(np.abs(spline(mids) - kernel(np.exp(mids)))) / ref
            if err <= self._REL_TOL or n >= 8 * n_grid:
                break
            n *= 2
        self._spline = spline

    def __call__(self, v):
        v = np.atleast_1d(np.asarray(v, dtype=float))
        out = np.empty_like(v)
        low = v <= self.v_lo
        high = v >= self.v_hi
        mid = ~(low | high)
        # below the grid the kernel is linear in v to first order
        out[low] = self.kernel.at_zero + (self.k_lo - self.kernel.at_zero) * (
            v[low] / self.v_lo
        )
        out[high] = self.kernel.limit
        if np.any(mid):
            out[mid] = self._spline(np.log(v[mid]))
        return out


# -------------------------------------------------- interference functionals


def _batched_tail_integral(
    interp: KernelInterpolant,
    alpha: float,
    B: np.ndarray,
    lower: float,
    spec: QuadratureSpec,
    rho_eval: RhoEvaluator,
) -> np.ndarray:
    """``int_lower^inf k(v) v / (1 + v^alpha / B_i) dv`` for a batch of
    nonnegative ``B_i``.  Beyond the kernel's resolved range the kernel is
    constant and the remainder is the exact rho tail."""
    B = np.atleast_1d(np.asarray(B, dtype=float))
    out = np.zeros_like(B)
    pos = B > 0.0
    if not np.any(pos):
        return out
    Bp = B[pos]
    V = interp.v_hi
    if V > lower:
        def integrand(v):
            kv = interp(v)
            with np.errstate(over="ignore"):
                return (kv * v)[:, None] / (1.0 + v[:, None] ** alpha / Bp[None, :])

        first = None if lower > 0 else V * 1e-8
        edges = geometric_edges(lower, V, first=first)
        main, _ = adaptive_panels(integrand, edges, spec)
    else:
        V = lower
        main = np.zeros_like(Bp)
    if interp.kernel.limit > 0.0:
        tail = 0.5 * interp.kernel.limit * Bp ** (2.0 / alpha) * rho_eval(Bp * V**-alpha)
        main = main + tail
    out[pos] = main
    return out


@dataclass(frozen=True)
class SpecialCaseParams:
    """Flags for the equal-parameter reductions: one pathloss exponent, one
    near-field gain, optionally interference-limited and zero side lobes."""

    alpha: float
    near_gain: float
    interference_limited: bool = True
    zero_side_lobe: bool = False

    @classmethod
    def from_scenario(
        cls, scenario: Scenario, interference_limited: bool = True
    ) -> "SpecialCaseParams":
        ch = scenario.channel
        a_l, a_n = ch.alpha[LinkType.LOS], ch.alpha[LinkType.NLOS]
        c_l, c_n = ch.near_gain[LinkType.LOS], ch.near_gain[LinkType.NLOS]
        if a_l != a_n or c_l != c_n:
            raise ValueError(
                "special-case reduction requires identical LOS/NLOS parameters"
            )
        zero_side = (
            scenario.primary.antenna.side_gain == 0.0
            and scenario.secondary.antenna.side_gain == 0.0
        )
        return cls(
            alpha=a_l,
            near_gain=c_l,
            interference_limited=interference_limited,
            zero_side_lobe=zero_side,
        )


class CoverageEngine:
    """Numerical evaluation of both operators' coverage probabilities.

    All heavy state (home-distance nodes, kernel interpolants) is built once
    per scenario and reused across thresholds; the public coverage methods
    accept whole threshold arrays and integrate them in one adaptive pass.
    """

    def __init__(self, scenario: Scenario, quad: QuadratureSpec | None = None):
        self.scenario = scenario
        self.quad = quad or QuadratureSpec(rtol=1e-6, atol=1e-12)
        # inner (functional) quadratures run tighter than the outer integral
        self.inner = replace(
            self.quad, rtol=min(self.quad.rtol * 1e-2, 1e-8), atol=self.quad.atol * 1e-2
        )
        ch = scenario.channel
        self.dist = HomeLinkDistribution(ch, scenario.primary.user_density)
        if not isinstance(scenario.primary.power_rule, FixedPower):
            raise ValueError("primary operator must use a fixed transmit power")
        self.primary_power = scenario.primary.power_rule.watts
        self.kernels_m = {t: Kernel.fixed_power(ch, self.primary_power, t) for t in LinkType}
        self.interp_m = {t: KernelInterpolant(self.kernels_m[t]) for t in LinkType}
        secondary_rule = scenario.secondary.power_rule
        if isinstance(secondary_rule, InterferenceCap):
            self.xi = secondary_rule.xi
            self.kernels_k = {t: Kernel.power_controlled(self.dist, t) for t in LinkType}
            self.interp_k = {t: KernelInterpolant(self.kernels_k[t]) for t in LinkType}
            # native secondary BSs: 2*pi*int_0^1 (K_L + K_N)(v) v dv
            self.native_mass = TWO_PI * float(
                sum(self.kernels_k[t].cumulative(1.0)[0] for t in LinkType)
            )
        else:
            self.xi = None
            self.kernels_k = None
            self.interp_k = None
            self.native_mass = None
        self._rho = {t: _rho_evaluator(ch.alpha[t]) for t in LinkType}
        self._fixed_cache: dict[float, tuple[dict, dict]] = {}

    def _fixed_kernels(self, power: float) -> tuple[dict, dict]:
        """Kernels plus interpolants of a fixed-power tier, memoized."""
        if power not in self._fixed_cache:
            ch = self.scenario.channel
            kernels = {t: Kernel.fixed_power(ch, power, t) for t in LinkType}
            interps = {t: KernelInterpolant(kernels[t]) for t in LinkType}
            self._fixed_cache[power] = (kernels, interps)
        return self._fixed_cache[power]

    # ------------------------------------------------------------- kernels

    def kernel_secondary(self, t: LinkType, u):
        """K-kernel of the power-controlled secondary tier (direct sum)."""
        self._require_cap()
        return self.kernels_k[t](u)

    def kernel_primary(self, t: LinkType, u):
        """M-kernel of the fixed-power primary tier."""
        return self.kernels_m[t](u)

    def _require_cap(self) -> None:
        if self.xi is None:
            raise ValueError("scenario's secondary operator has no interference cap")

    # -------------------------------------------------------- functionals

    def functional_fs(self, B, exclusion: float) -> np.ndarray:
        """Secondary-at-secondary functional ``F_S(B, e)``: conditioned on the
        serving exclusion ``e = u^alpha_t0``."""
        self._require_cap()
        return self._functional(self.interp_k, B, lambda t: exclusion ** (1.0 / self.scenario.channel.alpha[t]))

    def functional_fp(self, B) -> np.ndarray:
        """Primary-at-secondary functional ``F_P(B)`` (no exclusion)."""
        return self._functional(self.interp_m, B, lambda t: 0.0)

    def functional_ep(self, B, exclusion: float) -> np.ndarray:
        """Primary-at-primary functional ``E_P(B, e)`` with the association
        exclusion of the serving tier."""
        return self._functional(self.interp_m, B, lambda t: exclusion ** (1.0 / self.scenario.channel.alpha[t]))

    def functional_efs(self, B) -> np.ndarray:
        """Non-native secondary interference at the primary user,
        ``E_FS(B, xi)`` evaluated at ``B_eff = B * xi``; the home-user
        constraint pins the exclusion at normalized distance 1."""
        self._require_cap()
        B = np.asarray(B, dtype=float)
        return self._functional(self.interp_k, B * self.xi, lambda t: 1.0)

    def functional_ens(self, B) -> np.ndarray:
        """Native secondary interference at the primary user: each native BS
        contributes exactly the cap, ``E_NS(B) = mass * B xi/(1 + B xi)``."""
        self._require_cap()
        B = np.atleast_1d(np.asarray(B, dtype=float))
        bx = B * self.xi
        return self.native_mass * bx / (1.0 + bx)

    def _functional(self, interps, B, lower_of_t) -> np.ndarray:
        B = np.atleast_1d(np.asarray(B, dtype=float))
        total = np.zeros_like(B)
        for t in LinkType:
            total += _batched_tail_integral(
                interps[t],
                self.scenario.channel.alpha[t],
                B,
                float(lower_of_t(t)),
                self.inner,
                self._rho[t],
            )
        return TWO_PI * total

    # --------------------------------------------------- laplace transforms

    def laplace_secondary_at_secondary(self, s, exclusion: float) -> np.ndarray:
        """Laplace transform of the conditioned secondary interference at the
        typical secondary user."""
        self._require_cap()
        s = np.atleast_1d(np.asarray(s, dtype=float))
        lam = self.scenario.secondary.bs_density
        expo = np.zeros_like(s)
        for weight, gain in self.scenario.secondary.antenna.mixture:
            if weight == 0.0:
                continue
            expo += weight * self.functional_fs(s * self.xi * gain, exclusion)
        return np.exp(-lam * expo)

    def laplace_primary_at_secondary(self, s) -> np.ndarray:
        """Laplace transform of the primary interference at the typical
        secondary user."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        lam = self.scenario.primary.bs_density
        expo = np.zeros_like(s)
        for weight, gain in self.scenario.primary.antenna.mixture:
            if weight == 0.0:
                continue
            expo += weight * self.functional_fp(s * gain)
        return np.exp(-lam * expo)

    def laplace_primary_at_primary(self, s, exclusion: float) -> np.ndarray:
        """Laplace transform of the conditioned own-tier interference at the
        typical primary user."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        lam = self.scenario.primary.bs_density
        expo = np.zeros_like(s)
        for weight, gain in self.scenario.primary.antenna.mixture:
            if weight == 0.0:
                continue
            expo += weight * self.functional_ep(s * gain, exclusion)
        return np.exp(-lam * expo)

    def laplace_secondary_at_primary(self, s) -> np.ndarray:
        """Laplace transform of the capped secondary interference at the
        typical primary user (native + non-native split)."""
        self._require_cap()
        s = np.atleast_1d(np.asarray(s, dtype=float))
        lam = self.scenario.secondary.bs_density
        expo = np.zeros_like(s)
        for weight, gain in self.scenario.secondary.antenna.mixture:
            if weight == 0.0:
                continue
            b = s * gain
            expo += weight * (self.functional_efs(b) + self.functional_ens(b))
        return np.exp(-lam * expo)

    # ------------------------------------------------------------ coverage

    def _void_exponent(self, kernels, density: float, u: np.ndarray, alpha0: float):
        """Own-tier association void term: the exponent of the probability
        that no tier BS beats the candidate at normalized distance u."""
        ch = self.scenario.channel
        total = np.zeros_like(u)
        for t in LinkType:
            total += kernels[t].cumulative(u ** (alpha0 / ch.alpha[t]))
        return TWO_PI * density * total

    def _truncation(self, kernels, density: float, alpha0: float) -> float:
        u = 1e-3
        for _ in range(80):
            if self._void_exponent(kernels, density, np.array([u]), alpha0)[0] > _VOID_EXPONENT_CUTOFF:
                return u
            u *= 2.0
        raise RuntimeError("serving void exponent failed to grow; check densities")

    def _coverage(self, tau, serving: str) -> np.ndarray:
        """Shared coverage assembly for both probes.

        ``serving`` selects the probe: 'secondary' (power-controlled serving
        tier) or 'primary' (fixed-power serving tier with the native/foreign
        secondary split).
        """
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        if np.any(tau < 0):
            raise ValueError("SINR thresholds must be non-negative")
        sc = self.scenario
        ch = sc.channel
        if serving == "secondary":
            self._require_cap()
            own_interp, own_kernels = self.interp_k, self.kernels_k
            own_density = sc.secondary.bs_density
            own_pattern = sc.secondary.antenna
            noise = sc.secondary.noise_power
            omega = self.xi
        else:
            own_interp, own_kernels = self.interp_m, self.kernels_m
            own_density = sc.primary.bs_density
            own_pattern = sc.primary.antenna
            noise = sc.primary.noise_power
            omega = 1.0
        g1 = own_pattern.main_gain
        total = np.zeros_like(tau)
        for t0 in LinkType:
            alpha0 = ch.alpha[t0]
            u_max = self._truncation(own_kernels, own_density, alpha0)

            def integrand(u_flat, _t0=t0, _a0=alpha0):
                u_flat = np.asarray(u_flat, dtype=float)
                rows = np.empty((u_flat.size, tau.size))
                dens = TWO_PI * own_density * own_interp[_t0](u_flat) * u_flat
                void = self._void_exponent(own_kernels, own_density, u_flat, _a0)
                for i, u in enumerate(u_flat):
                    e = u**_a0
                    s = tau * e / (omega * g1)
                    expo = noise * s + void[i]
                    if serving == "secondary":
                        for w, gain in sc.secondary.antenna.mixture:
                            if w > 0.0:
                                expo = expo + w * sc.secondary.bs_density * self.functional_fs(
                                    s * self.xi * gain, e
                                )
                        for w, gain in sc.primary.antenna.mixture:
                            if w > 0.0:
                                expo = expo + w * sc.primary.bs_density * self.functional_fp(
                                    s * gain
                                )
                    else:
                        for w, gain in sc.primary.antenna.mixture:
                            if w > 0.0:
                                expo = expo + w * sc.primary.bs_density * self.functional_ep(
                                    s * gain, e
                                )
                        for w, gain in sc.secondary.antenna.mixture:
                            if w > 0.0:
                                expo = expo + w * sc.secondary.bs_density * (
                                    self.functional_efs(s * gain)
                                    + self.functional_ens(s * gain)
                                )
                    with np.errstate(under="ignore"):
                        rows[i] = dens[i] * np.exp(-expo)
                return rows

            part, _ = adaptive_panels(integrand, np.linspace(0.0, u_max, 12), self.quad)
            total += part
        return total

    def coverage_secondary(self, tau):
        """Coverage probability of the typical secondary user."""
        out = self._coverage(tau, "secondary")
        return float(out[0]) if np.ndim(tau) == 0 else out

    def coverage_primary(self, tau):
        """Coverage probability of the typical primary user."""
        out = self._coverage(tau, "primary")
        return float(out[0]) if np.ndim(tau) == 0 else out

    def coverage_uncoordinated(self, tau, probe: str):
        """Coverage when both tiers transmit at fixed powers (no cap): the
        probe operator's own tier is conditioned by association, the other
        tier interferes without exclusion."""
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        sc = self.scenario
        ch = sc.channel
        own_cfg = sc.primary if probe == "primary" else sc.secondary
        other_cfg = sc.secondary if probe == "primary" else sc.primary
        if not isinstance(own_cfg.power_rule, FixedPower) or not isinstance(
            other_cfg.power_rule, FixedPower
        ):
            raise ValueError("uncoordinated coverage requires fixed powers on both tiers")
        own_power = own_cfg.power_rule.watts
        cross_power = other_cfg.power_rule.watts
        own_kernels, own_interp = self._fixed_kernels(own_power)
        cross_kernels, cross_interp = self._fixed_kernels(cross_power)
        g1 = own_cfg.antenna.main_gain
        total = np.zeros_like(tau)

        def cross_functional(B):
            B = np.atleast_1d(np.asarray(B, dtype=float))
            out = np.zeros_like(B)
            for t in LinkType:
                out += _batched_tail_integral(
                    cross_interp[t], ch.alpha[t], B, 0.0, self.inner, self._rho[t]
                )
            return TWO_PI * out

        def own_functional(B, exclusion):
            B = np.atleast_1d(np.asarray(B, dtype=float))
            out = np.zeros_like(B)
            for t in LinkType:
                out += _batched_tail_integral(
                    own_interp[t],
                    ch.alpha[t],
                    B,
                    exclusion ** (1.0 / ch.alpha[t]),
                    self.inner,
                    self._rho[t],
                )
            return TWO_PI * out

        for t0 in LinkType:
            alpha0 = ch.alpha[t0]
            u_max = self._truncation(own_kernels, own_cfg.bs_density, alpha0)

            def integrand(u_flat, _t0=t0, _a0=alpha0):
                u_flat = np.asarray(u_flat, dtype=float)
                rows = np.empty((u_flat.size, tau.size))
                dens = TWO_PI * own_cfg.bs_density * own_interp[_t0](u_flat) * u_flat
                void = self._void_exponent(own_kernels, own_cfg.bs_density, u_flat, _a0)
                for i, u in enumerate(u_flat):
                    e = u**_a0
                    s = tau * e / g1
                    expo = own_cfg.noise_power * s + void[i]
                    for w, gain in own_cfg.antenna.mixture:
                        if w > 0.0:
                            expo = expo + w * own_cfg.bs_density * own_functional(s * gain, e)
                    for w, gain in other_cfg.antenna.mixture:
                        if w > 0.0:
                            expo = expo + w * other_cfg.bs_density * cross_functional(s * gain)
                    with np.errstate(under="ignore"):
                        rows[i] = dens[i] * np.exp(-expo)
                return rows

            part, _ = adaptive_panels(integrand, np.linspace(0.0, u_max, 12), self.quad)
            total += part
        return float(total[0]) if np.ndim(tau) == 0 else total

    def coverage_curve(self, thresholds, operator: str) -> CoverageCurve:
        thresholds = np.asarray(thresholds, dtype=float)
        if operator == "primary":
            values = self.coverage_primary(thresholds)
        elif operator == "secondary":
            values = self.coverage_secondary(thresholds)
        else:
            raise ValueError(f"unknown operator {operator!r}")
        values = np.minimum.accumulate(np.clip(values, 0.0, 1.0))
        return CoverageCurve(
            thresholds=thresholds,
            values=values,
            ci_halfwidth=np.zeros_like(values),
            operator=operator,
            provenance=AnalyticProvenance(rtol=self.quad.rtol),
        )


# ------------------------------------------------------------- closed forms


def _mixture_rho_sum(pattern: AntennaPattern, ref_gain: float, alpha: float, tau_scale):
    """``sum_k w_k (G_k/ref)^{2/alpha} rho(alpha, tau_scale * G_k/ref)``;
    with ``tau_scale=None`` the full rho(alpha) is used."""
    ev = _rho_evaluator(alpha)
    total = 0.0
    for w, gain in pattern.mixture:
        if w == 0.0 or gain == 0.0:
            continue
        ratio = gain / ref_gain
        r = ev(np.array([math.inf]))[0] if tau_scale is None else ev(tau_scale * ratio)
        total = total + w * ratio ** (2.0 / alpha) * r
    return total


def coverage_secondary_closed(tau, scenario: Scenario, params: SpecialCaseParams):
    """Equal-parameter coverage of the secondary user.

    Interference-limited mode is fully closed form; with noise one radial
    integral remains.
    """
    scalar = np.ndim(tau) == 0
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    _check_equal_params(scenario, params)
    alpha, c = params.alpha, params.near_gain
    lam_p = scenario.primary.bs_density
    lam_s = scenario.secondary.bs_density
    lam_u = scenario.primary.user_density
    xi = scenario.interference_cap
    p_power = scenario.primary.power_rule.watts
    g_s1 = scenario.secondary.antenna.main_gain
    k_const = 1.0 / (math.pi * lam_u)
    f_p = _mixture_rho_sum(scenario.primary.antenna, g_s1, alpha, None)
    f_s = np.zeros_like(tau)
    ev = _rho_evaluator(alpha)
    for w, gain in scenario.secondary.antenna.mixture:
        if w == 0.0 or gain == 0.0:
            continue
        ratio = gain / g_s1
        f_s = f_s + w * ratio ** (2.0 / alpha) * ev(tau * ratio)
    two_over = 2.0 / alpha
    term_p = lam_p * xi**-two_over * (p_power * c) ** two_over * f_p / (lam_s * k_const)
    with np.errstate(under="ignore"):
        denom_scale = tau**two_over * (term_p + f_s)
    if params.interference_limited:
        out = 1.0 / (1.0 + denom_scale)
        return float(out[0]) if scalar else out
    # with noise: P = pi*lam_s*K * int_0^inf exp(-tau sigma^2 w^{alpha/2}/(xi G1)) e^{-w A} dw
    sigma2 = scenario.secondary.noise_power
    a_coef = math.pi * lam_s * k_const * (1.0 + denom_scale)
    w_max = _VOID_EXPONENT_CUTOFF / (math.pi * lam_s * k_const)

    def integrand(w):
        with np.errstate(under="ignore"):
            noise = np.exp(
                -np.outer(w ** (alpha / 2.0), tau) * sigma2 / (xi * g_s1)
            )
            return noise * np.exp(-np.outer(w, a_coef))

    spec = QuadratureSpec(rtol=1e-10, atol=1e-14)
    val, _ = adaptive_panels(integrand, np.linspace(0.0, w_max, 12), spec)
    out = math.pi * lam_s * k_const * val
    return float(out[0]) if scalar else out


def coverage_secondary_arctan(tau, scenario: Scenario) -> np.ndarray:
    """alpha = 4, zero-side-lobe, matched-beam closed form with the
    arctangent interference integral."""
    params = SpecialCaseParams.from_scenario(scenario, interference_limited=True)
    if params.alpha != 4.0:
        raise ValueError("the arctangent form requires alpha = 4")
    if not params.zero_side_lobe:
        raise ValueError("the arctangent form requires zero side lobes")
    pa, sa = scenario.primary.antenna, scenario.secondary.antenna
    if abs(pa.beamwidth - sa.beamwidth) > 1e-12 or pa.main_gain != sa.main_gain:
        raise ValueError("the arctangent form requires matching beam patterns")
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    xi = scenario.interference_cap
    c = params.near_gain
    p_power = scenario.primary.power_rule.watts
    lam_ratio = scenario.primary.bs_density / scenario.secondary.bs_density
    lam_u = scenario.primary.user_density
    theta_frac = sa.beamwidth / TWO_PI
    root = np.sqrt(tau)
    primary_term = (
        lam_ratio / math.sqrt(xi) * math.sqrt(c * p_power) * lam_u * math.pi**2 / 2.0
    )
    return 1.0 / (1.0 + theta_frac * root * (primary_term + np.arctan(root)))


def coverage_primary_closed(tau, scenario: Scenario, params: SpecialCaseParams):
    """Equal-parameter coverage of the primary user; one radial quadrature
    remains because the foreign-secondary term keeps its distance argument."""
    scalar = np.ndim(tau) == 0
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    _check_equal_params(scenario, params)
    alpha, c = params.alpha, params.near_gain
    lam_p = scenario.primary.bs_density
    lam_s = scenario.secondary.bs_density
    lam_u = scenario.primary.user_density
    xi = scenario.interference_cap
    p_power = scenario.primary.power_rule.watts
    g_p1 = scenario.primary.antenna.main_gain
    sigma2 = 0.0 if params.interference_limited else scenario.primary.noise_power
    k_const = 1.0 / (math.pi * lam_u)
    m_const = (p_power * c) ** (2.0 / alpha)
    two_over = 2.0 / alpha
    ev = _rho_evaluator(alpha)
    own = np.zeros_like(tau)
    for w, gain in scenario.primary.antenna.mixture:
        if w == 0.0 or gain == 0.0:
            continue
        ratio = gain / g_p1
        own = own + w * ratio**two_over * ev(tau * ratio)
    u_cap = math.sqrt(_VOID_EXPONENT_CUTOFF / (math.pi * lam_p * m_const))

    def integrand(u):
        u = np.asarray(u, dtype=float)
        u2 = (u * u)[:, None]
        ua = (u**alpha)[:, None]
        with np.errstate(under="ignore"):
            expo = (
                math.pi * lam_p * m_const * u2 * tau[None, :] ** two_over * own[None, :]
            )
            expo = expo + sigma2 * ua * tau[None, :] / g_p1
            for w, gain in scenario.secondary.antenna.mixture:
                if w == 0.0 or gain == 0.0:
                    continue
                b = tau[None, :] * gain / g_p1
                bxu = b * xi * ua
                expo = expo + (
                    math.pi
                    * lam_s
                    * k_const
                    * (b * xi) ** two_over
                    * u2
                    * ev(bxu)
                    * w
                )
                expo = expo + math.pi * lam_s * k_const * w * bxu / (1.0 + bxu)
            expo = expo + math.pi * lam_p * m_const * u2
            return TWO_PI * lam_p * m_const * u[:, None] * np.exp(-expo)

    spec = QuadratureSpec(rtol=1e-10, atol=1e-14)
    val, _ = adaptive_panels(integrand, np.linspace(0.0, u_cap, 12), spec)
    return float(val[0]) if scalar else val


def _check_equal_params(scenario: Scenario, params: SpecialCaseParams) -> None:
    ch = scenario.channel
    for t in LinkType:
        if ch.alpha[t] != params.alpha or ch.near_gain[t] != params.near_gain:
            raise ValueError(
                "special-case flags are inconsistent with the channel model"
            )
