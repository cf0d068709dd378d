"""Monte Carlo network simulator.

Samples the four independent PPPs in a disk window, associates every
secondary BS with its home primary user, applies the interference-capped
power rule exactly, and measures the SINR of a typical user of each
operator at the origin.

Reproducibility: every realization draws from its own counter-based Philox
substream keyed by (seed, realization index, attempt), so results are
bit-identical regardless of how realizations are distributed over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .geometry import (
    ChannelModel,
    FixedPower,
    InterferenceCap,
    LinkType,
    los_probability,
)
from .homelink import HomeLinkDistribution
from .scenario import CoverageCurve, MonteCarloProvenance, Scenario

_MASK64 = (1 << 64) - 1
_MAX_ATTEMPTS = 64


def substream(seed: int, index: int, attempt: int = 0) -> np.random.Generator:
    """Counter-based generator for one named substream."""
    if attempt >= _MAX_ATTEMPTS:
        raise RuntimeError("too many rejected resamples for one realization")
    seed, index, attempt = int(seed), int(index), int(attempt)
    key = np.array(
        [seed & _MASK64, ((index << 8) | attempt) & _MASK64], dtype=np.uint64
    )
    return np.random.Generator(np.random.Philox(key=key))


@dataclass
class Realization:
    """One sampled network together with all per-link randomness.

    ``*_p`` arrays describe links toward the typical primary user and
    ``*_s`` toward the typical secondary user, both probing at the origin.
    ``aug_power`` holds secondary transmit powers under the Palm
    conditioning of the primary probe: BSs whose best user is the probe
    itself (``aug_native``) re-anchor their power on it.
    """

    primary_bs: np.ndarray
    secondary_bs: np.ndarray
    primary_users: np.ndarray
    secondary_users: np.ndarray
    # BS -> primary-probe links
    los_pb_p: np.ndarray
    los_sb_p: np.ndarray
    fade_pb_p: np.ndarray
    fade_sb_p: np.ndarray
    angle_pb_p: np.ndarray
    angle_sb_p: np.ndarray
    # BS -> secondary-probe links
    los_pb_s: np.ndarray
    los_sb_s: np.ndarray
    fade_pb_s: np.ndarray
    fade_sb_s: np.ndarray
    angle_pb_s: np.ndarray
    angle_sb_s: np.ndarray
    # secondary-BS x primary-user candidate links
    los_home: np.ndarray
    # filled by associate_and_power
    home_index: np.ndarray | None = None
    home_distance: np.ndarray | None = None
    home_is_los: np.ndarray | None = None
    tx_power: np.ndarray | None = None
    aug_native: np.ndarray | None = None
    aug_power: np.ndarray | None = None


def _sample_disk(rng: np.random.Generator, density: float, radius: float) -> np.ndarray:
    n = rng.poisson(density * math.pi * radius * radius)
    r = radius * np.sqrt(rng.random(n))
    theta = rng.uniform(-math.pi, math.pi, n)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def _link_draws(rng, channel, dists):
    """LOS indicator, unit-mean exponential fading and beam angle per link."""
    los = rng.random(dists.size) < los_probability(channel, dists)
    fade = rng.exponential(1.0, dists.size)
    angle = rng.uniform(-math.pi, math.pi, dists.size)
    return los, fade, angle


def sample_realization(scenario: Scenario, rng_stream: int, attempt: int = 0) -> Realization:
    """Draw one network realization from the named substream."""
    rng = substream(scenario.seed, rng_stream, attempt)
    ch = scenario.channel
    R = scenario.window_radius
    primary_bs = _sample_disk(rng, scenario.primary.bs_density, R)
    secondary_bs = _sample_disk(rng, scenario.secondary.bs_density, R)
    primary_users = _sample_disk(rng, scenario.primary.user_density, R)
    secondary_users = _sample_disk(rng, scenario.secondary.user_density, R)

    d_pb = np.hypot(primary_bs[:, 0], primary_bs[:, 1])
    d_sb = np.hypot(secondary_bs[:, 0], secondary_bs[:, 1])
    los_pb_p, fade_pb_p, angle_pb_p = _link_draws(rng, ch, d_pb)
    los_sb_p, fade_sb_p, angle_sb_p = _link_draws(rng, ch, d_sb)
    los_pb_s, fade_pb_s, angle_pb_s = _link_draws(rng, ch, d_pb)
    los_sb_s, fade_sb_s, angle_sb_s = _link_draws(rng, ch, d_sb)

    diff = secondary_bs[:, None, :] - primary_users[None, :, :]
    d_home = np.hypot(diff[..., 0], diff[..., 1])
    los_home = rng.random(d_home.shape) < los_probability(ch, d_home)

    return Realization(
        primary_bs=primary_bs,
        secondary_bs=secondary_bs,
        primary_users=primary_users,
        secondary_users=secondary_users,
        los_pb_p=los_pb_p, los_sb_p=los_sb_p,
        fade_pb_p=fade_pb_p, fade_sb_p=fade_sb_p,
        angle_pb_p=angle_pb_p, angle_sb_p=angle_sb_p,
        los_pb_s=los_pb_s, los_sb_s=los_sb_s,
        fade_pb_s=fade_pb_s, fade_sb_s=fade_sb_s,
        angle_pb_s=angle_pb_s, angle_sb_s=angle_sb_s,
        los_home=los_home,
    )


def _avg_gain(channel: ChannelModel, is_los: np.ndarray, dists: np.ndarray) -> np.ndarray:
    """Fading-averaged channel gain C_t d^-alpha_t with per-link types."""
    a_l, a_n = channel.alpha[LinkType.LOS], channel.alpha[LinkType.NLOS]
    c_l, c_n = channel.near_gain[LinkType.LOS], channel.near_gain[LinkType.NLOS]
    g = np.empty_like(dists)
    with np.errstate(divide="ignore"):
        g[is_los] = c_l * dists[is_los] ** -a_l
        nlos = ~is_los
        g[nlos] = c_n * dists[nlos] ** -a_n
    return g


def _argmax_with_ties(power: np.ndarray, dist: np.ndarray) -> int:
    """Index of the max power; ties broken by distance, then index."""
    order = np.lexsort((np.arange(power.size), dist, -power))
    return int(order[0])


def associate_and_power(realization: Realization, scenario: Scenario) -> Realization:
    """Fill home assignment, home distance/type and transmit power of every
    secondary BS; also the Palm-augmented powers seen by the primary probe."""
    ch = scenario.channel
    n_sec = realization.secondary_bs.shape[0]
    if realization.primary_users.shape[0] == 0:
        raise ValueError("no primary users in window; realization must be resampled")
    diff = realization.secondary_bs[:, None, :] - realization.primary_users[None, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1])
    metric = _avg_gain(ch, realization.los_home, d)
    rows = np.arange(n_sec)
    # argmax picks the lowest index; exact power ties (probability zero) fall
    # back to the full rule: smallest distance, then lowest index
    best = np.argmax(metric, axis=1)
    tied = (metric == metric[rows, best][:, None]).sum(axis=1) > 1
    for i in np.nonzero(tied)[0]:
        order = np.lexsort((np.arange(d.shape[1]), d[i], -metric[i]))
        best[i] = order[0]
    home_distance = d[rows, best]
    home_is_los = realization.los_home[rows, best]
    rule = scenario.secondary.power_rule
    if isinstance(rule, InterferenceCap):
        a_l, a_n = ch.alpha[LinkType.LOS], ch.alpha[LinkType.NLOS]
        c_l, c_n = ch.near_gain[LinkType.LOS], ch.near_gain[LinkType.NLOS]
        tx = np.where(
            home_is_los,
            rule.xi * home_distance**a_l / c_l,
            rule.xi * home_distance**a_n / c_n,
        )
        # Palm view of the primary probe: the probe user is itself a home
        # candidate; BSs won by it become native and re-anchor their power.
        d_origin = np.hypot(realization.secondary_bs[:, 0], realization.secondary_bs[:, 1])
        origin_metric = _avg_gain(ch, realization.los_sb_p, d_origin)
        best_metric = metric[rows, best]
        native = origin_metric > best_metric
        aug = np.where(
            realization.los_sb_p,
            rule.xi * d_origin**a_l / c_l,
            rule.xi * d_origin**a_n / c_n,
        )
        aug_power = np.where(native, aug, tx)
    else:
        tx = np.full(n_sec, rule.watts)
        native = np.zeros(n_sec, dtype=bool)
        aug_power = tx
    realization.home_index = best
    realization.home_distance = home_distance
    realization.home_is_los = home_is_los
    realization.tx_power = tx
    realization.aug_native = native
    realization.aug_power = aug_power
    return realization


def typical_user_sinr(realization: Realization, scenario: Scenario, which: str) -> float:
    """SINR of the typical user of ``which`` operator at the origin.

    The tagged BS maximizes the fading-averaged received power in its own
    network (including the per-BS transmit power for the secondary); it is
    excluded from interference and serves with the full main-lobe gain.
    """
    ch = scenario.channel
    d_pb = np.hypot(realization.primary_bs[:, 0], realization.primary_bs[:, 1])
    d_sb = np.hypot(realization.secondary_bs[:, 0], realization.secondary_bs[:, 1])
    p_primary = scenario.primary.power_rule.watts
    g_p = scenario.primary.antenna
    g_s = scenario.secondary.antenna

    if which == "primary":
        if d_pb.size == 0:
            raise ValueError("no primary BS in window; realization must be resampled")
        avg_own = p_primary * _avg_gain(ch, realization.los_pb_p, d_pb)
        tagged = _argmax_with_ties(avg_own, d_pb)
        signal = g_p.main_gain * realization.fade_pb_p[tagged] * avg_own[tagged]
        own_gains = g_p.gain(realization.angle_pb_p)
        own = own_gains * realization.fade_pb_p * avg_own
        own[tagged] = 0.0
        cross = (
            g_s.gain(realization.angle_sb_p)
            * realization.fade_sb_p
            * realization.aug_power
            * _avg_gain(ch, realization.los_sb_p, d_sb)
        )
        noise = scenario.primary.noise_power
        denom = noise + own.sum() + cross.sum()
    elif which == "secondary":
        if d_sb.size == 0:
            raise ValueError("no secondary BS in window; realization must be resampled")
        avg_own = realization.tx_power * _avg_gain(ch, realization.los_sb_s, d_sb)
        tagged = _argmax_with_ties(avg_own, d_sb)
        signal = g_s.main_gain * realization.fade_sb_s[tagged] * avg_own[tagged]
        own_gains = g_s.gain(realization.angle_sb_s)
        own = own_gains * realization.fade_sb_s * avg_own
        own[tagged] = 0.0
        cross = (
            g_p.gain(realization.angle_pb_s)
            * realization.fade_pb_s
            * p_primary
            * _avg_gain(ch, realization.los_pb_s, d_pb)
        )
        noise = scenario.secondary.noise_power
        denom = noise + own.sum() + cross.sum()
    else:
        raise ValueError(f"unknown operator {which!r}")
    if denom == 0.0:
        return math.inf  # measure-zero no-interference, no-noise case
    return float(signal / denom)


@dataclass
class Diagnostics:
    """Bookkeeping of rejected realizations and edge effects."""

    n_realizations: int = 0
    rejected_no_primary_user: int = 0
    rejected_no_primary_bs: int = 0
    rejected_no_secondary_bs: int = 0
    tagged_beyond_guard: int = 0

    @property
    def rejection_fraction(self) -> float:
        total = (
            self.rejected_no_primary_user
            + self.rejected_no_primary_bs
            + self.rejected_no_secondary_bs
        )
        return total / max(1, self.n_realizations + total)

    def merge(self, other: "Diagnostics") -> "Diagnostics":
        return Diagnostics(
            self.n_realizations + other.n_realizations,
            self.rejected_no_primary_user + other.rejected_no_primary_user,
            self.rejected_no_primary_bs + other.rejected_no_primary_bs,
            self.rejected_no_secondary_bs + other.rejected_no_secondary_bs,
            self.tagged_beyond_guard + other.tagged_beyond_guard,
        )


def _one_sinr_pair(scenario: Scenario, index: int, diag: Diagnostics) -> tuple[float, float]:
    """Sample (resampling on rejection) and measure both probes."""
    for attempt in range(_MAX_ATTEMPTS):
        real = sample_realization(scenario, index, attempt)
        if real.primary_users.shape[0] == 0:
            diag.rejected_no_primary_user += 1
            continue
        if real.primary_bs.shape[0] == 0:
            diag.rejected_no_primary_bs += 1
            continue
        if real.secondary_bs.shape[0] == 0:
            diag.rejected_no_secondary_bs += 1
            continue
        associate_and_power(real, scenario)
        sinr_p = typical_user_sinr(real, scenario, "primary")
        sinr_s = typical_user_sinr(real, scenario, "secondary")
        d_pb = np.hypot(real.primary_bs[:, 0], real.primary_bs[:, 1])
        if d_pb.min() > scenario.guard_radius:
            diag.tagged_beyond_guard += 1
        diag.n_realizations += 1
        return sinr_p, sinr_s
    raise RuntimeError(f"realization {index} rejected {_MAX_ATTEMPTS} times")


def _sinr_chunk(args) -> tuple[np.ndarray, np.ndarray, Diagnostics]:
    scenario, indices = args
    diag = Diagnostics()
    sp = np.empty(len(indices))
    ss = np.empty(len(indices))
    for j, i in enumerate(indices):
        sp[j], ss[j] = _one_sinr_pair(scenario, i, diag)
    return sp, ss, diag


def sinr_samples(
    scenario: Scenario, threads: int = 1
) -> tuple[np.ndarray, np.ndarray, Diagnostics]:
    """SINR samples of both typical users over all realizations.

    The result is independent of ``threads``: realizations own disjoint RNG
    substreams and are merged in index order.
    """
    indices = list(range(scenario.n_realizations))
    if threads <= 1:
        return _sinr_chunk((scenario, indices))
    chunks = [c for c in np.array_split(indices, threads * 4) if len(c)]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(_sinr_chunk, [(scenario, list(c)) for c in chunks]))
    sp = np.concatenate([p[0] for p in parts])
    ss = np.concatenate([p[1] for p in parts])
    diag = Diagnostics()
    for p in parts:
        diag = diag.merge(p[2])
    return sp, ss, diag


def empirical_coverage(
    scenario: Scenario, thresholds, threads: int = 1
) -> tuple[CoverageCurve, CoverageCurve, Diagnostics]:
    """Monte Carlo coverage curves of both operators with 95% CIs."""
    thresholds = np.asarray(thresholds, dtype=float)
    if np.any(np.diff(thresholds) <= 0):
        raise ValueError("thresholds must be sorted ascending")
    sp, ss, diag = sinr_samples(scenario, threads=threads)
    n = sp.size
    prov = MonteCarloProvenance(n_realizations=n, seed=scenario.seed)
    curves = []
    for samples, name in ((sp, "primary"), (ss, "secondary")):
        values = (samples[None, :] > thresholds[:, None]).mean(axis=1)
        ci = 1.96 * np.sqrt(values * (1.0 - values) / n)
        curves.append(
            CoverageCurve(
                thresholds=thresholds,
                values=values,
                ci_halfwidth=ci,
                operator=name,
                provenance=prov,
            )
        )
    return curves[0], curves[1], diag


def uncoordinated_mode(scenario: Scenario) -> Scenario:
    """Power-matched unrestricted variant: the secondary transmits at a fixed
    power equal to the mean of its restricted power, so the total radiated
    power matches the restricted case; no interference cap applies."""
    rule = scenario.secondary.power_rule
    if not isinstance(rule, InterferenceCap):
        raise ValueError("scenario is already uncoordinated")
    dist = HomeLinkDistribution(scenario.channel, scenario.primary.user_density)
    mean_power = rule.xi * dist.mean_normalized_power()
    return replace(
        scenario, secondary=replace(scenario.secondary, power_rule=FixedPower(mean_power))
    )


def sample_home_links(
    channel: ChannelModel,
    user_density: float,
    n_samples: int,
    seed: int,
    start_radius: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample the (distance, is_los) law of the home primary user of a probe
    secondary BS by direct PPP simulation; the oracle for the analytic law.

    Each draw scatters a fresh user PPP around the BS and picks the
    max-average-power user; the sampling disk grows until no unexplored
    region could still contain the winner.
    """
    dist = HomeLinkDistribution(channel, user_density)
    hard_cap = dist.support_radius
    if start_radius is None:
        start_radius = min(hard_cap, 8.0 / math.sqrt(math.pi * user_density))
    a_l = channel.alpha[LinkType.LOS]
    c_l = channel.near_gain[LinkType.LOS]
    a_n = channel.alpha[LinkType.NLOS]
    c_n = channel.near_gain[LinkType.NLOS]
    out_r = np.empty(n_samples)
    out_los = np.empty(n_samples, dtype=bool)
    for i in range(n_samples):
        rng = substream(seed, i)
        best_metric, best_r, best_los = -np.inf, np.nan, False
        inner = 0.0
        outer = start_radius
        while True:
            area = math.pi * (outer * outer - inner * inner)
            n = rng.poisson(user_density * area)
            if n:
                r = np.sqrt(inner * inner + (outer * outer - inner * inner) * rng.random(n))
                los = rng.random(n) < los_probability(channel, r)
                metric = np.where(los, c_l * r**-a_l, c_n * r**-a_n)
                j = int(np.argmax(metric))
                if metric[j] > best_metric:
                    best_metric, best_r, best_los = metric[j], r[j], bool(los[j])
            if best_metric > 0:
                # farthest distance at which any link type could still win
                reach = max(
                    (c_l / best_metric) ** (1.0 / a_l), (c_n / best_metric) ** (1.0 / a_n)
                )
                if reach <= outer or outer >= hard_cap:
                    break
            elif outer >= hard_cap:
                raise RuntimeError("no home user found within the support radius")
            inner, outer = outer, min(max(outer * 2.0, 1.25 * outer), hard_cap)
        out_r[i] = best_r
        out_los[i] = best_los
    return out_r, out_los


def default_window_radius(scenario_like_primary_density: float,
                          secondary_density: float, beta: float) -> float:
    """Window rule: five times the larger of the mean cell radius of either
    network and the blockage decay length."""
    cell = 1.0 / math.sqrt(math.pi * min(scenario_like_primary_density, secondary_density))
    return 5.0 * max(cell, beta)
