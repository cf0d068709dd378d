"""Rate coverage, median area rates and the three-entity utility model.

Rates follow the mean-load resource split: a user gets a 1/n fraction of the
bandwidth with n = 1 + 1.28 * (user density / BS density).  The median area
rate of an operator is its user density divided by the load times the rate
at the 0.5 coverage quantile.  Utilities combine linear revenue with the
license payments between the primary operator, the secondary operator and
the central licensing authority.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .analytic import CoverageEngine
from .geometry import InterferenceCap
from .quadrature import QuadratureSpec
from .scenario import CoverageCurve, Scenario

INVERSION_TOL = 1e-4  # |coverage(tau*) - level| at the reported quantile


@dataclass(frozen=True)
class LoadModel:
    """Mean per-BS load of both operators and the shared bandwidth."""

    n_primary: float
    n_secondary: float
    bandwidth: float

    def __post_init__(self) -> None:
        if self.n_primary < 1 or self.n_secondary < 1:
            raise ValueError("mean loads must be at least 1")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")

    @classmethod
    def from_scenario(cls, scenario: Scenario, bandwidth: float) -> "LoadModel":
        return cls(
            n_primary=1.0 + 1.28 * scenario.primary.user_density / scenario.primary.bs_density,
            n_secondary=1.0
            + 1.28 * scenario.secondary.user_density / scenario.secondary.bs_density,
            bandwidth=bandwidth,
        )

    def n(self, operator: str) -> float:
        if operator == "primary":
            return self.n_primary
        if operator == "secondary":
            return self.n_secondary
        raise ValueError(f"unknown operator {operator!r}")


def rate_threshold(load: LoadModel, operator: str, rate: float) -> float:
    """SINR threshold equivalent to a rate threshold: 2^(rate*n/W) - 1."""
    if rate < 0:
        raise ValueError("rate threshold must be non-negative")
    return float(2.0 ** (rate * load.n(operator) / load.bandwidth) - 1.0)


def rate_coverage(source, load: LoadModel, rate: float, operator: str) -> float:
    """Probability that a typical user's rate exceeds ``rate`` bits/s.

    ``source`` is either a tabulated :class:`CoverageCurve` (log-linear
    interpolation; thresholds outside the table raise) or a callable
    evaluating coverage at a linear SINR threshold.
    """
    tau = rate_threshold(load, operator, rate)
    if tau == 0.0:
        return 1.0
    if isinstance(source, CoverageCurve):
        return source.value_at(tau)
    return float(source(tau))


def invert_curve(curve: CoverageCurve, level: float = 0.5) -> float:
    """Threshold at which a tabulated coverage curve crosses ``level``."""
    v, t = curve.values, curve.thresholds
    if v[0] < level or v[-1] > level:
        raise ValueError(
            f"coverage curve does not cross {level} on its tabulated range"
        )
    idx = int(np.argmax(v <= level))
    if v[idx] == level:
        return float(t[idx])
    lo, hi = idx - 1, idx
    # log-linear between the bracketing grid points
    frac = (v[lo] - level) / (v[lo] - v[hi])
    return float(np.exp(np.log(t[lo]) + frac * (np.log(t[hi]) - np.log(t[lo]))))


def invert_coverage(
    coverage, level: float = 0.5, bracket: tuple[float, float] = (1e-9, 1e9),
    batch: int = 13, max_passes: int = 8,
) -> float:
    """Median (or general quantile) SINR threshold of a coverage function.

    ``coverage`` must accept an array of thresholds.  Uses vectorized
    bracketing passes on a log grid, then verifies the interpolated root to
    ``INVERSION_TOL`` in coverage value.
    """
    lo, hi = bracket
    for _ in range(6):  # bracket expansion
        ends = np.asarray(coverage(np.array([lo, hi])))
        if ends[0] >= level >= ends[1]:
            break
        if ends[0] < level:
            lo /= 1e3
        if ends[1] > level:
            hi *= 1e3
    else:
        raise ValueError(f"coverage does not cross {level} on any expanded bracket")
    root = math.nan
    for _ in range(max_passes):
        grid = np.exp(np.linspace(math.log(lo), math.log(hi), batch))
        vals = np.asarray(coverage(grid))
        idx = int(np.argmax(vals <= level))
        if idx == 0:
            idx = 1
        lo, hi = grid[idx - 1], grid[idx]
        v_lo, v_hi = vals[idx - 1], vals[idx]
        if v_lo == v_hi:
            root = math.sqrt(lo * hi)
        else:
            frac = (v_lo - level) / (v_lo - v_hi)
            root = math.exp(math.log(lo) + frac * (math.log(hi) - math.log(lo)))
        if abs(float(coverage(np.array([root]))[0]) - level) <= INVERSION_TOL:
            return float(root)
    raise RuntimeError(
        f"coverage inversion did not reach |coverage - {level}| <= {INVERSION_TOL}"
    )


def median_rate(
    source,
    load: LoadModel,
    operator: str,
    user_density: float,
    quantile: float = 0.5,
    natural_log: bool = False,
) -> float:
    """Median area rate: ``W * lambda_R / n * log2(1 + tau_q)`` with tau_q the
    coverage quantile.  ``quantile`` defaults to the median; ``natural_log``
    switches the spectral-efficiency logarithm to base e."""
    if isinstance(source, CoverageCurve):
        tau = invert_curve(source, quantile)
    else:
        tau = invert_coverage(source, quantile)
    log_term = math.log(1.0 + tau) if natural_log else math.log2(1.0 + tau)
    return load.bandwidth * user_density / load.n(operator) * log_term


# ------------------------------------------------------------------ pricing


@dataclass(frozen=True)
class LinearPricing:
    """Linear revenue and licensing functions.

    ``revenue_*`` are the per-rate revenue constants of the operators;
    ``license_primary`` is paid by the primary to the central entity,
    ``license_secondary_central`` by the secondary to the central entity and
    ``license_secondary_primary`` by the secondary to the primary.
    """

    revenue_primary: float = 1.0
    revenue_secondary: float = 1.0
    license_primary: float = 0.25
    license_secondary_central: float = 0.125
    license_secondary_primary: float = 0.25

    def __post_init__(self) -> None:
        for name, value in self.__dict__.items():
            if value < 0:
                raise ValueError(f"pricing constant {name} must be non-negative")

    def revenue_p(self, rate: float) -> float:
        return self.revenue_primary * rate

    def revenue_s(self, rate: float) -> float:
        return self.revenue_secondary * rate

    def pay_primary_to_central(self, rate: float) -> float:
        return self.license_primary * rate

    def pay_secondary_to_central(self, rate: float) -> float:
        return self.license_secondary_central * rate

    def pay_secondary_to_primary(self, rate: float) -> float:
        return self.license_secondary_primary * rate


@dataclass(frozen=True)
class UtilityReport:
    """Utilities of the three entities at one interference cap."""

    xi: float
    rate_primary: float
    rate_secondary: float
    utility_primary: float
    utility_secondary: float
    utility_central: float
    revenue_primary: float
    revenue_secondary: float
    payment_primary_central: float
    payment_secondary_central: float
    payment_secondary_primary: float

    def __post_init__(self) -> None:
        total = self.utility_primary + self.utility_secondary + self.utility_central
        revenue = self.revenue_primary + self.revenue_secondary
        scale = max(abs(revenue), 1e-30)
        if abs(total - revenue) > 1e-9 * scale:
            raise ValueError("utility conservation violated: payments must telescope")


def utilities(rate_primary: float, rate_secondary: float, pricing, xi: float = math.nan) -> UtilityReport:
    """Three-entity utilities from the median rates under a pricing model."""
    if rate_primary < 0 or rate_secondary < 0:
        raise ValueError("rates must be non-negative")
    m_p = pricing.revenue_p(rate_primary)
    m_s = pricing.revenue_s(rate_secondary)
    p_p = pricing.pay_primary_to_central(rate_primary)
    p_sc = pricing.pay_secondary_to_central(rate_secondary)
    p_sp = pricing.pay_secondary_to_primary(rate_secondary)
    return UtilityReport(
        xi=xi,
        rate_primary=rate_primary,
        rate_secondary=rate_secondary,
        utility_primary=m_p - p_p + p_sp,
        utility_secondary=m_s - p_sc - p_sp,
        utility_central=p_p + p_sc,
        revenue_primary=m_p,
        revenue_secondary=m_s,
        payment_primary_central=p_p,
        payment_secondary_central=p_sc,
        payment_secondary_primary=p_sp,
    )


def default_xi_grid(n_points: int = 21) -> np.ndarray:
    """Log grid over the noise-comparable cap regime, -130 dB to -90 dB."""
    return 10.0 ** (np.linspace(-130.0, -90.0, n_points) / 10.0)


def with_cap(scenario: Scenario, xi: float) -> Scenario:
    return replace(
        scenario, secondary=replace(scenario.secondary, power_rule=InterferenceCap(xi))
    )


def mirrored_band(scenario: Scenario) -> Scenario:
    """The second band of the two-band sharing story: roles swapped, the new
    owner transmits the primary fixed power, the guest inherits the cap."""
    owner_power = scenario.primary.power_rule
    guest_rule = scenario.secondary.power_rule
    new_primary = replace(scenario.secondary, power_rule=owner_power)
    new_secondary = replace(scenario.primary, power_rule=guest_rule)
    return replace(scenario, primary=new_primary, secondary=new_secondary)


@dataclass(frozen=True)
class RatePair:
    """Median rates of one operator in its own and its guest band."""

    xi: float
    own_band: float
    guest_band: float

    @property
    def total(self) -> float:
        return self.own_band + self.guest_band


def median_rates_restricted(
    scenario: Scenario, load: LoadModel, quad: QuadratureSpec | None = None
) -> tuple[float, float]:
    """(primary, secondary) median area rates of a restricted scenario."""
    engine = CoverageEngine(scenario, quad)
    r_p = median_rate(
        engine.coverage_primary, load, "primary", scenario.primary.user_density
    )
    r_s = median_rate(
        engine.coverage_secondary, load, "secondary", scenario.secondary.user_density
    )
    return r_p, r_s


@dataclass
class XiSweepResult:
    reports: list[UtilityReport]
    failures: list[tuple[float, str]]

    def argmax_xi(self, key) -> float:
        best = max(self.reports, key=key)
        return best.xi

    @property
    def argmax_primary(self) -> float:
        return self.argmax_xi(lambda r: r.utility_primary)

    @property
    def argmax_central(self) -> float:
        return self.argmax_xi(lambda r: r.utility_central)

    @property
    def argmax_primary_plus_central(self) -> float:
        return self.argmax_xi(lambda r: r.utility_primary + r.utility_central)


def sweep_xi(
    scenario: Scenario,
    xi_grid,
    pricing,
    load: LoadModel,
    quad: QuadratureSpec | None = None,
    rate_table: list[tuple[float, float, float]] | None = None,
) -> XiSweepResult:
    """Median rates and utilities across an ascending cap grid.

    Per-point failures are recorded and the sweep continues.  A precomputed
    ``rate_table`` of (xi, rate_p, rate_s) rows skips the engine runs, which
    lets several pricing models share one sweep.
    """
    xi_grid = np.asarray(xi_grid, dtype=float)
    if np.any(np.diff(xi_grid) <= 0) or np.any(xi_grid <= 0):
        raise ValueError("xi grid must be positive and sorted ascending")
    if rate_table is None:
        rate_table = rate_table_for(scenario, xi_grid, load, quad)
    reports, failures = [], []
    for xi, r_p, r_s in rate_table:
        if math.isnan(r_p) or math.isnan(r_s):
            failures.append((xi, "median rate evaluation failed"))
            continue
        reports.append(utilities(r_p, r_s, pricing, xi=xi))
    return XiSweepResult(reports=reports, failures=failures)


def rate_table_for(
    scenario: Scenario, xi_grid, load: LoadModel, quad: QuadratureSpec | None = None
) -> list[tuple[float, float, float]]:
    """(xi, median primary rate, median secondary rate) for each cap."""
    rows = []
    for xi in np.asarray(xi_grid, dtype=float):
        try:
            r_p, r_s = median_rates_restricted(with_cap(scenario, xi), load, quad)
        except Exception:
            rows.append((float(xi), math.nan, math.nan))
            continue
        rows.append((float(xi), r_p, r_s))
    return rows


def compare_sharing_modes(
    scenario: Scenario,
    xi_grid,
    load: LoadModel,
    quad: QuadratureSpec | None = None,
) -> list[dict]:
    """Restricted versus power-matched uncoordinated sharing over two
    mirrored bands; one row per cap with per-band and summed median rates."""
    from .montecarlo import uncoordinated_mode

    rows = []
    for xi in np.asarray(xi_grid, dtype=float):
        capped = with_cap(scenario, xi)
        mirrored = mirrored_band(capped)
        row: dict = {"xi": float(xi)}
        try:
            own_engine = CoverageEngine(capped, quad)
            guest_engine = CoverageEngine(mirrored, quad)
            row["restricted_own"] = median_rate(
                own_engine.coverage_primary, load, "primary",
                capped.primary.user_density,
            )
            # the operator's network appears as the guest tier of the mirror
            guest_load = LoadModel(
                n_primary=load.n_secondary, n_secondary=load.n_primary,
                bandwidth=load.bandwidth,
            )
            row["restricted_guest"] = median_rate(
                guest_engine.coverage_secondary, guest_load, "secondary",
                mirrored.secondary.user_density,
            )
            unc = uncoordinated_mode(capped)
            unc_mirror = uncoordinated_mode(mirrored)
            unc_engine = CoverageEngine(unc, quad)
            unc_guest_engine = CoverageEngine(unc_mirror, quad)
            row["uncoordinated_own"] = median_rate(
                lambda t: unc_engine.coverage_uncoordinated(t, "primary"),
                load, "primary", unc.primary.user_density,
            )
            row["uncoordinated_guest"] = median_rate(
                lambda t: unc_guest_engine.coverage_uncoordinated(t, "secondary"),
                guest_load, "secondary", unc_mirror.secondary.user_density,
            )
            row["restricted_sum"] = row["restricted_own"] + row["restricted_guest"]
            row["uncoordinated_sum"] = row["uncoordinated_own"] + row["uncoordinated_guest"]
        except Exception as exc:  # recorded, sweep continues
            row["error"] = str(exc)
        rows.append(row)
    return rows
