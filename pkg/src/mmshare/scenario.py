"""Scenario bundle and coverage-curve containers shared by the Monte Carlo
simulator and the analytic engine."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .geometry import ChannelModel, InterferenceCap, OperatorConfig


@dataclass(frozen=True)
class Scenario:
    """One spectrum-sharing configuration: a primary and a secondary operator
    on the same band, plus the simulation window."""

    primary: OperatorConfig
    secondary: OperatorConfig
    channel: ChannelModel
    window_radius: float
    guard_radius: float
    seed: int = 0
    n_realizations: int = 1

    def __post_init__(self) -> None:
        if not (self.window_radius > self.guard_radius > 0):
            raise ValueError("require window_radius > guard_radius > 0")
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be at least 1")

    @property
    def interference_cap(self) -> float:
        rule = self.secondary.power_rule
        if not isinstance(rule, InterferenceCap):
            raise ValueError("secondary operator does not use an interference cap")
        return rule.xi


@dataclass(frozen=True)
class MonteCarloProvenance:
    n_realizations: int
    seed: int

    @property
    def tag(self) -> str:
        return f"mc(n={self.n_realizations},seed={self.seed})"


@dataclass(frozen=True)
class AnalyticProvenance:
    rtol: float

    @property
    def tag(self) -> str:
        return f"analytic(rtol={self.rtol:g})"


Provenance = Union[MonteCarloProvenance, AnalyticProvenance]

# numerical slack allowed when checking monotonicity of tabulated curves
# (analytic curves carry quadrature noise at the engine tolerance)
_MONOTONE_SLACK = 1e-5


@dataclass(frozen=True)
class CoverageCurve:
    """Tabulated coverage probability versus linear SINR (or rate) threshold."""

    thresholds: np.ndarray
    values: np.ndarray
    ci_halfwidth: np.ndarray
    operator: str
    provenance: Provenance

    def __post_init__(self) -> None:
        object.__setattr__(self, "thresholds", np.asarray(self.thresholds, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "ci_halfwidth", np.asarray(self.ci_halfwidth, dtype=float))
        t, v, c = self.thresholds, self.values, self.ci_halfwidth
        if not (t.shape == v.shape == c.shape):
            raise ValueError("threshold, value and CI arrays must share a shape")
        if np.any(np.diff(t) <= 0):
            raise ValueError("thresholds must be strictly increasing")
        if np.any(v < -_MONOTONE_SLACK) or np.any(v > 1 + _MONOTONE_SLACK):
            raise ValueError("coverage values must lie in [0, 1]")
        if np.any(np.diff(v) > _MONOTONE_SLACK + 2 * (c[:-1] + c[1:])):
            raise ValueError("coverage values must be non-increasing in the threshold")
        if np.any(c < 0):
            raise ValueError("confidence halfwidths must be non-negative")

    def value_at(self, threshold: float) -> float:
        """Log-linear interpolation of the curve at a threshold inside the
        tabulated range; raises outside it (no extrapolation)."""
        t = self.thresholds
        if threshold < t[0] or threshold > t[-1]:
            raise ValueError(
                f"threshold {threshold:g} outside tabulated range [{t[0]:g}, {t[-1]:g}]"
            )
        return float(np.interp(np.log(threshold), np.log(t), self.values))
