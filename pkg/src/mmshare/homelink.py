"""Joint law of the home-user radio distance and link type.

Every secondary BS serves its interference cap to the primary user with the
highest average received power.  With user PPP density ``lambda_u`` the
joint density of (distance R, link type T) of that user is

    f(r, T) = 2*pi*lambda_u * p_T(r) * r
              * exp(-lambda_u * (V_L(E_T^L(r)) + V_N(E_T^N(r))))

where V_t is the blockage-weighted disk volume and E_T^t the exclusion
radius.  The cap-normalized transmit power is X = R^alpha_T / C_T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import integrate

from .geometry import ChannelModel, LinkType, TWO_PI, exclusion_radius

# fixed Gauss-Legendre rule used for the cached node representation
_CORE_PANELS = 18
_TAIL_RATIO = 1.5
_GL_ORDER = 32
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)

MASS_TOL = 1e-6


class QuadratureError(RuntimeError):
    """Raised when an adaptive quadrature cannot reach the requested
    tolerance; carries the tolerance that was achieved."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved tolerance {achieved:.3e})")
        self.achieved = achieved


@dataclass(frozen=True)
class HomeLinkDistribution:
    """Distribution of a secondary BS's home primary user.

    Immutable; the node representation is computed lazily and cached.
    """

    channel: ChannelModel
    primary_user_density: float

    def __post_init__(self) -> None:
        if self.primary_user_density <= 0:
            raise ValueError("primary user density must be positive")

    # ------------------------------------------------------------------ pdf

    def pdf(self, r, t: LinkType):
        """Joint density f(r, T=t) in 1/meter."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("distance must be non-negative")
        lam = self.primary_user_density
        ch = self.channel
        exponent = np.zeros_like(r)
        for other in LinkType:
            excl = exclusion_radius(ch, t, other, r)
            exponent += ch.volume(other, excl)
        out = TWO_PI * lam * ch.p_type(t, r) * r * np.exp(-lam * exponent)
        return out if out.shape else float(out)

    @cached_property
    def support_radius(self) -> float:
        """Radius beyond which the joint density is numerically negligible."""
        scale = 1.0 / math.sqrt(math.pi * self.primary_user_density)
        r_max = 4.0 * scale
        peak = max(self.pdf(scale, t) for t in LinkType) + 1e-300
        while max(self.pdf(r_max, t) for t in LinkType) > 1e-18 * peak:
            r_max *= 1.5
            if r_max > 1e9:
                raise RuntimeError("home-link density does not decay; check channel model")
        return r_max

    # ----------------------------------------------------------- node cache

    @cached_property
    def nodes(self) -> dict[LinkType, tuple[np.ndarray, np.ndarray]]:
        """Per-type quadrature nodes ``(r_i, w_i)`` with ``w_i`` absorbing the
        density, so that ``E[g(R, T)] = sum_T sum_i w_i g(r_i, T)``.

        Panels are dense across the bulk of the law and grow geometrically
        into the (light) far tail."""
        core = min(self.support_radius, 6.0 / math.sqrt(math.pi * self.primary_user_density))
        edge_list = list(np.linspace(0.0, core, _CORE_PANELS + 1))
        x = core
        while x < self.support_radius:
            x = min(self.support_radius, x * _TAIL_RATIO)
            edge_list.append(x)
        edges = np.asarray(edge_list)
        out: dict[LinkType, tuple[np.ndarray, np.ndarray]] = {}
        for t in LinkType:
            rs, ws = [], []
            for a, b in zip(edges[:-1], edges[1:]):
                half = 0.5 * (b - a)
                mid = 0.5 * (b + a)
                r = mid + half * _GL_X
                rs.append(r)
                ws.append(half * _GL_W * self.pdf(r, t))
            out[t] = (np.concatenate(rs), np.concatenate(ws))
        mass = sum(w.sum() for _, w in out.values())
        if abs(mass - 1.0) > MASS_TOL:
            raise QuadratureError(
                "home-link node representation fails to normalize", abs(mass - 1.0)
            )
        return out

    @cached_property
    def power_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened ``(xbar_i, w_i)`` nodes of the cap-normalized power
        X = R^alpha_T / C_T, for fast vectorized expectations."""
        xs, ws = [], []
        for t in LinkType:
            r, w = self.nodes[t]
            xs.append(r ** self.channel.alpha[t] / self.channel.near_gain[t])
            ws.append(w)
        return np.concatenate(xs), np.concatenate(ws)

    def total_mass(self) -> float:
        return float(sum(w.sum() for _, w in self.nodes.values()))

    # ---------------------------------------------------------- expectations

    def expect(self, g: Callable[[np.ndarray, LinkType], np.ndarray]) -> float:
        """Node-based expectation of ``g(r, T)`` over the joint law."""
        total = 0.0
        for t in LinkType:
            r, w = self.nodes[t]
            total += float(np.dot(w, g(r, t)))
        return total

    def expect_power(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        """Node-based expectation of ``f(X)`` of the normalized power."""
        xbar, w = self.power_nodes
        return float(np.dot(w, f(xbar)))

    def expect_power_quad(
        self, f: Callable[[float], float], rtol: float = 1e-9, atol: float = 1e-12
    ) -> float:
        """Adaptive-quadrature expectation of ``f(X)``; independent of the
        node cache.  Raises :class:`QuadratureError` on non-convergence."""
        total = 0.0
        worst = 0.0
        for t in LinkType:
            a_t = self.channel.alpha[t]
            c_t = self.channel.near_gain[t]

            def integrand(r: float, _t=t, _a=a_t, _c=c_t) -> float:
                return f(r**_a / _c) * self.pdf(r, _t)

            val, err = integrate.quad(
                integrand, 0.0, self.support_radius, epsabs=atol, epsrel=rtol, limit=200
            )
            total += val
            worst = max(worst, err)
        if worst > max(atol, rtol * max(abs(total), 1.0)) * 50:
            raise QuadratureError("normalized-power expectation did not converge", worst)
        return total

    def mean_normalized_power(self) -> float:
        """E[X] = E[R^alpha_T / C_T]; the mean restricted power is xi * E[X]."""
        return self.expect_power(lambda x: x)

    def subdistribution(self, t: LinkType, n_grid: int = 20001):
        """Cumulative mass ``F_t(r) = P(R <= r, T = t)`` as an interpolant.

        Returns ``(grid, values)`` suitable for ``np.interp``.
        """
        grid = np.linspace(0.0, self.support_radius, n_grid)
        dens = self.pdf(grid, t)
        cdf = integrate.cumulative_trapezoid(dens, grid, initial=0.0)
        return grid, cdf


def normalized_power_moments(
    dist: HomeLinkDistribution, f: Callable[[np.ndarray], np.ndarray]
) -> float:
    """Expectation E[f(X)] of the cap-normalized power X = R^alpha_T / C_T."""
    return dist.expect_power(f)
