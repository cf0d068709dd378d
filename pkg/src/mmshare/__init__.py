"""mmWave cellular spectrum sharing under restricted secondary licensing.

A stochastic-geometry toolkit: Monte Carlo network simulation, analytic
coverage/rate evaluation by numerical quadrature, and the licensing
economics of the primary operator, the secondary operator and the central
authority.
"""

from .analytic import (
    CoverageEngine,
    Kernel,
    SpecialCaseParams,
    coverage_primary_closed,
    coverage_secondary_arctan,
    coverage_secondary_closed,
    rho,
)
from .economics import (
    LinearPricing,
    LoadModel,
    UtilityReport,
    compare_sharing_modes,
    default_xi_grid,
    invert_coverage,
    invert_curve,
    median_rate,
    rate_coverage,
    sweep_xi,
    utilities,
    with_cap,
)
from .geometry import (
    AntennaPattern,
    ChannelModel,
    FixedPower,
    InterferenceCap,
    LinkType,
    OperatorConfig,
    antenna_gain,
    exclusion_radius,
    los_probability,
    normalized_tx_power,
    pathloss,
    secondary_tx_power,
    ula_pattern,
)
from .homelink import HomeLinkDistribution, normalized_power_moments
from .montecarlo import (
    Realization,
    associate_and_power,
    empirical_coverage,
    sample_home_links,
    sample_realization,
    sinr_samples,
    typical_user_sinr,
    uncoordinated_mode,
)
from .quadrature import QuadratureSpec
from .scenario import AnalyticProvenance, CoverageCurve, MonteCarloProvenance, Scenario

__version__ = "0.1.0"

__all__ = [
    "AnalyticProvenance",
    "AntennaPattern",
    "ChannelModel",
    "CoverageCurve",
    "CoverageEngine",
    "FixedPower",
    "HomeLinkDistribution",
    "InterferenceCap",
    "Kernel",
    "LinearPricing",
    "LinkType",
    "LoadModel",
    "MonteCarloProvenance",
    "OperatorConfig",
    "QuadratureSpec",
    "Realization",
    "Scenario",
    "SpecialCaseParams",
    "UtilityReport",
    "antenna_gain",
    "associate_and_power",
    "compare_sharing_modes",
    "coverage_primary_closed",
    "coverage_secondary_arctan",
    "coverage_secondary_closed",
    "default_xi_grid",
    "empirical_coverage",
    "exclusion_radius",
    "invert_coverage",
    "invert_curve",
    "los_probability",
    "median_rate",
    "normalized_power_moments",
    "normalized_tx_power",
    "pathloss",
    "rate_coverage",
    "rho",
    "sample_home_links",
    "sample_realization",
    "secondary_tx_power",
    "sinr_samples",
    "sweep_xi",
    "typical_user_sinr",
    "ula_pattern",
    "uncoordinated_mode",
    "utilities",
    "with_cap",
]
