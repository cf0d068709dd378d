"""Coverage validation: Monte Carlo network realizations against the
quadrature engine, both operators, two secondary densities.

A trimmed-down version of `mmshare validate --config demos/baseline.ini`:
fewer realizations so it finishes in about a minute on one core.
"""

import numpy as np

from mmshare import CoverageEngine, empirical_coverage
from mmshare.config import baseline_config
from mmshare.units import linear_to_db

N_REALIZATIONS = 4000


def main():
    thresholds = 10.0 ** (np.arange(-20.0, 41.0, 4.0) / 10.0)
    for lam_s in (30, 60):
        cfg = baseline_config(
            n_realizations=N_REALIZATIONS,
            seed=17,
            secondary_bs_density=lam_s * 1e-6,
        )
        scenario = cfg.scenario()
        print(f"\n=== secondary density {lam_s}/km^2 ===")
        curve_p, curve_s, diag = empirical_coverage(scenario, thresholds)
        engine = CoverageEngine(scenario)
        analytic_p = engine.coverage_primary(thresholds)
        analytic_s = engine.coverage_secondary(thresholds)
        print(f"rejected realizations: {diag.rejection_fraction:.2%}")
        print("tau[dB]   P_mc   P_an   |  S_mc   S_an")
        for i, tau in enumerate(thresholds):
            print(
                f"{linear_to_db(tau):7.1f} {curve_p.values[i]:6.3f} {analytic_p[i]:6.3f}"
                f"  | {curve_s.values[i]:6.3f} {analytic_s[i]:6.3f}"
            )
        gap_p = np.max(np.abs(curve_p.values - analytic_p))
        gap_s = np.max(np.abs(curve_s.values - analytic_s))
        print(f"max gaps: primary {gap_p:.4f}, secondary {gap_s:.4f}")


if __name__ == "__main__":
    main()
