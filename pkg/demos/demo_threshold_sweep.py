"""Licensing economics: median rates and the three entities' utilities as
the interference cap sweeps across the noise-comparable regime.

Shows the central tension: a looser cap buys the secondary operator rate
(and license fees for the primary and the central authority) at the price
of primary-network degradation, so the primary's utility peaks at a finite
cap.  Equivalent to `mmshare sweep-xi` on a 9-point grid.
"""

import numpy as np

from mmshare import LinearPricing, sweep_xi
from mmshare.config import baseline_config
from mmshare.economics import rate_table_for
from mmshare.quadrature import QuadratureSpec
from mmshare.units import linear_to_db


def main():
    cfg = baseline_config()
    scenario = cfg.scenario()
    load = cfg.load_model()
    xi_grid = 10.0 ** (np.linspace(-130.0, -90.0, 9) / 10.0)
    quad = QuadratureSpec(rtol=3e-5, atol=1e-12)

    print("computing median rates (one engine run per cap)...")
    table = rate_table_for(scenario, xi_grid, load, quad)
    print("\ncap[dB]     R_P           R_S")
    for xi, r_p, r_s in table:
        print(f"{linear_to_db(xi):7.1f}  {r_p:12.1f}  {r_s:12.1f}")

    for pi_sp in (0.125, 0.25, 0.375):
        pricing = LinearPricing(license_secondary_primary=pi_sp)
        result = sweep_xi(scenario, xi_grid, pricing, load, quad, rate_table=table)
        print(f"\n--- secondary-to-primary license constant {pi_sp} ---")
        print("cap[dB]      U_P         U_S         U_C")
        for rep in result.reports:
            print(
                f"{linear_to_db(rep.xi):7.1f} {rep.utility_primary:11.1f}"
                f" {rep.utility_secondary:11.1f} {rep.utility_central:11.1f}"
            )
        print(
            f"argmax caps [dB]: U_P at {linear_to_db(result.argmax_primary):.0f}, "
            f"U_C at {linear_to_db(result.argmax_central):.0f}, "
            f"U_P+U_C at {linear_to_db(result.argmax_primary_plus_central):.0f}"
        )


if __name__ == "__main__":
    main()
