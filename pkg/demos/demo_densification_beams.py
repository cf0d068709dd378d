"""Densification and beam narrowing, the two mmWave levers.

Densifying the capped guest network raises its own median SINR sharply
while barely moving the owner (the cap binds per home user, so extra BSs
bring signal closer without adding victim-side interference budget).
Narrowing the guest's beams helps it further and is almost invisible to the
owner.  Equivalent to `mmshare sweep-density` / `mmshare sweep-beamwidth`.
"""

import math

import numpy as np

from mmshare import CoverageEngine, invert_coverage, median_rate, ula_pattern
from mmshare.config import baseline_config
from mmshare.economics import LoadModel
from mmshare.quadrature import QuadratureSpec

QUAD = QuadratureSpec(rtol=3e-5, atol=1e-12)


def densification():
    print("=== secondary densification (cap -120 dB) ===")
    print("density   median SINR_P   median SINR_S")
    for lam_s in (15, 30, 60, 120):
        cfg = baseline_config(secondary_bs_density=lam_s * 1e-6)
        engine = CoverageEngine(cfg.scenario(), QUAD)
        med_p = 10 * math.log10(invert_coverage(engine.coverage_primary))
        med_s = 10 * math.log10(invert_coverage(engine.coverage_secondary))
        print(f"{lam_s:4d}/km2   {med_p:+8.2f} dB     {med_s:+8.2f} dB")


def beam_narrowing():
    print("\n=== secondary array size (half the power in the main lobe) ===")
    print("elements  beamwidth     R_P           R_S")
    for n in (4, 8, 16, 32, 64, 128):
        pattern = ula_pattern(n, 0.5)
        cfg = baseline_config()
        scenario = cfg.scenario()
        from dataclasses import replace

        scenario = replace(
            scenario, secondary=replace(scenario.secondary, antenna=pattern)
        )
        load = LoadModel.from_scenario(scenario, cfg.bandwidth)
        engine = CoverageEngine(scenario, QUAD)
        r_p = median_rate(
            engine.coverage_primary, load, "primary", scenario.primary.user_density
        )
        r_s = median_rate(
            engine.coverage_secondary, load, "secondary", scenario.secondary.user_density
        )
        print(
            f"{n:5d}    {math.degrees(pattern.beamwidth):6.2f} deg"
            f"  {r_p:12.1f}  {r_s:12.1f}"
        )


if __name__ == "__main__":
    densification()
    beam_narrowing()
