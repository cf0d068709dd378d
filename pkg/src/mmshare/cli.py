"""Command-line entry point.

    mmshare <mode> --config <file> --out <dir> [--seed N] [--threads N]
            [--format csv|json]

Exit codes: 0 on success, 2 when validate mode exceeds its coverage-gap
tolerance, 1 on any error.  Results are written as a CSV table (the plot
interface) plus a JSON document carrying the same payload with metadata.
The payload is byte-stable for a fixed (config, seed) regardless of thread
count; wall-clock duration lives only in the JSON metadata.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import units
from .analytic import CoverageEngine
from .config import MODES, ConfigError, RunConfig, load_config
from .economics import (
    LoadModel,
    compare_sharing_modes,
    median_rate,
    rate_table_for,
    sweep_xi,
)
from .montecarlo import empirical_coverage
from .quadrature import QuadratureSpec
from .scenario import CoverageCurve

_FLOAT_FMT = "%.17g"


@dataclasses.dataclass
class ResultRecord:
    """One run's outcome: reproducibility metadata plus the table payload."""

    mode: str
    config_hash: str
    seed: int
    engine: str
    tolerance_info: dict
    columns: list[str]
    rows: list[list]
    summary: dict
    duration_s: float = 0.0

    def payload(self) -> dict:
        return {
            "mode": self.mode,
            "columns": self.columns,
            "rows": [[_scrub(v) for v in row] for row in self.rows],
            "summary": {k: _scrub(v) for k, v in self.summary.items()},
        }

    def to_json(self) -> str:
        from . import __version__

        doc = {
            "metadata": {
                "config_hash": self.config_hash,
                "seed": self.seed,
                "engine": self.engine,
                "engine_version": __version__,
                "tolerances": self.tolerance_info,
                "duration_s": self.duration_s,
            },
            "payload": self.payload(),
        }
        return json.dumps(doc, sort_keys=True, indent=1)

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            cells = []
            for v in row:
                if isinstance(v, float):
                    cells.append(_FLOAT_FMT % v)
                else:
                    cells.append(str(v))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def _scrub(v):
    if isinstance(v, float) and (math.isnan(v) or math.isinf(v)):
        return repr(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def emit(record: ResultRecord, out_dir: str | Path, fmt: str = "csv") -> list[Path]:
    """Write the record under ``out_dir``; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("csv", "both"):
        p = out / f"{record.mode}.csv"
        p.write_text(record.to_csv())
        written.append(p)
    if fmt in ("json", "both"):
        p = out / f"{record.mode}.json"
        p.write_text(record.to_json())
        written.append(p)
    return written


def _curve_rows(curves: list[CoverageCurve]) -> list[list]:
    rows = []
    for curve in curves:
        for tau, val, ci in zip(curve.thresholds, curve.values, curve.ci_halfwidth):
            rows.append(
                [units.linear_to_db(tau), float(val), float(ci), curve.operator,
                 curve.provenance.tag]
            )
    return rows


_CURVE_COLUMNS = ["threshold_db", "value", "ci_halfwidth", "operator", "provenance"]


def run(config: RunConfig, threads: int | None = None) -> ResultRecord:
    """Dispatch one mode and return its result record."""
    start = time.monotonic()
    threads = threads or config.threads
    scenario = config.scenario()
    load = config.load_model()
    quad = QuadratureSpec(rtol=1e-6, atol=1e-12)
    mode = config.mode
    summary: dict = {}
    if mode == "mc":
        cp, cs, diag = empirical_coverage(scenario, config.thresholds(), threads=threads)
        columns, rows = _CURVE_COLUMNS, _curve_rows([cp, cs])
        engine = "monte-carlo"
        summary = {"rejection_fraction": diag.rejection_fraction}
    elif mode == "analytic":
        eng = CoverageEngine(scenario, quad)
        curves = [
            eng.coverage_curve(config.thresholds(), "primary"),
            eng.coverage_curve(config.thresholds(), "secondary"),
        ]
        columns, rows = _CURVE_COLUMNS, _curve_rows(curves)
        engine = "analytic"
    elif mode == "validate":
        cp, cs, diag = empirical_coverage(scenario, config.thresholds(), threads=threads)
        eng = CoverageEngine(scenario, quad)
        ap = eng.coverage_curve(config.thresholds(), "primary")
        asec = eng.coverage_curve(config.thresholds(), "secondary")
        columns, rows = _CURVE_COLUMNS, _curve_rows([cp, cs, ap, asec])
        gap_p = float(np.max(np.abs(cp.values - ap.values)))
        gap_s = float(np.max(np.abs(cs.values - asec.values)))
        summary = {
            "max_gap_primary": gap_p,
            "max_gap_secondary": gap_s,
            "tolerance": config.validate_tolerance,
            "passed": bool(max(gap_p, gap_s) <= config.validate_tolerance),
            "rejection_fraction": diag.rejection_fraction,
        }
        engine = "monte-carlo+analytic"
    elif mode == "sweep-xi":
        table = rate_table_for(scenario, config.xi_grid(), load, quad)
        result = sweep_xi(scenario, config.xi_grid(), config.pricing(), load, quad,
                          rate_table=table)
        columns = ["xi_db", "r_p", "r_s", "u_p", "u_s", "u_c",
                   "revenue_p", "revenue_s", "pay_p_c", "pay_s_c", "pay_s_p"]
        rows = [
            [units.linear_to_db(r.xi), r.rate_primary, r.rate_secondary,
             r.utility_primary, r.utility_secondary, r.utility_central,
             r.revenue_primary, r.revenue_secondary, r.payment_primary_central,
             r.payment_secondary_central, r.payment_secondary_primary]
            for r in result.reports
        ]
        summary = {
            "argmax_u_p_xi_db": units.linear_to_db(result.argmax_primary),
            "argmax_u_c_xi_db": units.linear_to_db(result.argmax_central),
            "argmax_u_p_plus_c_xi_db": units.linear_to_db(
                result.argmax_primary_plus_central
            ),
            "failures": len(result.failures),
        }
        engine = "analytic"
    elif mode == "compare-modes":
        table = compare_sharing_modes(scenario, config.xi_grid(), load, quad)
        columns = ["xi_db", "restricted_own", "restricted_guest", "restricted_sum",
                   "uncoordinated_own", "uncoordinated_guest", "uncoordinated_sum"]
        rows = []
        for row in table:
            if "error" in row:
                summary.setdefault("errors", []).append(
                    {"xi_db": units.linear_to_db(row["xi"]), "error": row["error"]}
                )
                continue
            rows.append([units.linear_to_db(row["xi"]), row["restricted_own"],
                         row["restricted_guest"], row["restricted_sum"],
                         row["uncoordinated_own"], row["uncoordinated_guest"],
                         row["uncoordinated_sum"]])
        engine = "analytic"
    elif mode == "sweep-density":
        grid = config.density_grid or tuple(d * 1e-6 for d in (30.0, 60.0, 90.0))
        columns = ["secondary_density_per_km2", "median_sinr_p_db",
                   "median_sinr_s_db", "r_p", "r_s"]
        rows = []
        from .economics import invert_coverage

        for dens in grid:
            sc = dataclasses.replace(
                scenario, secondary=dataclasses.replace(scenario.secondary, bs_density=dens)
            )
            ld = LoadModel.from_scenario(sc, config.bandwidth)
            eng = CoverageEngine(sc, quad)
            med_p = invert_coverage(eng.coverage_primary)
            med_s = invert_coverage(eng.coverage_secondary)
            r_p = median_rate(eng.coverage_primary, ld, "primary", sc.primary.user_density,
                              natural_log=config.natural_log)
            r_s = median_rate(eng.coverage_secondary, ld, "secondary",
                              sc.secondary.user_density, natural_log=config.natural_log)
            rows.append([units.per_m2_to_per_km2(dens), units.linear_to_db(med_p),
                         units.linear_to_db(med_s), r_p, r_s])
        engine = "analytic"
    elif mode == "sweep-beamwidth":
        from .config import AntennaSpec

        grid = config.ula_grid or (4, 8, 16, 32, 64)
        columns = ["n_antennas", "beamwidth_deg", "r_p", "r_s"]
        rows = []
        for n in grid:
            spec = AntennaSpec(kind="ula", n_antennas=int(n), kappa=config.ula_kappa)
            pattern = spec.build()
            sc = dataclasses.replace(
                scenario, secondary=dataclasses.replace(scenario.secondary, antenna=pattern)
            )
            eng = CoverageEngine(sc, quad)
            r_p = median_rate(eng.coverage_primary, load, "primary",
                              sc.primary.user_density, natural_log=config.natural_log)
            r_s = median_rate(eng.coverage_secondary, load, "secondary",
                              sc.secondary.user_density, natural_log=config.natural_log)
            rows.append([int(n), math.degrees(pattern.beamwidth), r_p, r_s])
        engine = "analytic"
    else:
        raise ConfigError(f"run.mode: unknown mode {mode!r}")
    record = ResultRecord(
        mode=mode,
        config_hash=config.config_hash(),
        seed=config.seed,
        engine=engine,
        tolerance_info={"quadrature_rtol": quad.rtol, "mc_ci": "95% normal"},
        columns=columns,
        rows=rows,
        summary=summary,
        duration_s=time.monotonic() - start,
    )
    return record


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mmshare",
        description="mmWave restricted spectrum sharing: simulation and analysis",
    )
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", required=True, help="run configuration (.ini or .json)")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--format", choices=("csv", "json", "both"), default="both")
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        overrides: dict = {"mode": args.mode}
        if args.seed is not None:
            overrides["seed"] = args.seed
        env_threads = os.environ.get("MMSHARE_THREADS")
        if args.threads is not None:
            overrides["threads"] = args.threads
        elif env_threads is not None:
            overrides["threads"] = int(env_threads)
        config = dataclasses.replace(config, **overrides).validate()
        record = run(config)
        paths = emit(record, args.out, args.format)
        for p in paths:
            print(f"wrote {p}")
        for key, value in record.summary.items():
            print(f"{key}: {value}")
        if config.mode == "validate" and not record.summary.get("passed", True):
            print("validation FAILED: coverage gap exceeds tolerance", file=sys.stderr)
            return 2
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # engine errors wrapped with context
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
