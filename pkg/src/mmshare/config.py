"""Run configuration: parsing, validation, canonicalization and hashing.

The editable format is an INI file whose values carry explicit unit
suffixes (dB, dBm, MHz, /km2, deg, m); everything is converted to linear SI
once at load.  The canonical form is a JSON document of resolved SI values;
its SHA-256 is the config hash recorded in every result.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import units
from .economics import LinearPricing, LoadModel
from .geometry import (
    AntennaPattern,
    ChannelModel,
    FixedPower,
    InterferenceCap,
    LinkType,
    OperatorConfig,
    ula_pattern,
)
from .montecarlo import default_window_radius
from .scenario import Scenario

MODES = (
    "mc",
    "analytic",
    "validate",
    "sweep-xi",
    "compare-modes",
    "sweep-density",
    "sweep-beamwidth",
)


class ConfigError(ValueError):
    """Parse or validation failure; the message names the offending field or
    the violated invariant."""


@dataclass(frozen=True)
class AntennaSpec:
    """Either an explicit sectored pattern or a ULA approximation."""

    kind: str  # "sectored" | "ula"
    beamwidth: float = 0.0
    main_gain: float = 0.0
    n_antennas: int = 0
    kappa: float = 1.0

    def build(self) -> AntennaPattern:
        if self.kind == "ula":
            return ula_pattern(self.n_antennas, self.kappa)
        return AntennaPattern.sectored(self.beamwidth, self.main_gain)

    def canonical(self) -> dict:
        if self.kind == "ula":
            return {"kind": "ula", "n_antennas": self.n_antennas, "kappa": self.kappa}
        return {
            "kind": "sectored",
            "beamwidth": self.beamwidth,
            "main_gain": self.main_gain,
        }


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration in linear SI units."""

    # channel
    blockage_beta: float
    alpha_los: float
    alpha_nlos: float
    near_gain_los: float
    near_gain_nlos: float
    # operators
    primary_bs_density: float
    primary_user_density: float
    primary_tx_power: float
    primary_noise: float
    primary_antenna: AntennaSpec
    secondary_bs_density: float
    secondary_user_density: float
    interference_cap: float
    secondary_noise: float
    secondary_antenna: AntennaSpec
    # simulation
    window_radius: float  # 0 means the default window rule
    guard_radius: float   # 0 means half the window
    n_realizations: int
    seed: int
    # rates
    bandwidth: float
    carrier_frequency: float
    natural_log: bool
    # pricing
    revenue_primary: float
    revenue_secondary: float
    license_primary: float
    license_secondary_central: float
    license_secondary_primary: float
    # run
    mode: str
    thresholds_db: tuple[float, float, float]  # start, stop, step
    xi_grid_db: tuple[float, float, float]
    validate_tolerance: float
    threads: int
    density_grid: tuple[float, ...] = ()
    ula_grid: tuple[int, ...] = ()
    ula_kappa: float = 1.0

    # ------------------------------------------------------------- builders

    def channel(self) -> ChannelModel:
        return ChannelModel(
            beta=self.blockage_beta,
            alpha={LinkType.LOS: self.alpha_los, LinkType.NLOS: self.alpha_nlos},
            near_gain={LinkType.LOS: self.near_gain_los, LinkType.NLOS: self.near_gain_nlos},
        )

    def scenario(self) -> Scenario:
        window = self.window_radius
        if window == 0.0:
            window = default_window_radius(
                self.primary_bs_density, self.secondary_bs_density, self.blockage_beta
            )
        guard = self.guard_radius if self.guard_radius > 0 else window / 2.0
        primary = OperatorConfig(
            bs_density=self.primary_bs_density,
            user_density=self.primary_user_density,
            antenna=self.primary_antenna.build(),
            power_rule=FixedPower(self.primary_tx_power),
            noise_power=self.primary_noise,
        )
        secondary = OperatorConfig(
            bs_density=self.secondary_bs_density,
            user_density=self.secondary_user_density,
            antenna=self.secondary_antenna.build(),
            power_rule=InterferenceCap(self.interference_cap),
            noise_power=self.secondary_noise,
        )
        return Scenario(
            primary=primary,
            secondary=secondary,
            channel=self.channel(),
            window_radius=window,
            guard_radius=guard,
            seed=self.seed,
            n_realizations=self.n_realizations,
        )

    def load_model(self) -> LoadModel:
        return LoadModel.from_scenario(self.scenario(), self.bandwidth)

    def pricing(self) -> LinearPricing:
        return LinearPricing(
            revenue_primary=self.revenue_primary,
            revenue_secondary=self.revenue_secondary,
            license_primary=self.license_primary,
            license_secondary_central=self.license_secondary_central,
            license_secondary_primary=self.license_secondary_primary,
        )

    def thresholds(self) -> np.ndarray:
        start, stop, step = self.thresholds_db
        grid_db = np.arange(start, stop + step / 2, step)
        return 10.0 ** (grid_db / 10.0)

    def xi_grid(self) -> np.ndarray:
        start, stop, step = self.xi_grid_db
        grid_db = np.arange(start, stop + step / 2, step)
        return 10.0 ** (grid_db / 10.0)

    # -------------------------------------------------------- canonical form

    def canonical(self) -> dict:
        out = {}
        for name, value in self.__dict__.items():
            if isinstance(value, AntennaSpec):
                out[name] = value.canonical()
            elif isinstance(value, tuple):
                out[name] = list(value)
            else:
                out[name] = value
        return out

    def canonical_json(self) -> str:
        return json.dumps(self.canonical(), sort_keys=True, indent=1)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def validate(self) -> "RunConfig":
        """Cross-field checks; the constructors of the domain types enforce
        their own invariants when the scenario is built."""
        if self.mode not in MODES:
            raise ConfigError(f"run.mode: unknown mode {self.mode!r}")
        if self.threads < 1:
            raise ConfigError("run.threads: must be at least 1")
        if self.validate_tolerance <= 0:
            raise ConfigError("run.validate_tolerance: must be positive")
        if self.thresholds_db[2] <= 0 or self.xi_grid_db[2] <= 0:
            raise ConfigError("grid step: must be positive")
        if self.seed < 0:
            raise ConfigError("simulation.seed: must be non-negative")
        try:
            self.scenario()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self


def baseline_config(**overrides) -> RunConfig:
    """The reference parameter set: exponential blockage with a 150 m LOS
    decay length, -60 dB near gains, 2.5/3.5 exponents, 40 dBm primary
    power, -110 dB noise, -120 dB cap, 500 MHz over 28 GHz carrier, and
    64-element arrays at both operators."""
    values = dict(
        blockage_beta=150.0,
        alpha_los=2.5,
        alpha_nlos=3.5,
        near_gain_los=1e-6,
        near_gain_nlos=1e-6,
        primary_bs_density=30e-6,
        primary_user_density=30e-6,
        primary_tx_power=10.0,
        primary_noise=1e-11,
        primary_antenna=AntennaSpec(kind="ula", n_antennas=64, kappa=0.5),
        secondary_bs_density=60e-6,
        secondary_user_density=60e-6,
        interference_cap=1e-12,
        secondary_noise=1e-11,
        secondary_antenna=AntennaSpec(kind="ula", n_antennas=64, kappa=0.5),
        window_radius=0.0,
        guard_radius=0.0,
        n_realizations=20000,
        seed=1,
        bandwidth=500e6,
        carrier_frequency=28e9,
        natural_log=False,
        revenue_primary=1.0,
        revenue_secondary=1.0,
        license_primary=0.25,
        license_secondary_central=0.125,
        license_secondary_primary=0.25,
        mode="validate",
        thresholds_db=(-20.0, 40.0, 2.0),
        xi_grid_db=(-130.0, -90.0, 2.0),
        validate_tolerance=0.02,
        threads=1,
    )
    values.update(overrides)
    return RunConfig(**values).validate()


# ------------------------------------------------------------------ parsing


def _antenna_from_section(section, prefix: str) -> AntennaSpec:
    if f"{prefix}ula_elements" in section:
        return AntennaSpec(
            kind="ula",
            n_antennas=int(section[f"{prefix}ula_elements"]),
            kappa=float(section.get(f"{prefix}ula_kappa", 1.0)),
        )
    return AntennaSpec(
        kind="sectored",
        beamwidth=units.parse_quantity(section[f"{prefix}beamwidth"]),
        main_gain=units.parse_quantity(section[f"{prefix}main_gain"]),
    )


def _grid_spec(text: str) -> tuple[float, float, float]:
    parts = [float(p) for p in text.split(":")]
    if len(parts) != 3:
        raise ConfigError(f"grid spec {text!r} must be start:stop:step")
    return tuple(parts)  # type: ignore[return-value]


def load_config(path: str | Path) -> RunConfig:
    """Load and validate a run configuration (.ini with units, or the
    canonical .json form)."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    if path.suffix == ".json":
        raw = json.loads(path.read_text())
        for key in ("primary_antenna", "secondary_antenna"):
            raw[key] = AntennaSpec(**raw[key])
        for key in ("thresholds_db", "xi_grid_db", "density_grid", "ula_grid"):
            if key in raw:
                raw[key] = tuple(raw[key])
        try:
            return RunConfig(**raw).validate()
        except TypeError as exc:
            raise ConfigError(f"canonical config: {exc}") from exc
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"parse error in {path}: {exc}") from exc
    base = baseline_config()

    def q(section: str, option: str, default):
        if parser.has_option(section, option):
            return units.parse_quantity(parser.get(section, option))
        return default

    try:
        ch = parser["channel"] if parser.has_section("channel") else {}
        sim = parser["simulation"] if parser.has_section("simulation") else {}
        rates = parser["rates"] if parser.has_section("rates") else {}
        pricing = parser["pricing"] if parser.has_section("pricing") else {}
        run = parser["run"] if parser.has_section("run") else {}
        prim = parser["primary"] if parser.has_section("primary") else {}
        sec = parser["secondary"] if parser.has_section("secondary") else {}
        cfg = RunConfig(
            blockage_beta=q("channel", "blockage_beta", base.blockage_beta),
            alpha_los=float(ch.get("alpha_los", base.alpha_los)),
            alpha_nlos=float(ch.get("alpha_nlos", base.alpha_nlos)),
            near_gain_los=q("channel", "near_gain_los", base.near_gain_los),
            near_gain_nlos=q("channel", "near_gain_nlos", base.near_gain_nlos),
            primary_bs_density=q("primary", "bs_density", base.primary_bs_density),
            primary_user_density=q("primary", "user_density", base.primary_user_density),
            primary_tx_power=q("primary", "tx_power", base.primary_tx_power),
            primary_noise=q("primary", "noise_power", base.primary_noise),
            primary_antenna=(
                _antenna_from_section(prim, "antenna_")
                if any(k.startswith("antenna_") for k in prim)
                else base.primary_antenna
            ),
            secondary_bs_density=q("secondary", "bs_density", base.secondary_bs_density),
            secondary_user_density=q(
                "secondary", "user_density", base.secondary_user_density
            ),
            interference_cap=q("secondary", "interference_cap", base.interference_cap),
            secondary_noise=q("secondary", "noise_power", base.secondary_noise),
            secondary_antenna=(
                _antenna_from_section(sec, "antenna_")
                if any(k.startswith("antenna_") for k in sec)
                else base.secondary_antenna
            ),
            window_radius=q("simulation", "window_radius", base.window_radius),
            guard_radius=q("simulation", "guard_radius", base.guard_radius),
            n_realizations=int(sim.get("n_realizations", base.n_realizations)),
            seed=int(sim.get("seed", base.seed)),
            bandwidth=q("rates", "bandwidth", base.bandwidth),
            carrier_frequency=q("rates", "carrier_frequency", base.carrier_frequency),
            natural_log=_parse_bool(rates.get("natural_log", "false")),
            revenue_primary=float(pricing.get("revenue_primary", base.revenue_primary)),
            revenue_secondary=float(
                pricing.get("revenue_secondary", base.revenue_secondary)
            ),
            license_primary=float(pricing.get("license_primary", base.license_primary)),
            license_secondary_central=float(
                pricing.get("license_secondary_central", base.license_secondary_central)
            ),
            license_secondary_primary=float(
                pricing.get("license_secondary_primary", base.license_secondary_primary)
            ),
            mode=run.get("mode", base.mode),
            thresholds_db=(
                _grid_spec(run["thresholds_db"])
                if "thresholds_db" in run
                else base.thresholds_db
            ),
            xi_grid_db=(
                _grid_spec(run["xi_grid_db"]) if "xi_grid_db" in run else base.xi_grid_db
            ),
            validate_tolerance=float(
                run.get("validate_tolerance", base.validate_tolerance)
            ),
            threads=int(run.get("threads", base.threads)),
            density_grid=tuple(
                units.parse_quantity(p.strip())
                for p in run.get("density_grid", "").split(",")
                if p.strip()
            ),
            ula_grid=tuple(
                int(p) for p in run.get("ula_grid", "").split(",") if p.strip()
            ),
            ula_kappa=float(run.get("ula_kappa", base.ula_kappa)),
        )
    except (KeyError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"config field error in {path}: {exc}") from exc
    return cfg.validate()


def _parse_bool(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"cannot parse boolean {text!r}")


def emit_canonical(config: RunConfig, path: str | Path) -> None:
    Path(path).write_text(config.canonical_json())
