"""Unit handling: all internal computation is in linear SI units.

Powers are watts, distances meters, densities per square meter, angles
radians.  Decibel / dBm / per-km2 values are accepted only at configuration
boundaries and converted here, once.
"""

from __future__ import annotations

import math
import re

KM2_PER_M2 = 1e6


def db_to_linear(db: float) -> float:
    """Convert a dB ratio (or dBW power) to linear scale."""
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0:
        raise ValueError(f"cannot express non-positive value {x!r} in dB")
    return 10.0 * math.log10(x)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return linear_to_db(watts) + 30.0


def per_km2_to_per_m2(density: float) -> float:
    return density / KM2_PER_M2


def per_m2_to_per_km2(density: float) -> float:
    return density * KM2_PER_M2


_QUANTITY_RE = re.compile(
    r"""^\s*(?P<value>[-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*
        (?P<unit>[a-zA-Z/^0-9°]*)\s*$""",
    re.VERBOSE,
)

# Multipliers into SI for plain scale units; sub-unit scales are stored as
# divisors so the conversion is correctly rounded (30 /km2 == 30e-6 exactly).
_SCALE_UNITS = {
    "": (1.0, False),
    "m": (1.0, False),
    "km": (1e3, False),
    "hz": (1.0, False),
    "khz": (1e3, False),
    "mhz": (1e6, False),
    "ghz": (1e9, False),
    "w": (1.0, False),
    "mw": (1e3, True),
    "rad": (1.0, False),
    "/m2": (1.0, False),
    "/m^2": (1.0, False),
    "/km2": (1e6, True),
    "/km^2": (1e6, True),
}


def parse_quantity(text: str | float | int) -> float:
    """Parse a config quantity with an explicit unit suffix into SI linear.

    Accepted suffixes: dB, dBm, W, mW, m, km, Hz/kHz/MHz/GHz, rad, deg,
    /km2, /m2.  Bare numbers are taken as already-linear SI.
    """
    if isinstance(text, (int, float)):
        return float(text)
    m = _QUANTITY_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse quantity {text!r}")
    value = float(m.group("value"))
    unit = m.group("unit")
    key = unit.lower()
    if key == "db":
        return db_to_linear(value)
    if key == "dbm":
        return dbm_to_watts(value)
    if key in ("deg", "°"):
        return math.radians(value)
    if key in _SCALE_UNITS:
        scale, divide = _SCALE_UNITS[key]
        return value / scale if divide else value * scale
    raise ValueError(f"unknown unit {unit!r} in {text!r}")
