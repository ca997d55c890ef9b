"""Angular flow to linear displacement and velocity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

CM_PER_M = 100.0


class Source(str, Enum):
    MEASURED = "measured"
    PREDICTED = "predicted"
    NO_HISTORY = "no_history"
    # Baseline only: a sub-threshold sample integrated as-is.
    RAW = "raw"


@dataclass(frozen=True)
class DisplacementStep:
    t: int
    ds_x: float
    ds_y: float
    v_x: float
    v_y: float
    source: Source


def _check_lever(theta: float, r: float) -> None:
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    if not math.isfinite(r) or r < 0:
        raise ValueError(f"r must be finite and >= 0, got {r}")


def displacement_increment(theta: float, r: float) -> float:
    """Arc length ``theta * r`` in meters for ``r`` in meters."""
    _check_lever(theta, r)
    return theta * r


def velocity_from_flow(theta: float, r: float, dt: float) -> float:
    """Mean velocity (m/s) over a readout interval of ``dt`` seconds."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt} (duplicate or non-monotonic timestamps)")
    return displacement_increment(theta, r) / dt


def cm_to_m(r_cm: float) -> float:
    return r_cm / CM_PER_M
