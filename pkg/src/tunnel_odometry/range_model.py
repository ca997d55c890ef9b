"""Linear calibration of raw rangefinder distance.

The calibrated distance is the lever arm that turns angular flow into
linear displacement, so it is clamped at zero rather than allowed to go
negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class RangeCalibration:
    """``r = gain * r_raw + offset``, all distances in centimeters."""

    gain: float = 1.07
    offset: float = -100.0

    def __post_init__(self):
        if not (math.isfinite(self.gain) and self.gain > 0):
            raise ValueError(f"gain must be > 0, got {self.gain}")
        if not math.isfinite(self.offset):
            raise ValueError(f"offset must be finite, got {self.offset}")

    def invert(self, r_cm: float) -> float:
        """Raw reading that calibrates to ``r_cm`` (used by the simulator)."""
        return (r_cm - self.offset) / self.gain


IDENTITY = RangeCalibration(gain=1.0, offset=0.0)


def calibrate_range(r_raw: float, cal: RangeCalibration = RangeCalibration()) -> float:
    """Return the calibrated distance in centimeters, clamped at 0."""
    if not math.isfinite(r_raw) or r_raw < 0:
        raise ValueError(f"r_raw must be finite and >= 0, got {r_raw}")
    return max(0.0, cal.gain * r_raw + cal.offset)
