"""Deterministic synthetic flow/range streams with analytic ground truth.

Random numbers come from a single ``numpy.random.Generator`` backed by
PCG64 and seeded with the integer ``seed``. For ``n`` samples the draws are
taken in this fixed order, each as one vectorized call:

1. ``random(n)``                  dropout chain uniforms
2. ``integers(lo, hi + 1, n)``    good-quality scores
3. ``integers(lo, hi + 1, n)``    bad-quality scores
4. ``normal(0, 1, n)``            x flow noise (scaled by flow_noise_sigma)
5. ``normal(0, 1, n)``            y flow noise
6. ``normal(0, 1, n)``            range noise (scaled by range_noise_sigma)

Dropout is a two-state Markov chain. A burst ends on each sample with
probability ``1 / dropout_burst_mean`` (geometric burst lengths) and the
entry probability is chosen so the stationary dropout fraction equals
``p_dropout``. The first sample is drawn from the stationary distribution.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .range_model import RangeCalibration
from .sensor_types import FlowSample, LogRecord, RangeSample

US_PER_S = 1_000_000
TRUTH_HEADER = "t_us,truth_x_m"

MOTION_KINDS = ("constant_velocity", "trapezoidal", "sinusoidal")


@dataclass(frozen=True)
class MotionProfile:
    """Straight-line motion along x.

    ``constant_velocity``: ``speed`` (m/s).
    ``trapezoidal``: ramp at ``accel`` up to ``cruise_speed``, cruise, then
    ramp down to rest at ``duration``. Peaks early (triangle) if the ramps
    do not fit.
    ``sinusoidal``: ``v(t) = speed + amplitude * sin(2 pi t / period)``.
    """

    kind: str
    duration: float
    sample_rate: float
    speed: float = 0.0
    accel: float = 0.0
    cruise_speed: float = 0.0
    amplitude: float = 0.0
    period: float = 1.0

    def __post_init__(self):
        if self.kind not in MOTION_KINDS:
            raise ValueError(f"unknown motion kind {self.kind!r}; expected one of {MOTION_KINDS}")
        for name in ("duration", "sample_rate", "speed", "accel", "cruise_speed", "amplitude", "period"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.duration <= 0:
            raise ValueError("duration must be > 0")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be > 0")
        if self.kind == "trapezoidal" and (self.accel <= 0 or self.cruise_speed < 0):
            raise ValueError("trapezoidal profile needs accel > 0 and cruise_speed >= 0")
        if self.kind == "sinusoidal" and self.period <= 0:
            raise ValueError("period must be > 0")

    def position(self, t: np.ndarray) -> np.ndarray:
        """Exact position (m) at times ``t`` (s), starting from 0 at t=0."""
        t = np.asarray(t, dtype=float)
        if self.kind == "constant_velocity":
            return self.speed * t
        if self.kind == "sinusoidal":
            w = 2.0 * math.pi / self.period
            return self.speed * t + self.amplitude / w * (1.0 - np.cos(w * t))
        d = self.duration
        t_ramp = min(self.cruise_speed / self.accel, d / 2.0)
        v_peak = self.accel * t_ramp
        x_ramp = 0.5 * self.accel * t_ramp**2
        x_end = 2.0 * x_ramp + v_peak * (d - 2.0 * t_ramp)
        tc = np.clip(t, 0.0, d)
        return np.where(
            tc < t_ramp,
            0.5 * self.accel * tc**2,
            np.where(
                tc <= d - t_ramp,
                x_ramp + v_peak * (tc - t_ramp),
                x_end - 0.5 * self.accel * (d - tc) ** 2,
            ),
        )

    def timestamps_us(self) -> np.ndarray:
        n = int(math.floor(self.duration * self.sample_rate + 1e-9))
        k = np.arange(n + 1)
        return np.rint(k * (US_PER_S / self.sample_rate)).astype(np.int64)


@dataclass(frozen=True)
class ScenarioPreset:
    """Surface/lighting condition driving the simulated sensor quality."""

    name: str
    range_true: float = 1.5
    p_dropout: float = 0.0
    dropout_burst_mean: float = 1.0
    flow_noise_sigma: float = 0.0
    range_noise_sigma: float = 0.0
    quality_good_range: tuple[int, int] = (120, 255)
    quality_bad_range: tuple[int, int] = (0, 60)
    description: str = field(default="", compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.range_true) and self.range_true > 0):
            raise ValueError("range_true must be > 0")
        if not 0.0 <= self.p_dropout <= 1.0:
            raise ValueError("p_dropout must be in [0, 1]")
        if not (math.isfinite(self.dropout_burst_mean) and self.dropout_burst_mean >= 1.0):
            raise ValueError("dropout_burst_mean must be >= 1")
        if self.p_dropout < 1.0 and self._enter_probability() > 1.0:
            limit = self.p_dropout / (1.0 - self.p_dropout)
            raise ValueError(
                f"dropout_burst_mean must be >= {limit:g} to reach p_dropout={self.p_dropout}"
            )
        for name in ("flow_noise_sigma", "range_noise_sigma"):
            sigma = getattr(self, name)
            if not (math.isfinite(sigma) and sigma >= 0):
                raise ValueError(f"{name} must be >= 0")
        for name in ("quality_good_range", "quality_bad_range"):
            lo, hi = getattr(self, name)
            if not 0 <= lo <= hi <= 255:
                raise ValueError(f"{name} must be an interval within [0, 255]")

    def _enter_probability(self) -> float:
        if self.p_dropout >= 1.0:
            return 1.0
        return self.p_dropout / (1.0 - self.p_dropout) / self.dropout_burst_mean

    def _stay_probability(self) -> float:
        if self.p_dropout >= 1.0:
            return 1.0
        return 1.0 - 1.0 / self.dropout_burst_mean

    def check_threshold(self, threshold: int) -> None:
        if self.quality_good_range[0] < threshold or self.quality_bad_range[1] >= threshold:
            raise ValueError(f"preset {self.name!r} quality ranges straddle threshold {threshold}")


@dataclass(frozen=True)
class Simulation:
    records: list[LogRecord]
    t_us: np.ndarray
    truth_x: np.ndarray
    dropout: np.ndarray

    @property
    def truth_total(self) -> float:
        return float(self.truth_x[-1] - self.truth_x[0])

    @property
    def dropout_fraction(self) -> float:
        """Fraction of integrated samples (all but the first) that dropped out."""
        return float(self.dropout[1:].mean()) if len(self.dropout) > 1 else 0.0


def dropout_mask(u: np.ndarray, scenario: ScenarioPreset) -> np.ndarray:
    """Run the dropout chain over uniforms ``u``; True marks a dropout sample."""
    enter = scenario._enter_probability()
    stay = scenario._stay_probability()
    mask = np.empty(len(u), dtype=bool)
    bad = False
    for k, uk in enumerate(u):
        if k == 0:
            bad = uk < scenario.p_dropout
        else:
            bad = uk < (stay if bad else enter)
        mask[k] = bad
    return mask


def simulate(profile: MotionProfile, scenario: ScenarioPreset, seed: int,
             calibration: RangeCalibration = RangeCalibration()) -> Simulation:
    """Generate a synchronized sensor stream and its ground truth.

    Good samples carry ``theta = dx_true / range_true`` plus noise; dropout
    samples carry zero flow and a sub-threshold quality. The raw range is
    the inverse calibration of ``range_true`` plus noise, clipped at 0.
    """
    t_us = profile.timestamps_us()
    n = len(t_us)
    truth_x = profile.position(t_us / US_PER_S)

    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(n)
    q_good = rng.integers(scenario.quality_good_range[0], scenario.quality_good_range[1] + 1, n)
    q_bad = rng.integers(scenario.quality_bad_range[0], scenario.quality_bad_range[1] + 1, n)
    noise_x = rng.normal(0.0, 1.0, n) * scenario.flow_noise_sigma
    noise_y = rng.normal(0.0, 1.0, n) * scenario.flow_noise_sigma
    noise_r = rng.normal(0.0, 1.0, n) * scenario.range_noise_sigma

    dropout = dropout_mask(u, scenario)
    dx = np.diff(truth_x, prepend=truth_x[0])
    theta_x = np.where(dropout, 0.0, dx / scenario.range_true + noise_x)
    theta_y = np.where(dropout, 0.0, noise_y)
    quality = np.where(dropout, q_bad, q_good)
    r_raw = np.maximum(0.0, calibration.invert(scenario.range_true * 100.0) + noise_r)

    records = [
        LogRecord(FlowSample(t, tx, ty, q), RangeSample(t, rr))
        for t, tx, ty, q, rr in zip(
            t_us.tolist(), theta_x.tolist(), theta_y.tolist(), quality.tolist(), r_raw.tolist()
        )
    ]
    return Simulation(records, t_us, truth_x, dropout)


def write_truth(path: str | Path, t_us: np.ndarray, truth_x: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRUTH_HEADER + "\n")
        for t, x in zip(t_us.tolist(), truth_x.tolist()):
            fh.write(f"{t},{x!r}\n")


def read_truth(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != TRUTH_HEADER:
            raise ValueError(f"bad truth header {header!r}")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    t = np.array([int(r[0]) for r in rows], dtype=np.int64)
    x = np.array([float(r[1]) for r in rows])
    return t, x


def preset_seed(base_seed: int, name: str) -> int:
    """Per-preset seed for comparisons: ``base_seed * 2**32 + crc32(name)``."""
    return base_seed * 2**32 + zlib.crc32(name.encode("utf-8"))


# Bursts are in samples; at the default 20 Hz, 40 samples is the 2 s horizon.
_PRESETS = (
    ScenarioPreset(
        "floor_no_led", range_true=1.5, p_dropout=0.55, dropout_burst_mean=200.0,
        flow_noise_sigma=5e-4, range_noise_sigma=1.0,
        description="textured floor, no lighting: long dark stretches",
    ),
    ScenarioPreset(
        "floor_led", range_true=1.5, p_dropout=0.10, dropout_burst_mean=4.0,
        flow_noise_sigma=5e-4, range_noise_sigma=1.0,
        description="textured floor under LEDs: short, sparse dropouts",
    ),
    ScenarioPreset(
        "ceiling_no_led", range_true=2.0, p_dropout=0.35, dropout_burst_mean=150.0,
        flow_noise_sigma=5e-4, range_noise_sigma=1.0,
        description="white ceiling with some texture, no lighting",
    ),
    ScenarioPreset(
        "ceiling_led", range_true=2.0, p_dropout=0.70, dropout_burst_mean=150.0,
        flow_noise_sigma=5e-4, range_noise_sigma=1.0,
        description="ceiling under LEDs: glare washes out features",
    ),
    ScenarioPreset(
        "sidewall_led", range_true=1.0, p_dropout=1.0, dropout_burst_mean=1.0,
        flow_noise_sigma=5e-4, range_noise_sigma=1.0,
        description="reflective white tiles: no trackable features",
    ),
    ScenarioPreset(
        "sidewall_structured", range_true=1.0, p_dropout=0.95, dropout_burst_mean=400.0,
        flow_noise_sigma=5e-4, range_noise_sigma=1.0,
        description="tiles with LEDs and structured light: rare short fixes (judgment call)",
    ),
)


def builtin_presets() -> list[ScenarioPreset]:
    return list(_PRESETS)


def get_preset(name: str) -> ScenarioPreset:
    for preset in _PRESETS:
        if preset.name == name:
            return preset
    raise KeyError(name)


def preset_from_mapping(values: dict[str, str]) -> ScenarioPreset:
    """Build a preset from ``key = value`` pairs (see ``load_preset_file``)."""
    kw: dict = {}
    for key, raw in values.items():
        raw = raw.strip()
        if key == "name" or key == "description":
            kw[key] = raw
        elif key in ("quality_good_range", "quality_bad_range"):
            lo, hi = raw.replace(":", ",").split(",")
            kw[key] = (int(lo), int(hi))
        elif key in ("range_true", "p_dropout", "dropout_burst_mean", "flow_noise_sigma", "range_noise_sigma"):
            kw[key] = float(raw)
        else:
            raise ValueError(f"unknown preset key {key!r}")
    if "name" not in kw:
        raise ValueError("preset file needs a 'name' key")
    return ScenarioPreset(**kw)
