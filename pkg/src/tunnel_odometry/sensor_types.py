"""Sensor samples, odometry configuration and the CSV log format.

A log is a UTF-8 CSV file with the header::

    t_us,theta_x_rad,theta_y_rad,quality,r_raw_cm

Each row carries one flow readout and one rangefinder readout taken at the
same instant. Timestamps are integer microseconds and must increase
strictly down the file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Sequence

LOG_HEADER = "t_us,theta_x_rad,theta_y_rad,quality,r_raw_cm"
LOG_FIELDS = tuple(LOG_HEADER.split(","))

QUALITY_MIN = 0
QUALITY_MAX = 255


class LogFormatError(ValueError):
    """A log line failed to parse or violated a sample invariant."""

    def __init__(self, message: str, line_no: int | None = None, field: str | None = None):
        self.line_no = line_no
        self.field = field
        where = []
        if line_no is not None:
            where.append(f"line {line_no}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


@dataclass(frozen=True)
class FlowSample:
    """One flow-sensor readout.

    ``theta_x``/``theta_y`` are the angular flow (radians) accumulated since
    the previous readout; ``quality`` is the sensor's 0-255 trackability score.
    """

    t: int
    theta_x: float
    theta_y: float
    quality: int

    def __post_init__(self):
        if not math.isfinite(self.theta_x):
            raise ValueError(f"theta_x must be finite, got {self.theta_x}")
        if not math.isfinite(self.theta_y):
            raise ValueError(f"theta_y must be finite, got {self.theta_y}")
        if not QUALITY_MIN <= self.quality <= QUALITY_MAX:
            raise ValueError(f"quality must be in [0, 255], got {self.quality}")


@dataclass(frozen=True)
class RangeSample:
    """One rangefinder readout, raw distance in centimeters."""

    t: int
    r_raw: float

    def __post_init__(self):
        if not math.isfinite(self.r_raw) or self.r_raw < 0:
            raise ValueError(f"r_raw must be finite and >= 0, got {self.r_raw}")


@dataclass(frozen=True)
class LogRecord:
    flow: FlowSample
    range: RangeSample

    @property
    def t(self) -> int:
        return self.flow.t


class Aggregation(str, Enum):
    MEAN = "mean"
    LAST_FIT = "last_fit"


@dataclass(frozen=True)
class OdometryConfig:
    """Tunable parameters of the odometry pipeline.

    ``range_offset`` is in centimeters and ``max_prediction_horizon`` in
    seconds. Samples with ``quality >= quality_threshold`` count as good.
    """

    quality_threshold: int = 100
    window_len: int = 8
    range_gain: float = 1.07
    range_offset: float = -100.0
    max_prediction_horizon: float = 2.0
    aggregation: Aggregation = Aggregation.MEAN

    def __post_init__(self):
        object.__setattr__(self, "aggregation", Aggregation(self.aggregation))
        if not QUALITY_MIN <= self.quality_threshold <= QUALITY_MAX:
            raise ValueError("quality_threshold must be in [0, 255]")
        if self.window_len < 1:
            raise ValueError("window_len must be >= 1")
        if not (math.isfinite(self.range_gain) and self.range_gain > 0):
            raise ValueError("range_gain must be > 0")
        if not math.isfinite(self.range_offset):
            raise ValueError("range_offset must be finite")
        if not (math.isfinite(self.max_prediction_horizon) and self.max_prediction_horizon > 0):
            raise ValueError("max_prediction_horizon must be > 0")

    # Keys used in `key = value` config files.
    def to_mapping(self) -> dict[str, str]:
        return {
            "quality_threshold": str(self.quality_threshold),
            "window_len": str(self.window_len),
            "range_gain": repr(float(self.range_gain)),
            "range_offset_cm": repr(float(self.range_offset)),
            "max_prediction_horizon_s": repr(float(self.max_prediction_horizon)),
            "aggregation": self.aggregation.value,
        }

    @classmethod
    def from_mapping(cls, values: dict[str, str], base: OdometryConfig | None = None) -> OdometryConfig:
        """Build a config from config-file keys, falling back to ``base``."""
        base = base or cls()
        converters = {
            "quality_threshold": ("quality_threshold", int),
            "window_len": ("window_len", int),
            "range_gain": ("range_gain", float),
            "range_offset_cm": ("range_offset", float),
            "max_prediction_horizon_s": ("max_prediction_horizon", float),
            "aggregation": ("aggregation", Aggregation),
        }
        kwargs = {
            "quality_threshold": base.quality_threshold,
            "window_len": base.window_len,
            "range_gain": base.range_gain,
            "range_offset": base.range_offset,
            "max_prediction_horizon": base.max_prediction_horizon,
            "aggregation": base.aggregation,
        }
        for key, raw in values.items():
            if key not in converters:
                raise ValueError(f"unknown config key {key!r}")
            name, conv = converters[key]
            kwargs[name] = conv(raw.strip())
        return cls(**kwargs)


def _parse_int(text: str, line_no: int | None, field: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise LogFormatError(f"not an integer: {text!r}", line_no, field) from None


def _parse_float(text: str, line_no: int | None, field: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise LogFormatError(f"not a number: {text!r}", line_no, field) from None
    if not math.isfinite(value):
        raise LogFormatError(f"not finite: {text!r}", line_no, field)
    return value


def parse_log_record(line: str, line_no: int | None = None, prev_t: int | None = None) -> LogRecord:
    """Parse one CSV data line into a synchronized flow/range record.

    ``prev_t`` is the timestamp of the preceding record, if any; the new
    timestamp must be strictly greater.
    """
    parts = line.strip().split(",")
    if len(parts) != len(LOG_FIELDS):
        raise LogFormatError(f"expected {len(LOG_FIELDS)} fields, got {len(parts)}", line_no)
    t = _parse_int(parts[0], line_no, "t_us")
    theta_x = _parse_float(parts[1], line_no, "theta_x_rad")
    theta_y = _parse_float(parts[2], line_no, "theta_y_rad")
    quality = _parse_int(parts[3], line_no, "quality")
    r_raw = _parse_float(parts[4], line_no, "r_raw_cm")

    if not QUALITY_MIN <= quality <= QUALITY_MAX:
        raise LogFormatError(f"quality out of range [0, 255]: {quality}", line_no, "quality")
    if r_raw < 0:
        raise LogFormatError(f"negative range: {r_raw}", line_no, "r_raw_cm")
    if prev_t is not None and t <= prev_t:
        raise LogFormatError(f"non-monotonic timestamp {t} after {prev_t}", line_no, "t_us")

    return LogRecord(FlowSample(t, theta_x, theta_y, quality), RangeSample(t, r_raw))


def format_log_record(record: LogRecord) -> str:
    """Serialize a record as one CSV line (no newline), shortest round-trip floats."""
    f, r = record.flow, record.range
    return f"{f.t},{float(f.theta_x)!r},{float(f.theta_y)!r},{f.quality},{float(r.r_raw)!r}"


def iter_log_lines(lines: Iterable[str]) -> Iterator[LogRecord]:
    """Parse an iterable of lines, header first. Line numbers are 1-based."""
    it = iter(lines)
    try:
        header = next(it)
    except StopIteration:
        raise LogFormatError("empty log, missing header", 1) from None
    if header.strip() != LOG_HEADER:
        raise LogFormatError(f"bad header, expected {LOG_HEADER!r}", 1)
    prev_t = None
    for line_no, line in enumerate(it, start=2):
        if not line.strip():
            continue
        record = parse_log_record(line, line_no, prev_t)
        prev_t = record.t
        yield record


def read_log(path: str | Path) -> list[LogRecord]:
    with open(path, encoding="utf-8-sig") as fh:
        return list(iter_log_lines(fh))


def write_log(path: str | Path, records: Sequence[LogRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(LOG_HEADER + "\n")
        for record in records:
            fh.write(format_log_record(record) + "\n")
