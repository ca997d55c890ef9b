"""Quality-gated dead reckoning over a synchronized flow/range stream.

Good samples (``quality >= quality_threshold``) are integrated directly and
feed the per-axis velocity windows. Sub-threshold samples have their flow
discarded and the velocity is extrapolated from the windows instead. The
baseline integrates raw flow on every sample and never predicts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .flow_odometry import DisplacementStep, Source, cm_to_m, displacement_increment, velocity_from_flow
from .range_model import RangeCalibration, calibrate_range
from .sensor_types import FlowSample, LogRecord, OdometryConfig, RangeSample
from .velocity_predictor import GoodSampleWindow, horizon_guard, predict_velocity

US_PER_S = 1_000_000


class StreamError(ValueError):
    """A record could not be processed; ``index`` is its position in the stream."""

    def __init__(self, message: str, index: int | None = None):
        self.index = index
        super().__init__(f"record {index}: {message}" if index is not None else message)


@dataclass(frozen=True)
class DisplacementReport:
    total_x: float
    total_y: float
    total_norm: float
    steps: tuple[DisplacementStep, ...]
    n_measured: int
    n_predicted: int
    n_no_history: int
    n_raw: int
    config: OdometryConfig

    @property
    def n_steps(self) -> int:
        return len(self.steps)


class OdometryState:
    """Mutable integration state for one stream.

    ``predict=False`` gives the standard optical-flow baseline.
    """

    def __init__(self, config: OdometryConfig | None = None, predict: bool = True):
        self.config = config or OdometryConfig()
        self.predict = predict
        self.calibration = RangeCalibration(self.config.range_gain, self.config.range_offset)
        self.window_x = GoodSampleWindow(self.config.window_len)
        self.window_y = GoodSampleWindow(self.config.window_len)
        self.prev_t: int | None = None
        self.total_x = 0.0
        self.total_y = 0.0
        self.steps: list[DisplacementStep] = []
        self.counts = {s: 0 for s in Source}
        self.n_records = 0

    def feed(self, records: Iterable[LogRecord]) -> OdometryState:
        for record in records:
            try:
                process_sample(self, record.flow, record.range)
            except (ValueError, ArithmeticError) as exc:
                if isinstance(exc, StreamError):
                    raise
                raise StreamError(str(exc), self.n_records) from exc
        return self

    def report(self) -> DisplacementReport:
        return DisplacementReport(
            total_x=self.total_x,
            total_y=self.total_y,
            total_norm=math.hypot(self.total_x, self.total_y),
            steps=tuple(self.steps),
            n_measured=self.counts[Source.MEASURED],
            n_predicted=self.counts[Source.PREDICTED],
            n_no_history=self.counts[Source.NO_HISTORY],
            n_raw=self.counts[Source.RAW],
            config=self.config,
        )


def _predicted(state: OdometryState, t_s: float) -> tuple[float, float, Source]:
    cfg = state.config
    if not len(state.window_x):
        return 0.0, 0.0, Source.NO_HISTORY
    if not horizon_guard(state.window_x, t_s, cfg.max_prediction_horizon):
        return 0.0, 0.0, Source.PREDICTED
    v_x = predict_velocity(state.window_x, t_s, cfg.aggregation)
    v_y = predict_velocity(state.window_y, t_s, cfg.aggregation)
    return v_x, v_y, Source.PREDICTED


def process_sample(state: OdometryState, flow: FlowSample, range_sample: RangeSample) -> DisplacementStep | None:
    """Advance ``state`` by one synchronized record.

    Returns the step taken, or None for the first record of a stream, which
    only fixes the start time.
    """
    if flow.t != range_sample.t:
        raise StreamError(f"flow timestamp {flow.t} != range timestamp {range_sample.t}", state.n_records)
    if state.prev_t is not None and flow.t <= state.prev_t:
        raise StreamError(f"non-monotonic timestamp {flow.t} after {state.prev_t}", state.n_records)

    # Validate before mutating anything so a failed call leaves state intact.
    r = cm_to_m(calibrate_range(range_sample.r_raw, state.calibration))

    if state.prev_t is None:
        state.prev_t = flow.t
        state.n_records += 1
        return None

    dt = (flow.t - state.prev_t) / US_PER_S
    t_s = flow.t / US_PER_S
    good = flow.quality >= state.config.quality_threshold

    if good or not state.predict:
        ds_x = displacement_increment(flow.theta_x, r)
        ds_y = displacement_increment(flow.theta_y, r)
        v_x = velocity_from_flow(flow.theta_x, r, dt)
        v_y = velocity_from_flow(flow.theta_y, r, dt)
        source = Source.MEASURED if good else Source.RAW
        if good and state.predict:
            state.window_x.record(v_x, t_s)
            state.window_y.record(v_y, t_s)
    else:
        v_x, v_y, source = _predicted(state, t_s)
        ds_x = v_x * dt
        ds_y = v_y * dt

    step = DisplacementStep(flow.t, ds_x, ds_y, v_x, v_y, source)
    state.total_x += ds_x
    state.total_y += ds_y
    state.steps.append(step)
    state.counts[source] += 1
    state.prev_t = flow.t
    state.n_records += 1
    return step


def run_stream(records: Sequence[LogRecord], config: OdometryConfig | None = None) -> DisplacementReport:
    """Quality-gated odometry with velocity prediction over a whole stream."""
    if not len(records):
        raise StreamError("empty stream")
    return OdometryState(config, predict=True).feed(records).report()


def run_baseline(records: Sequence[LogRecord], config: OdometryConfig | None = None) -> DisplacementReport:
    """Standard optical flow: integrate raw flow on every sample."""
    if not len(records):
        raise StreamError("empty stream")
    return OdometryState(config, predict=False).feed(records).report()
