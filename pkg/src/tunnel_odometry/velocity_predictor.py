"""Velocity extrapolation across low-quality flow intervals.

The last ``window_len`` good velocities are kept with their timestamps.
Each entry gets an acceleration fitted against the newest entry::

    a[i] = (v[L] - v[i]) / (t[L] - t[i])    for i < L
    a[L] = 0

and is extrapolated to the prediction time ``t_p``::

    v_pred[i] = v[i] + (t_p - t[i]) * a[i]

The predictions are then reduced to a single velocity (``mean`` or
``last_fit``).
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .sensor_types import Aggregation

# Timestamps are integer microseconds; seconds derived from them may be off
# by an ulp, so horizon comparisons allow half a tick.
_HALF_TICK_S = 0.5e-6


class NoHistoryError(LookupError):
    """Prediction was requested before any good sample was recorded."""


class GoodSampleWindow:
    """Bounded, time-ordered buffer of ``(v, t)`` pairs; oldest evicted first."""

    def __init__(self, window_len: int, entries: Iterable[tuple[float, float]] = ()):
        if window_len < 1:
            raise ValueError("window_len must be >= 1")
        self.window_len = window_len
        self._entries: deque[tuple[float, float]] = deque(maxlen=window_len)
        for v, t in entries:
            self.record(v, t)

    def record(self, v: float, t: float) -> None:
        if self._entries and not t > self._entries[-1][1]:
            raise ValueError(f"timestamp {t} does not follow newest entry {self._entries[-1][1]}")
        self._entries.append((float(v), float(t)))

    @property
    def velocities(self) -> list[float]:
        return [v for v, _ in self._entries]

    @property
    def times(self) -> list[float]:
        return [t for _, t in self._entries]

    @property
    def newest_time(self) -> float:
        if not self._entries:
            raise NoHistoryError("window is empty")
        return self._entries[-1][1]

    def copy(self) -> GoodSampleWindow:
        return GoodSampleWindow(self.window_len, self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __eq__(self, other):
        if not isinstance(other, GoodSampleWindow):
            return NotImplemented
        return self.window_len == other.window_len and list(self) == list(other)

    def __repr__(self):
        return f"GoodSampleWindow({self.window_len}, {list(self._entries)!r})"


def record_good_sample(window: GoodSampleWindow, v: float, t: float) -> GoodSampleWindow:
    window.record(v, t)
    return window


def back_fit_accelerations(window: GoodSampleWindow) -> list[float]:
    """Acceleration of every entry relative to the newest one; the newest gets 0."""
    if not len(window):
        raise NoHistoryError("window is empty")
    v_last, t_last = window._entries[-1]
    accels = [(v_last - v) / (t_last - t) for v, t in list(window)[:-1]]
    accels.append(0.0)
    return accels


def predicted_velocities(window: GoodSampleWindow, t_p: float) -> list[float]:
    accels = back_fit_accelerations(window)
    if t_p < window.newest_time:
        raise ValueError(f"prediction time {t_p} precedes newest sample {window.newest_time}")
    return [v + (t_p - t) * a for (v, t), a in zip(window, accels)]


def predict_velocity(window: GoodSampleWindow, t_p: float,
                     aggregation: Aggregation | str = Aggregation.MEAN) -> float:
    """Extrapolated velocity at ``t_p`` seconds.

    Raises NoHistoryError on an empty window.
    """
    preds = predicted_velocities(window, t_p)
    mode = Aggregation(aggregation)
    if mode is Aggregation.MEAN:
        # Averaging deviations from one member keeps equal inputs exact.
        ref = preds[-1]
        return ref + sum(p - ref for p in preds) / len(preds)
    # last_fit: the newest entry with a fitted (nonzero-interval) slope
    return preds[-2] if len(preds) >= 2 else preds[0]


def horizon_guard(window: GoodSampleWindow, t_p: float, max_horizon: float) -> bool:
    """True while ``t_p`` is within ``max_horizon`` seconds of the newest good sample."""
    return t_p - window.newest_time <= max_horizon + _HALF_TICK_S
