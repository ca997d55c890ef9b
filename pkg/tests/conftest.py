from __future__ import annotations

from fractions import Fraction

import pytest

from tunnel_odometry.sensor_types import FlowSample, LogRecord, OdometryConfig, RangeSample


def make_records(theta_x, quality, r_raw=100.0, dt_us=50_000, t0=0, theta_y=None):
    """Build a synchronized stream; scalars broadcast over the sample count."""
    n = len(theta_x)
    if isinstance(quality, int):
        quality = [quality] * n
    if isinstance(r_raw, (int, float)):
        r_raw = [float(r_raw)] * n
    if theta_y is None:
        theta_y = [0.0] * n
    out = []
    for k in range(n):
        t = t0 + k * dt_us
        out.append(LogRecord(FlowSample(t, theta_x[k], theta_y[k], quality[k]), RangeSample(t, r_raw[k])))
    return out


def reference_totals(records, config: OdometryConfig, predict: bool = True) -> tuple[Fraction, Fraction, dict]:
    """Straight-line re-derivation of the gated integration in exact arithmetic.

    Written independently of the package: plain lists, integer microseconds,
    and Fractions everywhere, so float ordering cannot hide a logic error.
    """
    gain = Fraction(config.range_gain)
    offset = Fraction(config.range_offset)
    horizon_us = Fraction(config.max_prediction_horizon) * 10**6
    hist: list[tuple[Fraction, Fraction, int]] = []  # (vx, vy, t_us)
    tot_x = tot_y = Fraction(0)
    counts = {"measured": 0, "predicted": 0, "no_history": 0, "raw": 0}
    prev = None
    for rec in records:
        t = rec.flow.t
        if prev is None:
            prev = t
            continue
        dt = Fraction(t - prev, 10**6)
        r = max(Fraction(0), gain * Fraction(rec.range.r_raw) + offset) / 100
        tx, ty = Fraction(rec.flow.theta_x), Fraction(rec.flow.theta_y)
        good = rec.flow.quality >= config.quality_threshold
        if good or not predict:
            dx, dy = tx * r, ty * r
            counts["measured" if good else "raw"] += 1
            if good and predict:
                hist.append((dx / dt, dy / dt, t))
                hist = hist[-config.window_len:]
        elif not hist:
            dx = dy = Fraction(0)
            counts["no_history"] += 1
        else:
            counts["predicted"] += 1
            t_last = hist[-1][2]
            if t - t_last > horizon_us:
                vx = vy = Fraction(0)
            else:
                tp = Fraction(t, 10**6)
                preds = []
                for vxi, vyi, ti in hist:
                    if ti == t_last:
                        ax = ay = Fraction(0)
                    else:
                        span = Fraction(t_last - ti, 10**6)
                        ax = (hist[-1][0] - vxi) / span
                        ay = (hist[-1][1] - vyi) / span
                    lead = tp - Fraction(ti, 10**6)
                    preds.append((vxi + lead * ax, vyi + lead * ay))
                if config.aggregation.value == "mean":
                    vx = sum(p[0] for p in preds) / len(preds)
                    vy = sum(p[1] for p in preds) / len(preds)
                else:
                    vx, vy = preds[-2] if len(preds) >= 2 else preds[0]
            dx, dy = vx * dt, vy * dt
        tot_x += dx
        tot_y += dy
        prev = t
    return tot_x, tot_y, counts


@pytest.fixture
def identity_config():
    return OdometryConfig(range_gain=1.0, range_offset=0.0)


# --- acceptance reporting -----------------------------------------------------

_acceptance_results: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): an acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    label = getattr(report, "acceptance_label", None)
    if label:
        _acceptance_results.append((label, report.outcome.upper(), report.nodeid))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker:
        outcome.get_result().acceptance_label = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome, _ in _acceptance_results:
        status = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"{status}  {label}")
