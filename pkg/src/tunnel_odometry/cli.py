"""Command-line front end: ``simulate``, ``replay`` and ``compare``.

Exit codes: 0 success, 1 usage error (bad flags, unknown preset, empty
preset list), 2 input error (unreadable or malformed files).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .pipeline import DisplacementReport, StreamError, run_baseline, run_stream
from .range_model import RangeCalibration
from .sensor_types import LogFormatError, OdometryConfig, read_log, write_log
from .simulator import (
    MotionProfile,
    ScenarioPreset,
    builtin_presets,
    get_preset,
    preset_from_mapping,
    preset_seed,
    read_truth,
    simulate,
    write_truth,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2

SERIES_HEADER = "t_us,ds_x_m,ds_y_m,cum_x_m,cum_y_m,source"


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- config files -----------------------------------------------------------

def parse_key_values(text: str, section: str = "config") -> dict[str, str]:
    """Parse ``key = value`` lines.

    ``#`` starts a comment. If ``[name]`` headers are present, only lines
    before the first header or inside ``[section]`` are read, so a report's
    echoed ``[config]`` block can be fed back in as a config file.
    """
    values: dict[str, str] = {}
    active = True
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            active = line[1:-1].strip() == section
            continue
        if not active:
            continue
        if "=" not in line:
            raise ValueError(f"line {line_no}: expected 'key = value'")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def resolve_config(args: argparse.Namespace) -> OdometryConfig:
    """Defaults, then ``--config`` file, then flags."""
    config = OdometryConfig()
    try:
        if args.config:
            try:
                text = Path(args.config).read_text(encoding="utf-8")
            except OSError as exc:
                raise InputError(f"cannot read config {args.config}: {exc}") from exc
            config = OdometryConfig.from_mapping(parse_key_values(text), config)
        overrides = {
            "quality_threshold": args.quality_threshold,
            "window_len": args.window_len,
            "aggregation": args.aggregation,
            "max_prediction_horizon_s": args.max_horizon,
            "range_gain": args.range_gain,
            "range_offset_cm": args.range_offset_cm,
        }
        overrides = {k: str(v) for k, v in overrides.items() if v is not None}
        return OdometryConfig.from_mapping(overrides, config)
    except ValueError as exc:
        raise UsageError(f"invalid configuration: {exc}") from exc


def parse_profile(spec: str, duration: float, rate: float) -> MotionProfile:
    """``constant:SPEED``, ``trapezoidal:ACCEL,CRUISE`` or ``sinusoidal:AMP,PERIOD[,MEAN]``."""
    kind, _, rest = spec.partition(":")
    try:
        nums = [float(x) for x in rest.split(",")] if rest else []
        if kind in ("constant", "constant_velocity") and len(nums) == 1:
            return MotionProfile("constant_velocity", duration, rate, speed=nums[0])
        if kind == "trapezoidal" and len(nums) == 2:
            return MotionProfile("trapezoidal", duration, rate, accel=nums[0], cruise_speed=nums[1])
        if kind == "sinusoidal" and len(nums) in (2, 3):
            mean = nums[2] if len(nums) == 3 else 0.0
            return MotionProfile("sinusoidal", duration, rate, amplitude=nums[0], period=nums[1], speed=mean)
    except ValueError as exc:
        raise UsageError(f"bad profile {spec!r}: {exc}") from exc
    raise UsageError(f"bad profile {spec!r}; expected constant:SPEED, trapezoidal:ACCEL,CRUISE "
                     "or sinusoidal:AMP,PERIOD[,MEAN]")


def resolve_presets(names: str | None, preset_file: str | None) -> list[ScenarioPreset]:
    presets = []
    if preset_file:
        try:
            text = Path(preset_file).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read preset file {preset_file}: {exc}") from exc
        try:
            presets.append(preset_from_mapping(parse_key_values(text, section="preset")))
        except ValueError as exc:
            raise InputError(f"{preset_file}: {exc}") from exc
    if names is not None:
        available = [p.name for p in builtin_presets()]
        for name in (n.strip() for n in names.split(",")):
            if not name:
                continue
            if any(p.name == name for p in presets):
                continue
            try:
                presets.append(get_preset(name))
            except KeyError:
                raise UsageError(f"unknown preset {name!r}; available: {', '.join(available)}") from None
    return presets


# --- report output ----------------------------------------------------------

def format_report(report: DisplacementReport, algorithm: str, extra: dict[str, str] | None = None) -> str:
    lines = ["[result]", f"algorithm = {algorithm}"]
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {value}")
    lines += [
        f"total_x_m = {report.total_x:.6g}",
        f"total_y_m = {report.total_y:.6g}",
        f"total_norm_m = {report.total_norm:.6g}",
        f"n_steps = {report.n_steps}",
        f"n_measured = {report.n_measured}",
        f"n_predicted = {report.n_predicted}",
        f"n_no_history = {report.n_no_history}",
        f"n_raw = {report.n_raw}",
        "",
        "[config]",
    ]
    lines += [f"{k} = {v}" for k, v in report.config.to_mapping().items()]
    return "\n".join(lines) + "\n"


def write_series(path: Path, report: DisplacementReport) -> None:
    cum_x = 0.0
    cum_y = 0.0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SERIES_HEADER + "\n")
        for s in report.steps:
            # Same summation order as the pipeline totals.
            cum_x += s.ds_x
            cum_y += s.ds_y
            fh.write(f"{s.t},{s.ds_x!r},{s.ds_y!r},{cum_x!r},{cum_y!r},{s.source.value}\n")


def _out_dir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output directory {out}: {exc}") from exc
    return out


# --- commands ---------------------------------------------------------------

def cmd_simulate(args) -> int:
    config = resolve_config(args)
    profile = parse_profile(args.profile, args.duration, args.rate)
    if args.preset_file is None and args.preset is None:
        raise UsageError("simulate needs --preset NAME or --preset-file PATH")
    presets = resolve_presets(args.preset, args.preset_file)
    if len(presets) != 1:
        raise UsageError("simulate takes exactly one preset")
    preset = presets[0]
    sim = simulate(profile, preset, args.seed, RangeCalibration(config.range_gain, config.range_offset))
    out = _out_dir(args)
    write_log(out / "log.csv", sim.records)
    write_truth(out / "truth.csv", sim.t_us, sim.truth_x)
    print(f"preset {preset.name}: {len(sim.records)} records, "
          f"dropout fraction {sim.dropout_fraction:.6g}, truth total {sim.truth_total:.6g} m")
    return EXIT_OK


def cmd_replay(args) -> int:
    config = resolve_config(args)
    try:
        records = read_log(args.log)
    except OSError as exc:
        raise InputError(f"cannot read log {args.log}: {exc}") from exc
    except LogFormatError as exc:
        raise InputError(f"{args.log}: {exc}") from exc
    if not records:
        raise InputError(f"{args.log}: no records")
    extra = {"log": str(args.log)}
    if args.truth:
        try:
            _, truth_x = read_truth(args.truth)
        except (OSError, ValueError, IndexError) as exc:
            raise InputError(f"cannot read truth {args.truth}: {exc}") from exc
        extra["truth_total_m"] = f"{truth_x[-1] - truth_x[0]:.6g}"
    try:
        pred = run_stream(records, config)
        base = run_baseline(records, config)
    except StreamError as exc:
        raise InputError(f"{args.log}: {exc}") from exc
    out = _out_dir(args)
    for report, suffix, name in ((pred, "", "prediction"), (base, "_baseline", "baseline")):
        (out / f"report{suffix}.txt").write_text(format_report(report, name, extra), encoding="utf-8")
        write_series(out / f"series{suffix}.csv", report)
    print(f"prediction total {pred.total_norm:.6g} m, baseline total {base.total_norm:.6g} m")
    return EXIT_OK


def compare_rows(presets: Sequence[ScenarioPreset], profile: MotionProfile, seed: int,
                 config: OdometryConfig) -> list[dict]:
    """Simulate each preset and run both algorithms on the same stream."""
    cal = RangeCalibration(config.range_gain, config.range_offset)
    rows = []
    for preset in presets:
        sim = simulate(profile, preset, preset_seed(seed, preset.name), cal)
        base = run_baseline(sim.records, config)
        pred = run_stream(sim.records, config)
        rows.append({
            "preset": preset.name,
            "ground_truth_m": sim.truth_total,
            "baseline_m": base.total_norm,
            "prediction_m": pred.total_norm,
            "dropout_fraction": sim.dropout_fraction,
            "n_no_history": pred.n_no_history,
        })
    return rows


TABLE_COLUMNS = ("preset", "ground_truth_m", "baseline_m", "prediction_m", "dropout_fraction", "n_no_history")


def format_table(rows: Sequence[dict]) -> str:
    def cell(v):
        return f"{v:.6g}" if isinstance(v, float) else str(v)

    grid = [list(TABLE_COLUMNS)] + [[cell(r[c]) for c in TABLE_COLUMNS] for r in rows]
    widths = [max(len(row[i]) for row in grid) for i in range(len(TABLE_COLUMNS))]
    lines = []
    for k, row in enumerate(grid):
        lines.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths))))
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def cmd_compare(args) -> int:
    config = resolve_config(args)
    profile = parse_profile(args.profile, args.duration, args.rate)
    names = args.preset if args.preset is not None else (
        None if args.preset_file else ",".join(p.name for p in builtin_presets()))
    presets = resolve_presets(names, args.preset_file)
    if not presets:
        raise UsageError("empty preset list")
    rows = compare_rows(presets, profile, args.seed, config)
    out = _out_dir(args)
    with open(out / "table.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(TABLE_COLUMNS) + "\n")
        for r in rows:
            fh.write(",".join(repr(r[c]) if isinstance(r[c], float) else str(r[c]) for c in TABLE_COLUMNS) + "\n")
    text = format_table(rows)
    config_echo = "\n".join(f"{k} = {v}" for k, v in config.to_mapping().items())
    (out / "table.txt").write_text(
        f"{text}\nprofile = {args.profile}\nduration_s = {args.duration!r}\nrate_hz = {args.rate!r}\n"
        f"seed = {args.seed}\n\n[config]\n{config_echo}\n",
        encoding="utf-8",
    )
    print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value config file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", metavar="DIR", default=".")
    common.add_argument("--quality-threshold", type=int)
    common.add_argument("--window-len", type=int)
    common.add_argument("--aggregation", choices=["mean", "last_fit"])
    common.add_argument("--max-horizon", type=float, metavar="S")
    common.add_argument("--range-gain", type=float, metavar="X")
    common.add_argument("--range-offset-cm", type=float, metavar="X")

    sim_flags = _Parser(add_help=False)
    sim_flags.add_argument("--profile", default="constant:0.5", metavar="KIND:ARGS")
    sim_flags.add_argument("--duration", type=float, default=100.0, metavar="S")
    sim_flags.add_argument("--rate", type=float, default=20.0, metavar="HZ")
    sim_flags.add_argument("--preset", metavar="NAME[,NAME...]")
    sim_flags.add_argument("--preset-file", metavar="PATH")

    parser = _Parser(prog="tunnel-odometry", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("simulate", parents=[common, sim_flags], help="write a synthetic log and truth file")
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("replay", parents=[common], help="run both algorithms over a log file")
    p.add_argument("log", help="CSV log to replay")
    p.add_argument("--truth", metavar="PATH", help="optional truth.csv to echo into the report")
    p.set_defaults(func=cmd_replay)
    p = sub.add_parser("compare", parents=[common, sim_flags], help="baseline vs prediction over presets")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
