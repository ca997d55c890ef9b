import csv

import pytest

from conftest import make_records
from tunnel_odometry.cli import main, parse_key_values
from tunnel_odometry.pipeline import run_baseline, run_stream
from tunnel_odometry.sensor_types import LOG_HEADER, OdometryConfig, read_log, write_log

SIM_ARGS = ["--profile", "constant:0.5", "--duration", "100", "--rate", "20", "--seed", "7"]


def read_series(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_simulate_writes_schema_and_prints_truth(tmp_path, capsys):
    assert main(["simulate", *SIM_ARGS, "--preset", "floor_led", "--out", str(tmp_path)]) == 0
    assert "truth total 50 m" in capsys.readouterr().out
    assert (tmp_path / "log.csv").read_text().splitlines()[0] == LOG_HEADER
    assert (tmp_path / "truth.csv").read_text().splitlines()[0] == "t_us,truth_x_m"
    assert len(read_log(tmp_path / "log.csv")) == 2001


def test_simulate_is_byte_deterministic(tmp_path):
    for d in ("a", "b"):
        assert main(["simulate", *SIM_ARGS, "--preset", "floor_led", "--out", str(tmp_path / d)]) == 0
    for name in ("log.csv", "truth.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_simulate_unknown_preset(tmp_path, capsys):
    assert main(["simulate", *SIM_ARGS, "--preset", "floor_neon", "--out", str(tmp_path)]) == 1
    assert "floor_led" in capsys.readouterr().err


def test_simulate_preset_file(tmp_path):
    pf = tmp_path / "p.txt"
    pf.write_text("name = custom\np_dropout = 0.0\nrange_true = 2.0\nquality_good_range = 150,200\n")
    assert main(["simulate", *SIM_ARGS, "--preset-file", str(pf), "--out", str(tmp_path)]) == 0
    qs = {r.flow.quality for r in read_log(tmp_path / "log.csv")}
    assert min(qs) >= 150 and max(qs) <= 200


def test_usage_errors_exit_1(tmp_path):
    assert main(["simulate", "--profile", "warp:9", "--preset", "floor_led", "--out", str(tmp_path)]) == 1
    assert main(["simulate", *SIM_ARGS, "--out", str(tmp_path)]) == 1
    with pytest.raises(SystemExit) as info:
        main(["replay"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1


def test_replay_zero_flow_log(tmp_path):
    log = tmp_path / "log.csv"
    write_log(log, make_records([0.0] * 20, 200, r_raw=250.0))
    assert main(["replay", str(log), "--out", str(tmp_path / "out")]) == 0
    for suffix in ("", "_baseline"):
        text = (tmp_path / "out" / f"report{suffix}.txt").read_text()
        assert "total_norm_m = 0\n" in text


def test_replay_simulated_clean_log(tmp_path):
    pf = tmp_path / "clean.txt"
    pf.write_text("name = clean\n")
    main(["simulate", *SIM_ARGS, "--preset-file", str(pf), "--out", str(tmp_path)])
    out = tmp_path / "out"
    assert main(["replay", str(tmp_path / "log.csv"), "--truth", str(tmp_path / "truth.csv"), "--out", str(out)]) == 0
    records = read_log(tmp_path / "log.csv")
    pred, base = run_stream(records), run_baseline(records)
    for report, suffix in ((pred, ""), (base, "_baseline")):
        assert report.total_norm == pytest.approx(50.0, rel=1e-9)
        rows = read_series(out / f"series{suffix}.csv")
        assert len(rows) == 2000
        assert [int(r["t_us"]) for r in rows] == sorted({int(r["t_us"]) for r in rows})
        assert float(rows[-1]["cum_x_m"]) == report.total_x
        assert float(rows[-1]["cum_y_m"]) == report.total_y
        assert "truth_total_m = 50" in (out / f"report{suffix}.txt").read_text()


def test_replay_malformed_log(tmp_path, capsys):
    log = tmp_path / "bad.csv"
    log.write_text(LOG_HEADER + "\n1,0,0,180,200\n2,0,0,999,200\n")
    assert main(["replay", str(log), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "line 3" in err and "quality" in err


def test_replay_missing_log(tmp_path):
    assert main(["replay", str(tmp_path / "nope.csv"), "--out", str(tmp_path)]) == 2


def test_report_echo_reproduces_config(tmp_path):
    log = tmp_path / "log.csv"
    write_log(log, make_records([0.01] * 10, 200))
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# tuned\nwindow_len = 4\naggregation = last_fit\nrange_gain = 1.2\n")
    args = ["replay", str(log), "--config", str(cfg_file), "--window-len", "6", "--max-horizon", "0.5"]
    assert main([*args, "--out", str(tmp_path / "o")]) == 0
    echoed = OdometryConfig.from_mapping(parse_key_values((tmp_path / "o" / "report.txt").read_text()))
    # flags beat the file, the file beats defaults
    assert echoed == OdometryConfig(window_len=6, aggregation="last_fit", range_gain=1.2, max_prediction_horizon=0.5)
    # the report itself works as a config file
    assert main(["replay", str(log), "--config", str(tmp_path / "o" / "report.txt"), "--out", str(tmp_path / "p")]) == 0
    assert (tmp_path / "o" / "series.csv").read_bytes() == (tmp_path / "p" / "series.csv").read_bytes()


def test_bad_config_value_is_usage_error(tmp_path):
    log = tmp_path / "log.csv"
    write_log(log, make_records([0.0] * 3, 200))
    assert main(["replay", str(log), "--window-len", "0", "--out", str(tmp_path)]) == 1


def test_compare_table(tmp_path, capsys):
    args = ["compare", "--preset", "floor_led,sidewall_led", "--seed", "0", "--out", str(tmp_path)]
    assert main(args) == 0
    assert "floor_led" in capsys.readouterr().out
    with open(tmp_path / "table.csv") as fh:
        rows = {r["preset"]: r for r in csv.DictReader(fh)}
    floor, wall = rows["floor_led"], rows["sidewall_led"]
    truth = float(floor["ground_truth_m"])
    assert abs(float(floor["prediction_m"]) - truth) < abs(float(floor["baseline_m"]) - truth)
    assert float(wall["baseline_m"]) == float(wall["prediction_m"]) == 0.0
    assert (tmp_path / "table.txt").exists()


def test_compare_empty_preset_list(tmp_path):
    assert main(["compare", "--preset", "", "--out", str(tmp_path)]) == 1


def test_compare_no_dropout_columns_equal(tmp_path):
    pf = tmp_path / "p.txt"
    pf.write_text("name = bright\np_dropout = 0\nflow_noise_sigma = 0.001\nrange_noise_sigma = 2\n")
    assert main(["compare", "--preset-file", str(pf), "--out", str(tmp_path)]) == 0
    with open(tmp_path / "table.csv") as fh:
        (row,) = list(csv.DictReader(fh))
    assert row["baseline_m"] == row["prediction_m"]
