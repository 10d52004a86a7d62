import csv
import json

import pytest

from pushtasep.cli import main


def run(tmp_path, command, cfg, *extra, out="out"):
    path = tmp_path / f"{command}.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")
    code = main([command, "--config", str(path), "--out", str(tmp_path / out), *extra])
    summary_path = tmp_path / out / "summary.json"
    summary = json.loads(summary_path.read_text()) if summary_path.exists() else None
    return code, summary


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_exact_three_site(tmp_path):
    code, summary = run(tmp_path, "exact", {"content": [1, 1, 1], "beta": ["1", "2", "3"]})
    assert code == 0 and summary["passed"]
    assert summary["partition_function"] == "66"
    assert summary["mode"] == "exact"
    rows = read_csv(tmp_path / "out" / "stationary.csv")
    assert len(rows) == 6 and all(r["status"] == "PASS" for r in rows)
    assert (tmp_path / "out" / "stationary.csv").read_bytes().count(b"\r\n") == 7


def test_exact_single_species_closed_form(tmp_path):
    code, summary = run(tmp_path, "exact", {"content": [2, 2], "beta": ["1/2", "3", "1", "5/3"]})
    assert code == 0
    assert summary["checks"]["single_species_closed_form"]["passed"]


def test_exact_float_mode(tmp_path):
    code, summary = run(tmp_path, "exact", {"content": [1, 2, 1], "beta": [1.0, 0.5, 2.0, 1.5]})
    assert code == 0 and summary["mode"] == "float"


def test_bad_beta_length_is_usage_error(tmp_path, capsys):
    code, summary = run(tmp_path, "exact", {"content": [1, 1, 1], "beta": ["1", "2"]})
    assert code == 2 and summary is None
    assert "length" in capsys.readouterr().err


def test_missing_config_and_bad_flags(tmp_path):
    assert main(["exact", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")]) == 2
    with pytest.raises(SystemExit) as err:
        main(["frobnicate", "--config", "x", "--out", "y"])
    assert err.value.code == 2


def test_no_overwrite_without_force(tmp_path):
    cfg = {"content": [1, 1, 1], "beta": ["1", "2", "3"]}
    assert run(tmp_path, "exact", cfg)[0] == 0
    assert run(tmp_path, "exact", cfg)[0] == 2
    assert run(tmp_path, "exact", cfg, "--force")[0] == 0


def test_simulate_is_deterministic(tmp_path):
    cfg = {"content": [1, 1, 1], "beta": [1, 2, 3], "horizon": 2000, "replicas": 2, "trajectory": True}
    a = run(tmp_path, "simulate", cfg, "--seed", "17", out="a")
    b = run(tmp_path, "simulate", cfg, "--seed", "17", out="b")
    assert a[0] == b[0]
    for name in ("summary.json", "empirical.csv", "replicas.csv", "trajectory_0.jsonl", "trajectory_1.jsonl"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert len(read_csv(tmp_path / "a" / "replicas.csv")) == 2


def test_simulate_tv(tmp_path):
    code, summary = run(tmp_path, "simulate", {"content": [1, 1, 1], "beta": ["1", "2", "3"], "horizon": 10000})
    assert code == 0 and summary["tv_pooled"] < 0.02


def test_failed_check_exit_code(tmp_path):
    cfg = {"content": [1, 1, 1], "beta": [1, 2, 3], "horizon": 10, "tv_threshold": 1e-9}
    code, summary = run(tmp_path, "simulate", cfg)
    assert code == 1 and not summary["passed"]


def test_observables_two_point(tmp_path):
    code, summary = run(tmp_path, "observables", {"content": [1, 1, 1, 1, 1], "beta": [1, 2, 3, 4, 5]})
    assert code == 0
    assert summary["checks"]["two_point"]["cells"] == 25
    assert summary["checks"]["two_point_row_sums"]["passed"]
    rows = read_csv(tmp_path / "out" / "two_point.csv")
    assert len(rows) == 25 and all(r["status"] == "PASS" for r in rows)


def test_observables_float(tmp_path):
    code, summary = run(tmp_path, "observables", {"content": [2, 1, 1], "beta": [1.0, 2.5, 0.5, 1.25]})
    assert code == 0 and summary["mode"] == "float"


def test_interchange(tmp_path):
    cfg = {"instances": 500, "content": [1, 1, 1, 1], "beta": ["1", "2", "1/2", "3"],
           "k": 2, "initial": [0, 1, 3, 2], "replicas": 200, "path_horizon": 3}
    code, summary = run(tmp_path, "interchange", cfg)
    assert code == 0
    assert summary["checks"]["two_station_outputs_equal"]["failures"] == 0
    assert summary["checks"]["excluded_start_rejected"]["passed"]
    assert summary["checks"]["exact_marginal_invariant"]["passed"]


def test_interchange_identity_permutation(tmp_path):
    cfg = {"instances": 10, "content": [1, 1, 1, 1], "beta": ["1", "2", "1/2", "3"],
           "permutation": [3, 4], "common_seed": True, "replicas": 30, "initial": [0, 1, 3, 2]}
    code, summary = run(tmp_path, "interchange", cfg)
    assert code == 0


def test_interchange_rejects_excluded_start(tmp_path, capsys):
    code, _ = run(tmp_path, "interchange", {"eta01": [0, 1]})
    assert code == 2
    assert "(0, 1) is excluded" in capsys.readouterr().err
