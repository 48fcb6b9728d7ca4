import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fwlab import (
    ExperimentReport,
    HypothesisViolationError,
    InvalidArgumentError,
    default_config,
    emit_report,
    run_decay_check,
    run_illposed,
    run_nonuniform,
    run_picard,
)
from fwlab.cli import main, read_config_file
from fwlab.experiments import (
    check_illposed_hypothesis,
    check_nonuniform_hypothesis,
    check_wellposed_hypothesis,
    render_report,
)


@pytest.fixture(scope="module")
def picard_report():
    return run_picard(default_config("picard"))


@settings(max_examples=200, deadline=None)
@given(
    s=st.sampled_from([0.5, 1.0, 1.25, 1.5, 2.0, 3.0]),
    p=st.sampled_from([1.0, 2.0, 4.0, math.inf]),
    r=st.sampled_from([1.0, 2.0, math.inf]),
)
def test_nonuniform_hypothesis_property(s, p, r):
    crit = 1 + 1 / p
    ok = math.isfinite(r) and (s > crit or (s == crit and r == 1.0 and math.isfinite(p)))
    if ok:
        check_nonuniform_hypothesis(s, p, r)
    else:
        with pytest.raises(HypothesisViolationError):
            check_nonuniform_hypothesis(s, p, r)


def test_wellposed_allows_r_infinity():
    check_wellposed_hypothesis(2.0, 2.0, math.inf)
    with pytest.raises(HypothesisViolationError):
        check_wellposed_hypothesis(1.5, 2.0, 2.0)


@settings(max_examples=100, deadline=None)
@given(sigma=st.floats(2.0, 6.0), p=st.sampled_from([1.0, 2.0, math.inf]), l=st.integers(2, 6))
def test_illposed_hypothesis_property(sigma, p, l):
    ok = sigma > 3 + 1 / p and l >= 4
    if ok:
        check_illposed_hypothesis(sigma, p, l)
    else:
        with pytest.raises(HypothesisViolationError):
            check_illposed_hypothesis(sigma, p, l)


def test_runners_refuse_bad_parameters():
    with pytest.raises(HypothesisViolationError):
        run_nonuniform(default_config("nonuniform", s=1.5, p=2.0, r=2.0))
    with pytest.raises(HypothesisViolationError):
        run_decay_check(default_config("decay", r=math.inf))
    with pytest.raises(HypothesisViolationError):
        run_illposed(default_config("illposed", sigma=3.5))
    with pytest.raises(HypothesisViolationError):
        run_picard(default_config("picard", s=1.0))


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        default_config("spectra")
    with pytest.raises(InvalidArgumentError):
        default_config("picard", format="xml")
    with pytest.raises(InvalidArgumentError):
        default_config("decay", t=(0.1, -0.1))
    with pytest.raises(InvalidArgumentError):
        default_config("decay", n_min=6, n_max=4)
    cfg = default_config("decay", t=0.2, grid_n=2**14)
    assert cfg.t == (0.2,) and cfg.grid_n == 2**14 and cfg.s == 2.0


def test_picard_report(picard_report):
    rep = picard_report
    assert rep.passed
    assert rep.rows[0]["ratio"] is None
    assert rep.derived["first_iterate_deviation"] <= 1e-15
    assert rep.derived["end_time"] <= rep.derived["horizon"]


def test_empty_rows_header_only(tmp_path):
    rep = ExperimentReport("decay", {}, ["n", "t", "distance"])
    path = tmp_path / "empty.csv"
    emit_report(rep, path, "csv")
    assert path.read_bytes() == b"n,t,distance\n"


def test_csv_layout(picard_report, tmp_path):
    path = tmp_path / "p.csv"
    emit_report(picard_report, path, "csv")
    raw = path.read_bytes()
    assert b"\r" not in raw
    rows = list(csv.reader(io.StringIO(raw.decode())))
    assert rows[0] == picard_report.columns
    assert len(rows) == len(picard_report.rows) + 1
    assert float(rows[2][1]) == picard_report.rows[1]["difference"]
    assert "," not in rows[2][1] and "." in rows[2][1]


def test_json_round_trip(picard_report, tmp_path):
    path = tmp_path / "p.json"
    emit_report(picard_report, path, "json")
    doc = json.loads(path.read_text())
    assert doc["rows"] == picard_report.rows
    assert doc["derived"] == picard_report.derived
    assert doc["verdicts"] == picard_report.verdicts
    assert doc["config"]["grid_n"] == 4096
    assert "wall_clock" not in doc


def test_emit_rejects_unknown_format(picard_report, tmp_path):
    with pytest.raises(InvalidArgumentError):
        emit_report(picard_report, tmp_path / "x", "yaml")


def test_emit_io_failure(picard_report, tmp_path):
    with pytest.raises(OSError):
        emit_report(picard_report, tmp_path / "missing" / "x.json", "json")


def test_deterministic_bytes_across_thread_counts(monkeypatch):
    cfg = default_config("illposed")
    out = []
    for threads in ("1", "2", "1"):
        monkeypatch.setenv("FW_LAB_THREADS", threads)
        rep = run_illposed(cfg)
        out.append(render_report(rep, "json") + render_report(rep, "csv"))
    assert out[0] == out[1] == out[2]


def test_bad_thread_env(monkeypatch):
    monkeypatch.setenv("FW_LAB_THREADS", "many")
    with pytest.raises(InvalidArgumentError):
        run_illposed(default_config("illposed"))


def test_decay_distance_shrinks_with_time():
    rep = run_decay_check(default_config("decay", grid_n=2**15, n_min=4, n_max=6, t=(0.0125, 0.025, 0.05, 0.1)))
    for n in (4, 5, 6):
        d = [r["distance"] for r in rep.rows if r["n"] == n]
        assert all(a < b for a, b in zip(d, d[1:]))
    ups = [r["upper_norm_over_2n"] for r in rep.rows]
    assert max(ups) < 1.1 * min(ups)


def test_nonuniform_small_time_limit():
    rep = run_nonuniform(default_config("nonuniform", grid_n=2**15, n_min=5, n_max=5, t=(0.0005, 0.002, 0.008)))
    init = rep.rows[0]["initial_distance"]
    gaps = [abs(r["distance"] - init) for r in rep.rows]
    assert all(a < b for a, b in zip(gaps, gaps[1:]))
    assert gaps[0] < 0.05 * init


def test_illposed_columns():
    rep = run_illposed(default_config("illposed"))
    for row in rep.rows:
        assert row["block_lower_bound"] <= row["inflation"] * (1 + 1e-12)
        assert row["t"] == pytest.approx(0.1 * 2.0 ** (-4 * row["n"]))
    with pytest.raises(InvalidArgumentError):
        run_illposed(default_config("illposed", n_terms=2))


# ---- CLI


def test_cli_pass(tmp_path, capsys):
    out = tmp_path / "picard.csv"
    assert main(["picard", "--out", str(out), "--format", "csv"]) == 0
    assert out.read_text().startswith("n,difference,ratio\n")
    assert "picard: pass" in capsys.readouterr().err


def test_cli_stdout_json(capsys):
    assert main(["peakon", "--grid-n", "4096", "--t", "0.25"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["config"]["grid_n"] == 4096 and doc["config"]["t"] == [0.25]


def test_cli_fail_exit_code(tmp_path):
    conf = tmp_path / "strict.conf"
    conf.write_text("# impossible threshold\npicard_ratio_max = 1e-9\n")
    assert main(["picard", "--config", str(conf), "--out", str(tmp_path / "o.json")]) == 2


def test_cli_error_exit_codes(tmp_path, capsys):
    assert main(["nonuniform", "--s", "1.2"]) == 1
    assert "violates" in capsys.readouterr().err
    assert main(["picard", "--bogus"]) == 1
    assert main(["picard", "--grid-n", "1000"]) == 1
    assert main(["picard", "--out", str(tmp_path / "no" / "such" / "dir.json")]) == 1


def test_cli_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "localization" in capsys.readouterr().out


def test_config_file_overridden_by_flags(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("grid-n = 2048\nt = 0.5, 0.25\nformat = csv\n")
    parsed = read_config_file(str(conf))
    assert parsed == {"grid_n": 2048, "t": (0.5, 0.25), "format": "csv"}
    assert main(["picard", "--config", str(conf), "--grid-n", "4096", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["config"]["grid_n"] == 4096
    assert doc["config"]["t"] == [0.25, 0.5]


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.conf"
    bad.write_text("grid_n: 4096\n")
    with pytest.raises(InvalidArgumentError):
        read_config_file(str(bad))
    bad.write_text("colour = red\n")
    with pytest.raises(InvalidArgumentError):
        read_config_file(str(bad))
    bad.write_text("grid_n = lots\n")
    with pytest.raises(InvalidArgumentError):
        read_config_file(str(bad))
    assert main(["picard", "--config", str(bad)]) == 1
