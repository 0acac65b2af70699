import csv
import json
from pathlib import Path

import numpy as np
import pytest

from zenolab import cli, jsonio
from zenolab.superop import GklsGenerator, KrausSet

CONFIGS = sorted((Path(__file__).resolve().parents[1] / "configs").glob("*.json"))
FAST = [p for p in CONFIGS if p.stem != "bounds_sweep"]


def _conv(**over):
    cfg = {
        "experiment": "convergence",
        "model": {"id": "weak_meas_81", "parameters": {"p": 0.5, "omega_t": 1.0}},
        "t": 1.0,
        "n_list": [8, 16, 32, 64, 128, 256, 512, 1024],
        "output": {"path": "out", "format": "csv"},
    }
    cfg.update(over)
    return cfg


def test_validate_missing_n_list():
    cfg = _conv()
    del cfg["n_list"]
    problems = cli.validate(cfg)
    assert any("n_list" in p for p in problems)


def test_validate_kick_strength_range():
    cfg = {"experiment": "spectral_report", "model": {"id": "cptp_kick_82", "parameters": {"q": 1.0}}}
    problems = cli.validate(cfg)
    assert any("q < 1" in p for p in problems)


def test_validate_unknown_experiment_and_fields():
    assert cli.validate({"experiment": "plot"})
    assert any("bogus" in p for p in cli.validate(_conv(bogus=1)))
    assert cli.validate([1, 2])


@pytest.mark.parametrize("path", CONFIGS, ids=lambda p: p.stem)
def test_sample_configs_validate(path):
    assert cli.validate(json.loads(path.read_text())) == []


def test_run_convergence_slope(tmp_path, capsys):
    assert cli.run(_conv(), tmp_path) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert out.count("\n") == 1 and "slope" in out
    with open(tmp_path / "convergence.csv") as fh:
        rows = list(csv.DictReader(fh))
    ns = [int(r["n"]) for r in rows]
    assert ns == [8, 16, 32, 64, 128, 256, 512, 1024]
    from zenolab.zeno import loglog_slope

    slope = loglog_slope(ns, [float(r["distance"]) for r in rows])
    assert slope == pytest.approx(-1.0, abs=0.15)


def test_run_spectral_report_json(tmp_path):
    cfg = {"experiment": "spectral_report", "model": {"id": "cptp_kick_82", "parameters": {"q": 0.9}}}
    assert cli.run(cfg, tmp_path, fmt="json", quiet=True) == cli.EXIT_OK
    data = json.loads((tmp_path / "spectral_report.json").read_text())
    periph = sorted(round(re, 9) for (re, im), p in zip(data["eigenvalues"], data["peripheral"]) if p)
    assert periph == [-1.0, 1.0]


def test_run_bch_check_slope(tmp_path, capsys):
    cfg = {"experiment": "bch_check", "seed": 7, "dims": [3], "t": 1.0,
           "n_list": [16, 32, 64, 128, 256, 512, 1024]}
    assert cli.run(cfg, tmp_path) == cli.EXIT_OK
    capsys.readouterr()
    from zenolab.zeno import loglog_slope

    with open(tmp_path / "bch_check.csv") as fh:
        rows = list(csv.DictReader(fh))
    slope = loglog_slope([int(r["n"]) for r in rows], [float(r["residual"]) for r in rows])
    assert slope == pytest.approx(-2.0, abs=0.2)


def test_csv_is_byte_identical_on_rerun(tmp_path):
    cfg = {"experiment": "bch_check", "seed": 3, "dims": [2, 3], "instances": 2, "n_list": [16, 64, 256]}
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.run(cfg, a, quiet=True) == 0
    assert cli.run(cfg, b, quiet=True) == 0
    raw = (a / "bch_check.csv").read_bytes()
    assert raw == (b / "bch_check.csv").read_bytes()
    assert b"\r" not in raw


def test_csv_number_format():
    text = cli.to_csv(("x", "flag"), [(0.1, True), (1 / 3, False)])
    assert text == "x,flag\n0.10000000000000001,true\n0.33333333333333331,false\n"


def test_run_invalid_config_exit_code(tmp_path, capsys):
    assert cli.run({"experiment": "convergence"}, tmp_path) == cli.EXIT_INVALID
    assert "n_list" in capsys.readouterr().err


def test_run_numerical_failure_exit_code(tmp_path, monkeypatch, capsys):
    def boom(cfg):
        raise ArithmeticError("no admissible branch cut")

    monkeypatch.setitem(cli.RUNNERS, "spectral_report", boom)
    cfg = {"experiment": "spectral_report", "model": {"id": "cptp_kick_82"}}
    assert cli.run(cfg, tmp_path) == cli.EXIT_NUMERIC
    assert "branch cut" in capsys.readouterr().err


def test_run_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = {"experiment": "spectral_report", "model": {"id": "cptp_kick_82"}}
    assert cli.run(cfg, blocker / "sub", quiet=True) == cli.EXIT_INVALID


def test_inline_model(tmp_path):
    proj = KrausSet((np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)))
    gen = GklsGenerator(np.array([[0, 1], [1, 0]], dtype=complex) / 2, ())
    model = {"kicks": [jsonio.kraus_to_json(proj)], "generator": jsonio.gkls_to_json(gen)}
    cfg = {"experiment": "convergence", "model": model, "n_list": [8, 16, 32, 64]}
    assert cli.validate(cfg) == []
    assert cli.run(cfg, tmp_path, quiet=True) == 0
    bad = {"experiment": "convergence", "model": {"kicks": "x"}, "n_list": [8]}
    assert cli.validate(bad)


def test_main_validate(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(_conv()))
    assert cli.main(["validate", "--config", str(path)]) == 0
    assert capsys.readouterr().out.strip() == "ok"
    path.write_text("{not json")
    assert cli.main(["validate", "--config", str(path)]) == cli.EXIT_INVALID


@pytest.mark.parametrize("path", FAST, ids=lambda p: p.stem)
def test_sample_configs_run(path, tmp_path):
    assert cli.main(["run", "--config", str(path), "--out", str(tmp_path), "--quiet"]) == 0
    assert list(tmp_path.iterdir())


@pytest.mark.slow
def test_bounds_sweep_config_runs(tmp_path, capsys):
    path = next(p for p in CONFIGS if p.stem == "bounds_sweep")
    assert cli.main(["run", "--config", str(path), "--out", str(tmp_path)]) == 0
    assert "violations = none" in capsys.readouterr().out
