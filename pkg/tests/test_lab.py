"""Scenario runner, config files, reports, CLI."""
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from normlab import cli, lab, measures


def test_registry_contents():
    reg = lab.list_scenarios()
    assert len(reg) == 15
    assert "heersink_vandehey" in reg
    for name, info in reg.items():
        assert info["description"]
        assert info["reference"]


def test_unknown_scenario_rejected():
    cfg = lab.ExperimentConfig(scenario="nope", n=100)
    with pytest.raises(lab.ConfigError):
        lab.run_scenario(cfg)


def test_config_validation():
    with pytest.raises(lab.ConfigError):
        lab.ExperimentConfig(scenario="wall", n=1, ks=(3,))
    with pytest.raises(lab.ConfigError):
        lab.ExperimentConfig(scenario="wall", n=100, seeds=0)


def test_flat_config_parsing(tmp_path):
    p = tmp_path / "cfg.txt"
    p.write_text(
        """
        # comment line
        scenario = wall
        n = 50000
        seeds = 2
        ks = [3]
        measure.kind = bernoulli
        measure.weights = (0.5, 0.5)
        set.kind = arithmetic_progression
        set.first = 1
        set.step = 3
        """
    )
    raw = lab.parse_flat_config(p)
    assert raw["scenario"] == "wall"
    assert raw["measure"] == {"kind": "bernoulli", "weights": (0.5, 0.5)}
    cfg = lab.config_from_dict(raw)
    assert cfg.n == 50_000 and cfg.selection["step"] == 3


def test_flat_config_unknown_keys(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("scenario = wall\nturbo = 9\n")
    with pytest.raises(lab.ConfigError, match="turbo"):
        lab.parse_flat_config(p)
    p2 = tmp_path / "bad2.txt"
    p2.write_text("scenario = wall\nmeasure.colour = red\n")
    with pytest.raises(lab.ConfigError, match="colour"):
        lab.parse_flat_config(p2)


def test_measure_and_selection_roundtrip():
    m = lab.measure_from_config(
        {"kind": "markov", "transition": [[0.9, 0.1], [0.1, 0.9]]})
    assert isinstance(m, measures.Markov)
    s = lab.selection_from_config({"kind": "arithmetic_progression",
                                   "first": 2, "step": 2})
    assert s.indices(3).tolist() == [2, 4, 6]
    with pytest.raises(lab.ConfigError):
        lab.measure_from_config({"kind": "mystery"})
    with pytest.raises(lab.ConfigError):
        lab.selection_from_config({"kind": "mystery"})


def test_derived_indicator_measures():
    per = lab.derived_indicator_measure(
        {"kind": "arithmetic_progression", "first": 2, "step": 2})
    assert isinstance(per, measures.Periodic) and per.pattern == (1, 0)
    hm = lab.derived_indicator_measure(
        {"kind": "iid_gaps", "support": [1, 3], "probs": [0.5, 0.5]})
    cs, _ = measures.gap_conditional_coefficients(hm, 4)
    assert cs[0] == pytest.approx(0.5, abs=1e-12)
    assert cs[2] == pytest.approx(0.5, abs=1e-12)
    assert lab.derived_indicator_measure({"kind": "power_runs"}) is None


def test_stat_tolerance():
    assert lab.stat_tolerance(1_000_000) == pytest.approx(0.004)


def _tiny_report():
    cfg = lab.ExperimentConfig(scenario="example_7_1", n=20_000, seeds=1)
    return lab.run_scenario(cfg)


def test_report_emission_bitstable(tmp_path):
    rep = _tiny_report()
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    lab.emit_report(rep, "json", p1)
    lab.emit_report(rep, "json", p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_report_json_roundtrip(tmp_path):
    rep = _tiny_report()
    p = tmp_path / "r.json"
    lab.emit_report(rep, "json", p)
    back = lab.report_from_json(p)
    assert back == rep


def test_report_csv_series_rows(tmp_path):
    cfg = lab.ExperimentConfig(
        scenario="heersink_vandehey", n=100_000, seeds=1,
        checkpoints=(10_000, 50_000),
    )
    rep = lab.run_scenario(cfg)
    p = tmp_path / "r.csv"
    lab.emit_report(rep, "csv", p)
    rows = [line.split(",") for line in p.read_text().splitlines()[1:]]
    series_rows = [r for r in rows if r[0] == "series"]
    names = {r[1] for r in series_rows}
    assert len(series_rows) == 2 * len(names)


def test_every_measured_value_is_paired():
    rep = lab.run_scenario(lab.ExperimentConfig(
        scenario="markov_destruction", n=100_000, seeds=1))
    for m in rep.measurements:
        assert (m.predicted is not None) or m.provenance == "none"


def test_scenarios_are_deterministic():
    cfg = dict(scenario="markov_destruction", n=50_000, seeds=1)
    a = lab.run_scenario(lab.ExperimentConfig(**cfg))
    b = lab.run_scenario(lab.ExperimentConfig(**cfg))
    a.wall_clock_s = b.wall_clock_s = 0.0
    assert a == b


def test_run_many_with_workers(monkeypatch):
    monkeypatch.setenv(lab.WORKERS_ENV, "2")
    cfgs = [lab.ExperimentConfig(scenario="example_7_1", n=10_000),
            lab.ExperimentConfig(scenario="example_7_2", n=10_000)]
    reports = lab.run_many(cfgs)
    assert [r.scenario for r in reports] == ["example_7_1", "example_7_2"]
    assert all(r.passed for r in reports)


def test_measurement_requires_consistent_provenance():
    with pytest.raises(ValueError):
        lab.Measurement("x", 1.0, None, "analytic")


# --- CLI ----------------------------------------------------------------

def test_cli_list(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    assert "heersink_vandehey" in out and "example_7_6" in out


def test_cli_run_writes_reports(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("scenario = example_7_1\nn = 20000\nseeds = 1\n")
    out = tmp_path / "reports"
    code = cli.main(["run", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    assert (out / "example_7_1.json").exists()
    assert "PASS" in capsys.readouterr().out


def test_cli_run_multiple_scenarios(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("scenario = example_7_1, example_7_2\nn = 20000\nseeds = 1\n")
    assert cli.main(["run", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 2


def test_cli_exit_code_on_failure(tmp_path):
    cfg = tmp_path / "cfg.txt"
    # tolerance impossible to meet: forces a failing criterion
    cfg.write_text("scenario = wall\nn = 20000\nseeds = 1\nks = [3]\n"
                   "tolerance = 1e-9\n")
    assert cli.main(["run", "--config", str(cfg)]) == 1


def test_cli_predict(tmp_path, capsys):
    cfg = tmp_path / "pred.txt"
    cfg.write_text(
        "measure.kind = markov\n"
        "measure.transition = [[0.9,0.1],[0.1,0.9]]\n"
        "block = (0, 0)\n"
        "gaps = (0,)\n"
        "set.kind = arithmetic_progression\nset.first = 2\nset.step = 2\n"
    )
    assert cli.main(["predict", "--config", str(cfg)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["cylinder_value"] == pytest.approx(0.45, abs=1e-12)
    assert payload["restricted_prediction"] == pytest.approx(0.41, abs=1e-12)


def test_cli_witness(tmp_path, capsys):
    spec = tmp_path / "spec.txt"
    spec.write_text("measure.kind = markov\n"
                    "measure.transition = [[0.9,0.1],[0.1,0.9]]\n"
                    "box = 6\n")
    outfile = tmp_path / "w.json"
    assert cli.main(["witness", "--spec", str(spec), "--out", str(outfile)]) == 0
    cert = json.loads(outfile.read_text())
    assert cert["block"] == [0, 0] and cert["gaps"] == [0]
    assert len(cert["certificate"]) == 6


def test_cli_witness_no_defect(tmp_path, capsys):
    spec = tmp_path / "spec.txt"
    spec.write_text("measure.kind = bernoulli\nmeasure.weights = (0.5, 0.5)\n")
    assert cli.main(["witness", "--spec", str(spec)]) == 1


def test_cli_entrypoint_subprocess(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "normlab.cli", "list"],
        capture_output=True, text=True, cwd=tmp_path,
    )
    assert out.returncode == 0 and "wall" in out.stdout
