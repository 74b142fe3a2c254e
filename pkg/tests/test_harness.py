import json
import os
import subprocess
import sys

import pytest

from sltlrm.harness import ConfigError, ExperimentConfig, PlotError, emit_plots, run_experiment
from sltlrm.harness.cli import main
from sltlrm.harness.metrics import CSV_COLUMNS, read_csv, welch_p
from sltlrm.harness.presets import CRAFT_TASKS, OFFICE_TARGETS
from sltlrm.sltl import parse


def tiny(tmp_path, **kw):
    base = dict(trials=1, seed=3, workers=1, phase_budget=400, pretrain_budget=400,
                eval_every=100, output_dir=str(tmp_path / "run"))
    base.update(kw)
    return ExperimentConfig(**base)


def test_office_targets_include_table_entries():
    assert parse(OFFICE_TARGETS["or_4_5"]) == parse(
        "((!star U B) ; (!star U C)) | ((!star U o) ; (!star U B))")
    assert "then_4_5" in OFFICE_TARGETS


def test_craft_gem_formula():
    assert parse(CRAFT_TASKS["gem"]) == parse("((F a ; F c) & F f) ; F b ; F h")


def test_schedules():
    office = ExperimentConfig(domain="office").schedule()
    assert [len(p) for p in office] == [2, 2, 2]
    craft = ExperimentConfig(domain="minecraft").schedule()
    assert len(craft) == 5 and sum(len(p) for p in craft) == 10
    assert craft[0][1][0] == "stick"


def test_desk_budgets():
    cfg = ExperimentConfig(domain="office", mode="lifelong")
    assert cfg.budget("phase") == 10_000
    cfg = ExperimentConfig(domain="office", mode="compose-eval")
    assert (cfg.budget("pretrain"), cfg.budget("target")) == (10_000, 10_000)
    assert cfg.n_trials() == 5
    assert ExperimentConfig(scale="paper").n_trials() == 20


@pytest.mark.parametrize("kw,msg", [
    ({"mode": "dance"}, "mode"),
    ({"domain": "mars"}, "domain"),
    ({"trials": 0}, "trials"),
    ({"params": {"gamma": 2.0}}, "gamma"),
    ({"params": {"lr": 0.1}}, "learning parameters"),
    ({"mapping": "clever"}, "preset"),
    ({"arms": ["oracle"]}, "arm"),
    ({"phases": [["nope"]]}, "unknown task"),
    ({"tasks": {"t": "F ("}, "mode": "single"}, "task 't'"),
])
def test_config_errors(kw, msg):
    with pytest.raises(ConfigError, match=msg):
        ExperimentConfig(**kw).validate()


def test_config_rejects_unknown_keys(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"domain": "office", "colour": 1}')
    with pytest.raises(ConfigError, match="colour"):
        ExperimentConfig.load(p)
    p.write_text("{")
    with pytest.raises(ConfigError):
        ExperimentConfig.load(p)


def _check_csv(path):
    rows = read_csv(path)
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert "\r" not in text
    assert rows
    for trial in {r["trial"] for r in rows}:
        steps = [int(r["env_steps_cumulative"]) for r in rows if r["trial"] == trial]
        assert steps == sorted(steps)
    assert [r["trial"] for r in rows] == sorted(r["trial"] for r in rows)
    for r in rows:
        assert r["success_flag"] in ("0", "1")
        assert (r["eval_steps"] == "") != (r["episode_steps"] == "")
    return rows


def test_lifelong_smoke(tmp_path):
    cfg = tiny(tmp_path, mode="lifelong", trials=2)
    result = run_experiment(cfg)
    out = result.output_dir
    for arm in ("lsrm-best", "lsrm-worst", "qrm", "qrm-rs"):
        for k in (1, 2, 3):
            rows = _check_csv(out / f"lifelong/{arm}/phase{k}.csv")
            assert {r["trial"] for r in rows} == {"0", "1"}
            assert {r["phase"] for r in rows} == {str(k)}
    assert (out / "lifelong/lsrm-best/memory_final.json").exists()
    assert not (out / "lifelong/qrm/phase1_rm.json").exists()
    prov = json.loads((out / "lifelong/lsrm-best/phase2_provenance.json").read_text())
    assert set(prov["new_states"]) == {"!star U c ; !star U o", "!star U o",
                                       "!star U m ; !star U o"}
    assert prov["transfers"]["!star U c ; !star U o"] == "left([!star U c], random)"
    dot = (out / "lifelong/lsrm-best/phase2_rm.dot").read_text()
    assert 'label="!star U o" color="red"' in dot
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["phase_budget"] == 400 and meta["csv_columns"] == list(CSV_COLUMNS)
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary) == {"1", "2", "3"}
    assert len(summary["2"]["qrm"]["per_trial"]) == 2


def test_compose_smoke(tmp_path):
    cfg = tiny(tmp_path, mode="compose-eval", tasks={"t": OFFICE_TARGETS["and_1_2"]},
               sources={"phi1": "(!star U c) ; (!star U o)", "phi2": "(!star U m) ; (!star U o)"})
    result = run_experiment(cfg)
    out = result.output_dir
    for method in ("average", "max", "left", "right", "qrm", "qrm-rs"):
        _check_csv(out / f"compose/t/{method}/trial00.csv")
    assert _check_csv(out / "pretrain.csv")[0]["phase"] == "0"
    assert set(result.summary["t"]) == {"average", "max", "left", "right", "qrm", "qrm-rs"}


def test_repr_smoke(tmp_path):
    result = run_experiment(tiny(tmp_path, mode="repr-eval"))
    assert result.summary["unlearned"] == {"smallest": 1, "alt1": 2}
    for name in ("smallest", "alt1"):
        _check_csv(result.output_dir / f"repr/{name}/trial00.csv")


def test_single_smoke(tmp_path):
    result = run_experiment(tiny(tmp_path, mode="single", tasks={"g": "F c"}))
    rows = _check_csv(result.output_dir / "single/trial00.csv")
    assert {r["task"] for r in rows} == {"g"}


def test_parallel_trials_match_serial(tmp_path):
    a = run_experiment(tiny(tmp_path, mode="single", tasks={"g": "F c"}, trials=2,
                            output_dir=str(tmp_path / "a")))
    b = run_experiment(tiny(tmp_path, mode="single", tasks={"g": "F c"}, trials=2, workers=2,
                            output_dir=str(tmp_path / "b")))
    for n in ("trial00.csv", "trial01.csv"):
        assert (a.output_dir / "single" / n).read_bytes() == (b.output_dir / "single" / n).read_bytes()


def test_welch_identical_samples():
    assert welch_p([3.0, 3.0], [3.0, 3.0]) == 1.0
    assert welch_p([1.0, 1.1, 0.9], [5.0, 5.1, 4.9]) < 0.01


# -- command line -------------------------------------------------------------------


def test_cli_run_and_plot(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"domain": "office", "mode": "single", "tasks": {"g": "F c"},
                               "phase_budget": 300, "workers": 1}))
    out = tmp_path / "run"
    assert main(["run", "--config", str(cfg), "--trials", "1", "--seed", "2", "--out", str(out)]) == 0
    assert json.loads((out / "metadata.json").read_text())["seed"] == 2
    assert main(["plot", str(out)]) == 0
    script = out / "plot_results.py"
    env = dict(os.environ, MPLBACKEND="Agg")
    subprocess.run([sys.executable, str(script)], check=True, env=env, capture_output=True)
    assert (out / "single.png").exists()


def test_cli_seed_from_environment(tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"mode": "single", "tasks": {"g": "F c"}, "phase_budget": 200,
                               "workers": 1, "trials": 1}))
    monkeypatch.setenv("SLTLRM_SEED", "17")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "r")]) == 0
    assert json.loads((tmp_path / "r/metadata.json").read_text())["seed"] == 17
    monkeypatch.setenv("SLTLRM_SEED", "x")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "r2")]) == 2


def test_cli_export_then_task(capsys):
    assert main(["export-rm", "--formula", "F c ; F o", "--props", "c,m,o"]) == 0
    from pathlib import Path
    golden = (Path(__file__).parent / "golden" / "then_c_o.dot").read_text()
    assert capsys.readouterr().out == golden


def test_cli_export_true_json(capsys):
    assert main(["export-rm", "--formula", "true", "--props", "c", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["states"] == ["true"] and data["transitions"] == []


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["export-rm", "--formula", "F c ;", "--props", "c"]) == 2
    assert "1:6" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text('{"mode": "dance"}')
    assert main(["run", "--config", str(bad)]) == 2
    with pytest.raises(SystemExit) as info:
        main(["run"])
    assert info.value.code == 2


def test_cli_runtime_errors(tmp_path):
    assert main(["plot", str(tmp_path)]) == 1
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 1


def test_plot_needs_a_run(tmp_path):
    with pytest.raises(PlotError, match="expected files"):
        emit_plots(tmp_path)
    (tmp_path / "metadata.json").write_text('{"mode": "lifelong"}')
    with pytest.raises(PlotError, match="no CSV"):
        emit_plots(tmp_path)
    (tmp_path / "lifelong/qrm").mkdir(parents=True)
    (tmp_path / "lifelong/qrm/phase1.csv").write_text("a,b\n")
    with pytest.raises(PlotError, match="header"):
        emit_plots(tmp_path)
