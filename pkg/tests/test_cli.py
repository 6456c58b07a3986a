import json
import subprocess
import sys
from pathlib import Path

import pytest

from pirgait import cli
from pirgait.cli import main

SUBCOMMANDS = ["simulate", "ingest", "extract", "groundtruth", "features", "train", "evaluate", "report"]


@pytest.fixture(scope="module")
def sim_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    assert main(["simulate", "--output-dir", str(out), "--homes", "3", "--days", "60", "--seed", "2"]) == 0
    return out


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_help_everywhere(sub, capsys):
    with pytest.raises(SystemExit) as ex:
        main([sub, "--help"])
    assert ex.value.code == 0
    assert "usage:" in capsys.readouterr().out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "pirgait.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "simulate" in r.stdout


def test_missing_file_names_path(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    assert main(["extract", "--input", str(missing), "--output-dir", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert str(missing) in err and "extract" in err


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "events.csv"
    bad.write_text("home_id,timestamp,sensor_id,room,kind,segment\nh,2010-02-30T00:00:00.000,k,kitchen,area_motion,\n")
    assert main(["ingest", "--input", str(bad), "--output-dir", str(tmp_path / "o")]) == 2
    assert "line 2" in capsys.readouterr().err


def test_insufficient_data_exit_code(tmp_path):
    f = tmp_path / "events.csv"
    f.write_text("home_id,timestamp,sensor_id,room,kind,segment\nh,2010-01-05T00:00:00.000,k,kitchen,area_motion,\n")
    assert main(["extract", "--input", str(f), "--output-dir", str(tmp_path / "o")]) == 3


def test_stage_chain(sim_dir, tmp_path):
    events = sim_dir / "home000" / "events.csv"
    assert (sim_dir / "home000" / "exclusions.csv").is_file()
    assert main(["ingest", "--input", str(events), "--output-dir", str(tmp_path / "i")]) == 0
    assert main(["extract", "--input", str(events), "--output-dir", str(tmp_path / "x")]) == 0
    assert (tmp_path / "x" / "transitions.csv").read_text().startswith("from_room,to_room")
    assert main(["groundtruth", "--input", str(events), "--output-dir", str(tmp_path / "g")]) == 0
    assert (tmp_path / "g" / "qq.csv").read_text().startswith("# units:")
    assert main(["features", "--input", str(events), "--feature", "p20", "--output-dir", str(tmp_path / "f")]) == 0
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"C": [1, 10], "gamma": [0.5], "epsilon": [1.0]}))
    assert main(["train", "--input", str(tmp_path / "f" / "dataset.csv"), "--grid", str(grid),
                 "--output-dir", str(tmp_path / "t")]) == 0
    model = json.loads((tmp_path / "t" / "model.json").read_text())
    assert model["format"] == "pirgait.svr"


def test_non_convergence_exit_code(sim_dir, tmp_path, monkeypatch):
    events = sim_dir / "home001" / "events.csv"
    assert main(["features", "--input", str(events), "--output-dir", str(tmp_path)]) == 0
    real = cli.train_svr

    def capped(x, y, params, **kw):
        return real(x, y, params, max_iter=1)

    monkeypatch.setattr(cli, "train_svr", capped)
    assert main(["train", "--input", str(tmp_path / "dataset.csv"), "--output-dir", str(tmp_path)]) == 4


def test_bad_grid_file(sim_dir, tmp_path):
    events = sim_dir / "home001" / "events.csv"
    main(["features", "--input", str(events), "--output-dir", str(tmp_path)])
    grid = tmp_path / "grid.json"
    grid.write_text("[{\"C\": -1}]")
    assert main(["train", "--input", str(tmp_path / "dataset.csv"), "--grid", str(grid),
                 "--output-dir", str(tmp_path)]) == 2


def test_evaluate_and_report(sim_dir, tmp_path, capsys):
    out = tmp_path / "ev"
    args = ["evaluate", "--input", str(sim_dir), "--output-dir", str(out), "--reps", "2", "--max-pairs", "2"]
    assert main(args) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["fig7_profile.csv", "fig8_points.csv", "fig9_curve.csv", "report.json"]
    for name in names[:3]:
        assert (out / name).read_text().splitlines()[0].startswith("# units:")
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["reps"] == 2 and report["config"]["refractory_s"] == 6.0
    assert len(report["homes"]) == 3

    # the echoed config reproduces every artifact byte for byte
    again = tmp_path / "again"
    assert main(["evaluate", "--input", str(sim_dir), "--output-dir", str(again),
                 "--config", str(out / "report.json")]) == 0
    for name in names:
        assert (again / name).read_bytes() == (out / name).read_bytes()

    capsys.readouterr()
    assert main(["report", "--input", str(out / "report.json"), "--output-dir", str(tmp_path / "r")]) == 0
    assert "p25" in capsys.readouterr().out
    assert (tmp_path / "r" / "fig7_profile.csv").read_bytes() == (out / "fig7_profile.csv").read_bytes()


def test_evaluate_single_file(sim_dir, tmp_path):
    events = sim_dir / "home002" / "events.csv"
    assert main(["evaluate", "--input", str(events), "--output-dir", str(tmp_path), "--reps", "1",
                 "--max-pairs", "1", "--feature", "p25", "--feature", "mean"]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert [p["feature"] for p in report["profile"]] == ["p25", "mean"]


def test_report_rejects_other_json(tmp_path):
    f = tmp_path / "x.json"
    f.write_text("{}")
    assert main(["report", "--input", str(f)]) == 2


def test_simulate_from_scenario_file(tmp_path):
    from pirgait.simulator import default_scenario

    cfg = tmp_path / "scenario.json"
    cfg.write_text(default_scenario(3).dumps())
    assert main(["simulate", "--config", str(cfg), "--days", "2", "--output-dir", str(tmp_path)]) == 0
    assert Path(tmp_path / "home000" / "events.csv").is_file()
