import runpy
import sys
from pathlib import Path

BENCH = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_smo.py"


def test_benchmark_runs_and_backends_agree(capsys, monkeypatch):
    monkeypatch.setattr(sys, "argv", [str(BENCH), "--sizes", "20", "60", "--repeats", "1"])
    runpy.run_path(str(BENCH), run_name="__main__")
    rows = capsys.readouterr().out.strip().splitlines()[-2:]
    assert all(r.split()[-1] in ("True", "n/a") for r in rows)
