import json
import subprocess
import sys

import pytest

from factnet.cli import main
from factnet.engine import metrics_from_csv
from factnet.ontology import load_ontology, serialize_ontology

SMALL = """scenario-v1
width 10
height 10
spread_probability 0.3
ignite 3,3
station 5,5
brigades 2
total_cycles 30
"""


@pytest.fixture
def small(tmp_path):
    path = tmp_path / "small.scenario"
    path.write_text(SMALL)
    return path


def test_gen_writes_stream(tmp_path, small, capsys):
    out = tmp_path / "s.fsf"
    assert main(["gen", str(small), "--out", str(out)]) == 0
    assert out.read_text().startswith("fsf-stream-v1\ncycle 0\n")
    assert "peak fires" in capsys.readouterr().out


def test_gen_rejects_bad_field(tmp_path, small, capsys):
    small.write_text(SMALL.replace("0.3", "1.5"))
    assert main(["gen", str(small), "--out", str(tmp_path / "s.fsf")]) == 2
    assert "spread_probability" in capsys.readouterr().err
    assert not (tmp_path / "s.fsf").exists()


def test_run_outputs_are_reproducible(tmp_path, small):
    for name in ("a", "b"):
        assert main(["run", "--scenario", str(small), "--out", str(tmp_path / name), "--snapshot", "10,20"]) == 0
    for f in ("metrics.csv", "stream.fsf", "snapshot-0010.json", "snapshot-0020.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    rows = metrics_from_csv((tmp_path / "a" / "metrics.csv").read_text())
    assert [m.cycle for m in rows] == list(range(30))
    assert not (tmp_path / "a" / ".incomplete").exists()


def test_snapshot_single_cycle(tmp_path):
    assert main(["run", "--out", str(tmp_path), "--snapshot", "63"]) == 0
    snaps = sorted(p.name for p in tmp_path.glob("snapshot-*.json"))
    assert snaps == ["snapshot-0063.json"]
    assert json.loads((tmp_path / snaps[0]).read_text())["cycle"] == 63


def test_missing_concept_is_reported(tmp_path, small, capsys):
    graph = load_ontology()
    text = serialize_ontology(graph)
    stripped = "\n".join(line for line in text.splitlines() if "fireBrigade" not in line) + "\n"
    ont = tmp_path / "no-brigade.ont"
    ont.write_text(stripped)
    assert main(["run", "--scenario", str(small), "--ontology", str(ont), "--out", str(tmp_path / "o")]) == 2
    assert "fireBrigade" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_validate(tmp_path, capsys):
    ont = tmp_path / "x.ont"
    ont.write_text(serialize_ontology(load_ontology()))
    assert main(["validate", str(ont)]) == 0
    assert "valid ontology-v1" in capsys.readouterr().out

    ont.write_text("ontology-v1\nconcept a Phenomenon\nconcept b Phenomenon\nprox a b 2.0\n")
    assert main(["validate", str(ont)]) == 2
    err = capsys.readouterr().err
    assert "line 4" in err and str(ont) in err

    ont.write_text("hello\n")
    assert main(["validate", str(ont)]) == 2
    assert "unrecognized document type" in capsys.readouterr().err


def test_validate_stream_against_ontology(tmp_path, capsys):
    stream = tmp_path / "s.fsf"
    stream.write_text("fsf-stream-v1\ncycle 0\nfsf road t=0 loc=(0.0,0.0) id=r\n")
    assert main(["validate", str(stream)]) == 0
    assert main(["validate", str(stream), "--ontology", str(_bundled_ontology(tmp_path))]) == 2
    assert "no agent kind" in capsys.readouterr().err


def _bundled_ontology(tmp_path):
    path = tmp_path / "bundled.ont"
    path.write_text(serialize_ontology(load_ontology()))
    return path


def test_inspect(tmp_path, small, capsys):
    main(["run", "--scenario", str(small), "--out", str(tmp_path), "--snapshot", "5"])
    capsys.readouterr()
    assert main(["inspect", str(tmp_path / "snapshot-0005.json")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("snapshot at cycle 5")
    assert "building#" in out


def test_set_overrides(tmp_path, small, capsys):
    base = tmp_path / "base"
    tuned = tmp_path / "tuned"
    main(["run", "--scenario", str(small), "--out", str(base)])
    assert main(["run", "--scenario", str(small), "--out", str(tuned), "--set", "fire_progress_ai=1.5"]) == 2
    assert "fire_progress_ai" in capsys.readouterr().err
    assert main(["run", "--scenario", str(small), "--out", str(tuned), "--set", "broadcast_radius=2"]) == 0
    assert (base / "metrics.csv").read_text() != (tuned / "metrics.csv").read_text()
    assert main(["run", "--scenario", str(small), "--out", str(tuned), "--set", "nonsense=1"]) == 2
    assert "unknown config key" in capsys.readouterr().err


def test_engine_config_document(tmp_path, small):
    cfg = tmp_path / "e.cfg"
    cfg.write_text("engine-v1\ntime_decay 0.05\n")
    main(["run", "--scenario", str(small), "--out", str(tmp_path / "a"), "--config", str(cfg)])
    main(["run", "--scenario", str(small), "--out", str(tmp_path / "b"), "--set", "time_decay=0.05"])
    assert (tmp_path / "a" / "metrics.csv").read_text() == (tmp_path / "b" / "metrics.csv").read_text()


def test_replay_matches_run(tmp_path, small):
    main(["run", "--scenario", str(small), "--out", str(tmp_path / "a")])
    assert main(["replay", "--stream", str(tmp_path / "a" / "stream.fsf"), "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "metrics.csv").read_text() == (tmp_path / "b" / "metrics.csv").read_text()
    assert main(["replay", "--out", str(tmp_path / "c")]) == 2


def test_interrupted_run_leaves_marker(tmp_path, small, monkeypatch):
    from factnet import engine

    def boom(self, *args, **kwargs):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(engine.Engine, "run_cycle", boom)
    assert main(["run", "--scenario", str(small), "--out", str(tmp_path)]) == 1
    assert (tmp_path / ".incomplete").exists()


def test_plot_writes_png(tmp_path, small):
    assert main(["run", "--scenario", str(small), "--out", str(tmp_path), "--plot"]) == 0
    assert (tmp_path / "activity.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_plot_is_opt_in(tmp_path, small):
    main(["run", "--scenario", str(small), "--out", str(tmp_path)])
    assert not (tmp_path / "activity.png").exists()


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["run", "--out", "x", "--scenario", "a", "--stream", "b"]) == 2


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "factnet.cli", "validate", str(_bundled_ontology(tmp_path))],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
