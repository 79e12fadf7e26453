import json
import logging

import numpy as np
import pytest

from spikeforge.cli import main
from spikeforge.io import read_recording, read_truth_csv, write_recording
from spikeforge.signal import Recording


def run(*argv):
    return main([str(a) for a in argv])


def test_synth_defaults(tmp_path):
    assert run("--out-dir", tmp_path, "synth") == 0
    rec = read_recording(tmp_path / "synth-0.f32")
    assert len(rec) == 96000 and rec.sample_rate_hz == 24000
    idx, amp = read_truth_csv(tmp_path / "synth-0.truth.csv")
    assert 10 < idx.size < 80 and np.all((amp >= 6) & (amp <= 10))


def test_synth_no_spikes_gives_header_only_truth(tmp_path):
    assert run("--out-dir", tmp_path, "synth", "--firing-rate", 0, "--duration", 0.5) == 0
    assert (tmp_path / "synth-0.truth.csv").read_text() == "index,amplitude\n"


def test_synth_repeatable(tmp_path, monkeypatch):
    monkeypatch.setenv("SPIKEFORGE_SEED", "5")
    for name in ("a", "b"):
        assert run("--out-dir", tmp_path / name, "synth", "--duration", 1, "--out", tmp_path / name / "r.csv") == 0
    for f in ("r.csv", "r.truth.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    # the env seed was used
    assert read_recording(tmp_path / "a" / "r.csv").id == "synth-5"


def test_bad_env_seed_is_usage_error(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SPIKEFORGE_SEED", "abc")
    assert run("--out-dir", tmp_path, "synth") == 2
    assert "SPIKEFORGE_SEED" in capsys.readouterr().err


def test_flag_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run("synth", "--duration", "soon")
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run("frobnicate")
    assert exc.value.code == 2


def test_invalid_value_exit_1(tmp_path, capsys):
    assert run("--out-dir", tmp_path, "synth", "--duration", -1) == 1
    assert "duration" in capsys.readouterr().err


def test_detect_reports_recall_precision(tmp_path, caplog):
    caplog.set_level(logging.INFO, logger="spikeforge")
    run("--out-dir", tmp_path, "synth")
    assert run("--out-dir", tmp_path, "detect", "--input", tmp_path / "synth-0.f32") == 0
    line = next(r.getMessage() for r in caplog.records if r.getMessage().startswith("against"))
    recall = float(line.split(": recall ")[1].split(",")[0])
    precision = float(line.split("precision ")[1])
    assert recall >= 0.95 and precision >= 0.95
    header = (tmp_path / "synth-0.events.csv").read_text().splitlines()[0]
    assert header == "index,time_ms,amplitude,polarity"


def test_detect_zero_signal_exit_1(tmp_path, capsys):
    write_recording(Recording(np.zeros(1000)), tmp_path / "z.csv")
    assert run("--out-dir", tmp_path, "detect", "--input", tmp_path / "z.csv") == 1
    assert "degenerate signal" in capsys.readouterr().err


def test_detect_huge_threshold_gives_empty_csv(tmp_path):
    run("--out-dir", tmp_path, "synth", "--duration", 1)
    out = tmp_path / "e.csv"
    assert run("--out-dir", tmp_path, "detect", "--input", tmp_path / "synth-0.f32",
               "--threshold-multiplier", 1000, "--out", out) == 0
    assert out.read_text() == "index,time_ms,amplitude,polarity\n"


@pytest.mark.parametrize("cmd", [
    ["detect", "--input"],
    ["build-dataset"],
    ["train", "--dataset"],
    ["eval", "--dataset", "x.spkds", "--checkpoint"],
    ["experiment", "blocks", "--dataset"],
])
def test_missing_input_exit_2(tmp_path, capsys, cmd):
    missing = tmp_path / "nowhere" / "missing.bin"
    assert run("--out-dir", tmp_path, *cmd, missing) == 2
    assert str(missing) in capsys.readouterr().err


def _pipeline(root, epochs=2):
    """synth -> detect -> build-dataset -> train -> eval; returns the output dir."""
    recs = []
    for seed in range(3):
        path = root / f"r{seed}.f32"
        assert run("--seed", seed, "--out-dir", root, "synth", "--out", path) == 0
        assert run("--out-dir", root, "detect", "--input", path) == 0
        recs.append(path)
    assert run("--seed", 1, "--out-dir", root, "build-dataset", *recs) == 0
    assert run("--seed", 2, "--out-dir", root, "train", "--dataset", root / "dataset.spkds",
               "--epochs", epochs) == 0
    last = root / "checkpoints" / f"epoch_{epochs:02d}.ckpt"
    assert run("--out-dir", root / "eval", "eval", "--checkpoint", last,
               "--dataset", root / "dataset.spkds") == 0
    return root


def test_train_then_eval_reproduces_validation_metrics(tmp_path):
    root = _pipeline(tmp_path)
    at_train = json.loads((root / "checkpoints" / "epoch_02.metrics.json").read_text())
    at_eval = json.loads((root / "eval" / "epoch_02.validation.metrics.json").read_text())
    for key in ("accuracy", "precision", "recall", "f1", "auc", "confusion"):
        assert at_eval[key] == at_train[key]
    assert (root / "eval" / "epoch_02.validation.roc.csv").read_text().startswith("fpr,tpr,threshold\n")


def test_full_pipeline_byte_reproducible(tmp_path):
    a = _pipeline(tmp_path / "a")
    b = _pipeline(tmp_path / "b")
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    assert len(files) > 10
    for rel in files:
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel


def test_experiment_fractions_csv(tmp_path):
    root = tmp_path
    for seed in range(2):
        run("--seed", seed, "--out-dir", root, "synth", "--duration", 1, "--out", root / f"r{seed}.f32")
    run("--out-dir", root, "build-dataset", root / "r0.f32", root / "r1.f32")
    assert run("--out-dir", root, "experiment", "fractions", "--dataset", root / "dataset.spkds",
               "--epochs", 1, "--blocks", 1, "--hidden-channels", 4) == 0
    lines = (root / "fractions.csv").read_text().splitlines()
    assert lines[0] == "metric,25%,50%,75%,100%"
    assert len(lines) == 5
    assert run("--out-dir", root, "experiment", "blocks", "--dataset", root / "dataset.spkds",
               "--epochs", 1, "--block-counts", 1, 2, "--hidden-channels", 4) == 0
    assert (root / "blocks.csv").read_text().splitlines()[1].startswith("1,")


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "spikeforge", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for sub in ("synth", "detect", "build-dataset", "train", "eval", "experiment"):
        assert sub in out.stdout
