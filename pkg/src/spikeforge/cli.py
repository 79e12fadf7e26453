"""Command-line entry point: ``spikeforge <subcommand> ...``.

Exit codes: 0 success, 1 runtime failure, 2 usage error (bad flags or a
missing input file).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from .dataset import build_dataset, load_dataset, save_dataset, subset_training
from .detect import DetectionConfig, detect_spikes, score_detections, write_events_csv
from .experiments import (
    BLOCK_COUNTS,
    FRACTIONS,
    run_block_experiment,
    run_fraction_experiment,
    write_block_csv,
    write_fraction_csv,
)
from .io import FormatError, read_recording, read_truth_csv, truth_path, write_recording, write_truth_csv
from .metrics import write_roc_csv
from .nn.checkpoint import load_checkpoint
from .nn.model import ModelConfig, SpikeClassifier
from .synth import SynthConfig, generate_recording
from .training import TrainConfig, evaluate, train

log = logging.getLogger("spikeforge")

SEED_ENV = "SPIKEFORGE_SEED"


class UsageError(Exception):
    """Bad invocation detected after argument parsing; exits with status 2."""


def _existing(path) -> Path:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"input file not found: {path}")
    return path


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _detection_config(args) -> DetectionConfig:
    return DetectionConfig(
        threshold_multiplier=args.threshold_multiplier,
        box_width=args.box_width,
        min_spike_distance=args.min_distance,
        max_amplitude=args.max_amplitude,
    )


def _model_config(args) -> ModelConfig:
    return ModelConfig(
        num_blocks=args.blocks,
        hidden_channels=args.hidden_channels,
        kernel_size=args.kernel_size,
        dropout_p=args.dropout,
        leaky_slope=args.leaky_slope,
        seed=args.seed,
    )


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        duration_s=args.duration,
        sample_rate_hz=args.sample_rate,
        noise_sd=args.noise_sd,
        firing_rate_hz=args.firing_rate,
        amplitude_range=tuple(args.amplitude_range),
        template_width_ms=args.template_width,
        refractory_ms=args.refractory,
        seed=args.seed,
    )
    rec, truth = generate_recording(cfg)
    if args.id:
        rec = replace(rec, id=args.id)
    out = Path(args.out) if args.out else args.out_dir / f"{rec.id}.f32"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_recording(rec, out)
    write_truth_csv(truth.spike_indices, truth.amplitudes, truth_path(out))
    log.info("wrote %s (%d samples, %d spikes)", out, len(rec), len(truth))
    return 0


def cmd_detect(args) -> int:
    src = _existing(args.input)
    rec = read_recording(src)
    events = detect_spikes(rec, _detection_config(args))
    out = Path(args.out) if args.out else args.out_dir / f"{src.stem}.events.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_events_csv(events, out, rec.sample_rate_hz)
    log.info("detected %d events in %s -> %s", len(events), src, out)
    truth_file = Path(args.truth) if args.truth else truth_path(src)
    if args.truth:
        _existing(truth_file)
    if truth_file.exists():
        indices, _ = read_truth_csv(truth_file)
        recall, precision = score_detections(events, indices, tolerance=args.match_tolerance)
        log.info("against %s: recall %.4f, precision %.4f", truth_file, recall, precision)
    return 0


def cmd_build_dataset(args) -> int:
    config = _detection_config(args)
    sources = []
    for p in args.recordings:
        rec = read_recording(_existing(p))
        sources.append((rec, detect_spikes(rec, config)))
    ds = build_dataset(sources, negatives_per_positive=args.negatives_ratio, split_seed=args.seed)
    out = Path(args.out) if args.out else args.out_dir / "dataset.spkds"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_dataset(ds, out)
    log.info("wrote %s: %s", out, json.dumps(ds.class_counts, sort_keys=True))
    return 0


def cmd_train(args) -> int:
    ds = load_dataset(_existing(args.dataset))
    if args.fraction < 1.0:
        ds = subset_training(ds, args.fraction, seed=args.seed)
    ckpt_dir = Path(args.checkpoint_dir) if args.checkpoint_dir else args.out_dir / "checkpoints"
    config = TrainConfig(epochs=args.epochs, learning_rate=args.lr, batch_size=args.batch_size,
                         shuffle_seed=args.seed, checkpoint_dir=ckpt_dir)
    model = SpikeClassifier(_model_config(args))
    log.info("training %d-parameter model on %d windows", model.parameter_count(), len(ds.train))
    train(model, ds, config)
    return 0


def cmd_eval(args) -> int:
    ckpt = load_checkpoint(_existing(args.checkpoint))
    ds = load_dataset(_existing(args.dataset))
    X, y = ds.arrays(args.split)
    report = evaluate(ckpt.build_model(), X, y)
    prefix = args.out_prefix or Path(args.checkpoint).stem
    args.out_dir.mkdir(parents=True, exist_ok=True)
    report.to_json(args.out_dir / f"{prefix}.{args.split}.metrics.json")
    write_roc_csv(report, args.out_dir / f"{prefix}.{args.split}.roc.csv")
    log.info("%s accuracy %.4f precision %.4f recall %.4f f1 %.4f auc %.4f", args.split,
             report.accuracy, report.precision, report.recall, report.f1, report.auc)
    return 0


def cmd_experiment(args) -> int:
    ds = load_dataset(_existing(args.dataset))
    config = TrainConfig(epochs=args.epochs, learning_rate=args.lr, batch_size=args.batch_size,
                         shuffle_seed=args.seed)
    model_config = _model_config(args)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    if args.kind == "blocks":
        rows = run_block_experiment(ds, args.block_counts, config, model_config)
        out = Path(args.out) if args.out else args.out_dir / "blocks.csv"
        write_block_csv(rows, out)
    else:
        results = run_fraction_experiment(ds, args.fractions, config, model_config, subset_seed=args.seed)
        out = Path(args.out) if args.out else args.out_dir / "fractions.csv"
        write_fraction_csv(results, out)
    log.info("wrote %s", out)
    return 0


def _add_detection_flags(p):
    d = DetectionConfig()
    p.add_argument("--threshold-multiplier", type=float, default=d.threshold_multiplier)
    p.add_argument("--box-width", type=int, default=d.box_width)
    p.add_argument("--min-distance", type=int, default=d.min_spike_distance)
    p.add_argument("--max-amplitude", type=float, default=None)


def _add_model_flags(p):
    m, t = ModelConfig(), TrainConfig()
    p.add_argument("--epochs", type=int, default=t.epochs)
    p.add_argument("--lr", type=float, default=t.learning_rate)
    p.add_argument("--batch-size", type=int, default=t.batch_size)
    p.add_argument("--blocks", type=int, default=m.num_blocks)
    p.add_argument("--hidden-channels", type=int, default=m.hidden_channels)
    p.add_argument("--kernel-size", type=int, default=m.kernel_size)
    p.add_argument("--dropout", type=float, default=m.dropout_p)
    p.add_argument("--leaky-slope", type=float, default=m.leaky_slope)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spikeforge", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=None,
                        help=f"global seed (falls back to ${SEED_ENV}, then 0)")
    parser.add_argument("--out-dir", type=Path, default=Path("."))
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="generate a synthetic recording with ground truth")
    c = SynthConfig()
    s.add_argument("--duration", type=float, default=c.duration_s)
    s.add_argument("--sample-rate", type=int, default=c.sample_rate_hz)
    s.add_argument("--noise-sd", type=float, default=c.noise_sd)
    s.add_argument("--firing-rate", type=float, default=c.firing_rate_hz)
    s.add_argument("--amplitude-range", type=float, nargs=2, metavar=("LOW", "HIGH"),
                   default=list(c.amplitude_range))
    s.add_argument("--template-width", type=float, default=c.template_width_ms)
    s.add_argument("--refractory", type=float, default=c.refractory_ms)
    s.add_argument("--id", default=None)
    s.add_argument("--out", default=None, help=".csv or .f32 output path")
    s.set_defaults(func=cmd_synth)

    d = sub.add_parser("detect", help="detect spikes and write an events CSV")
    d.add_argument("--input", required=True)
    _add_detection_flags(d)
    d.add_argument("--truth", default=None, help="ground-truth CSV (default: <input>.truth.csv if present)")
    d.add_argument("--match-tolerance", type=int, default=6)
    d.add_argument("--out", default=None)
    d.set_defaults(func=cmd_detect)

    b = sub.add_parser("build-dataset", help="build a labeled window dataset")
    b.add_argument("recordings", nargs="+")
    _add_detection_flags(b)
    b.add_argument("--negatives-ratio", type=float, default=1.0)
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_build_dataset)

    t = sub.add_parser("train", help="train the classifier, one checkpoint per epoch")
    t.add_argument("--dataset", required=True)
    _add_model_flags(t)
    t.add_argument("--fraction", type=float, default=1.0)
    t.add_argument("--checkpoint-dir", default=None)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="evaluate a checkpoint on a dataset split")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--dataset", required=True)
    e.add_argument("--split", choices=["train", "validation"], default="validation")
    e.add_argument("--out-prefix", default=None)
    e.set_defaults(func=cmd_eval)

    x = sub.add_parser("experiment", help="block-count or training-fraction study")
    x.add_argument("kind", choices=["blocks", "fractions"])
    x.add_argument("--dataset", required=True)
    _add_model_flags(x)
    x.add_argument("--block-counts", type=int, nargs="+", default=list(BLOCK_COUNTS))
    x.add_argument("--fractions", type=float, nargs="+", default=list(FRACTIONS))
    x.add_argument("--out", default=None)
    x.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.seed is None:
            args.seed = _default_seed()
        return args.func(args)
    except UsageError as exc:
        print(f"spikeforge: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, IndexError, FormatError, OSError) as exc:
        print(f"spikeforge: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
