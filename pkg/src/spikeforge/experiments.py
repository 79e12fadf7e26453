"""Drivers for the block-count and training-fraction studies."""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import numpy as np

from .dataset import LabeledDataset, subset_training
from .nn.model import ModelConfig, SpikeClassifier
from .training import EpochResult, TrainConfig, best_epoch, train

__all__ = [
    "BLOCK_COUNTS",
    "FRACTIONS",
    "run_block_experiment",
    "run_fraction_experiment",
    "write_block_csv",
    "write_fraction_csv",
]

BLOCK_COUNTS = (1, 3, 6, 9, 12)
FRACTIONS = (0.25, 0.5, 0.75, 1.0)


def run_block_experiment(dataset: LabeledDataset, block_counts=BLOCK_COUNTS,
                         train_config: TrainConfig | None = None,
                         model_config: ModelConfig | None = None) -> list[tuple[int, float]]:
    """Mean per-epoch validation accuracy for each block count.

    Every run shares the data, seeds and all other hyperparameters.
    """
    train_config = replace(train_config or TrainConfig(), checkpoint_dir=None)
    model_config = model_config or ModelConfig()
    rows = []
    for n in block_counts:
        model = SpikeClassifier(replace(model_config, num_blocks=int(n)))
        results = train(model, dataset, train_config)
        rows.append((int(n), float(np.mean([r.report.accuracy for r in results]))))
    return rows


def run_fraction_experiment(dataset: LabeledDataset, fractions=FRACTIONS,
                            train_config: TrainConfig | None = None,
                            model_config: ModelConfig | None = None,
                            subset_seed: int = 0) -> dict[float, EpochResult]:
    """Best-epoch result for models trained on nested subsets of the train split."""
    train_config = replace(train_config or TrainConfig(), checkpoint_dir=None)
    model_config = model_config or ModelConfig()
    out = {}
    for f in fractions:
        subset = subset_training(dataset, float(f), seed=subset_seed)
        results = train(SpikeClassifier(model_config), subset, train_config)
        out[float(f)] = best_epoch(results)
    return out


def write_block_csv(rows, path) -> Path:
    path = Path(path)
    lines = ["blocks,accuracy_avg"] + [f"{n},{acc!r}" for n, acc in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def write_fraction_csv(results: dict[float, EpochResult], path) -> Path:
    """One row per metric, one column per training fraction."""
    path = Path(path)
    fractions = list(results)
    header = "metric," + ",".join(f"{round(f * 100):d}%" for f in fractions)
    lines = [header]
    for name in ("accuracy", "precision", "recall", "f1"):
        vals = [getattr(results[f].report, name) for f in fractions]
        lines.append(name + "," + ",".join(repr(float(v)) for v in vals))
    path.write_text("\n".join(lines) + "\n")
    return path
