"""Mini-batch training with per-epoch validation and checkpoints."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import LabeledDataset
from .metrics import MetricsReport
from .nn.checkpoint import Checkpoint
from .nn.layers import bce_loss
from .nn.model import SpikeClassifier, scores_to_labels
from .nn.optim import Adam

__all__ = ["TrainConfig", "EpochResult", "train", "evaluate", "one_hot", "best_epoch"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 15
    learning_rate: float = 0.001
    batch_size: int = 32
    shuffle_seed: int = 0
    checkpoint_dir: str | Path | None = None

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


@dataclass
class EpochResult:
    epoch: int
    checkpoint: Checkpoint
    report: MetricsReport
    train_loss: float
    checkpoint_path: Path | None = None


def one_hot(labels) -> np.ndarray:
    y = np.asarray(labels, dtype=np.int64)
    out = np.zeros((y.size, 2))
    out[np.arange(y.size), y] = 1.0
    return out


def evaluate(model: SpikeClassifier, X, y) -> MetricsReport:
    """Eval-mode metrics over windows `X` (n, 48) with labels `y`."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("cannot evaluate an empty set")
    scores = model.score(X)
    return MetricsReport.from_predictions(y, scores_to_labels(scores), scores[:, 1])


def _rngs(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent streams for batch shuffling and dropout masks."""
    shuffle = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0])))
    drop = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 1])))
    return shuffle, drop


def train(model: SpikeClassifier, dataset: LabeledDataset, config: TrainConfig | None = None,
          resume: Checkpoint | None = None) -> list[EpochResult]:
    """Train `model` in place with Adam and BCE.

    After every epoch the validation split is evaluated and a checkpoint
    (parameters, Adam moments, RNG states) is captured, and written to
    ``config.checkpoint_dir`` as ``epoch_XX.ckpt`` plus
    ``epoch_XX.metrics.json`` when a directory is given. Passing `resume`
    continues from a checkpoint and reproduces an uninterrupted run.
    """
    config = config or TrainConfig()
    X, y = dataset.arrays("train")
    Xv, yv = dataset.arrays("validation")
    if X.shape[0] == 0 or Xv.shape[0] == 0:
        raise ValueError("training needs non-empty train and validation splits")
    targets = one_hot(y)

    optimizer = Adam(lr=config.learning_rate)
    shuffle_rng, drop_rng = _rngs(config.shuffle_seed)
    start = 1
    if resume is not None:
        model.load_parameters(resume.params)
        if resume.optimizer is not None:
            optimizer.load_state_dict(resume.optimizer)
        shuffle_rng.bit_generator.state = resume.rng_state["shuffle"]
        drop_rng.bit_generator.state = resume.rng_state["dropout"]
        start = resume.epoch + 1

    out_dir = Path(config.checkpoint_dir) if config.checkpoint_dir is not None else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)

    params = model.parameters()
    grads = model.gradients()
    results = []
    for epoch in range(start, config.epochs + 1):
        order = shuffle_rng.permutation(X.shape[0])
        total = 0.0
        for lo in range(0, order.size, config.batch_size):
            batch = order[lo:lo + config.batch_size]
            model.zero_grad()
            scores = model.forward(X[batch], train=True, rng=drop_rng)
            loss, g = bce_loss(scores, targets[batch])
            model.backward(g / batch.size)
            optimizer.step(params, grads)
            total += float(np.sum(loss))
        train_loss = total / X.shape[0]

        report = evaluate(model, Xv, yv)
        metrics = report.summary() | {"epoch": epoch, "train_loss": train_loss}
        rng_state = {"shuffle": shuffle_rng.bit_generator.state,
                     "dropout": drop_rng.bit_generator.state}
        ckpt = Checkpoint.capture(model, optimizer, epoch, metrics, rng_state)
        path = None
        if out_dir is not None:
            path = ckpt.save(out_dir / f"epoch_{epoch:02d}.ckpt")
            (out_dir / f"epoch_{epoch:02d}.metrics.json").write_text(
                json.dumps(metrics, sort_keys=True, indent=2) + "\n")
        log.info("epoch %d: loss %.4f, val accuracy %.4f, auc %.4f",
                 epoch, train_loss, report.accuracy, report.auc)
        results.append(EpochResult(epoch, ckpt, report, train_loss, path))
    return results


def best_epoch(results: list[EpochResult]) -> EpochResult:
    """Highest validation accuracy; the earliest epoch wins ties."""
    if not results:
        raise ValueError("no epochs to choose from")
    return max(results, key=lambda r: (r.report.accuracy, -r.epoch))
