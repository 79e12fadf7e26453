"""Binary classification metrics with spike as the positive class."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "ConfusionMatrix",
    "MetricsReport",
    "confusion_matrix",
    "metrics_from_confusion",
    "roc_curve",
    "auc",
    "write_roc_csv",
]


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            if int(getattr(self, name)) < 0:
                raise ValueError(f"{name} must be non-negative")
            object.__setattr__(self, name, int(getattr(self, name)))

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def as_dict(self) -> dict:
        return {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn}


def confusion_matrix(labels, predictions) -> ConfusionMatrix:
    y = np.asarray(labels).astype(bool)
    p = np.asarray(predictions).astype(bool)
    if y.shape != p.shape:
        raise ValueError(f"labels shape {y.shape} and predictions shape {p.shape} differ")
    return ConfusionMatrix(
        tp=int(np.sum(y & p)), tn=int(np.sum(~y & ~p)),
        fp=int(np.sum(~y & p)), fn=int(np.sum(y & ~p)),
    )


def metrics_from_confusion(cm: ConfusionMatrix) -> tuple[float, float, float, float]:
    """Accuracy, precision, recall and F1.

    Zero denominators give 0.0 for precision, recall and F1.
    """
    if cm.total == 0:
        raise ValueError("confusion matrix is empty")
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return accuracy, precision, recall, f1


def roc_curve(scores, labels):
    """ROC points swept over every distinct score, highest first.

    Returns
    -------
    fpr, tpr, thresholds : ndarray
        The curve starts at (0, 0) with threshold ``inf`` and ends at
        (1, 1). A point at threshold ``s`` counts every example scoring
        ``>= s`` as positive, so tied scores move together.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).astype(bool).ravel()
    if s.shape != y.shape:
        raise ValueError(f"scores shape {s.shape} and labels shape {y.shape} differ")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc_curve needs both classes present")
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    # last position of each run of equal scores
    ends = np.r_[np.flatnonzero(s[1:] != s[:-1]), s.size - 1]
    tps = np.cumsum(y)[ends]
    fps = (ends + 1) - tps
    fpr = np.r_[0.0, fps / n_neg]
    tpr = np.r_[0.0, tps / n_pos]
    thresholds = np.r_[np.inf, s[ends]]
    return fpr, tpr, thresholds


def auc(fpr, tpr) -> float:
    """Trapezoidal area under a ROC curve."""
    x = np.asarray(fpr, dtype=np.float64)
    y = np.asarray(tpr, dtype=np.float64)
    if x.size < 2 or x.shape != y.shape:
        raise ValueError("auc needs at least two (fpr, tpr) points of matching shape")
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2.0))


@dataclass
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    confusion: ConfusionMatrix
    auc: float
    fpr: np.ndarray = field(repr=False)
    tpr: np.ndarray = field(repr=False)
    thresholds: np.ndarray = field(repr=False)

    @classmethod
    def from_predictions(cls, labels, predictions, spike_scores) -> "MetricsReport":
        cm = confusion_matrix(labels, predictions)
        acc, prec, rec, f1 = metrics_from_confusion(cm)
        fpr, tpr, thr = roc_curve(spike_scores, labels)
        return cls(acc, prec, rec, f1, cm, auc(fpr, tpr), fpr, tpr, thr)

    @property
    def roc(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))

    def summary(self) -> dict:
        """Scalar metrics and confusion counts (no ROC points)."""
        return {
            "accuracy": self.accuracy, "precision": self.precision, "recall": self.recall,
            "f1": self.f1, "auc": self.auc, "confusion": self.confusion.as_dict(),
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.summary() | {"roc": self.roc}, sort_keys=True, indent=2) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text


def write_roc_csv(report: MetricsReport, path) -> Path:
    path = Path(path)
    lines = ["fpr,tpr,threshold"]
    lines.extend(
        f"{f!r},{t!r},{th!r}"
        for f, t, th in zip(report.fpr.tolist(), report.tpr.tolist(), report.thresholds.tolist())
    )
    path.write_text("\n".join(lines) + "\n")
    return path
