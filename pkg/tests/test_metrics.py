import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from oracles import pairwise_auc, reference_roc
from spikeforge.metrics import (
    ConfusionMatrix,
    MetricsReport,
    auc,
    confusion_matrix,
    metrics_from_confusion,
    roc_curve,
    write_roc_csv,
)


def test_published_accuracy_arithmetic():
    # TP and TN from the reported confusion matrix; FP + FN is the remainder
    tp, tn, total = 4852, 4810, 9762
    cm = ConfusionMatrix(tp=tp, tn=tn, fp=50, fn=total - tp - tn - 50)
    acc, *_ = metrics_from_confusion(cm)
    assert acc == pytest.approx(0.98976, abs=5e-6)
    assert round(acc, 4) == 0.9898


def test_published_f1_arithmetic():
    p, r = 0.9846, 0.9951
    f1 = 2 * p * r / (p + r)
    assert round(f1, 4) == 0.9898
    # the same harmonic mean through the confusion path
    cm = ConfusionMatrix(tp=9846 * 9951, fp=154 * 9951, fn=9846 * 49, tn=0)
    _, prec, rec, f1_cm = metrics_from_confusion(cm)
    assert prec == pytest.approx(p) and rec == pytest.approx(r)
    assert round(f1_cm, 4) == 0.9898


def test_identities_on_random_matrices():
    r = np.random.default_rng(0)
    for _ in range(1000):
        tp, tn, fp, fn = (int(v) for v in r.integers(1, 500, size=4))
        acc, prec, rec, f1 = metrics_from_confusion(ConfusionMatrix(tp, tn, fp, fn))
        assert acc == (tp + tn) / (tp + tn + fp + fn)
        assert prec == tp / (tp + fp)
        assert rec == tp / (tp + fn)
        assert f1 == pytest.approx(2 * prec * rec / (prec + rec), rel=1e-15)
        assert f1 == pytest.approx(2 * tp / (2 * tp + fp + fn), rel=1e-12)


def test_zero_denominator_conventions():
    assert metrics_from_confusion(ConfusionMatrix(tn=10)) == (1.0, 0.0, 0.0, 0.0)
    assert metrics_from_confusion(ConfusionMatrix(fn=3, tn=1)) == (0.25, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError, match="empty"):
        metrics_from_confusion(ConfusionMatrix())
    with pytest.raises(ValueError):
        ConfusionMatrix(tp=-1)


def test_confusion_from_labels():
    cm = confusion_matrix([1, 1, 0, 0, 1], [1, 0, 0, 1, 1])
    assert cm.as_dict() == {"tp": 2, "tn": 1, "fp": 1, "fn": 1}
    assert cm.total == 5


def _score_set(seed):
    r = np.random.default_rng(seed)
    n = int(r.integers(2, 201))
    labels = r.integers(0, 2, size=n)
    labels[:2] = [0, 1]
    # coarse rounding forces ties
    scores = np.round(r.random(n) + 0.3 * labels, int(r.integers(1, 4)))
    return scores, labels


def test_roc_matches_brute_force():
    for seed in range(100):
        scores, labels = _score_set(seed)
        fpr, tpr, thr = roc_curve(scores, labels)
        ref = reference_roc(scores, labels)
        assert_allclose(np.c_[fpr, tpr], ref, rtol=0, atol=1e-15)
        assert thr[0] == np.inf and np.all(np.diff(thr) < 0)
        assert np.all(np.diff(fpr) >= 0) and np.all(np.diff(tpr) >= 0)
        assert (fpr[-1], tpr[-1]) == (1.0, 1.0)


def test_auc_matches_pairwise_statistic():
    for seed in range(100):
        scores, labels = _score_set(seed)
        assert abs(auc(*roc_curve(scores, labels)[:2]) - pairwise_auc(scores, labels)) <= 1e-9


def test_auc_edge_cases():
    fpr, tpr, thr = roc_curve([0.4] * 6, [0, 1, 0, 1, 1, 0])
    assert len(fpr) == 2 and auc(fpr, tpr) == 0.5
    assert auc(*roc_curve([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])[:2]) == 1.0
    assert auc(*roc_curve([0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0])[:2]) == 0.0
    with pytest.raises(ValueError, match="both classes"):
        roc_curve([0.1, 0.2], [1, 1])


def test_report_serialization(tmp_path):
    report = MetricsReport.from_predictions([0, 1, 1, 0], [0, 1, 0, 0], [0.1, 0.9, 0.4, 0.3])
    assert report.accuracy == 0.75 and report.auc == 1.0
    data = json.loads(report.to_json(tmp_path / "m.json"))
    assert data["confusion"] == {"tp": 1, "tn": 2, "fp": 0, "fn": 1}
    assert data["roc"][0] == [0.0, 0.0]
    lines = write_roc_csv(report, tmp_path / "roc.csv").read_text().splitlines()
    assert lines[0] == "fpr,tpr,threshold"
    assert lines[1] == "0.0,0.0,inf"
    assert len(lines) == 1 + len(report.fpr)
