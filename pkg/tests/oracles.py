"""Independent reference implementations used as test oracles.

Deliberately naive: plain loops over the definitions, no shared code with
the package paths they check.
"""

import math

import numpy as np


def reference_moving_average(x, width):
    half = width // 2
    out = []
    for i in range(len(x)):
        lo, hi = max(0, i - half), min(len(x), i + half + 1)
        out.append(sum(x[lo:hi]) / (hi - lo))
    return out


def reference_mad(x):
    x = sorted(float(v) for v in x)
    n = len(x)
    med = x[n // 2] if n % 2 else (x[n // 2 - 1] + x[n // 2]) / 2
    dev = sorted(abs(v - med) for v in x)
    mdev = dev[n // 2] if n % 2 else (dev[n // 2 - 1] + dev[n // 2]) / 2
    return mdev / 0.6745


def reference_is_peak(trace, i):
    """First sample of a plateau rising from the left and falling to the right."""
    n = len(trace)
    if i <= 0 or i >= n - 1:
        return False
    if not trace[i] > trace[i - 1]:
        return False
    j = i + 1
    while j < n and trace[j] == trace[i]:
        j += 1
    return j < n and trace[j] < trace[i]


def reference_detect(raw, threshold_multiplier=4.0, box_width=13, min_distance=24, max_amplitude=None):
    """Brute-force detector: per-index definition check, then greedy selection."""
    raw = [float(v) for v in raw]
    scale = reference_mad(raw)
    z = [v / scale for v in raw]
    f = reference_moving_average(z, box_width)
    mean = sum(f) / len(f)
    sd = math.sqrt(sum((v - mean) ** 2 for v in f) / (len(f) - 1))
    thr = threshold_multiplier * sd
    r = [abs(v) for v in f]
    cands = [i for i in range(len(r)) if r[i] > thr and reference_is_peak(r, i)]
    if max_amplitude is not None:
        cands = [i for i in cands if r[i] <= max_amplitude]
    kept = []
    for i in sorted(cands, key=lambda i: (-r[i], i)):
        # O(min_distance) scan of the neighborhood for an accepted event
        if not any(j in kept for j in range(i - min_distance + 1, i + min_distance)):
            kept.append(i)
    return sorted(kept)


def reference_roc(scores, labels):
    """Recount (fpr, tpr) at every distinct threshold, descending."""
    scores = list(map(float, scores))
    labels = list(map(int, labels))
    P = sum(labels)
    N = len(labels) - P
    pts = [(0.0, 0.0)]
    for t in sorted(set(scores), reverse=True):
        tp = sum(1 for s, y in zip(scores, labels) if s >= t and y == 1)
        fp = sum(1 for s, y in zip(scores, labels) if s >= t and y == 0)
        pts.append((fp / N, tp / P))
    return pts


def pairwise_auc(scores, labels):
    """P[score_pos > score_neg] + 0.5 P[tie] by enumerating all pairs."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    total = 0.0
    for p in pos:
        for n in neg:
            total += 1.0 if p > n else 0.5 if p == n else 0.0
    return total / (len(pos) * len(neg))


def numerical_grad(f, x, step=1e-5, indices=None):
    """Central differences of scalar ``f()`` w.r.t. array `x`, perturbed in place."""
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in (range(flat.size) if indices is None else indices):
        orig = flat[i]
        flat[i] = orig + step
        hi = f()
        flat[i] = orig - step
        lo = f()
        flat[i] = orig
        gflat[i] = (hi - lo) / (2 * step)
    return grad


def relative_error(analytic, numeric, floor=1e-6):
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    return np.abs(a - n) / np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
