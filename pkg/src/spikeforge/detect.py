"""Threshold-based spike detection on the box-filtered, rectified trace."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .signal import Recording, box_filter, rectify, renormalize, sd

__all__ = [
    "Polarity",
    "DetectionConfig",
    "SpikeEvent",
    "compute_threshold",
    "detect_candidates",
    "enforce_refractory",
    "detect_spikes",
    "write_events_csv",
    "read_events_csv",
    "score_detections",
]


class Polarity(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class DetectionConfig:
    """Detection parameters.

    ``threshold_multiplier`` scales the SD of the filtered trace;
    ``min_spike_distance`` is the refractory gap in samples (24 = 1 ms at
    24 kHz); ``max_amplitude`` optionally rejects events whose rectified
    amplitude exceeds it (artifacts).
    """

    threshold_multiplier: float = 4.0
    box_width: int = 13
    min_spike_distance: int = 24
    max_amplitude: float | None = None

    def __post_init__(self):
        if not self.threshold_multiplier > 0:
            raise ValueError(f"threshold_multiplier must be > 0, got {self.threshold_multiplier}")
        if self.box_width < 1 or self.box_width % 2 == 0:
            raise ValueError(f"box_width must be an odd positive integer, got {self.box_width}")
        if self.min_spike_distance < 1:
            raise ValueError(f"min_spike_distance must be >= 1, got {self.min_spike_distance}")
        if self.max_amplitude is not None and not self.max_amplitude > 0:
            raise ValueError(f"max_amplitude must be > 0, got {self.max_amplitude}")


@dataclass(frozen=True)
class SpikeEvent:
    index: int
    amplitude: float
    polarity: Polarity


def compute_threshold(samples, config: DetectionConfig) -> float:
    return config.threshold_multiplier * sd(samples)


def detect_candidates(trace, threshold: float) -> np.ndarray:
    """Indices of local maxima of `trace` strictly above `threshold`.

    A flat top counts once, at its first sample, and only if the values on
    both sides of the plateau are lower. The first and last samples are
    never candidates.
    """
    x = np.asarray(trace, dtype=np.float64).ravel()
    if x.size < 3:
        return np.empty(0, dtype=np.int64)
    # collapse runs of equal values so plateaus behave like single samples
    starts = np.flatnonzero(np.r_[True, x[1:] != x[:-1]])
    values = x[starts]
    if values.size < 3:
        return np.empty(0, dtype=np.int64)
    inner = np.arange(1, values.size - 1)
    peak = (values[inner] > values[inner - 1]) & (values[inner] > values[inner + 1])
    peak &= values[inner] > threshold
    return starts[inner[peak]].astype(np.int64)


def enforce_refractory(indices, amplitudes, min_distance: int) -> tuple[np.ndarray, np.ndarray]:
    """Drop candidates closer than `min_distance` to a stronger one.

    Candidates are accepted greedily in order of decreasing amplitude
    (earlier index first on ties); a candidate is rejected if an accepted
    event lies fewer than `min_distance` samples away.

    Returns
    -------
    indices, amplitudes : ndarray
        The surviving subset, sorted by index.
    """
    idx = np.asarray(indices, dtype=np.int64).ravel()
    amp = np.asarray(amplitudes, dtype=np.float64).ravel()
    if idx.shape != amp.shape:
        raise ValueError(f"indices {idx.shape} and amplitudes {amp.shape} differ in shape")
    if min_distance < 1:
        raise ValueError(f"min_distance must be >= 1, got {min_distance}")
    if np.any(np.diff(idx) < 0):
        raise ValueError("candidates must be sorted")
    if idx.size <= 1:
        return idx.copy(), amp.copy()

    order = np.lexsort((idx, -amp))
    offset = int(idx[0])
    blocked = np.zeros(int(idx[-1]) - offset + 1, dtype=bool)
    keep = np.zeros(idx.size, dtype=bool)
    reach = min_distance - 1
    for k in order:
        pos = int(idx[k]) - offset
        if blocked[pos]:
            continue
        keep[k] = True
        blocked[max(pos - reach, 0):pos + reach + 1] = True
    return idx[keep], amp[keep]


def detect_spikes(recording: Recording, config: DetectionConfig | None = None) -> list[SpikeEvent]:
    """Run the full detection pipeline on a raw recording.

    renormalize -> box filter -> rectify -> threshold -> local maxima ->
    amplitude cap -> refractory filtering. The threshold is
    ``threshold_multiplier`` times the SD of the box-filtered renormalized
    trace, i.e. of the signal the threshold is compared against.
    Event indices refer to the raw recording's samples.
    """
    config = config or DetectionConfig()
    normalized = renormalize(recording).samples
    filtered = box_filter(normalized, config.box_width)
    trace = rectify(filtered)
    threshold = compute_threshold(filtered, config)
    cand = detect_candidates(trace, threshold)
    amps = trace[cand]
    if config.max_amplitude is not None:
        ok = amps <= config.max_amplitude
        cand, amps = cand[ok], amps[ok]
    idx, amps = enforce_refractory(cand, amps, config.min_spike_distance)
    raw = recording.samples
    return [
        SpikeEvent(int(i), float(a), Polarity.NEGATIVE if raw[i] < 0 else Polarity.POSITIVE)
        for i, a in zip(idx, amps)
    ]


def write_events_csv(events, path, sample_rate_hz: int = 24000) -> Path:
    """Write events as ``index,time_ms,amplitude,polarity``."""
    path = Path(path)
    per_ms = sample_rate_hz / 1000.0
    lines = ["index,time_ms,amplitude,polarity"]
    lines.extend(
        f"{e.index},{e.index / per_ms!r},{e.amplitude!r},{e.polarity.value}" for e in events
    )
    path.write_text("\n".join(lines) + "\n")
    return path


def read_events_csv(path) -> list[SpikeEvent]:
    rows = Path(path).read_text().splitlines()
    events = []
    for row in rows[1:]:
        if row.strip():
            i, _, a, p = row.split(",")
            events.append(SpikeEvent(int(i), float(a), Polarity(p)))
    return events


def score_detections(detected, truth, tolerance: int = 6) -> tuple[float, float]:
    """Recall and precision of detected indices against ground-truth indices.

    A ground-truth spike counts as found if some detection lies within
    `tolerance` samples, and a detection counts as correct if some
    ground-truth spike does. Empty denominators score 1.0.
    """
    d = np.sort(np.asarray([getattr(e, "index", e) for e in detected], dtype=np.int64))
    t = np.sort(np.asarray(truth, dtype=np.int64))

    def hits(a, b):
        if a.size == 0 or b.size == 0:
            return 0
        pos = np.searchsorted(b, a)
        left = np.abs(a - b[np.clip(pos - 1, 0, b.size - 1)])
        right = np.abs(b[np.clip(pos, 0, b.size - 1)] - a)
        return int(np.sum(np.minimum(left, right) <= tolerance))

    recall = hits(t, d) / t.size if t.size else 1.0
    precision = hits(d, t) / d.size if d.size else 1.0
    return recall, precision
