"""Labeled 48-sample window datasets built from raw recordings.

Positive windows are centered on detected spike indices; negative windows
are drawn uniformly from positions far from every spike. The pooled
windows are shuffled and split 80:20 into train and validation.
"""

from __future__ import annotations

import enum
import json
import struct
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .io import FormatError
from .signal import Recording

__all__ = [
    "WINDOW",
    "HALF_WINDOW",
    "VALIDATION_FRACTION",
    "Label",
    "Window",
    "LabeledDataset",
    "extract_window",
    "admissible_negative_centers",
    "sample_negative_windows",
    "build_dataset",
    "subset_training",
    "save_dataset",
    "load_dataset",
]

WINDOW = 48
HALF_WINDOW = WINDOW // 2
VALIDATION_FRACTION = 0.2
# negative windows keep this far (in samples) from every spike index
EXCLUSION = WINDOW

MAGIC = b"SPKDS\x00"
FORMAT_VERSION = 1


class Label(enum.IntEnum):
    NO_SPIKE = 0
    SPIKE = 1


@dataclass(frozen=True)
class Window:
    """48 raw samples around ``center_index``; sample 24 sits on the center.

    Values are held as float32, the precision they are stored with on disk.
    """

    values: np.ndarray
    label: Label
    source_id: str
    center_index: int

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float32)
        if values.shape != (WINDOW,):
            raise ValueError(f"window must hold exactly {WINDOW} samples, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "label", Label(self.label))
        object.__setattr__(self, "center_index", int(self.center_index))

    @property
    def key(self) -> tuple[str, int]:
        return (self.source_id, self.center_index)

    def __eq__(self, other):
        if not isinstance(other, Window):
            return NotImplemented
        return (self.key == other.key and self.label == other.label
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.key, self.label))


def _class_counts(windows: Iterable[Window]) -> dict[str, int]:
    counts = Counter(w.label for w in windows)
    return {lab.name.lower(): counts.get(lab, 0) for lab in Label}


@dataclass
class LabeledDataset:
    train: list[Window]
    validation: list[Window]
    seed: int = 0
    class_counts: dict[str, dict[str, int]] = field(init=False)

    def __post_init__(self):
        self.train = list(self.train)
        self.validation = list(self.validation)
        self.class_counts = {
            "train": _class_counts(self.train),
            "validation": _class_counts(self.validation),
        }

    def arrays(self, split: str = "train") -> tuple[np.ndarray, np.ndarray]:
        """Stack a split into ``(X, y)`` with X float64 of shape (n, 48)."""
        windows = self._split(split)
        if not windows:
            return np.empty((0, WINDOW)), np.empty(0, dtype=np.int64)
        X = np.stack([w.values for w in windows]).astype(np.float64)
        y = np.array([int(w.label) for w in windows], dtype=np.int64)
        return X, y

    def _split(self, split: str) -> list[Window]:
        if split == "train":
            return self.train
        if split == "validation":
            return self.validation
        raise ValueError(f"unknown split {split!r}")


def extract_window(recording: Recording, center: int, label: Label = Label.SPIKE) -> Window:
    """Raw samples ``[center - 24, center + 24)``."""
    center = int(center)
    lo, hi = center - HALF_WINDOW, center + HALF_WINDOW
    if lo < 0 or hi > len(recording):
        raise IndexError(f"window out of bounds: center {center}, recording length {len(recording)}")
    return Window(recording.samples[lo:hi], label, recording.id, center)


def admissible_negative_centers(n_samples: int, spike_indices) -> np.ndarray:
    """Centers whose window stays clear of ``[s - 48, s + 48]`` for every spike s."""
    ok = np.zeros(n_samples + 1, dtype=bool)
    ok[HALF_WINDOW:n_samples - HALF_WINDOW + 1] = True
    for s in np.asarray(spike_indices, dtype=np.int64):
        # window [c-24, c+23] meets [s-48, s+48] iff s-71 <= c <= s+72
        lo = max(int(s) - EXCLUSION - HALF_WINDOW + 1, 0)
        hi = min(int(s) + EXCLUSION + HALF_WINDOW, n_samples)
        ok[lo:hi + 1] = False
    return np.flatnonzero(ok)


def sample_negative_windows(recording: Recording, events, count: int, rng_seed: int) -> list[Window]:
    """Draw `count` distinct no-spike windows uniformly over admissible centers."""
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    spikes = [e.index if hasattr(e, "index") else int(e) for e in events]
    centers = admissible_negative_centers(len(recording), spikes)
    if centers.size < count:
        raise ValueError(f"cannot sample {count} negatives: only {centers.size} admissible positions")
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    chosen = rng.choice(centers, size=count, replace=False)
    return [extract_window(recording, c, Label.NO_SPIKE) for c in chosen]


def _child_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint64)[0])


def build_dataset(
    sources: Sequence[tuple[Recording, Sequence]],
    negatives_per_positive: float = 1.0,
    split_seed: int = 0,
) -> LabeledDataset:
    """Pool positive and negative windows from every recording and split 80:20.

    Parameters
    ----------
    sources : sequence of (Recording, events)
        Events are `SpikeEvent` objects or bare sample indices. Events too
        close to an edge for a full window are skipped.
    negatives_per_positive : float
        Negatives drawn per recording, as a multiple of its positives.
    split_seed : int
        Seeds both negative sampling and the train/validation shuffle.
    """
    if negatives_per_positive < 0:
        raise ValueError(f"negatives_per_positive must be >= 0, got {negatives_per_positive}")
    pooled: list[Window] = []
    n_pos = 0
    for k, (rec, events) in enumerate(sources):
        indices = [e.index if hasattr(e, "index") else int(e) for e in events]
        positives = [
            extract_window(rec, i, Label.SPIKE)
            for i in indices
            if i - HALF_WINDOW >= 0 and i + HALF_WINDOW <= len(rec)
        ]
        n_neg = int(round(negatives_per_positive * len(positives)))
        negatives = sample_negative_windows(rec, indices, n_neg, _child_seed(split_seed, k))
        pooled.extend(positives)
        pooled.extend(negatives)
        n_pos += len(positives)
    if n_pos == 0:
        raise ValueError("empty positive class")

    keys = [w.key for w in pooled]
    if len(set(keys)) != len(keys):
        raise ValueError("duplicate (source_id, center_index) windows; recording ids must be unique")
    rng = np.random.Generator(np.random.PCG64(split_seed))
    order = rng.permutation(len(pooled))
    n_val = int(np.floor(VALIDATION_FRACTION * len(pooled) + 0.5))
    validation = [pooled[i] for i in order[:n_val]]
    train = [pooled[i] for i in order[n_val:]]
    return LabeledDataset(train, validation, seed=split_seed)


def _stratified_order(labels: np.ndarray, seed: int) -> np.ndarray:
    """Permutation whose every prefix keeps the label mix within one window."""
    rng = np.random.Generator(np.random.PCG64(seed))
    keys = np.empty(labels.size)
    for lab in np.unique(labels):
        members = np.flatnonzero(labels == lab)
        members = members[rng.permutation(members.size)]
        keys[members] = (np.arange(members.size) + 0.5) / members.size
    return np.lexsort((labels, keys))


def subset_training(dataset: LabeledDataset, fraction: float, seed: int = 0) -> LabeledDataset:
    """Keep ``floor(fraction * len(train))`` training windows; validation untouched.

    Subsets for a fixed seed are nested: a smaller fraction always selects
    a subset of what a larger one selects.
    """
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    n = len(dataset.train)
    k = int(np.floor(fraction * n + 1e-9))
    labels = np.array([int(w.label) for w in dataset.train], dtype=np.int64)
    chosen = np.sort(_stratified_order(labels, seed)[:k])
    return LabeledDataset([dataset.train[i] for i in chosen], dataset.validation, seed=dataset.seed)


# -- persistence ------------------------------------------------------------
#
# layout: MAGIC | u16 version | u32 header length | JSON header | records
# record: u8 split (0 train, 1 validation) | u8 label | u32 source | u64 center
#         | 48 x float32, all little-endian

_RECORD = struct.Struct("<BBIQ" + "f" * WINDOW)


def save_dataset(dataset: LabeledDataset, path) -> Path:
    path = Path(path)
    sources = sorted({w.source_id for w in dataset.train + dataset.validation})
    source_ix = {s: i for i, s in enumerate(sources)}
    header = {
        "window": WINDOW,
        "seed": dataset.seed,
        "counts": {"train": len(dataset.train), "validation": len(dataset.validation)},
        "class_counts": dataset.class_counts,
        "sources": sources,
    }
    blob = json.dumps(header, sort_keys=True).encode()
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HI", FORMAT_VERSION, len(blob)))
        fh.write(blob)
        for split, windows in ((0, dataset.train), (1, dataset.validation)):
            for w in windows:
                fh.write(_RECORD.pack(split, int(w.label), source_ix[w.source_id],
                                      w.center_index, *w.values.tolist()))
    return path


def load_dataset(path) -> LabeledDataset:
    path = Path(path)
    data = path.read_bytes()
    if data[:len(MAGIC)] != MAGIC:
        raise FormatError(f"{path}: not a spike dataset file (bad magic)")
    pos = len(MAGIC)
    if len(data) < pos + 6:
        raise FormatError(f"{path}: truncated header")
    version, hlen = struct.unpack_from("<HI", data, pos)
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported dataset format version {version} "
                          f"(this reader understands {FORMAT_VERSION})")
    pos += 6
    try:
        header = json.loads(data[pos:pos + hlen])
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"{path}: malformed header: {exc}") from exc
    pos += hlen
    if header.get("window") != WINDOW:
        raise FormatError(f"{path}: window length {header.get('window')} != {WINDOW}")
    n_train = header["counts"]["train"]
    total = n_train + header["counts"]["validation"]
    sources = header["sources"]
    train, validation = [], []
    for r in range(total):
        if pos + _RECORD.size > len(data):
            raise FormatError(f"{path}: truncated file", record=r)
        split, label, src, center, *values = _RECORD.unpack_from(data, pos)
        pos += _RECORD.size
        if split not in (0, 1) or label not in (0, 1) or src >= len(sources):
            raise FormatError(f"{path}: corrupt record", record=r)
        if (split == 0) != (r < n_train):
            raise FormatError(f"{path}: record out of split order", record=r)
        w = Window(np.array(values, dtype=np.float32), Label(label), sources[src], center)
        (train if split == 0 else validation).append(w)
    if pos != len(data):
        raise FormatError(f"{path}: {len(data) - pos} trailing bytes after last record")
    return LabeledDataset(train, validation, seed=header["seed"])
