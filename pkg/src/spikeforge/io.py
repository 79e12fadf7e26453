"""Recording file readers and writers.

Two on-disk layouts are supported, selected by extension:

``.csv``
    First line is ``#`` followed by a JSON header object
    (``format_version``, ``sample_rate_hz``, ``id``, ``channel``); every
    following line holds
    one sample.
``.f32``
    Raw little-endian float32 samples, with the header stored as JSON in a
    sidecar file of the same stem and a ``.json`` extension.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .signal import Recording

__all__ = [
    "FormatError",
    "read_recording",
    "write_recording",
    "sidecar_path",
    "truth_path",
    "write_truth_csv",
    "read_truth_csv",
]

HEADER_KEYS = ("format_version", "sample_rate_hz", "id", "channel")
RECORDING_FORMAT_VERSION = 1


class FormatError(ValueError):
    """A file could not be parsed; ``record`` points at the offending entry."""

    def __init__(self, message: str, record: int | None = None):
        if record is not None:
            message = f"{message} (record {record})"
        super().__init__(message)
        self.record = record


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def truth_path(path) -> Path:
    """Ground-truth CSV that accompanies a synthetic recording file."""
    path = Path(path)
    return path.with_name(path.stem + ".truth.csv")


def _header(rec: Recording) -> str:
    meta = {"format_version": RECORDING_FORMAT_VERSION, "sample_rate_hz": rec.sample_rate_hz, "id": rec.id, "channel": rec.channel}
    return json.dumps(meta, sort_keys=True)


def _parse_header(text: str, source) -> dict:
    try:
        meta = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}: malformed header: {exc}") from exc
    missing = [k for k in HEADER_KEYS if k not in meta]
    if missing:
        raise FormatError(f"{source}: header missing {', '.join(missing)}")
    if meta["format_version"] != RECORDING_FORMAT_VERSION:
        raise FormatError(f"{source}: unsupported recording format version {meta['format_version']}")
    return meta


def write_recording(rec: Recording, path) -> Path:
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".csv":
        lines = ["#" + _header(rec)]
        lines.extend(repr(float(v)) for v in rec.samples)
        path.write_text("\n".join(lines) + "\n")
    elif suffix == ".f32":
        rec.samples.astype("<f4").tofile(path)
        sidecar_path(path).write_text(_header(rec) + "\n")
    else:
        raise ValueError(f"unsupported recording extension {suffix!r} (use .csv or .f32)")
    return path


def read_recording(path) -> Recording:
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".csv":
        with path.open() as fh:
            first = fh.readline()
            if not first.startswith("#"):
                raise FormatError(f"{path}: first line must be a '#'-prefixed JSON header")
            meta = _parse_header(first[1:], path)
            values = []
            for i, line in enumerate(fh):
                line = line.strip()
                if not line:
                    continue
                try:
                    values.append(float(line))
                except ValueError:
                    raise FormatError(f"{path}: bad sample {line!r}", record=i) from None
        samples = np.array(values, dtype=np.float64)
    elif suffix == ".f32":
        side = sidecar_path(path)
        if not side.exists():
            raise FormatError(f"{path}: missing JSON sidecar {side}")
        meta = _parse_header(side.read_text(), side)
        raw = path.read_bytes()
        if len(raw) % 4:
            raise FormatError(f"{path}: size {len(raw)} is not a multiple of 4 bytes")
        samples = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    else:
        raise ValueError(f"unsupported recording extension {suffix!r} (use .csv or .f32)")
    if samples.size == 0:
        raise FormatError(f"{path}: recording has no samples")
    return Recording(samples, sample_rate_hz=meta["sample_rate_hz"], id=str(meta["id"]),
                     channel=meta["channel"])


def write_truth_csv(indices, amplitudes, path) -> Path:
    path = Path(path)
    lines = ["index,amplitude"]
    lines.extend(f"{int(i)},{float(a)!r}" for i, a in zip(indices, amplitudes))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_truth_csv(path) -> tuple[np.ndarray, np.ndarray]:
    rows = Path(path).read_text().splitlines()
    if not rows or rows[0].strip() != "index,amplitude":
        raise FormatError(f"{path}: expected header 'index,amplitude'")
    idx, amp = [], []
    for i, row in enumerate(rows[1:]):
        if not row.strip():
            continue
        try:
            a, b = row.split(",")
            idx.append(int(a))
            amp.append(float(b))
        except ValueError:
            raise FormatError(f"{path}: bad row {row!r}", record=i) from None
    return np.array(idx, dtype=np.int64), np.array(amp, dtype=np.float64)
