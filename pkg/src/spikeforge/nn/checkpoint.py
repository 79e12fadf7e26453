"""Versioned binary checkpoints.

Layout (little-endian)::

    b"SPKFCKPT"            magic
    u16                    format version
    u32                    header length
    JSON header            model config, epoch, metrics, rng states,
                           Adam hyperparameters and step, parameter layout
    float64 blob           parameters in ``SpikeClassifier.named_parameters``
                           order, then Adam first moments, then second
                           moments (same order; omitted before the first step)
    u32                    CRC-32 of everything above
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..io import FormatError
from .model import ModelConfig, SpikeClassifier
from .optim import Adam

__all__ = ["Checkpoint", "save_checkpoint", "load_checkpoint", "CHECKPOINT_VERSION"]

MAGIC = b"SPKFCKPT"
CHECKPOINT_VERSION = 1


@dataclass
class Checkpoint:
    model_config: ModelConfig
    params: list[np.ndarray]
    epoch: int = 0
    optimizer: dict | None = None
    metrics: dict = field(default_factory=dict)
    rng_state: dict = field(default_factory=dict)

    @classmethod
    def capture(cls, model: SpikeClassifier, optimizer: Adam | None = None, epoch: int = 0,
                metrics: dict | None = None, rng_state: dict | None = None) -> "Checkpoint":
        return cls(
            model_config=model.config,
            params=[p.copy() for p in model.parameters()],
            epoch=epoch,
            optimizer=optimizer.state_dict() if optimizer is not None else None,
            metrics=dict(metrics or {}),
            rng_state=dict(rng_state or {}),
        )

    def build_model(self) -> SpikeClassifier:
        model = SpikeClassifier(self.model_config)
        model.load_parameters(self.params)
        return model

    def build_optimizer(self) -> Adam:
        opt = Adam()
        if self.optimizer is not None:
            opt.load_state_dict(self.optimizer)
        return opt

    def to_bytes(self) -> bytes:
        model = SpikeClassifier(self.model_config)
        names = [n for n, _ in model.named_parameters()]
        opt = self.optimizer
        header = {
            "model_config": self.model_config.to_dict(),
            "epoch": int(self.epoch),
            "metrics": self.metrics,
            "rng_state": self.rng_state,
            "layout": [[n, list(p.shape)] for n, p in zip(names, self.params)],
            "optimizer": None if opt is None else {
                k: opt[k] for k in ("lr", "beta1", "beta2", "eps", "t")
            } | {"has_moments": bool(opt["m"])},
        }
        arrays = list(self.params)
        if opt is not None and opt["m"]:
            arrays += list(opt["m"]) + list(opt["v"])
        hbytes = json.dumps(header, sort_keys=True).encode()
        body = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in arrays)
        payload = MAGIC + struct.pack("<HI", CHECKPOINT_VERSION, len(hbytes)) + hbytes + body
        return payload + struct.pack("<I", zlib.crc32(payload))

    @classmethod
    def from_bytes(cls, data: bytes, source="checkpoint") -> "Checkpoint":
        if data[:len(MAGIC)] != MAGIC:
            raise FormatError(f"{source}: not a checkpoint file (bad magic)")
        pos = len(MAGIC)
        if len(data) < pos + 10:
            raise FormatError(f"{source}: truncated checkpoint")
        version, hlen = struct.unpack_from("<HI", data, pos)
        if version != CHECKPOINT_VERSION:
            raise FormatError(f"{source}: unsupported checkpoint version {version} "
                              f"(this reader understands {CHECKPOINT_VERSION})")
        (crc,) = struct.unpack_from("<I", data, len(data) - 4)
        if zlib.crc32(data[:-4]) != crc:
            raise FormatError(f"{source}: checksum mismatch (corrupt or truncated)")
        pos += 6
        try:
            header = json.loads(data[pos:pos + hlen])
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise FormatError(f"{source}: malformed header: {exc}") from exc
        pos += hlen
        body = data[pos:-4]

        shapes = [tuple(s) for _, s in header["layout"]]
        opt = header["optimizer"]
        groups = 3 if opt is not None and opt["has_moments"] else 1
        sizes = [int(np.prod(s)) for s in shapes]
        expected = 8 * sum(sizes) * groups
        if len(body) != expected:
            raise FormatError(f"{source}: parameter blob is {len(body)} bytes, expected {expected}")
        flat = np.frombuffer(body, dtype="<f8").astype(np.float64)
        arrays, off = [], 0
        for _ in range(groups):
            for shape, size in zip(shapes, sizes):
                arrays.append(flat[off:off + size].reshape(shape).copy())
                off += size
        n = len(shapes)
        optimizer = None
        if opt is not None:
            optimizer = {k: opt[k] for k in ("lr", "beta1", "beta2", "eps", "t")}
            optimizer["m"] = arrays[n:2 * n] if groups == 3 else []
            optimizer["v"] = arrays[2 * n:] if groups == 3 else []
        return cls(
            model_config=ModelConfig(**header["model_config"]),
            params=arrays[:n],
            epoch=header["epoch"],
            optimizer=optimizer,
            metrics=header["metrics"],
            rng_state=header["rng_state"],
        )

    def save(self, path) -> Path:
        path = Path(path)
        path.write_bytes(self.to_bytes())
        return path

    @classmethod
    def load(cls, path) -> "Checkpoint":
        path = Path(path)
        return cls.from_bytes(path.read_bytes(), source=path)


def save_checkpoint(model, optimizer, epoch, path, metrics=None, rng_state=None) -> Path:
    return Checkpoint.capture(model, optimizer, epoch, metrics, rng_state).save(path)


def load_checkpoint(path) -> Checkpoint:
    return Checkpoint.load(path)
