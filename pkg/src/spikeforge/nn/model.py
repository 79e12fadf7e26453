"""The 1D CNN spike classifier.

Layout for a ``(1, 48)`` window::

    conv(1 -> H) + LeakyReLU
    conv(H -> H) + LeakyReLU
    num_blocks x [dropout, conv(H -> H), LeakyReLU]
    conv(H -> 2, kernel spanning all 48 samples) -> sigmoid

Stem and block convolutions use stride 1 and "same" padding, so the
temporal length stays 48 until the head collapses it to 1. The two
output scores are ordered ``[no_spike, spike]``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..dataset import WINDOW, Label
from .layers import Conv1d, Dropout, LeakyReLU, conv1d_forward, leaky_relu, sigmoid, sigmoid_backward

__all__ = ["ModelConfig", "SpikeClassifier", "scores_to_labels"]

STEM_DEPTH = 2
# per-layer init streams; blocks use BLOCK_SEED_BASE + block index
_STEM_SEED = 0
_HEAD_SEED = 50
_BLOCK_SEED_BASE = 100


@dataclass(frozen=True)
class ModelConfig:
    num_blocks: int = 6
    hidden_channels: int = 16
    kernel_size: int = 3
    dropout_p: float = 0.1
    leaky_slope: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.num_blocks < 1:
            raise ValueError(f"num_blocks must be >= 1, got {self.num_blocks}")
        if self.hidden_channels < 1:
            raise ValueError(f"hidden_channels must be >= 1, got {self.hidden_channels}")
        if self.kernel_size < 1 or self.kernel_size % 2 == 0:
            raise ValueError(f"kernel_size must be odd and positive, got {self.kernel_size}")
        if not 0 <= self.dropout_p < 1:
            raise ValueError(f"dropout_p must be in [0, 1), got {self.dropout_p}")
        if self.leaky_slope <= 0:
            raise ValueError(f"leaky_slope must be positive, got {self.leaky_slope}")

    def to_dict(self) -> dict:
        return asdict(self)


def _init_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))


class SpikeClassifier:
    def __init__(self, config: ModelConfig | None = None):
        self.config = cfg = config or ModelConfig()
        pad = cfg.kernel_size // 2
        H = cfg.hidden_channels

        self.stem = []
        in_ch = 1
        for d in range(STEM_DEPTH):
            conv = Conv1d(in_ch, H, cfg.kernel_size, pad, rng=_init_rng(cfg.seed, _STEM_SEED + d))
            self.stem.append((conv, LeakyReLU(cfg.leaky_slope)))
            in_ch = H
        self.blocks = [
            (Dropout(cfg.dropout_p),
             Conv1d(H, H, cfg.kernel_size, pad, rng=_init_rng(cfg.seed, _BLOCK_SEED_BASE + b)),
             LeakyReLU(cfg.leaky_slope))
            for b in range(cfg.num_blocks)
        ]
        self.head = Conv1d(H, 2, WINDOW, 0, rng=_init_rng(cfg.seed, _HEAD_SEED))
        self._scores = None

    # parameters are listed stem, blocks, head; weight before bias
    def _convs(self) -> list[Conv1d]:
        return [c for c, _ in self.stem] + [c for _, c, _ in self.blocks] + [self.head]

    def named_parameters(self) -> list[tuple[str, np.ndarray]]:
        names = [f"stem.{i}" for i in range(len(self.stem))]
        names += [f"blocks.{i}" for i in range(len(self.blocks))]
        names.append("head")
        out = []
        for name, conv in zip(names, self._convs()):
            out.append((f"{name}.weight", conv.weight))
            out.append((f"{name}.bias", conv.bias))
        return out

    def parameters(self) -> list[np.ndarray]:
        return [p for _, p in self.named_parameters()]

    def gradients(self) -> list[np.ndarray]:
        return [g for c in self._convs() for g in c.gradients()]

    def zero_grad(self) -> None:
        for g in self.gradients():
            g.fill(0.0)

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def load_parameters(self, arrays) -> None:
        params = self.parameters()
        if len(arrays) != len(params):
            raise ValueError(f"expected {len(params)} parameter arrays, got {len(arrays)}")
        for p, a in zip(params, arrays):
            a = np.asarray(a, dtype=np.float64)
            if a.shape != p.shape:
                raise ValueError(f"parameter shape {a.shape} does not match model shape {p.shape}")
            p[...] = a

    def forward(self, windows, train: bool = False, rng: np.random.Generator | None = None) -> np.ndarray:
        """Scores ``[no_spike, spike]`` in (0, 1).

        `windows` is a single 48-sample window or a ``(batch, 48)`` array;
        the result is ``(2,)`` or ``(batch, 2)`` accordingly. Train mode
        applies dropout drawn from `rng`.
        """
        single = np.ndim(windows) == 1
        x = self._check_windows(windows)
        h = x[:, None, :]
        for conv, act in self.stem:
            h = act.forward(conv.forward(h))
        for drop, conv, act in self.blocks:
            h = act.forward(conv.forward(drop.forward(h, train, rng)))
        scores = sigmoid(self.head.forward(h)[:, :, 0])
        self._scores = scores
        return scores[0] if single else scores

    def score(self, windows) -> np.ndarray:
        """Eval-mode forward pass that touches no layer state (thread-safe)."""
        x = self._check_windows(windows)
        slope = self.config.leaky_slope
        h = x[:, None, :]
        for conv, _ in self.stem:
            h = leaky_relu(conv1d_forward(h, conv.weight, conv.bias, conv.padding), slope)
        for _, conv, _ in self.blocks:
            h = leaky_relu(conv1d_forward(h, conv.weight, conv.bias, conv.padding), slope)
        head = self.head
        scores = sigmoid(conv1d_forward(h, head.weight, head.bias, head.padding)[:, :, 0])
        return scores[0] if np.ndim(windows) == 1 else scores

    def backward(self, grad_scores) -> np.ndarray:
        """Accumulate parameter gradients from d(loss)/d(scores); returns input grads."""
        g = np.asarray(grad_scores, dtype=np.float64)
        if g.ndim == 1:
            g = g[None]
        g = sigmoid_backward(g, self._scores)[:, :, None]
        g = self.head.backward(g)
        for drop, conv, act in reversed(self.blocks):
            g = drop.backward(conv.backward(act.backward(g)))
        for conv, act in reversed(self.stem):
            g = conv.backward(act.backward(g))
        return g[:, 0, :]

    def predict(self, windows) -> np.ndarray | Label:
        """Class with the larger score; an exact tie goes to no_spike."""
        return scores_to_labels(self.score(windows))

    @staticmethod
    def _check_windows(windows) -> np.ndarray:
        x = np.asarray(windows, dtype=np.float64)
        if x.ndim == 1:
            x = x[None]
        if x.ndim != 2 or x.shape[1] != WINDOW:
            raise ValueError(f"expected windows of {WINDOW} samples, got shape {np.shape(windows)}")
        return x


def scores_to_labels(scores):
    scores = np.asarray(scores)
    if scores.ndim == 1:
        return Label.SPIKE if scores[1] > scores[0] else Label.NO_SPIKE
    return (scores[:, 1] > scores[:, 0]).astype(np.int64)
