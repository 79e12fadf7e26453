"""Differentiable layers with hand-derived gradients.

Activations are float64 arrays shaped ``(batch, channels, length)``;
unbatched ``(channels, length)`` inputs are accepted by the functional
forms and returned unbatched.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "conv1d_forward",
    "conv1d_backward",
    "leaky_relu",
    "leaky_relu_backward",
    "dropout",
    "sigmoid",
    "sigmoid_backward",
    "bce_loss",
    "BCE_EPS",
    "Conv1d",
    "LeakyReLU",
    "Dropout",
]

BCE_EPS = 1e-12


def _batched(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        return x[None], True
    if x.ndim == 3:
        return x, False
    raise ValueError(f"expected (channels, length) or (batch, channels, length), got shape {x.shape}")


def _conv_out_length(length: int, kernel: int, padding: int) -> int:
    return length + 2 * padding - kernel + 1


def _im2col(xb, kernel: int, padding: int) -> np.ndarray:
    """(B, C, L) -> contiguous (B, C * K, L_out), row ``c * K + k``."""
    if padding:
        xb = np.pad(xb, ((0, 0), (0, 0), (padding, padding)))
    cols = sliding_window_view(xb, kernel, axis=2)  # (B, C, L_out, K)
    b, c, length_out, k = cols.shape
    return np.ascontiguousarray(cols.transpose(0, 1, 3, 2)).reshape(b, c * k, length_out)


def conv1d_forward(x, weight, bias, padding: int = 0) -> np.ndarray:
    """Stride-1 cross-correlation with zero padding.

    ``out[o, t] = bias[o] + sum_{i,k} weight[o, i, k] * xpad[i, t + k]``
    """
    xb, squeeze = _batched(x)
    out_ch, in_ch, kernel = weight.shape
    if xb.shape[1] != in_ch:
        raise ValueError(f"input shape {np.shape(x)} does not match weight shape {weight.shape}")
    if _conv_out_length(xb.shape[2], kernel, padding) < 1:
        raise ValueError(f"kernel {kernel} with padding {padding} too large for input shape {np.shape(x)}")
    cols = _im2col(xb, kernel, padding)
    out = np.matmul(weight.reshape(out_ch, -1), cols) + bias[None, :, None]
    return out[0] if squeeze else out


def conv1d_backward(grad_out, x, weight, padding: int = 0):
    """Gradients of `conv1d_forward` w.r.t. input, weight and bias.

    Returns
    -------
    grad_input, grad_weight, grad_bias : ndarray
        `grad_weight` and `grad_bias` are summed over the batch.
    """
    xb, squeeze = _batched(x)
    gb, _ = _batched(grad_out)
    out_ch, in_ch, kernel = weight.shape
    length_out = _conv_out_length(xb.shape[2], kernel, padding)
    if gb.shape != (xb.shape[0], out_ch, length_out):
        raise ValueError(
            f"upstream gradient shape {np.shape(grad_out)} does not match expected "
            f"{(xb.shape[0], out_ch, length_out)} for input shape {np.shape(x)}"
        )
    cols = _im2col(xb, kernel, padding)
    grad_w = np.tensordot(gb, cols, axes=([0, 2], [0, 2])).reshape(weight.shape)
    grad_b = gb.sum(axis=(0, 2))
    grad_cols = np.matmul(weight.reshape(out_ch, -1).T, gb).reshape(
        xb.shape[0], in_ch, kernel, length_out)
    grad_xp = np.zeros((xb.shape[0], in_ch, xb.shape[2] + 2 * padding))
    for k in range(kernel):
        grad_xp[:, :, k:k + length_out] += grad_cols[:, :, k, :]
    grad_x = grad_xp[:, :, padding:padding + xb.shape[2]]
    return (grad_x[0] if squeeze else grad_x), grad_w, grad_b


def leaky_relu(x, slope: float = 0.01) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.where(x > 0, x, slope * x)


def leaky_relu_backward(grad_out, x, slope: float = 0.01) -> np.ndarray:
    # derivative at exactly 0 is taken as the slope
    return grad_out * np.where(np.asarray(x) > 0, 1.0, slope)


def dropout(x, p: float, train: bool, rng: np.random.Generator | None = None):
    """Inverted dropout.

    Returns ``(output, mask)`` where `mask` already includes the
    ``1 / (1 - p)`` rescaling, so the backward pass is ``grad * mask``.
    In eval mode, or when ``p == 0``, the mask is None and the input is
    returned unchanged.
    """
    if not 0 <= p < 1:
        raise ValueError(f"dropout probability must be in [0, 1), got {p}")
    x = np.asarray(x, dtype=np.float64)
    if not train or p == 0:
        return x, None
    if rng is None:
        raise ValueError("train-mode dropout needs an rng")
    mask = (rng.random(x.shape) >= p) / (1.0 - p)
    return x * mask, mask


def sigmoid(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid_backward(grad_out, s) -> np.ndarray:
    """Backward through the sigmoid given its output `s`."""
    return grad_out * s * (1.0 - s)


def bce_loss(scores, target):
    """Binary cross-entropy averaged over the output units.

    Parameters
    ----------
    scores : array-like, shape (..., 2)
        Sigmoid outputs, clamped to ``[1e-12, 1 - 1e-12]`` before logs.
    target : array-like, shape (..., 2)
        One-hot targets.

    Returns
    -------
    loss : float or ndarray
        Per-example loss (a float for a single example).
    grad : ndarray
        Partial derivatives of each example's loss w.r.t. its scores.
    """
    s = np.asarray(scores, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if s.shape != t.shape:
        raise ValueError(f"scores shape {s.shape} and target shape {t.shape} differ")
    if not (np.all((t == 0) | (t == 1)) and np.all(t.sum(axis=-1) == 1)):
        raise ValueError("target must be one-hot")
    n_units = s.shape[-1]
    sc = np.clip(s, BCE_EPS, 1.0 - BCE_EPS)
    loss = -(t * np.log(sc) + (1 - t) * np.log1p(-sc)).sum(axis=-1) / n_units
    grad = -(t / sc - (1 - t) / (1 - sc)) / n_units
    grad = np.where((s < BCE_EPS) | (s > 1.0 - BCE_EPS), 0.0, grad)
    return (float(loss) if np.ndim(loss) == 0 else loss), grad


class Conv1d:
    """Convolution layer holding its parameters, gradients and forward cache."""

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int, padding: int = 0,
                 rng: np.random.Generator | None = None):
        if kernel_size < 1:
            raise ValueError(f"kernel_size must be >= 1, got {kernel_size}")
        self.padding = int(padding)
        bound = np.sqrt(1.0 / (in_channels * kernel_size))
        rng = rng or np.random.default_rng(0)
        self.weight = rng.uniform(-bound, bound, size=(out_channels, in_channels, kernel_size))
        self.bias = rng.uniform(-bound, bound, size=out_channels)
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)
        self._x = None

    @property
    def in_channels(self):
        return self.weight.shape[1]

    @property
    def out_channels(self):
        return self.weight.shape[0]

    @property
    def kernel_size(self):
        return self.weight.shape[2]

    def output_length(self, length: int) -> int:
        return _conv_out_length(length, self.kernel_size, self.padding)

    def parameters(self):
        return [self.weight, self.bias]

    def gradients(self):
        return [self.grad_weight, self.grad_bias]

    def forward(self, x):
        self._x = x
        return conv1d_forward(x, self.weight, self.bias, self.padding)

    def backward(self, grad):
        gx, gw, gb = conv1d_backward(grad, self._x, self.weight, self.padding)
        self.grad_weight += gw
        self.grad_bias += gb
        return gx


class LeakyReLU:
    def __init__(self, slope: float = 0.01):
        if slope <= 0:
            raise ValueError(f"leaky slope must be positive, got {slope}")
        self.slope = slope
        self._x = None

    def forward(self, x):
        self._x = x
        return leaky_relu(x, self.slope)

    def backward(self, grad):
        return leaky_relu_backward(grad, self._x, self.slope)


class Dropout:
    def __init__(self, p: float = 0.1):
        if not 0 <= p < 1:
            raise ValueError(f"dropout probability must be in [0, 1), got {p}")
        self.p = p
        self._mask = None

    def forward(self, x, train: bool = False, rng: np.random.Generator | None = None):
        out, self._mask = dropout(x, self.p, train, rng)
        return out

    def backward(self, grad):
        return grad if self._mask is None else grad * self._mask
