"""Robust statistics and filtering primitives for single-channel recordings."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "MAD_SCALE",
    "DegenerateSignalError",
    "Recording",
    "SignalStats",
    "median",
    "mad",
    "sd",
    "signal_stats",
    "renormalize",
    "box_filter",
    "rectify",
]

#: Gaussian 0.75 quantile; dividing the raw MAD by it yields an SD estimate.
MAD_SCALE = 0.6745


class DegenerateSignalError(ValueError):
    """Raised when a signal has no dispersion to normalize by."""


@dataclass(frozen=True)
class Recording:
    """A single-channel extracellular recording.

    Parameters
    ----------
    samples : array-like
        Raw amplitudes (microvolts). Stored as a read-only float64 array.
    sample_rate_hz : int
        Sampling frequency; 24000 for the clinical rig this toolkit targets.
    id : str
        Opaque recording identifier.
    channel : int
        Electrode channel number.
    """

    samples: np.ndarray
    sample_rate_hz: int = 24000
    id: str = "recording"
    channel: int = 0

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError(f"samples must be one-dimensional, got shape {samples.shape}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if int(self.sample_rate_hz) <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        object.__setattr__(self, "sample_rate_hz", int(self.sample_rate_hz))
        object.__setattr__(self, "channel", int(self.channel))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz

    def with_samples(self, samples) -> "Recording":
        """Return a copy carrying new samples and the same metadata."""
        return replace(self, samples=samples)


@dataclass(frozen=True)
class SignalStats:
    median: float
    mad: float
    sd: float


def _as_nonempty(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError("empty sequence")
    return arr


def median(values) -> float:
    """Median; even-length inputs give the mean of the two central values."""
    return float(np.median(_as_nonempty(values)))


def mad(values) -> float:
    """Median absolute deviation scaled to estimate the standard deviation.

    Computes ``median(|x - median(x)|) / 0.6745``, which for Gaussian
    noise is a consistent estimator of the SD that is insensitive to the
    sparse large excursions produced by spikes.

    Examples
    --------
    >>> round(mad([1, 2, 3, 4, 5]), 5)
    1.48258
    """
    arr = _as_nonempty(values)
    return float(np.median(np.abs(arr - np.median(arr))) / MAD_SCALE)


def sd(values) -> float:
    """Sample standard deviation (ddof=1); 0.0 for a single value."""
    arr = _as_nonempty(values)
    if arr.size == 1:
        return 0.0
    return float(np.std(arr, ddof=1))


def signal_stats(values) -> SignalStats:
    arr = _as_nonempty(values)
    return SignalStats(median=median(arr), mad=mad(arr), sd=sd(arr))


def renormalize(recording: Recording) -> Recording:
    """Divide every sample by the recording's scaled MAD.

    After renormalization the background noise has an SD close to 1, so a
    threshold expressed in multiples of SD means the same thing on every
    electrode.

    Raises
    ------
    DegenerateSignalError
        If the MAD is zero (e.g. a constant signal).
    """
    scale = mad(recording.samples)
    if scale == 0.0:
        raise DegenerateSignalError("degenerate signal: zero MAD")
    return recording.with_samples(recording.samples / scale)


def box_filter(samples, width: int = 13) -> np.ndarray:
    """Centered moving average with windows shrunk at the edges.

    The output has the same length as the input so that indices stay
    aligned with the raw recording.

    Parameters
    ----------
    samples : array-like
        Input trace.
    width : int
        Odd window length in samples. ``width=1`` is the identity.
    """
    width = int(width)
    if width < 1:
        raise ValueError(f"box filter width must be positive, got {width}")
    if width % 2 == 0:
        raise ValueError("box filter width must be odd")
    x = np.asarray(samples, dtype=np.float64).ravel()
    if width == 1 or x.size == 0:
        return x.copy()
    half = width // 2
    padded = np.pad(x, half, constant_values=np.nan)
    windows = sliding_window_view(padded, width)
    valid = ~np.isnan(windows)
    out = np.nansum(windows, axis=1) / valid.sum(axis=1)
    # keeps constant windows exact and the output inside the input range
    return np.clip(out, np.nanmin(windows, axis=1), np.nanmax(windows, axis=1))


def rectify(samples) -> np.ndarray:
    return np.abs(np.asarray(samples, dtype=np.float64))
