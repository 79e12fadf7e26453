"""Seeded synthetic microelectrode recordings with known spike times.

Background is white Gaussian noise. Spikes are one-cycle damped sine
waveforms (negative lobe first, as in typical extracellular recordings)
placed at homogeneous Poisson times, thinned so that no two spikes are
closer than the refractory period.

Randomness comes from numpy's PCG64 bit generator seeded with
``SynthConfig.seed``; the noise is drawn first, then the inter-spike
intervals, then the amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signal import Recording

__all__ = ["SynthConfig", "GroundTruth", "spike_template", "render_spikes", "generate_recording"]


@dataclass(frozen=True)
class SynthConfig:
    duration_s: float = 4.0
    sample_rate_hz: int = 24000
    noise_sd: float = 1.0
    firing_rate_hz: float = 10.0
    amplitude_range: tuple[float, float] = (6.0, 10.0)
    template_width_ms: float = 1.0
    refractory_ms: float = 2.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "amplitude_range", tuple(float(a) for a in self.amplitude_range))
        lo, hi = self.amplitude_range
        if self.duration_s <= 0:
            raise ValueError(f"duration_s must be positive, got {self.duration_s}")
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        if self.noise_sd <= 0:
            raise ValueError(f"noise_sd must be positive, got {self.noise_sd}")
        if self.firing_rate_hz < 0:
            raise ValueError(f"firing_rate_hz must be >= 0, got {self.firing_rate_hz}")
        if not 0 <= lo <= hi:
            raise ValueError(f"amplitude_range must satisfy 0 <= low <= high, got {self.amplitude_range}")
        if self.template_width_ms <= 0:
            raise ValueError(f"template_width_ms must be positive, got {self.template_width_ms}")
        if self.refractory_ms < self.template_width_ms:
            raise ValueError("refractory_ms must be at least template_width_ms")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration_s * self.sample_rate_hz))

    @property
    def template_samples(self) -> int:
        return max(3, int(round(self.template_width_ms * self.sample_rate_hz / 1000.0)))

    @property
    def refractory_samples(self) -> int:
        return int(np.ceil(self.refractory_ms * self.sample_rate_hz / 1000.0))


@dataclass(frozen=True)
class GroundTruth:
    spike_indices: np.ndarray
    amplitudes: np.ndarray

    def __len__(self):
        return self.spike_indices.shape[0]


def spike_template(length: int) -> tuple[np.ndarray, int]:
    """Biphasic waveform with unit absolute peak and the index of that peak."""
    n = np.arange(length)
    wave = -np.sin(2 * np.pi * n / length) * np.exp(-n / length)
    wave /= np.abs(wave).max()
    return wave, int(np.argmax(np.abs(wave)))


def render_spikes(n_samples: int, indices, amplitudes, length: int) -> np.ndarray:
    """Noise-free spike track with each template's peak at its index."""
    wave, peak = spike_template(length)
    track = np.zeros(n_samples)
    for i, a in zip(indices, amplitudes):
        start = int(i) - peak
        track[start:start + length] += a * wave
    return track


def _spike_times(cfg: SynthConfig, rng: np.random.Generator, lo: int, hi: int) -> np.ndarray:
    if cfg.firing_rate_hz == 0:
        return np.empty(0, dtype=np.int64)
    mean_isi = cfg.sample_rate_hz / cfg.firing_rate_hz
    times = []
    t = 0.0
    last = None
    while True:
        t += rng.exponential(mean_isi)
        if t >= cfg.n_samples:
            break
        i = int(t)
        if i < lo or i > hi:
            continue
        if last is not None and i - last < cfg.refractory_samples:
            continue
        times.append(i)
        last = i
    return np.array(times, dtype=np.int64)


def generate_recording(config: SynthConfig | None = None) -> tuple[Recording, GroundTruth]:
    """Generate one recording and its ground truth.

    Samples are rounded to float32 precision so that the recording
    survives a round trip through the ``.f32`` file format unchanged.

    Raises
    ------
    ValueError
        If the firing rate leaves no room for the refractory period
        (``firing_rate_hz * refractory_ms / 1000 >= 1``).
    """
    cfg = config or SynthConfig()
    if cfg.firing_rate_hz * cfg.refractory_ms / 1000.0 >= 1.0:
        raise ValueError(
            f"firing rate {cfg.firing_rate_hz} Hz cannot be placed with a "
            f"{cfg.refractory_ms} ms refractory period"
        )
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    n = cfg.n_samples
    length = cfg.template_samples
    _, peak = spike_template(length)

    noise = rng.normal(0.0, cfg.noise_sd, size=n)
    idx = _spike_times(cfg, rng, peak, n - length + peak)
    lo, hi = cfg.amplitude_range
    amps = rng.uniform(lo, hi, size=idx.size)

    samples = noise + render_spikes(n, idx, amps * cfg.noise_sd, length)
    samples = samples.astype(np.float32).astype(np.float64)
    rec = Recording(samples, sample_rate_hz=cfg.sample_rate_hz, id=f"synth-{cfg.seed}", channel=0)
    return rec, GroundTruth(idx, amps)
