import numpy as np
import pytest
from numpy.testing import assert_array_equal

from spikeforge.signal import sd
from spikeforge.synth import SynthConfig, generate_recording, render_spikes, spike_template


def test_defaults():
    rec, truth = generate_recording()
    # 4 s at 24 kHz
    assert len(rec) == 96_000
    assert rec.sample_rate_hz == 24000
    assert len(truth) > 0


def test_zero_rate_is_pure_noise():
    rec, truth = generate_recording(SynthConfig(firing_rate_hz=0.0, seed=3))
    assert len(truth) == 0
    noise = np.random.Generator(np.random.PCG64(3)).normal(0, 1.0, size=len(rec))
    assert_array_equal(rec.samples, noise.astype(np.float32))


def test_deterministic():
    a, ta = generate_recording(SynthConfig(seed=11))
    b, tb = generate_recording(SynthConfig(seed=11))
    assert a.samples.tobytes() == b.samples.tobytes()
    assert_array_equal(ta.spike_indices, tb.spike_indices)
    c, _ = generate_recording(SynthConfig(seed=12))
    assert not np.array_equal(a.samples, c.samples)


def test_samples_are_float32_exact():
    rec, _ = generate_recording(SynthConfig(duration_s=0.2))
    assert_array_equal(rec.samples.astype(np.float32).astype(np.float64), rec.samples)


def test_mean_spike_count():
    # Poisson(10 Hz x 4 s) thinned by a 2 ms refractory gap: about 40 spikes
    counts = [len(generate_recording(SynthConfig(seed=s))[1]) for s in range(100)]
    assert 30 <= np.mean(counts) <= 50


def test_truth_respects_refractory_and_bounds():
    for seed in range(10):
        cfg = SynthConfig(firing_rate_hz=200.0, seed=seed)
        rec, truth = generate_recording(cfg)
        idx = truth.spike_indices
        assert np.all(np.diff(idx) >= cfg.refractory_samples)
        lo, hi = cfg.amplitude_range
        assert np.all((truth.amplitudes >= lo) & (truth.amplitudes <= hi))
        _, peak = spike_template(cfg.template_samples)
        assert idx.min() >= peak and idx.max() + cfg.template_samples - peak <= len(rec)


def test_truth_indices_are_extrema_of_clean_track():
    for seed in range(10):
        cfg = SynthConfig(firing_rate_hz=100.0, seed=seed)
        rec, truth = generate_recording(cfg)
        clean = np.abs(render_spikes(len(rec), truth.spike_indices, truth.amplitudes, cfg.template_samples))
        for i in truth.spike_indices:
            assert clean[i] > clean[i - 1] and clean[i] > clean[i + 1]


def test_noise_sd_of_spike_free_recording():
    for seed in range(3):
        cfg = SynthConfig(duration_s=10.0, noise_sd=2.5, firing_rate_hz=0.0, seed=seed)
        rec, _ = generate_recording(cfg)
        assert len(rec) == 240_000
        assert abs(sd(rec.samples) / 2.5 - 1) < 0.02


def test_template_shape():
    wave, peak = spike_template(24)
    assert np.abs(wave).max() == 1.0
    assert wave[peak] == -1.0
    assert 0 < peak < 23


@pytest.mark.parametrize("kwargs", [
    dict(noise_sd=0.0),
    dict(amplitude_range=(5.0, 2.0)),
    dict(refractory_ms=0.5, template_width_ms=1.0),
    dict(firing_rate_hz=-1.0),
])
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        SynthConfig(**kwargs)


def test_impossible_rate():
    with pytest.raises(ValueError, match="refractory"):
        generate_recording(SynthConfig(firing_rate_hz=600.0, refractory_ms=2.0))
