import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spikeforge.dataset import build_dataset  # noqa: E402
from spikeforge.detect import detect_spikes  # noqa: E402
from spikeforge.signal import Recording  # noqa: E402
from spikeforge.synth import SynthConfig, generate_recording  # noqa: E402

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_sources():
    """Three 1 s synthetic recordings with their detected events."""
    out = []
    for seed in range(3):
        rec, _ = generate_recording(SynthConfig(duration_s=1.0, seed=seed))
        rec = Recording(rec.samples, rec.sample_rate_hz, f"rec{seed}", 0)
        out.append((rec, detect_spikes(rec)))
    return out


@pytest.fixture(scope="session")
def small_dataset(small_sources):
    return build_dataset(small_sources, 1.0, split_seed=7)


@pytest.fixture(scope="session")
def benchmark_sources():
    """Default synthetic benchmark: 20 four-second recordings, detected events."""
    out = []
    for seed in range(20):
        rec, _ = generate_recording(SynthConfig(seed=seed))
        out.append((rec, detect_spikes(rec)))
    return out


@pytest.fixture(scope="session")
def benchmark_dataset(benchmark_sources):
    return build_dataset(benchmark_sources, 1.0, split_seed=0)


@pytest.fixture(scope="session")
def benchmark_training(benchmark_dataset):
    """Default 15-epoch, 6-block run on the benchmark; returns (results, seconds)."""
    from spikeforge.nn import SpikeClassifier
    from spikeforge.training import TrainConfig, train

    start = time.perf_counter()
    results = train(SpikeClassifier(), benchmark_dataset, TrainConfig())
    return results, time.perf_counter() - start
