"""
Block-count and training-size studies
=====================================

Two experiments on the synthetic benchmark: validation accuracy averaged
over epochs as the number of convolutional blocks grows, and best-epoch
metrics as the training set shrinks to 25% of its size. Both write
plot-ready CSV files.
"""

# %%
import tempfile
from pathlib import Path

from spikeforge import SynthConfig, build_dataset, detect_spikes, generate_recording
from spikeforge.experiments import (
    run_block_experiment,
    run_fraction_experiment,
    write_block_csv,
    write_fraction_csv,
)
from spikeforge.training import TrainConfig

sources = []
for seed in range(10):
    rec, _ = generate_recording(SynthConfig(seed=seed))
    sources.append((rec, detect_spikes(rec)))
ds = build_dataset(sources, 1.0, split_seed=0)
out = Path(tempfile.mkdtemp())

# %%
# Fewer epochs keep the demo quick; the defaults run 15.
config = TrainConfig(epochs=5)
rows = run_block_experiment(ds, [1, 3, 6], config)
print(write_block_csv(rows, out / "blocks.csv").read_text())

# %%
results = run_fraction_experiment(ds, train_config=config)
print(write_fraction_csv(results, out / "fractions.csv").read_text())
