"""
Training the CNN classifier
===========================

A small 1D convolutional network, implemented in numpy with hand-derived
gradients, scores each window as ``[no_spike, spike]``. It is trained
with Adam on binary cross-entropy and validated after every epoch.
"""

# %%
import tempfile
from pathlib import Path

from spikeforge import SynthConfig, build_dataset, detect_spikes, generate_recording
from spikeforge.nn import ModelConfig, SpikeClassifier, load_checkpoint
from spikeforge.training import TrainConfig, best_epoch, evaluate, train

sources = []
for seed in range(20):
    rec, _ = generate_recording(SynthConfig(seed=seed))
    sources.append((rec, detect_spikes(rec)))
ds = build_dataset(sources, 1.0, split_seed=0)

model = SpikeClassifier(ModelConfig(num_blocks=6))
print(f"{model.parameter_count()} parameters")

# %%
# Fifteen epochs, one checkpoint per epoch
ckpt_dir = Path(tempfile.mkdtemp())
results = train(model, ds, TrainConfig(epochs=15, checkpoint_dir=ckpt_dir))
for r in results:
    print(f"epoch {r.epoch:2d}  loss {r.train_loss:.4f}  val accuracy {r.report.accuracy:.4f}  "
          f"auc {r.report.auc:.4f}")

# %%
# The best epoch by validation accuracy, reloaded from disk
best = best_epoch(results)
restored = load_checkpoint(best.checkpoint_path).build_model()
X, y = ds.arrays("validation")
report = evaluate(restored, X, y)
print(f"best epoch {best.epoch}")
print(report.summary())
