"""Spike detection and CNN spike classification for microelectrode recordings."""

from .dataset import (
    Label,
    LabeledDataset,
    Window,
    build_dataset,
    extract_window,
    load_dataset,
    sample_negative_windows,
    save_dataset,
    subset_training,
)
from .detect import DetectionConfig, Polarity, SpikeEvent, detect_spikes
from .io import read_recording, write_recording
from .metrics import ConfusionMatrix, MetricsReport, auc, metrics_from_confusion, roc_curve
from .nn import Adam, Checkpoint, ModelConfig, SpikeClassifier, load_checkpoint, save_checkpoint
from .signal import Recording, box_filter, mad, median, rectify, renormalize
from .synth import GroundTruth, SynthConfig, generate_recording
from .training import TrainConfig, evaluate, train

__version__ = "0.1.0"
