"""From-scratch 1D CNN: layers, Adam, the spike classifier and checkpoints."""

from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .layers import (
    Conv1d,
    Dropout,
    LeakyReLU,
    bce_loss,
    conv1d_backward,
    conv1d_forward,
    dropout,
    leaky_relu,
    leaky_relu_backward,
    sigmoid,
    sigmoid_backward,
)
from .model import ModelConfig, SpikeClassifier, scores_to_labels
from .optim import Adam
