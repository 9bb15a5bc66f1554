"""
Training and evaluation engines.
"""

from .metrics import Metrics
from .train_base import BaseTrainConfig, train_base, language_model_loss
from .train_edits import TrainConfig, edit_loss, train_edits
from .evaluate import evaluate_accuracy
