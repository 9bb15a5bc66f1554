"""
Metrics record shared by training and evaluation.
"""

from tracedit._private.utility import prep_for_json

from dataclasses import dataclass, field, asdict

@dataclass
class Metrics:
    """
    Outcome of a training or evaluation run.

    Parameters
    ----------
    accuracy : float
        fraction of samples whose predicted label equals the gold label
    mean_loss : float
        mean loss (training: mean over steps; evaluation: mean gold-label
        negative log probability)
    loss_curve : list of float
        per-step training loss (empty for evaluation)
    trainable_fraction : float
        trainable edit parameters / base parameters
    seed : int
        seed of the run
    runtime : float
        wall-clock seconds
    n_samples : int
        number of samples scored
    contrastive_accuracy : float, optional
        accuracy over contrastive samples (None if there were none)
    confusion : dict
        confusion[gold][predicted] counts
    orthonormality_max : float
        largest max|R R^T - I| observed after any optimizer step
    config : dict
        echo of the run configuration
    """

    accuracy: float = 0.0
    mean_loss: float = 0.0
    loss_curve: list = field(default_factory=list)
    trainable_fraction: float = 0.0
    seed: int = 0
    runtime: float = 0.0
    n_samples: int = 0
    contrastive_accuracy: float = None
    confusion: dict = field(default_factory=dict)
    orthonormality_max: float = 0.0
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.accuracy <= 1:
            err = f"\naccuracy {self.accuracy} must be in [0,1]\n\n"
            raise ValueError(err)

    def to_dict(self):
        return prep_for_json(asdict(self))
