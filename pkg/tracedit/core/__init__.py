"""
Core objects used across the tracing and editing code: automatic
differentiation, random streams, the optimizer, the model, edit suites and
the training engines.
"""

from .errors import NonFiniteError, TapeError, CheckpointError
from .errors import TrainingDivergedError, GateError, NoRetainedSamplesError
from .rng import RngStream, rng_draw
from .model import ModelConfig, BaseParams, init_model, forward, ForwardOptions
from .editing import EditSuite, init_edit_suite, count_params
