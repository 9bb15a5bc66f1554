"""
Decoder-only transformer with record/corrupt/restore/edit hooks.
"""

from .config import ModelConfig
from .params import BaseParams, init_model, parameter_shapes
from .transformer import forward, block_forward, ForwardOptions
from .transformer import RestorePatch, HiddenCache
from .readout import predict_polarity, predict_polarity_batch
