"""
Dense tensors with reverse-mode differentiation.
"""

from .tensor import Tensor
from .tape import GradientTape, current_tape
from . import functional
from .gradcheck import finite_difference_check
