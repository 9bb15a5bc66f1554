"""
Functions for validating tracedit-specific arguments used throughout the
codebase.
"""

from .layers import layer_bands
from .layers import check_layers
from .layers import check_bands

from .choices import check_position_policy
from .choices import check_noise_scope
from .choices import check_precision
from .choices import check_edit_mode
from .choices import check_rank
