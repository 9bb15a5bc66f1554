"""
Hybrid edit suite: low-rank attention-output weight edits plus orthonormal
subspace representation edits.
"""

from .ops import apply_weight_edit, apply_rep_edit
from .ops import reorthonormalize, orthonormality_error, fuse_weight_edits
from .suite import EditSuite, init_edit_suite, count_params
from .positions import select_positions, middle_third
