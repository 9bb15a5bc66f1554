"""
Functions for reading and writing files.
"""

from .checkpoint import save_checkpoint, load_checkpoint, read_checkpoint_manifest
from .corpus import read_corpus, write_corpus, write_prompts
from .heatmap import export_heatmap, read_heatmap, write_trace_effects
from .config import read_config, write_manifest
