"""
Causal tracing of a base model: corrupt the aspect embeddings, restore
single hidden states, and average the effects over samples.
"""

from .noise import NoiseSpec
from .runs import TraceRun, clean_run, corrupted_run, restoration_run, restoration_sweep
from .trace import TraceGrid, trace_sample, trace_samples
from .aggregate import TraceSummary, aggregate, role_buckets, bootstrap_aspect_contrast
