"""
Causal tracing and hybrid model editing for aspect-based sentiment
classification with small transformers.
"""

from . import core
from . import corpus
from . import tracing
from . import io
from . import calcs
from . import analysis

from .__version__ import __version__
