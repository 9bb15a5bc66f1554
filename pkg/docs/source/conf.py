# Configuration file for the Sphinx documentation builder.

import os
import sys
sys.path.insert(0, os.path.abspath('../../'))

# -- Project information -----------------------------------------------------

project = 'tracedit'
copyright = '2026, tracedit developers'
author = 'tracedit developers'

from tracedit.__version__ import __version__
release = __version__

# -- General configuration ---------------------------------------------------

extensions = [
   'sphinx.ext.duration',
   'sphinx.ext.autodoc',
   'sphinx.ext.autosummary',
   'sphinxcontrib.napoleon'
]

autosummary_generate = True
templates_path = ['_templates']
exclude_patterns = ['_build']

# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
