"""
Synthetic aspect sentiment corpus: generation, vocabulary, prompts, splits.
"""

from .sample import Sample, PromptRendering
from .generate import CorpusSpec, generate_corpus, domain_unique_fraction
from .vocab import Vocab, build_vocab, tokenize
from .prompt import render_prompt, render_all, pad_batch
from .split import split_domains, split_dev, domain_tags, DomainSplit
