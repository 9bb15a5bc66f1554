"""
Render samples into tokenized prompts with located aspect tokens.
"""

from tracedit.core.data import PROMPT_TEMPLATES, OBJECTIVES
from tracedit._private.check.standard import check_choice
from .sample import PromptRendering
from .vocab import tokenize

import numpy as np

def find_subsequence(haystack,needle):
    """
    0-based index of the first occurrence of needle (list) in haystack
    (list), or -1.
    """

    n = len(needle)
    if n == 0:
        return -1
    for i in range(len(haystack) - n + 1):
        if haystack[i:i + n] == needle:
            return i
    return -1

def _template_parts(template):
    """
    Split a template around {S}, returning (prefix, suffix) strings.
    """

    if template.count("{S}") != 1 or template.count("{A}") != 1:
        err = f"\ntemplate '{template}' must contain {{S}} and {{A}} exactly once\n\n"
        raise ValueError(err)

    prefix, _, suffix = template.partition("{S}")
    if "{A}" in prefix:
        err = f"\ntemplate '{template}' must place {{S}} before {{A}}\n\n"
        raise ValueError(err)

    return prefix, suffix

def render_prompt(sample,vocab,template="default",max_seq=None,label=None,templates=None):
    """
    Render (S, A) into a prompt and locate the aspect tokens.

    Parameters
    ----------
    sample : Sample
        sample to render
    vocab : Vocab
        vocabulary
    template : str, default="default"
        name of a prompt template
    max_seq : int, optional
        longest allowed prompt
    label : str, optional
        label to use as the gold continuation (default sample.polarity)
    templates : dict, optional
        templates to look template up in (default PROMPT_TEMPLATES)

    Returns
    -------
    PromptRendering
    """

    if templates is None:
        templates = PROMPT_TEMPLATES

    if template not in templates:
        err = f"\ntemplate '{template}' not recognized. Should be one of:\n"
        for t in templates:
            err += f"    {t}\n"
        raise ValueError(err + "\n")

    prefix, suffix = _template_parts(templates[template])
    prefix_tokens = tokenize(prefix)
    sentence_tokens = tokenize(sample.sentence)
    aspect_tokens = tokenize(sample.aspect)

    start = find_subsequence(sentence_tokens,aspect_tokens)
    if start < 0:
        err = f"\naspect '{sample.aspect}' not found in sentence '{sample.sentence}'\n\n"
        raise ValueError(err)

    suffix_tokens = tokenize(suffix.replace("{A}",sample.aspect))
    tokens = prefix_tokens + sentence_tokens + suffix_tokens

    if max_seq is not None and len(tokens) > max_seq:
        err = f"\nprompt for sample {sample.sample_id} has {len(tokens)} tokens, "
        err += f"more than max_seq ({max_seq})\n\n"
        raise ValueError(err)

    offset = len(prefix_tokens) + start
    positions = tuple(offset + j + 1 for j in range(len(aspect_tokens)))

    if label is None:
        label = sample.polarity

    verbalizer = vocab.verbalizer
    if label not in verbalizer:
        err = f"\nlabel '{label}' is not in the verbalizer {list(verbalizer)}\n\n"
        raise ValueError(err)

    return PromptRendering(sample_id=sample.sample_id,
                           token_ids=vocab.encode(tokens),
                           aspect_positions=positions,
                           gold_id=verbalizer[label],
                           gold_label=label,
                           template=template,
                           contrastive=sample.contrastive,
                           domain=sample.domain)

def render_all(samples,vocab,template="default",max_seq=None,objective="absc"):
    """
    Render a list of samples.

    Parameters
    ----------
    objective : str, default="absc"
        "absc" uses each sample's polarity as gold; "aspect-blind" uses the
        polarity toward the first aspect in the sentence
    """

    objective = check_choice(objective,OBJECTIVES,"objective")

    out = []
    for s in samples:
        label = s.polarity if objective == "absc" else s.lead_polarity
        out.append(render_prompt(s,vocab,template=template,max_seq=max_seq,label=label))
    return out

def pad_batch(prompts,pad_id=0):
    """
    Right-pad prompts into a (B,T) array.

    Returns
    -------
    tokens : numpy.ndarray
        (B,T) int64 ids
    lengths : numpy.ndarray
        (B,) int64 prompt lengths
    """

    lengths = np.array([p.length for p in prompts],dtype=np.int64)
    tokens = np.full((len(prompts),int(lengths.max())),pad_id,dtype=np.int64)
    for b, p in enumerate(prompts):
        tokens[b,:p.length] = p.token_ids

    return tokens, lengths
