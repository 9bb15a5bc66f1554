"""
Clean, corrupted, and corrupted-with-restoration runs of one prompt.
"""

from tracedit.core.model import forward, ForwardOptions, RestorePatch
from tracedit.core.model import HiddenCache
from tracedit.core.model.readout import label_probabilities
from tracedit._private.check.standard import check_int

import numpy as np

from dataclasses import dataclass

@dataclass
class TraceRun:
    """
    Outcome of one traced forward pass.

    Attributes
    ----------
    probability : float
        probability of the gold label token (full-vocabulary softmax)
    label : str
        argmax label among the verbalizer tokens
    probs : dict
        dictionary keying every verbalizer label to its probability
    cache : HiddenCache or None
        recorded states (clean runs only)
    """

    probability: float
    label: str
    probs: dict
    cache: object = None


def _gold_label(prompt,verbalizer):

    for label, token in verbalizer.items():
        if token == prompt.gold_id:
            return label

    err = f"\nsample {prompt.sample_id}: gold token {prompt.gold_id} is not a verbalizer token\n\n"
    raise ValueError(err)

def _read(logits,prompt,verbalizer):
    """
    TraceRun(s) from final-position logits of shape (V,) or (B,V).
    """

    gold = _gold_label(prompt,verbalizer)
    labels, probs = label_probabilities(logits,verbalizer)

    rows = np.atleast_2d(probs)
    out = []
    for row in rows:
        by_label = {lab:float(p) for lab, p in zip(labels,row)}
        winner = labels[int(np.argmax(row))]
        out.append(TraceRun(probability=by_label[gold],label=winner,probs=by_label))

    if probs.ndim == 1:
        return out[0]
    return out

def clean_run(params,prompt,verbalizer):
    """
    Uncorrupted forward pass recording every (layer, position) state.

    Parameters
    ----------
    params : BaseParams
        base parameters
    prompt : PromptRendering
        prompt to run
    verbalizer : dict
        dictionary keying label to token id

    Returns
    -------
    TraceRun
        gold-label probability, argmax label and the HiddenCache
    """

    options = ForwardOptions(record_hidden=True,
                             readout_positions=[prompt.length])
    logits, cache = forward(prompt.token_ids,params,options)

    run = _read(logits,prompt,verbalizer)
    run.cache = cache
    return run

def corrupted_run(params,prompt,verbalizer,noise):
    """
    Forward pass with the noise of spec noise added to the layer-0 states.

    Parameters
    ----------
    params : BaseParams
        base parameters
    prompt : PromptRendering
        prompt to run
    verbalizer : dict
        dictionary keying label to token id
    noise : NoiseSpec
        corruption

    Returns
    -------
    TraceRun
    """

    options = ForwardOptions(noise=noise.draw(params,prompt),
                             readout_positions=[prompt.length])
    logits, _ = forward(prompt.token_ids,params,options)

    return _read(logits,prompt,verbalizer)

def _check_cache(cache,params,prompt):

    if not issubclass(type(cache),HiddenCache):
        err = f"\nclean_cache should be a HiddenCache, not {type(cache)}\n\n"
        raise ValueError(err)

    if cache.n_layers != params.config.n_layers or cache.width != params.config.d_model:
        err = f"\nclean cache ({cache.n_layers} layers, width {cache.width}) does not match "
        err += f"the model ({params.config.n_layers} layers, width {params.config.d_model})\n\n"
        raise ValueError(err)

    if cache.n_positions != prompt.length:
        err = f"\nclean cache covers {cache.n_positions} positions but the prompt for "
        err += f"sample {prompt.sample_id} has {prompt.length}\n\n"
        raise ValueError(err)

def _check_cell(cell,L,T):

    try:
        layer, position = cell
    except (TypeError,ValueError):
        err = f"\ncell should be a (layer, position) pair, got {cell}\n\n"
        raise ValueError(err)

    layer = check_int(layer,"layer",minimum_allowed=0,maximum_allowed=L)
    position = check_int(position,"position",minimum_allowed=1,maximum_allowed=T)
    return layer, position

def restoration_run(params,prompt,verbalizer,noise,cell,clean_cache):
    """
    Corrupted run in which the clean state of one cell (or several cells at
    once) is written back. Uses the same noise draw as corrupted_run.

    Parameters
    ----------
    params : BaseParams
        base parameters
    prompt : PromptRendering
        prompt to run
    verbalizer : dict
        dictionary keying label to token id
    noise : NoiseSpec
        corruption (same spec as the paired corrupted run)
    cell : tuple or list of tuple
        (layer, 1-based position) to restore, layer in [0,L]. A list of
        cells restores all of them in the same pass.
    clean_cache : HiddenCache
        cache from clean_run on the same prompt

    Returns
    -------
    float
        gold-label probability
    """

    _check_cache(clean_cache,params,prompt)

    L, T = params.config.n_layers, prompt.length
    if len(cell) > 0 and hasattr(cell[0],"__iter__"):
        cells = [_check_cell(c,L,T) for c in cell]
    else:
        cells = [_check_cell(cell,L,T)]

    patches = [RestorePatch(l,i,clean_cache[l,i]) for l, i in cells]
    options = ForwardOptions(noise=noise.draw(params,prompt),
                             restore=patches,
                             readout_positions=[T])
    logits, _ = forward(prompt.token_ids,params,options)

    return _read(logits,prompt,verbalizer).probability

def restoration_sweep(params,prompt,verbalizer,noise,cells,clean_cache,batch_size=64):
    """
    restoration_run for many single cells, batching independent cells into
    one forward pass (one batch row per cell).

    Parameters
    ----------
    params : BaseParams
        base parameters
    prompt : PromptRendering
        prompt to run
    verbalizer : dict
        dictionary keying label to token id
    noise : NoiseSpec
        corruption
    cells : list of tuple
        (layer, position) cells
    clean_cache : HiddenCache
        cache from clean_run on the same prompt
    batch_size : int, default=64
        cells per forward pass

    Returns
    -------
    numpy.ndarray
        float64 gold-label probability per cell
    """

    _check_cache(clean_cache,params,prompt)
    batch_size = check_int(batch_size,"batch_size",minimum_allowed=1)

    L, T = params.config.n_layers, prompt.length
    cells = [_check_cell(c,L,T) for c in cells]
    noise_array = noise.draw(params,prompt)

    out = np.zeros(len(cells),dtype=np.float64)
    for start in range(0,len(cells),batch_size):

        chunk = cells[start:start + batch_size]
        B = len(chunk)
        tokens = np.tile(prompt.token_ids,(B,1))
        patches = [RestorePatch(l,i,clean_cache[l,i],row=b)
                   for b, (l, i) in enumerate(chunk)]

        options = ForwardOptions(noise=noise_array,
                                 restore=patches,
                                 readout_positions=np.full(B,T))
        logits, _ = forward(tokens,params,options)

        runs = _read(logits,prompt,verbalizer)
        if not isinstance(runs,list):
            runs = [runs]
        out[start:start + B] = [r.probability for r in runs]

    return out
