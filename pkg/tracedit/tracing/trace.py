"""
Per-sample causal trace: total effect and the indirect effect grid.
"""

from tracedit._private.check.tracedit import check_layers
from tracedit._private.interface import progress_bar
from .noise import NoiseSpec
from .runs import clean_run, corrupted_run, restoration_sweep

import numpy as np

from dataclasses import dataclass

@dataclass
class TraceGrid:
    """
    Causal trace of one sample.

    Attributes
    ----------
    sample_id : int
        sample traced
    p_clean : float
        gold-label probability of the clean run
    p_corrupted : float
        gold-label probability of the corrupted run
    ie : numpy.ndarray
        (L,T) indirect effects; row l-1 holds layer l. Layers that were not
        traced are NaN.
    gold_label : str
        gold label
    clean_label : str
        argmax label of the clean run
    corrupted_label : str
        argmax label of the corrupted run
    """

    sample_id: int
    p_clean: float
    p_corrupted: float
    ie: np.ndarray
    gold_label: str
    clean_label: str
    corrupted_label: str

    @property
    def te(self):
        """
        Total effect: clean minus corrupted gold-label probability.
        """
        return self.p_clean - self.p_corrupted

    @property
    def retained(self):
        """
        Expected-prediction filter: the clean run predicts the gold label
        and the corrupted run does not.
        """
        return self.clean_label == self.gold_label and self.corrupted_label != self.gold_label

    @property
    def n_layers(self):
        return self.ie.shape[0]

    @property
    def n_positions(self):
        return self.ie.shape[1]

    def to_dict(self):
        return {"sample_id":self.sample_id,
                "te":self.te,
                "p_clean":self.p_clean,
                "p_corrupted":self.p_corrupted,
                "gold_label":self.gold_label,
                "clean_label":self.clean_label,
                "corrupted_label":self.corrupted_label,
                "retained":self.retained}


def trace_sample(params,prompt,verbalizer,noise=None,layers=None,batch_size=64):
    """
    Trace one prompt: one clean run, one corrupted run and one restoration
    run per (layer, position) cell, all sharing the sample's noise draw.

    Parameters
    ----------
    params : BaseParams
        base parameters
    prompt : PromptRendering
        prompt to trace
    verbalizer : dict
        dictionary keying label to token id
    noise : NoiseSpec, optional
        corruption (default NoiseSpec())
    layers : str or list-like, optional
        layers to trace (band name, "4-6", or list). Default all layers.
    batch_size : int, default=64
        restoration cells per forward pass

    Returns
    -------
    TraceGrid
    """

    if noise is None:
        noise = NoiseSpec()

    L = params.config.n_layers
    T = prompt.length
    if layers is None:
        layers = tuple(range(1,L + 1))
    layers = check_layers(layers,L)

    clean = clean_run(params,prompt,verbalizer)
    corrupted = corrupted_run(params,prompt,verbalizer,noise)

    cells = [(l,i) for l in layers for i in range(1,T + 1)]
    probs = restoration_sweep(params,prompt,verbalizer,noise,cells,clean.cache,
                              batch_size=batch_size)

    ie = np.full((L,T),np.nan,dtype=np.float64)
    for (l, i), p in zip(cells,probs):
        ie[l - 1,i - 1] = p - corrupted.probability

    gold = [k for k, v in verbalizer.items() if v == prompt.gold_id][0]

    return TraceGrid(sample_id=prompt.sample_id,
                     p_clean=clean.probability,
                     p_corrupted=corrupted.probability,
                     ie=ie,
                     gold_label=gold,
                     clean_label=clean.label,
                     corrupted_label=corrupted.label)

def trace_samples(params,prompts,verbalizer,noise=None,layers=None,
                  batch_size=64,verbose=False):
    """
    trace_sample over a list of prompts.

    Returns
    -------
    list of TraceGrid
    """

    grids = []
    with progress_bar(verbose,total=len(prompts),desc="tracing") as pbar:
        for prompt in prompts:
            grids.append(trace_sample(params,prompt,verbalizer,noise=noise,
                                      layers=layers,batch_size=batch_size))
            pbar.update(1)

    return grids
