"""
Batching helpers shared by training and evaluation.
"""

from tracedit.core.autodiff import functional as F
from tracedit.core.model import forward, ForwardOptions
from tracedit.core.editing import select_positions
from tracedit.corpus import pad_batch

import numpy as np

def batch_indexes(n,batch_size,gen=None):
    """
    Split range(n) into consecutive batches, shuffled first if a numpy
    Generator is given.
    """

    order = np.arange(n) if gen is None else gen.permutation(n)
    return [order[i:i + batch_size] for i in range(0,n,batch_size)]

def edit_positions(prompts,suite):
    """
    Representation-edit positions for each prompt under the suite's policy
    (mid-policy draws are keyed by sample id and suite seed).
    """

    if suite is None:
        return None
    return [select_positions(p,suite.policy,seed=suite.seed) for p in prompts]

def final_logits(params,prompts,suite=None):
    """
    Logits at each prompt's final position.

    Parameters
    ----------
    params : BaseParams
        base parameters
    prompts : list of PromptRendering
        prompts (right-padded into one batch)
    suite : EditSuite, optional
        edit suite to attach

    Returns
    -------
    Tensor
        (B,V) logits
    """

    tokens, lengths = pad_batch(prompts)
    options = ForwardOptions(edits=suite,
                             edit_positions=edit_positions(prompts,suite),
                             readout_positions=lengths)
    logits, _ = forward(tokens,params,options)
    return logits

def gold_ids(prompts,vocab_size):
    """
    Gold label token ids as an int64 array.
    """

    ids = []
    for p in prompts:
        if p.gold_id is None or p.gold_id < 0 or p.gold_id >= vocab_size:
            err = f"\nsample {p.sample_id} has no valid gold label token\n\n"
            raise ValueError(err)
        ids.append(p.gold_id)

    return np.array(ids,dtype=np.int64)

def gold_nll(logits,gold):
    """
    Per-row negative log probability of the gold token (Tensor (B,)).
    """
    return -F.pick(F.log_softmax(logits,axis=-1),gold)
