"""
Accuracy evaluation of a base model with or without an edit suite.
"""

from tracedit.core.model import predict_polarity_batch
from tracedit.core.editing import count_params
from tracedit._private.check.standard import check_int
from tracedit._private.interface import progress_bar
from .batches import batch_indexes, final_logits, gold_ids, gold_nll
from .metrics import Metrics

import numpy as np

import time

def evaluate_accuracy(params,suite,prompts,verbalizer,batch_size=64,verbose=False):
    """
    Score prompts: accuracy is the fraction whose predicted polarity (argmax
    over the verbalizer tokens) equals the gold label.

    Parameters
    ----------
    params : BaseParams
        base parameters
    suite : EditSuite or None
        edit suite to attach (None scores the base model)
    prompts : list of PromptRendering
        test prompts (non-empty)
    verbalizer : dict
        dictionary keying label to token id (Vocab.verbalizer)
    batch_size : int, default=64
        prompts per forward pass
    verbose : bool, default=False
        show a progress bar

    Returns
    -------
    Metrics
        accuracy, contrastive-subset accuracy, confusion counts, and mean
        gold-label negative log probability
    """

    if len(prompts) == 0:
        err = "\nevaluate_accuracy needs a non-empty test set\n\n"
        raise ValueError(err)

    batch_size = check_int(batch_size,"batch_size",minimum_allowed=1)
    start = time.time()

    if suite is not None:
        suite = suite.frozen()

    verbalizer = dict(verbalizer)
    for p in prompts:
        if verbalizer.get(p.gold_label) != p.gold_id:
            err = f"\nsample {p.sample_id}: gold token {p.gold_id} does not match the verbalizer\n\n"
            raise ValueError(err)

    correct = np.zeros(len(prompts),dtype=bool)
    nll = np.zeros(len(prompts),dtype=np.float64)
    confusion = {g:{p:0 for p in verbalizer} for g in verbalizer}

    batches = batch_indexes(len(prompts),batch_size)
    with progress_bar(verbose,total=len(batches),desc="evaluating") as pbar:
        for batch in batches:

            batch_prompts = [prompts[i] for i in batch]
            logits = final_logits(params,batch_prompts,suite)
            labels, _ = predict_polarity_batch(logits,verbalizer)

            gold = gold_ids(batch_prompts,params.config.vocab_size)
            nll[batch] = gold_nll(logits,gold).data

            for i, p, label in zip(batch,batch_prompts,labels):
                correct[i] = label == p.gold_label
                confusion[p.gold_label][label] += 1

            pbar.update(1)

    contrastive = np.array([p.contrastive for p in prompts],dtype=bool)
    contrastive_accuracy = None
    if np.any(contrastive):
        contrastive_accuracy = float(np.mean(correct[contrastive]))

    _, _, fraction = count_params(suite,params)
    seed = 0 if suite is None else suite.seed

    return Metrics(accuracy=float(np.mean(correct)),
                   mean_loss=float(np.mean(nll)),
                   trainable_fraction=fraction,
                   seed=seed,
                   runtime=time.time() - start,
                   n_samples=len(prompts),
                   contrastive_accuracy=contrastive_accuracy,
                   confusion=confusion,
                   config={} if suite is None else {"suite":suite.meta()})
