"""
Read a polarity prediction off final-position logits.
"""

from tracedit.core.autodiff import Tensor

import numpy as np

def _check_verbalizer(verbalizer,vocab_size):
    """
    Return verbalizer items (label, token id) sorted by token id.
    """

    if not issubclass(type(verbalizer),dict) or len(verbalizer) == 0:
        err = "\nverbalizer must be a non-empty dictionary keying label to token id\n\n"
        raise ValueError(err)

    ids = [int(v) for v in verbalizer.values()]
    if len(set(ids)) != len(ids):
        err = f"\nverbalizer token ids must be distinct: {verbalizer}\n\n"
        raise ValueError(err)

    for label, token in verbalizer.items():
        if token < 0 or token >= vocab_size:
            err = f"\nverbalizer token for '{label}' ({token}) is not in the vocabulary\n\n"
            raise ValueError(err)

    return sorted(verbalizer.items(),key=lambda kv: kv[1])

def label_probabilities(logits,verbalizer):
    """
    Full-vocabulary softmax read at the verbalizer tokens.

    Parameters
    ----------
    logits : Tensor or numpy.ndarray
        final-position logits, shape (V,) or (B,V)
    verbalizer : dict
        dictionary keying label to token id

    Returns
    -------
    labels : list
        labels ordered by token id
    probs : numpy.ndarray
        float64 probabilities, shape (len(labels),) or (B,len(labels))
    """

    if issubclass(type(logits),Tensor):
        logits = logits.data
    logits = np.asarray(logits,dtype=np.float64)

    items = _check_verbalizer(verbalizer,logits.shape[-1])
    labels = [label for label, _ in items]
    ids = np.array([token for _, token in items],dtype=np.int64)

    m = np.max(logits,axis=-1,keepdims=True)
    log_z = m + np.log(np.sum(np.exp(logits - m),axis=-1,keepdims=True))
    probs = np.exp(logits[...,ids] - log_z)

    return labels, probs

def predict_polarity(logits,verbalizer):
    """
    Predict the polarity label from the logits at the final position.

    Parameters
    ----------
    logits : Tensor or numpy.ndarray
        logits at the final prompt position, shape (V,)
    verbalizer : dict
        dictionary keying label (e.g. "positive") to token id

    Returns
    -------
    label : str
        argmax label among verbalizer tokens. Ties go to the lowest token id.
    probs : dict
        dictionary keying each label to its probability under a softmax over
        the full vocabulary
    """

    labels, probs = label_probabilities(logits,verbalizer)
    if probs.ndim != 1:
        err = f"\npredict_polarity expects logits for one position, got shape {probs.shape[:-1]}\n\n"
        raise ValueError(err)

    label = labels[int(np.argmax(probs))]
    return label, {lab:float(p) for lab, p in zip(labels,probs)}

def predict_polarity_batch(logits,verbalizer):
    """
    Batched predict_polarity.

    Returns
    -------
    labels : list
        predicted label per row
    probs : list
        dictionary keying label to probability, per row
    """

    labels, probs = label_probabilities(logits,verbalizer)
    probs = np.atleast_2d(probs)

    winners = np.argmax(probs,axis=1)
    out_labels = [labels[int(w)] for w in winners]
    out_probs = [{lab:float(p) for lab, p in zip(labels,row)} for row in probs]

    return out_labels, out_probs
