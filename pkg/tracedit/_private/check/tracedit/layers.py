"""
Validate layer selections: named bands, explicit lists, and custom bands.
"""

from tracedit._private.check.standard import check_int

import numpy as np

BAND_NAMES = ("early","mid","late","all")

def layer_bands(n_layers):
    """
    Split layers 1..n_layers into three contiguous bands (early, mid, late)
    plus "all". Bands come from numpy.array_split, so for n_layers=8 they are
    (1,2,3), (4,5,6), (7,8).

    Parameters
    ----------
    n_layers : int
        number of transformer blocks (>= 3 for three non-empty bands)

    Returns
    -------
    bands : dict
        dictionary keying band name to tuple of 1-based layer indexes
    """

    n_layers = check_int(n_layers,"n_layers",minimum_allowed=1)

    layers = np.arange(1,n_layers + 1)
    parts = np.array_split(layers,3)

    bands = {}
    for name, part in zip(BAND_NAMES[:3],parts):
        bands[name] = tuple(int(x) for x in part)
    bands["all"] = tuple(int(x) for x in layers)

    return bands

def check_layers(layers,n_layers):
    """
    Resolve a layer selection to a sorted tuple of unique 1-based layer
    indexes.

    Parameters
    ----------
    layers : str or list-like
        band name (early, mid, late, all), comma-separated list ("4,5,6"),
        a range ("4-6"), or an iterable of ints. An empty iterable is
        allowed and means no layers.
    n_layers : int
        number of layers in the model

    Returns
    -------
    layers : tuple
        sorted tuple of ints in [1,n_layers]
    """

    n_layers = check_int(n_layers,"n_layers",minimum_allowed=1)

    if issubclass(type(layers),str):

        text = layers.strip().lower()
        bands = layer_bands(n_layers)
        if text in bands:
            if len(bands[text]) == 0:
                err = f"\nband '{text}' is empty for a {n_layers}-layer model\n\n"
                raise ValueError(err)
            return bands[text]

        layers = _parse_layer_text(text)

    if not hasattr(layers,"__iter__") or issubclass(type(layers),(dict,type)):
        err = f"\nlayers '{layers}' should be a band name ({', '.join(BAND_NAMES)}),\n"
        err += "a comma separated list of layers, or a list of ints.\n\n"
        raise ValueError(err)

    out = []
    for layer in layers:
        out.append(check_int(layer,
                             "layer",
                             minimum_allowed=1,
                             maximum_allowed=n_layers))

    if len(set(out)) != len(out):
        err = f"\nlayers {out} contains duplicates\n\n"
        raise ValueError(err)

    return tuple(sorted(out))

def _parse_layer_text(text):
    """
    Parse "4,5,6", "4-6" or "1-2,7" into a list of ints.
    """

    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if piece == "":
            continue

        if "-" in piece:
            start, _, stop = piece.partition("-")
            start = check_int(start.strip(),"layer range start")
            stop = check_int(stop.strip(),"layer range stop")
            if stop < start:
                err = f"\nlayer range '{piece}' runs backwards\n\n"
                raise ValueError(err)
            out.extend(range(start,stop + 1))
        else:
            out.append(check_int(piece,"layer"))

    return out

def check_bands(bands,n_layers):
    """
    Validate custom ablation bands. Bands may not share layers.

    Parameters
    ----------
    bands : dict or list-like
        dictionary keying band name to a layer selection, or a list of layer
        selections (named by their text, e.g. "1-3")
    n_layers : int
        number of layers in the model

    Returns
    -------
    bands : dict
        dictionary keying band name to sorted layer tuple (insertion order
        preserved)
    """

    if not issubclass(type(bands),dict):
        if issubclass(type(bands),str) or not hasattr(bands,"__iter__"):
            err = f"\nbands '{bands}' should be a list of layer selections\n\n"
            raise ValueError(err)
        bands = {str(b) if issubclass(type(b),str) else ",".join(str(x) for x in b): b
                 for b in bands}

    resolved = {}
    for name, selection in bands.items():
        resolved[name] = check_layers(selection,n_layers)

    # "all" always overlaps everything; overlap rules apply to the others
    seen = {}
    for name, layers in resolved.items():
        if name == "all":
            continue
        for layer in layers:
            if layer in seen:
                err = f"\nbands '{seen[layer]}' and '{name}' overlap at layer {layer}.\n"
                err += "Custom ablation bands must not share layers.\n\n"
                raise ValueError(err)
            seen[layer] = name

    return resolved
