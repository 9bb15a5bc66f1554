"""
Pre-norm decoder-only transformer forward pass with hook points for
recording, corrupting, restoring and editing residual-stream states.

Hidden state conventions: layer 0 is the embedding output (token plus
position embedding, plus any corruption noise); layer l in [1,L] is the
residual-stream output of block l. Positions in every public argument are
1-based.
"""

from tracedit.core.autodiff import Tensor
from tracedit.core.autodiff import functional as F
from tracedit.core.editing.ops import apply_weight_edit
from tracedit.core.editing.ops import apply_rep_edit
from .params import BaseParams

import numpy as np

from collections import namedtuple
from dataclasses import dataclass, field

class RestorePatch(namedtuple("RestorePatch",["layer","position","vector","row"])):
    """
    Overwrite the hidden state at (layer, 1-based position) with vector. row
    picks the batch row; None patches every row.
    """

    __slots__ = ()

    def __new__(cls,layer,position,vector,row=None):
        return super().__new__(cls,layer,position,vector,row)


@dataclass
class ForwardOptions:
    """
    Per-call forward switches.

    Parameters
    ----------
    record_hidden : bool, default=False
        return a HiddenCache of every (layer, position) state
    noise : numpy.ndarray, optional
        additive perturbation of the layer-0 states, shape (T,d) or (B,T,d).
        Zero rows leave positions untouched.
    restore : list of RestorePatch, optional
        states to overwrite right after they are produced
    edits : EditSuite, optional
        edit suite to attach
    edit_positions : list-like, optional
        1-based positions receiving representation edits. For a batch,
        one iterable per row.
    readout_positions : list-like of int, optional
        1-based position per batch row. When given, logits are computed only
        at these positions (shape (B,V)).
    """

    record_hidden: bool = False
    noise: object = None
    restore: list = field(default_factory=list)
    edits: object = None
    edit_positions: object = None
    readout_positions: object = None


class HiddenCache:
    """
    Complete grid of recorded residual-stream states for one sequence.

    Parameters
    ----------
    states : numpy.ndarray
        array of shape (L+1, T, d)
    """

    def __init__(self,states):

        states = np.array(states,copy=True)
        if states.ndim != 3:
            err = f"\nstates should have shape (L+1,T,d), got {states.shape}\n\n"
            raise ValueError(err)

        states.flags.writeable = False
        self._states = states

    def __getitem__(self,key):
        """
        cache[layer, position] with a 1-based position.
        """

        layer, position = key
        self._check_cell(layer,position)
        return self._states[layer,position - 1]

    def _check_cell(self,layer,position):

        if layer < 0 or layer > self.n_layers:
            err = f"\nlayer {layer} outside [0,{self.n_layers}]\n\n"
            raise ValueError(err)
        if position < 1 or position > self.n_positions:
            err = f"\nposition {position} outside [1,{self.n_positions}]\n\n"
            raise ValueError(err)

    def truncate(self,length):
        """
        Cache restricted to the first length positions (drops padding).
        """
        return HiddenCache(self._states[:,:length])

    @property
    def states(self):
        return self._states

    @property
    def n_layers(self):
        return self._states.shape[0] - 1

    @property
    def n_positions(self):
        return self._states.shape[1]

    @property
    def width(self):
        return self._states.shape[2]


def rms_norm(x,gain,eps):
    """
    x*gain/sqrt(mean(x^2) + eps) over the last axis.
    """

    ms = F.mean(x*x,axis=-1,keepdims=True)
    return x*F.power(ms + eps,-0.5)*gain

def _causal_mask(T):
    return np.tril(np.ones((T,T),dtype=bool))

def _attention(x,params,layer,edits):

    config = params.config
    B, T, d = x.shape
    H = config.n_heads
    dh = config.head_dim

    def heads(t):
        return t.reshape(B,T,H,dh).transpose(0,2,1,3)

    q = heads(x @ params.layer(layer,"W_Q"))
    k = heads(x @ params.layer(layer,"W_K"))
    v = heads(x @ params.layer(layer,"W_V"))

    scores = (q @ k.T)*(1/np.sqrt(dh))
    weights = F.softmax(scores,axis=-1,mask=_causal_mask(T))
    z = (weights @ v).transpose(0,2,1,3).reshape(B,T,d)

    W_O = params.layer(layer,"W_O")
    if edits is not None:
        weight_edit = edits.weight_edit(layer)
        if weight_edit is not None:
            W_O = apply_weight_edit(W_O,*weight_edit)

    return z @ W_O

def block_forward(h_prev,layer,params,edits=None,edit_mask=None):
    """
    One pre-norm residual block:

        u = h + attn(norm(h))
        out = u + mlp(norm(u))

    with causal attention. If edits targets this layer, the attention output
    projection W_O is replaced by W_O + A B and the representation edit is
    applied to the block output wherever edit_mask is True.

    Parameters
    ----------
    h_prev : Tensor
        layer input states, shape (B,T,d) or (T,d)
    layer : int
        1-based block index
    params : BaseParams
        base parameters
    edits : EditSuite, optional
        edit suite
    edit_mask : numpy.ndarray, optional
        bool array (B,T) or (T,) selecting representation-edit positions

    Returns
    -------
    Tensor
        block output, same shape as h_prev
    """

    if not issubclass(type(params),BaseParams):
        err = f"\nparams should be BaseParams, not {type(params)}\n\n"
        raise ValueError(err)

    config = params.config
    if layer < 1 or layer > config.n_layers:
        err = f"\nlayer {layer} outside [1,{config.n_layers}]\n\n"
        raise ValueError(err)

    squeeze = h_prev.ndim == 2
    if squeeze:
        h_prev = h_prev.reshape(1,*h_prev.shape)
        if edit_mask is not None:
            edit_mask = np.asarray(edit_mask)[None,:]

    eps = config.norm_epsilon

    normed = rms_norm(h_prev,params.layer(layer,"attn_norm"),eps)
    u = h_prev + _attention(normed,params,layer,edits)

    normed = rms_norm(u,params.layer(layer,"mlp_norm"),eps)
    hidden = F.gelu(normed @ params.layer(layer,"W_in"))
    out = u + hidden @ params.layer(layer,"W_out")

    if edits is not None and edit_mask is not None:
        rep_edit = edits.rep_edit(layer)
        if rep_edit is not None:
            out = apply_rep_edit(out,*rep_edit,mask=edit_mask)

    if squeeze:
        out = out.reshape(*out.shape[1:])

    return out

def _positions_mask(positions,B,T,what):
    """
    Convert per-row 1-based position iterables into a (B,T) bool mask.
    """

    mask = np.zeros((B,T),dtype=bool)
    if positions is None:
        return mask

    positions = list(positions)
    if B == 1 and (len(positions) == 0 or not all(hasattr(p,"__iter__") for p in positions)):
        positions = [positions]

    if len(positions) != B:
        err = f"\n{what} should have one entry per batch row ({B}), got {len(positions)}\n\n"
        raise ValueError(err)

    for b, row in enumerate(positions):
        for p in row:
            if p < 1 or p > T:
                err = f"\n{what} position {p} outside [1,{T}]\n\n"
                raise ValueError(err)
            mask[b,p - 1] = True

    return mask

def _patch_table(restore,L,B,T,d):
    """
    Group restore patches by layer into (mask, values) arrays.
    """

    table = {}
    for patch in restore:

        layer, position, vector, row = patch
        if layer < 0 or layer > L:
            err = f"\nrestore patch layer {layer} outside [0,{L}]\n\n"
            raise ValueError(err)
        if position < 1 or position > T:
            err = f"\nrestore patch position {position} outside [1,{T}]\n\n"
            raise ValueError(err)

        vector = np.asarray(vector)
        if vector.shape != (d,):
            err = f"\nrestore patch vector should have width {d}, got shape {vector.shape}\n\n"
            raise ValueError(err)

        if row is not None and (row < 0 or row >= B):
            err = f"\nrestore patch row {row} outside [0,{B})\n\n"
            raise ValueError(err)

        if layer not in table:
            table[layer] = (np.zeros((B,T,1),dtype=bool),np.zeros((B,T,d)))

        mask, values = table[layer]
        rows = slice(None) if row is None else row
        mask[rows,position - 1] = True
        values[rows,position - 1] = vector

    return table

def _apply_patches(h,layer,table):

    if layer not in table:
        return h

    mask, values = table[layer]
    return F.where(mask,Tensor(values,dtype=h.dtype),h)

def check_tokens(tokens,config):
    """
    Validate token ids against a ModelConfig, returning an int64 array of
    shape (B,T) and whether the input was a single sequence.
    """

    tokens = np.asarray(tokens)
    if not np.issubdtype(tokens.dtype,np.integer):
        err = "\ntokens must be integer ids\n\n"
        raise ValueError(err)

    single = tokens.ndim == 1
    if single:
        tokens = tokens[None,:]

    if tokens.ndim != 2 or tokens.shape[1] < 1:
        err = f"\ntokens should have shape (T,) or (B,T) with T >= 1, got {tokens.shape}\n\n"
        raise ValueError(err)

    if tokens.shape[1] > config.max_seq:
        err = f"\nprompt length {tokens.shape[1]} exceeds max_seq ({config.max_seq})\n\n"
        raise ValueError(err)

    if tokens.min() < 0 or tokens.max() >= config.vocab_size:
        err = f"\ntoken ids must be in [0,{config.vocab_size}). Got range "
        err += f"[{tokens.min()},{tokens.max()}]\n\n"
        raise ValueError(err)

    return tokens.astype(np.int64), single

def forward(tokens,params,options=None):
    """
    Run the transformer.

    Order of operations at each layer: produce the state, apply the
    representation edit (if any), apply restore patches, record into the
    cache. Noise is added to the layer-0 states before layer-0 patches.

    Parameters
    ----------
    tokens : numpy.ndarray
        int ids, shape (T,) or right-padded (B,T)
    params : BaseParams
        base parameters
    options : ForwardOptions, optional
        hooks; defaults to a plain forward

    Returns
    -------
    logits : Tensor
        (T,V) or (B,T,V); (B,V) (or (V,) for a single sequence) when
        readout_positions is given
    cache : HiddenCache, list of HiddenCache, or None
        recorded states if options.record_hidden (a list for batched input)
    """

    if options is None:
        options = ForwardOptions()

    if not issubclass(type(params),BaseParams):
        err = f"\nparams should be BaseParams, not {type(params)}\n\n"
        raise ValueError(err)

    config = params.config
    tokens, single = check_tokens(tokens,config)
    B, T = tokens.shape
    L = config.n_layers
    d = config.d_model

    table = _patch_table(options.restore,L,B,T,d)

    edit_mask = None
    if options.edits is not None:
        edit_mask = _positions_mask(options.edit_positions,B,T,"edit_positions")

    h = F.embedding(params["embed.token"],tokens)
    h = h + F.embedding(params["embed.position"],np.arange(T))

    if options.noise is not None:
        noise = np.asarray(options.noise)
        if noise.shape not in [(T,d),(B,T,d)]:
            err = f"\nnoise should have shape {(T,d)} or {(B,T,d)}, got {noise.shape}\n\n"
            raise ValueError(err)
        h = h + Tensor(noise,dtype=h.dtype)

    h = _apply_patches(h,0,table)

    record = [h.data] if options.record_hidden else None

    for layer in range(1,L + 1):
        h = block_forward(h,layer,params,edits=options.edits,edit_mask=edit_mask)
        h = _apply_patches(h,layer,table)
        if record is not None:
            record.append(h.data)

    if options.readout_positions is not None:
        positions = np.atleast_1d(np.asarray(options.readout_positions,dtype=np.int64))
        if positions.shape != (B,) or positions.min() < 1 or positions.max() > T:
            err = f"\nreadout_positions should hold one position in [1,{T}] per row\n\n"
            raise ValueError(err)
        h = F.gather_positions(h,positions - 1)

    h = rms_norm(h,params["final_norm"],config.norm_epsilon)
    logits = h @ params["unembed"]

    cache = None
    if record is not None:
        states = np.stack(record,axis=1)
        cache = [HiddenCache(states[b]) for b in range(B)]
        if single:
            cache = cache[0]

    if single:
        logits = logits.reshape(*logits.shape[1:])

    return logits, cache
