"""
Base transformer parameters and their deterministic initialization.
"""

from tracedit.core.autodiff import Tensor
from tracedit.core.rng import RngStream
from tracedit._private.check.tracedit import check_precision
from tracedit._private.utility import array_checksum
from .config import ModelConfig

import numpy as np

LAYER_WEIGHTS = ("attn_norm","W_Q","W_K","W_V","W_O","mlp_norm","W_in","W_out")

def parameter_shapes(config):
    """
    Ordered dictionary of parameter name to shape for a ModelConfig. Layers
    are 1-based ("layer1.W_O" is the output projection of block 1).
    """

    d = config.d_model
    shapes = {"embed.token":(config.vocab_size,d),
              "embed.position":(config.max_seq,d)}

    for l in range(1,config.n_layers + 1):
        shapes[f"layer{l}.attn_norm"] = (d,)
        shapes[f"layer{l}.W_Q"] = (d,d)
        shapes[f"layer{l}.W_K"] = (d,d)
        shapes[f"layer{l}.W_V"] = (d,d)
        shapes[f"layer{l}.W_O"] = (d,d)
        shapes[f"layer{l}.mlp_norm"] = (d,)
        shapes[f"layer{l}.W_in"] = (d,config.d_ff)
        shapes[f"layer{l}.W_out"] = (config.d_ff,d)

    shapes["final_norm"] = (d,)
    shapes["unembed"] = (d,config.vocab_size)

    return shapes


class BaseParams:
    """
    Named, immutable collection of base model tensors.

    Parameters
    ----------
    config : ModelConfig
        model dimensions
    tensors : dict
        dictionary keying parameter name to Tensor. Must hold exactly the
        names and shapes from parameter_shapes(config), all with one dtype.
    """

    def __init__(self,config,tensors):

        if not issubclass(type(config),ModelConfig):
            err = f"\nconfig should be a ModelConfig, not {type(config)}\n\n"
            raise ValueError(err)

        shapes = parameter_shapes(config)
        if set(shapes) != set(tensors):
            missing = sorted(set(shapes) - set(tensors))
            extra = sorted(set(tensors) - set(shapes))
            err = "\ntensors do not match the model config.\n"
            err += f"    missing: {missing}\n    unexpected: {extra}\n\n"
            raise ValueError(err)

        dtypes = set()
        ordered = {}
        for name, shape in shapes.items():
            t = tensors[name]
            if not issubclass(type(t),Tensor):
                t = Tensor(np.asarray(t),name=name)
            if tuple(t.shape) != tuple(shape):
                err = f"\n'{name}' has shape {t.shape}, expected {shape}\n\n"
                raise ValueError(err)
            dtypes.add(np.dtype(t.dtype))
            ordered[name] = t

        if len(dtypes) != 1:
            err = f"\nall parameters must share one dtype, found {sorted(str(d) for d in dtypes)}\n\n"
            raise ValueError(err)

        self._config = config
        self._tensors = ordered

    def __getitem__(self,name):
        return self._tensors[name]

    def __contains__(self,name):
        return name in self._tensors

    def __iter__(self):
        return iter(self._tensors)

    def __len__(self):
        return len(self._tensors)

    def items(self):
        return self._tensors.items()

    def layer(self,l,weight):
        """
        Tensor for weight (one of LAYER_WEIGHTS) in 1-based block l.
        """
        return self._tensors[f"layer{l}.{weight}"]

    def replace(self,updates):
        """
        New BaseParams with some tensors replaced.
        """

        tensors = dict(self._tensors)
        tensors.update(updates)
        return BaseParams(self._config,tensors)

    def astype(self,precision):
        """
        Copy cast to another precision ("f32", "f64" or a numpy float type).
        """

        dtype = check_precision(precision)
        tensors = {k:Tensor(v.data,dtype=dtype,name=k) for k, v in self._tensors.items()}
        return BaseParams(self._config,tensors)

    def with_grad(self,requires_grad=True):
        """
        Copy whose tensors have requires_grad set (for base training).
        """

        tensors = {k:Tensor(v.data,requires_grad=requires_grad,name=k)
                   for k, v in self._tensors.items()}
        return BaseParams(self._config,tensors)

    def to_arrays(self):
        """
        Dictionary keying name to (read-only) numpy array.
        """
        return {k:v.data for k, v in self._tensors.items()}

    def checksum(self):
        return array_checksum(self.to_arrays())

    def num_params(self):
        return int(sum(v.size for v in self._tensors.values()))

    @property
    def config(self):
        return self._config

    @property
    def dtype(self):
        return next(iter(self._tensors.values())).dtype

    def __repr__(self):
        return f"BaseParams({self.num_params()} parameters, dtype={self.dtype})"


def init_model(config,precision="f32"):
    """
    Deterministically initialize base parameters from config.init_seed.

    Embeddings are N(0,init_scale); projection matrices are N(0,1/fan_in)
    with the residual-writing projections (W_O, W_out) further scaled by
    1/sqrt(2*n_layers); normalization gains are ones.

    Parameters
    ----------
    config : ModelConfig
        model dimensions
    precision : str, default="f32"
        "f32" or "f64"

    Returns
    -------
    BaseParams
        initialized parameters (requires_grad=False)
    """

    if not issubclass(type(config),ModelConfig):
        err = f"\nconfig should be a ModelConfig, not {type(config)}\n\n"
        raise ValueError(err)

    dtype = check_precision(precision)
    stream = RngStream("init",config.init_seed)
    residual_scale = 1/np.sqrt(2*config.n_layers)

    tensors = {}
    for name, shape in parameter_shapes(config).items():

        kind = name.split(".")[-1]
        if kind in ("attn_norm","mlp_norm") or name == "final_norm":
            values = np.ones(shape)
        else:
            if name.startswith("embed."):
                std = config.init_scale
            else:
                std = 1/np.sqrt(shape[0])
                if kind in ("W_O","W_out"):
                    std *= residual_scale
            values = stream.generator().standard_normal(shape)*std

        tensors[name] = Tensor(values,dtype=dtype,name=name)

    return BaseParams(config,tensors)
