"""
Shape and initialization settings for the decoder-only transformer.
"""

from tracedit._private.check.standard import check_int
from tracedit._private.check.standard import check_float

from dataclasses import dataclass, asdict, fields

@dataclass(frozen=True)
class ModelConfig:
    """
    Transformer dimensions.

    Parameters
    ----------
    vocab_size : int, default=1024
        number of token ids
    n_layers : int, default=8
        number of blocks L (>= 2)
    n_heads : int, default=4
        attention heads; must divide d_model
    d_model : int, default=128
        residual stream width d
    d_ff : int, default=512
        feed-forward hidden width
    max_seq : int, default=64
        longest prompt (T_max) the position table covers
    norm_epsilon : float, default=1e-6
        RMS normalization offset
    init_seed : int, default=0
        seed of the "init" random stream
    init_scale : float, default=0.02
        std of the token and position embeddings at initialization
    """

    vocab_size: int = 1024
    n_layers: int = 8
    n_heads: int = 4
    d_model: int = 128
    d_ff: int = 512
    max_seq: int = 64
    norm_epsilon: float = 1e-6
    init_seed: int = 0
    init_scale: float = 0.02

    def __post_init__(self):

        # frozen dataclass: write through object.__setattr__
        def _set(name,value):
            object.__setattr__(self,name,value)

        _set("vocab_size",check_int(self.vocab_size,"vocab_size",minimum_allowed=1))
        _set("n_layers",check_int(self.n_layers,"n_layers",minimum_allowed=2))
        _set("n_heads",check_int(self.n_heads,"n_heads",minimum_allowed=1))
        _set("d_model",check_int(self.d_model,"d_model",minimum_allowed=1))
        _set("d_ff",check_int(self.d_ff,"d_ff",minimum_allowed=1))
        _set("max_seq",check_int(self.max_seq,"max_seq",minimum_allowed=1))
        _set("norm_epsilon",check_float(self.norm_epsilon,"norm_epsilon",
                                        minimum_allowed=0,minimum_inclusive=False))
        _set("init_seed",check_int(self.init_seed,"init_seed",
                                   minimum_allowed=0,maximum_allowed=2**64 - 1))
        _set("init_scale",check_float(self.init_scale,"init_scale",
                                      minimum_allowed=0,minimum_inclusive=False))

        if self.d_model % self.n_heads != 0:
            err = f"\nd_model ({self.d_model}) must be divisible by n_heads ({self.n_heads})\n\n"
            raise ValueError(err)

    @property
    def head_dim(self):
        return self.d_model//self.n_heads

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls,values):
        """
        Build from a dictionary, rejecting unknown keys.
        """

        allowed = {f.name for f in fields(cls)}
        unknown = set(values) - allowed
        if len(unknown) > 0:
            err = f"\nunrecognized ModelConfig keys: {sorted(unknown)}\n\n"
            raise ValueError(err)

        return cls(**values)
