"""
Corruption noise added to the embedding-layer states.
"""

from tracedit.core.rng import RngStream, rng_draw
from tracedit._private.check.standard import check_float
from tracedit._private.check.standard import check_int
from tracedit._private.check.standard import check_choice
from tracedit._private.check.tracedit import check_noise_scope

import numpy as np

from dataclasses import dataclass, asdict, fields

@dataclass
class NoiseSpec:
    """
    Gaussian corruption of the layer-0 states.

    Parameters
    ----------
    multiplier : float, default=3.0
        noise standard deviation in units of the per-coordinate standard
        deviation of the token embedding matrix
    scope : str, default="aspect"
        "aspect" corrupts the aspect tokens in the sentence; "all" corrupts
        every position
    seed : int, default=0
        seed of the "corruption-noise" stream. Each sample draws at counter
        sample_id, so its corrupted and restoration runs share one draw.
    distribution : str, default="gaussian"
        only mean-zero gaussian noise is supported
    """

    multiplier: float = 3.0
    scope: str = "aspect"
    seed: int = 0
    distribution: str = "gaussian"

    def __post_init__(self):

        self.multiplier = check_float(self.multiplier,"multiplier",minimum_allowed=0)
        self.scope = check_noise_scope(self.scope)
        self.seed = check_int(self.seed,"seed",minimum_allowed=0)
        self.distribution = check_choice(self.distribution,("gaussian",),"distribution")

    def positions(self,prompt):
        """
        1-based positions this spec corrupts in prompt.
        """

        if self.scope == "all":
            return tuple(range(1,prompt.length + 1))

        positions = tuple(prompt.aspect_positions)
        if len(positions) == 0:
            err = f"\nnoise scope '{self.scope}' is empty for sample {prompt.sample_id}\n\n"
            raise ValueError(err)

        return positions

    def scale(self,params):
        """
        Per-coordinate noise standard deviation, shape (d,).
        """

        table = params["embed.token"].data.astype(np.float64)
        return self.multiplier*np.std(table,axis=0)

    def draw(self,params,prompt):
        """
        Noise array (T,d) for prompt: zero outside the scope. Identical on
        every call for the same (seed, sample_id).
        """

        positions = self.positions(prompt)
        d = params.config.d_model

        stream = RngStream("corruption-noise",self.seed,counter=prompt.sample_id)
        noise = rng_draw(stream,(prompt.length,d)).data*self.scale(params)

        mask = np.zeros((prompt.length,1),dtype=bool)
        mask[np.array(positions) - 1] = True

        return np.where(mask,noise,0.0)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls,values):
        allowed = {f.name for f in fields(cls)}
        unknown = set(values) - allowed
        if len(unknown) > 0:
            err = f"\nunrecognized NoiseSpec keys: {sorted(unknown)}\n\n"
            raise ValueError(err)
        return cls(**values)
