"""
Counter-based random streams. Every draw is keyed by (seed, purpose,
counter) through a Philox generator, so streams with different purposes are
independent and replaying a stream reproduces it on any platform.
"""

from tracedit._private.check.standard import check_int
from tracedit._private.check.standard import check_float
from tracedit._private.check.standard import check_choice
from tracedit._private.check.standard import check_iter
from tracedit.core.autodiff import Tensor

import numpy as np

PURPOSES = ("data-gen","init","corruption-noise","shuffle")

class RngStream:
    """
    Purpose-labelled deterministic random stream.

    Parameters
    ----------
    purpose : str
        one of data-gen, init, corruption-noise, shuffle
    seed : int
        64-bit seed
    counter : int, default=0
        index of the next draw. Draws can be addressed directly (for example
        one corruption draw per sample id) by constructing a stream with the
        desired counter.
    """

    def __init__(self,purpose,seed,counter=0):

        self._purpose = check_choice(purpose,PURPOSES,"purpose")
        self._seed = check_int(seed,"seed",minimum_allowed=0,maximum_allowed=2**64 - 1)
        self._counter = check_int(counter,"counter",minimum_allowed=0)

    def generator(self):
        """
        numpy Generator for the current counter value. Advances the counter.
        """

        key = np.random.SeedSequence([self._seed,
                                      PURPOSES.index(self._purpose),
                                      self._counter])
        self._counter += 1

        bit_gen = np.random.Philox(key=key.generate_state(2,np.uint64))
        return np.random.Generator(bit_gen)

    def fork(self,counter):
        """
        Copy of this stream positioned at counter.
        """
        return RngStream(self._purpose,self._seed,counter)

    @property
    def purpose(self):
        return self._purpose

    @property
    def seed(self):
        return self._seed

    @property
    def counter(self):
        return self._counter

    def __repr__(self):
        return f"RngStream(purpose='{self._purpose}', seed={self._seed}, counter={self._counter})"


def rng_draw(stream,shape,distribution="gaussian",mean=0.0,std=1.0,
             low=0.0,high=1.0,dtype=np.float64):
    """
    Draw a tensor from stream. Deterministic given (purpose, seed, counter);
    advances the counter by one.

    Parameters
    ----------
    stream : RngStream
        stream to draw from
    shape : int or list-like of int
        shape of the tensor
    distribution : str, default="gaussian"
        "gaussian" (uses mean, std) or "uniform" (uses low, high)
    mean : float, default=0
        gaussian mean
    std : float, default=1
        gaussian standard deviation (>= 0)
    low, high : float
        uniform bounds
    dtype : numpy dtype, default=np.float64
        dtype of the returned tensor

    Returns
    -------
    Tensor
        drawn values (no gradient)
    """

    if not issubclass(type(stream),RngStream):
        err = f"\nstream should be an RngStream, not {type(stream)}\n\n"
        raise ValueError(err)

    if not hasattr(shape,"__iter__"):
        shape = (shape,)
    shape = check_iter(shape,"shape",minimum_allowed=1)
    shape = tuple(check_int(s,"shape entry",minimum_allowed=1) for s in shape)

    if distribution == "gaussian":
        mean = check_float(mean,"mean")
        std = check_float(std,"std",minimum_allowed=0)
        values = stream.generator().standard_normal(shape)*std + mean
    elif distribution == "uniform":
        low = check_float(low,"low")
        high = check_float(high,"high",minimum_allowed=low)
        values = stream.generator().uniform(low,high,size=shape)
    else:
        err = f"\ndistribution '{distribution}' not recognized. Should be\n"
        err += "'gaussian' or 'uniform'.\n\n"
        raise ValueError(err)

    return Tensor(values,dtype=dtype)
