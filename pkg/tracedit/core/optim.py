"""
AdamW with decoupled weight decay.
"""

from tracedit._private.check.standard import check_float
from tracedit.core.autodiff import Tensor
from tracedit.core.errors import NonFiniteError

import numpy as np

class OptimizerState:
    """
    Moment accumulators, step counter, and hyperparameters for one parameter
    group.

    Parameters
    ----------
    params : dict
        dictionary keying parameter name to Tensor. Used only to size the
        moment accumulators.
    lr : float, default=3e-4
        learning rate (>= 0)
    betas : tuple, default=(0.9,0.999)
        exponential decay rates of the first and second moments
    eps : float, default=1e-8
        denominator offset
    weight_decay : float, default=0.0
        decoupled weight decay
    """

    def __init__(self,
                 params,
                 lr=3e-4,
                 betas=(0.9,0.999),
                 eps=1e-8,
                 weight_decay=0.0):

        self.lr = check_float(lr,"lr",minimum_allowed=0)
        if len(betas) != 2:
            err = f"\nbetas should be a pair of floats, got {betas}\n\n"
            raise ValueError(err)
        self.betas = tuple(check_float(b,"beta",minimum_allowed=0,maximum_allowed=1,
                                       maximum_inclusive=False)
                           for b in betas)
        self.eps = check_float(eps,"eps",minimum_allowed=0,minimum_inclusive=False)
        self.weight_decay = check_float(weight_decay,"weight_decay",minimum_allowed=0)

        self.m = {}
        self.v = {}
        for name, p in params.items():
            self.m[name] = np.zeros(p.shape,dtype=np.float64)
            self.v[name] = np.zeros(p.shape,dtype=np.float64)

        self.step = 0

    def to_dict(self):
        return {"lr":self.lr,
                "betas":list(self.betas),
                "eps":self.eps,
                "weight_decay":self.weight_decay,
                "step":self.step}


def optimizer_step(params,grads,state):
    """
    Apply one AdamW update.

    p <- p - lr*weight_decay*p - lr*m_hat/(sqrt(v_hat) + eps)

    Parameters
    ----------
    params : dict
        dictionary keying name to parameter Tensor
    grads : dict
        dictionary keying the same names to gradient Tensors (or arrays)
    state : OptimizerState
        state for this parameter group. Updated in place.

    Returns
    -------
    new_params : dict
        dictionary keying name to updated Tensor (same dtype and
        requires_grad as the input)
    state : OptimizerState
        the updated state
    """

    if set(params) != set(state.m):
        err = "\nparameter names do not match the optimizer state:\n"
        err += f"    params: {sorted(params)}\n"
        err += f"    state:  {sorted(state.m)}\n\n"
        raise ValueError(err)

    checked = {}
    for name, p in params.items():

        if name not in grads:
            err = f"\nno gradient for parameter '{name}'\n\n"
            raise ValueError(err)

        g = grads[name]
        g = g.data if issubclass(type(g),Tensor) else np.asarray(g)
        if g.shape != p.shape or state.m[name].shape != p.shape:
            err = f"\nshape mismatch for '{name}': parameter {p.shape}, "
            err += f"gradient {g.shape}, state {state.m[name].shape}\n\n"
            raise ValueError(err)

        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"optimizer_step ({name} gradient)")

        checked[name] = g

    state.step += 1
    b1, b2 = state.betas
    bias1 = 1 - b1**state.step
    bias2 = 1 - b2**state.step

    new_params = {}
    for name, p in params.items():

        g = checked[name].astype(np.float64)
        state.m[name] = b1*state.m[name] + (1 - b1)*g
        state.v[name] = b2*state.v[name] + (1 - b2)*g*g

        m_hat = state.m[name]/bias1
        v_hat = state.v[name]/bias2

        value = p.data.astype(np.float64)
        value = value - state.lr*state.weight_decay*value
        value = value - state.lr*m_hat/(np.sqrt(v_hat) + state.eps)

        new_params[name] = Tensor(value,
                                  requires_grad=p.requires_grad,
                                  dtype=p.dtype,
                                  name=p.name)

    return new_params, state
