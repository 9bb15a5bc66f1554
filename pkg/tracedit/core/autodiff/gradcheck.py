"""
Central finite-difference oracle for the analytic gradients.
"""

from tracedit._private.check.standard import check_float
from .tape import GradientTape
from .tensor import Tensor

import numpy as np

def _scalar(value):
    """
    Return value (Tensor or number) as a python float, refusing NaN.
    """

    if issubclass(type(value),Tensor):
        if value.size != 1:
            err = f"\nf must return a scalar, got shape {value.shape}\n\n"
            raise ValueError(err)
        value = value.item()

    value = float(value)
    if np.isnan(value):
        err = "\nf returned NaN during the finite difference check.\n\n"
        raise ValueError(err)

    return value

def finite_difference_check(f,params,eps=1e-5,floor=1e-12):
    """
    Compare tape gradients against central finite differences.

    Parameters
    ----------
    f : callable
        f(params) -> scalar Tensor. Must be deterministic and must compute
        only from the tensors it is handed.
    params : list of Tensor
        parameters to check (requires_grad=True). Use float64 tensors.
    eps : float, default=1e-5
        finite difference step
    floor : float, default=1e-12
        smallest denominator of the relative error, so coordinates whose
        gradient is round-off sized are compared in absolute terms

    Returns
    -------
    max_rel_error : float
        max over every coordinate of every parameter of
        |analytic - numeric|/max(|analytic|,|numeric|,floor)
    """

    eps = check_float(eps,"eps",minimum_allowed=0,minimum_inclusive=False)
    floor = check_float(floor,"floor",minimum_allowed=0,minimum_inclusive=False)
    params = list(params)

    with GradientTape() as tape:
        loss = f(params)
    _scalar(loss)
    grads = tape.backward(loss,params)

    max_err = 0.0
    for k, p in enumerate(params):

        analytic = grads[p].data.reshape(-1)
        base = p.numpy().reshape(-1)

        for j in range(base.size):

            values = []
            for step in (eps,-eps):
                moved = base.copy()
                moved[j] += step
                trial = list(params)
                trial[k] = Tensor(moved.reshape(p.shape),dtype=p.dtype)
                values.append(_scalar(f(trial)))

            numeric = (values[0] - values[1])/(2*eps)
            a = float(analytic[j])
            denom = max(abs(a),abs(numeric),floor)
            max_err = max(max_err,abs(a - numeric)/denom)

    return max_err
