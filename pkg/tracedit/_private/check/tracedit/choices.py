"""
Validate the small enumerated choices (position policy, noise scope,
precision, edit mode) and edit ranks.
"""

from tracedit._private.check.standard import check_choice
from tracedit._private.check.standard import check_int

import numpy as np

POSITION_POLICIES = ("aspect","last","mid")
_POLICY_ALIASES = {"aspect-span":"aspect",
                   "last-token":"last",
                   "random-mid":"mid",
                   "random-mid-token":"mid"}

NOISE_SCOPES = ("aspect","all")
_SCOPE_ALIASES = {"aspect-span":"aspect",
                  "all-positions":"all"}

PRECISIONS = {"f32":np.float32,
              "f64":np.float64}

EDIT_MODES = ("hybrid","weight","rep")

def _canonical(value,aliases):
    if issubclass(type(value),str):
        value = value.strip().lower()
        return aliases.get(value,value)
    return value

def check_position_policy(policy):
    """
    Validate a representation-edit position policy. Returns one of "aspect",
    "last" or "mid" (long names such as "aspect-span" or "random-mid-token"
    are accepted).
    """

    policy = _canonical(policy,_POLICY_ALIASES)
    return check_choice(policy,POSITION_POLICIES,"position policy")

def check_noise_scope(scope):
    """
    Validate a corruption scope. Returns "aspect" or "all".
    """

    scope = _canonical(scope,_SCOPE_ALIASES)
    return check_choice(scope,NOISE_SCOPES,"noise scope")

def check_precision(precision):
    """
    Validate a compute precision. Accepts "f32"/"f64" or the numpy float
    types and returns the numpy dtype.
    """

    # np.dtype(None) is float64, so None is rejected before the lookup
    if precision is not None and not issubclass(type(precision),str):
        try:
            dtype = np.dtype(precision)
        except (TypeError,ValueError,KeyError):
            dtype = None
        if dtype is not None and dtype in (np.dtype(np.float32),np.dtype(np.float64)):
            return dtype.type

    precision = check_choice(precision,tuple(PRECISIONS),"precision")
    return PRECISIONS[precision]

def check_edit_mode(mode):
    """
    Validate the edit suite mode (hybrid, weight, rep).
    """

    mode = _canonical(mode,{})
    return check_choice(mode,EDIT_MODES,"edit mode")

def check_rank(rank,d_model,variable_name="rank"):
    """
    Validate an edit rank: 1 <= rank <= d_model.
    """

    return check_int(rank,
                     variable_name,
                     minimum_allowed=1,
                     maximum_allowed=d_model)
