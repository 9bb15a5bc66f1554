"""
Functions for miscellaneous tasks.
"""

import numpy as np

import copy
import hashlib

def prep_for_json(some_dict,work_on_copy=True):
    """
    Prepare a dictionary for writing to json. Converts any np.ndarray, tuple,
    or set to lists and any numpy datatypes to standard types. Works
    recursively through nested dictionaries and lists.

    Parameters
    ----------
    some_dict : dict
        dictionary to write
    work_on_copy : bool, default=True
        clean a deep copy rather than some_dict itself

    Returns
    -------
    cleaned_dict : dict
        cleaned up dictionary
    """

    if not issubclass(type(some_dict),dict):
        err = f"\nsome_dict {some_dict} should be a dictionary\n\n"
        raise ValueError(err)

    if work_on_copy:
        some_dict = copy.deepcopy(some_dict)

    for k in list(some_dict.keys()):
        some_dict[k] = _to_builtin(some_dict[k])

    return some_dict

def _to_builtin(v):
    """
    Coerce a single value (possibly a container) to json-writable builtins.
    """

    if issubclass(type(v),dict):
        return prep_for_json(v,work_on_copy=False)

    if issubclass(type(v),np.ndarray):
        return [_to_builtin(x) for x in v.tolist()]

    if issubclass(type(v),(list,tuple,set,frozenset)):
        values = sorted(v) if issubclass(type(v),(set,frozenset)) else v
        return [_to_builtin(x) for x in values]

    v_type = type(v)
    if v is None or issubclass(v_type,str):
        return v
    if np.issubdtype(v_type,np.bool_):
        return bool(v)
    if np.issubdtype(v_type,np.integer):
        return int(v)
    if np.issubdtype(v_type,np.floating):
        return float(v)

    return v

def array_checksum(arrays):
    """
    sha256 checksum over an ordered mapping of arrays (name, dtype, shape,
    and raw bytes). Used to prove parameters did not change.

    Parameters
    ----------
    arrays : dict
        dictionary keying names to numpy arrays

    Returns
    -------
    checksum : str
        hex digest
    """

    h = hashlib.sha256()
    for name in sorted(arrays):
        a = np.ascontiguousarray(arrays[name])
        h.update(name.encode())
        h.update(str(a.dtype).encode())
        h.update(str(a.shape).encode())
        h.update(a.tobytes())

    return h.hexdigest()
