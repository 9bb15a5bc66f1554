"""
Versioned binary container of named tensors for base models and edit suites.

Layout: the 8 ASCII bytes "TRACEDIT", an unsigned 64-bit little-endian
manifest length, the JSON manifest (sorted keys), zero padding to an 8-byte
boundary, then the tensor payloads. Every payload is little-endian and
starts on an 8-byte boundary; byte_offset in the manifest is relative to the
start of the payload block.
"""

from tracedit.core.model import BaseParams, ModelConfig
from tracedit.core.editing import EditSuite
from tracedit.core.errors import CheckpointError
from tracedit._private.utility import prep_for_json
from tracedit.__version__ import __version__

import numpy as np

import json
import os

MAGIC = b"TRACEDIT"
FORMAT = "TRACEDIT-CKPT"
FORMAT_VERSION = 1
KINDS = ("base-model","edit-suite")

_DTYPES = {"float32":"<f4","float64":"<f8"}

def _pad(n):
    return (8 - n % 8) % 8

def _header(kind,meta,arrays,extra):

    table = []
    offset = 0
    for name, arr in arrays.items():
        length = arr.size*arr.itemsize
        table.append({"name":name,
                      "dtype":arr.dtype.name,
                      "shape":list(arr.shape),
                      "byte_offset":offset,
                      "byte_length":length})
        offset += length + _pad(length)

    manifest = {"format":FORMAT,
                "format_version":FORMAT_VERSION,
                "kind":kind,
                "meta":meta,
                "extra":extra,
                "tensors":table,
                "tracedit_version":__version__}

    return json.dumps(manifest,sort_keys=True).encode("utf-8")

def save_checkpoint(obj,path,extra=None):
    """
    Write a BaseParams or EditSuite to path.

    Parameters
    ----------
    obj : BaseParams or EditSuite
        object to save
    path : str
        output file
    extra : dict, optional
        json-writable information stored with the manifest (for a base
        model: the vocabulary and training settings)
    """

    if extra is None:
        extra = {}

    if issubclass(type(obj),BaseParams):
        kind = "base-model"
        meta = {"model_config":obj.config.to_dict()}
    elif issubclass(type(obj),EditSuite):
        kind = "edit-suite"
        meta = obj.meta()
    else:
        err = f"\nsave_checkpoint saves BaseParams or EditSuite, not {type(obj)}\n\n"
        raise ValueError(err)

    arrays = {}
    for name, arr in obj.to_arrays().items():
        if arr.dtype.name not in _DTYPES:
            err = f"\ntensor '{name}' has unsupported dtype {arr.dtype}\n\n"
            raise ValueError(err)
        arrays[name] = np.ascontiguousarray(arr,dtype=_DTYPES[arr.dtype.name])

    manifest = _header(kind,meta,arrays,prep_for_json(extra))

    with open(path,"wb") as f:
        f.write(MAGIC)
        f.write(np.array([len(manifest)],dtype="<u8").tobytes())
        f.write(manifest)
        f.write(b"\x00"*_pad(len(manifest)))
        for arr in arrays.values():
            raw = arr.tobytes()
            f.write(raw)
            f.write(b"\x00"*_pad(len(raw)))

def _read_manifest(raw,path):

    if len(raw) < 16 or raw[:8] != MAGIC:
        err = f"\n'{path}' is not a tracedit checkpoint (bad magic)\n\n"
        raise CheckpointError(err)

    n = int(np.frombuffer(raw[8:16],dtype="<u8")[0])
    if 16 + n > len(raw):
        err = f"\n'{path}' is truncated inside its manifest\n\n"
        raise CheckpointError(err)

    try:
        manifest = json.loads(raw[16:16 + n].decode("utf-8"))
    except (UnicodeDecodeError,json.JSONDecodeError) as e:
        err = f"\n'{path}' has an unreadable manifest\n\n"
        raise CheckpointError(err) from e

    if manifest.get("format") != FORMAT or manifest.get("format_version") != FORMAT_VERSION:
        err = f"\n'{path}' has format {manifest.get('format')} version "
        err += f"{manifest.get('format_version')}; expected {FORMAT} version {FORMAT_VERSION}\n\n"
        raise CheckpointError(err)

    if manifest.get("kind") not in KINDS:
        err = f"\n'{path}' has unknown kind '{manifest.get('kind')}'\n\n"
        raise CheckpointError(err)

    return manifest, 16 + n + _pad(n)

def _read_tensors(raw,manifest,start,path):

    arrays = {}
    for entry in manifest["tensors"]:

        name = entry["name"]
        if entry["dtype"] not in _DTYPES:
            err = f"\ntensor '{name}' in '{path}' has unsupported dtype {entry['dtype']}\n\n"
            raise CheckpointError(err)

        dtype = np.dtype(_DTYPES[entry["dtype"]])
        shape = tuple(entry["shape"])
        expected = int(np.prod(shape,dtype=np.int64))*dtype.itemsize
        if entry["byte_length"] != expected:
            err = f"\ntensor '{name}' in '{path}': manifest shape {shape} needs {expected} "
            err += f"bytes but byte_length is {entry['byte_length']}\n\n"
            raise CheckpointError(err)

        if entry["byte_offset"] % 8 != 0:
            err = f"\ntensor '{name}' in '{path}' is not 8-byte aligned\n\n"
            raise CheckpointError(err)

        lo = start + entry["byte_offset"]
        hi = lo + expected
        if hi > len(raw):
            err = f"\n'{path}' is truncated: payload of tensor '{name}' is incomplete\n\n"
            raise CheckpointError(err)

        arr = np.frombuffer(raw[lo:hi],dtype=dtype).reshape(shape)
        arrays[name] = arr.astype(dtype.newbyteorder("="))

    return arrays

def load_checkpoint(path):
    """
    Read a checkpoint written by save_checkpoint.

    Parameters
    ----------
    path : str
        checkpoint file

    Returns
    -------
    BaseParams or EditSuite
        loaded object (tensors do not require gradients)

    Raises
    ------
    CheckpointError
        bad magic, unknown version, unreadable manifest, a tensor whose
        shape does not match the manifest or the config, or a truncated
        payload
    """

    if not os.path.isfile(path):
        err = f"\ncheckpoint '{path}' does not exist\n\n"
        raise FileNotFoundError(err)

    with open(path,"rb") as f:
        raw = f.read()

    manifest, start = _read_manifest(raw,path)
    arrays = _read_tensors(raw,manifest,start,path)
    meta = manifest.get("meta",{})

    try:
        if manifest["kind"] == "base-model":
            config = ModelConfig.from_dict(meta["model_config"])
            return BaseParams(config,arrays)

        config = ModelConfig.from_dict(meta["model_config"])
        suite = EditSuite(config,
                          layers=meta["layers"],
                          r_w=meta["r_w"],
                          r_rep=meta["r_rep"],
                          tensors=arrays,
                          policy=meta["policy"],
                          mode=meta["mode"],
                          seed=meta["seed"])
        return suite.frozen()

    except (KeyError,ValueError) as e:
        err = f"\n'{path}' does not describe a valid {manifest['kind']}:\n{e}\n\n"
        raise CheckpointError(err) from e

def read_checkpoint_manifest(path):
    """
    Manifest dictionary of a checkpoint without loading the payloads.
    """

    with open(path,"rb") as f:
        raw = f.read()

    manifest, _ = _read_manifest(raw,path)
    return manifest
