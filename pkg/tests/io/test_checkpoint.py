import pytest

from tracedit.io import save_checkpoint, load_checkpoint, read_checkpoint_manifest
from tracedit.io.checkpoint import MAGIC
from tracedit.core.model import BaseParams
from tracedit.core.editing import EditSuite
from tracedit.core.errors import CheckpointError

import numpy as np

import json
import os

def _split(path):
    """
    Return (manifest dict, payload bytes) of a checkpoint file.
    """

    with open(path,"rb") as f:
        raw = f.read()
    n = int(np.frombuffer(raw[8:16],dtype="<u8")[0])
    start = 16 + n + (8 - n % 8) % 8
    return json.loads(raw[16:16 + n].decode("utf-8")), raw[start:]

def _rewrite(path,manifest,payload):

    text = json.dumps(manifest,sort_keys=True).encode("utf-8")
    with open(path,"wb") as f:
        f.write(MAGIC)
        f.write(np.array([len(text)],dtype="<u8").tobytes())
        f.write(text)
        f.write(b"\x00"*((8 - len(text) % 8) % 8))
        f.write(payload)

def test_save_checkpoint(tiny_params,tmpdir):

    cwd = os.getcwd()
    os.chdir(tmpdir)

    save_checkpoint(tiny_params,"base.ckpt",extra={"template":"default",
                                                   "value":np.float64(1.5)})

    with open("base.ckpt","rb") as f:
        assert f.read(8) == b"TRACEDIT"

    manifest = read_checkpoint_manifest("base.ckpt")
    assert manifest["format"] == "TRACEDIT-CKPT"
    assert manifest["format_version"] == 1
    assert manifest["kind"] == "base-model"
    assert manifest["extra"] == {"template":"default","value":1.5}
    assert manifest["meta"]["model_config"] == tiny_params.config.to_dict()

    names = [t["name"] for t in manifest["tensors"]]
    assert names == list(tiny_params)
    for t in manifest["tensors"]:
        assert t["byte_offset"] % 8 == 0
        assert t["dtype"] == "float64"

    with pytest.raises(ValueError):
        save_checkpoint(tiny_params.to_arrays(),"bad.ckpt")

    os.chdir(cwd)

def test_load_checkpoint(tiny_params,tiny_suite,tmpdir):

    cwd = os.getcwd()
    os.chdir(tmpdir)

    save_checkpoint(tiny_params,"base.ckpt")
    loaded = load_checkpoint("base.ckpt")
    assert issubclass(type(loaded),BaseParams)
    assert loaded.config == tiny_params.config
    assert loaded.checksum() == tiny_params.checksum()
    assert loaded.dtype == np.float64

    f32 = tiny_params.astype("f32")
    save_checkpoint(f32,"base32.ckpt")
    loaded = load_checkpoint("base32.ckpt")
    assert loaded.dtype == np.float32
    assert loaded.checksum() == f32.checksum()

    save_checkpoint(tiny_suite,"suite.ckpt")
    suite = load_checkpoint("suite.ckpt")
    assert issubclass(type(suite),EditSuite)
    assert suite.checksum() == tiny_suite.checksum()
    assert suite.meta() == tiny_suite.meta()
    assert all(not t.requires_grad for t in suite.parameters().values())
    assert read_checkpoint_manifest("suite.ckpt")["kind"] == "edit-suite"

    with pytest.raises(FileNotFoundError):
        load_checkpoint("missing.ckpt")

    os.chdir(cwd)

def test_load_checkpoint_errors(tiny_params,tmpdir):

    cwd = os.getcwd()
    os.chdir(tmpdir)

    save_checkpoint(tiny_params,"base.ckpt")
    manifest, payload = _split("base.ckpt")

    # bad magic
    with open("bad.ckpt","wb") as f:
        f.write(b"NOTMAGIC" + b"\x00"*16)
    with pytest.raises(CheckpointError):
        load_checkpoint("bad.ckpt")

    # manifest length past the end of the file
    with open("bad.ckpt","wb") as f:
        f.write(MAGIC + np.array([1000],dtype="<u8").tobytes() + b"{}")
    with pytest.raises(CheckpointError):
        load_checkpoint("bad.ckpt")

    # manifest is not json
    with open("bad.ckpt","wb") as f:
        f.write(MAGIC + np.array([4],dtype="<u8").tobytes() + b"{{{{")
    with pytest.raises(CheckpointError):
        load_checkpoint("bad.ckpt")

    # unknown version
    changed = dict(manifest)
    changed["format_version"] = 2
    _rewrite("bad.ckpt",changed,payload)
    with pytest.raises(CheckpointError):
        load_checkpoint("bad.ckpt")

    # unknown kind
    changed = dict(manifest)
    changed["kind"] = "optimizer"
    _rewrite("bad.ckpt",changed,payload)
    with pytest.raises(CheckpointError):
        load_checkpoint("bad.ckpt")

    # tensor shape that does not match its byte length
    changed = json.loads(json.dumps(manifest))
    changed["tensors"][0]["shape"] = [1,1]
    _rewrite("bad.ckpt",changed,payload)
    with pytest.raises(CheckpointError):
        load_checkpoint("bad.ckpt")

    # tensors that do not match the stored config
    changed = json.loads(json.dumps(manifest))
    changed["meta"]["model_config"]["d_ff"] += 2
    _rewrite("bad.ckpt",changed,payload)
    with pytest.raises(CheckpointError):
        load_checkpoint("bad.ckpt")

    # truncated payload
    _rewrite("bad.ckpt",manifest,payload[:-16])
    with pytest.raises(CheckpointError):
        load_checkpoint("bad.ckpt")

    # unchanged rewrite still loads
    _rewrite("good.ckpt",manifest,payload)
    assert load_checkpoint("good.ckpt").checksum() == tiny_params.checksum()

    os.chdir(cwd)
