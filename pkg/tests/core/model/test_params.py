import pytest

from tracedit.core.model import ModelConfig, BaseParams, init_model, parameter_shapes
from tracedit.core.autodiff import Tensor

import numpy as np

def test_parameter_shapes():

    config = ModelConfig(vocab_size=20,n_layers=2,n_heads=2,d_model=4,d_ff=6,max_seq=5)
    shapes = parameter_shapes(config)

    assert list(shapes)[:2] == ["embed.token","embed.position"]
    assert list(shapes)[-2:] == ["final_norm","unembed"]
    assert shapes["embed.token"] == (20,4)
    assert shapes["embed.position"] == (5,4)
    assert shapes["layer2.W_O"] == (4,4)
    assert shapes["layer1.W_in"] == (4,6)
    assert shapes["layer1.W_out"] == (6,4)
    assert shapes["unembed"] == (4,20)
    assert "layer3.W_O" not in shapes

    # 2 embeddings + 8 per layer + 2
    assert len(shapes) == 2 + 8*2 + 2

def test_init_model(tiny_config):

    a = init_model(tiny_config,precision="f64")
    b = init_model(tiny_config,precision="f64")
    assert a.checksum() == b.checksum()
    assert a.dtype == np.float64

    f32 = init_model(tiny_config)
    assert f32.dtype == np.float32

    assert np.all(a["layer1.attn_norm"].data == 1)
    assert np.all(a["final_norm"].data == 1)
    for _, t in a.items():
        assert t.requires_grad is False

    other = ModelConfig(**{**tiny_config.to_dict(),"init_seed":1})
    c = init_model(other,precision="f64")
    assert c.checksum() != a.checksum()

    with pytest.raises(ValueError):
        init_model(tiny_config.to_dict())
    with pytest.raises(ValueError):
        init_model(tiny_config,precision="f16")

def test_BaseParams(tiny_params):

    config = tiny_params.config
    shapes = parameter_shapes(config)
    assert len(tiny_params) == len(shapes)
    assert "unembed" in tiny_params
    assert list(tiny_params) == list(shapes)
    assert tiny_params.num_params() == sum(int(np.prod(s)) for s in shapes.values())
    assert tiny_params.layer(2,"W_O") is tiny_params["layer2.W_O"]
    assert "BaseParams" in repr(tiny_params)

    tensors = dict(tiny_params.items())
    tensors.pop("unembed")
    with pytest.raises(ValueError):
        BaseParams(config,tensors)

    tensors = dict(tiny_params.items())
    tensors["unembed"] = Tensor(np.zeros((2,2)),dtype=np.float64)
    with pytest.raises(ValueError):
        BaseParams(config,tensors)

    # mixed precision
    tensors = dict(tiny_params.items())
    tensors["unembed"] = tensors["unembed"].astype(np.float32)
    with pytest.raises(ValueError):
        BaseParams(config,tensors)

    with pytest.raises(ValueError):
        BaseParams(config.to_dict(),dict(tiny_params.items()))

def test_BaseParams_replace(tiny_params):

    new = Tensor(np.zeros(tiny_params["final_norm"].shape),dtype=np.float64)
    replaced = tiny_params.replace({"final_norm":new})
    assert np.all(replaced["final_norm"].data == 0)
    assert np.all(tiny_params["final_norm"].data == 1)
    assert replaced.checksum() != tiny_params.checksum()

def test_BaseParams_astype(tiny_params):

    f32 = tiny_params.astype("f32")
    assert f32.dtype == np.float32
    assert f32.astype(np.float64).dtype == np.float64

    grad = tiny_params.with_grad()
    assert all(t.requires_grad for _, t in grad.items())
    assert grad.checksum() == tiny_params.checksum()

    arrays = tiny_params.to_arrays()
    assert set(arrays) == set(tiny_params)
    assert issubclass(type(arrays["unembed"]),np.ndarray)
