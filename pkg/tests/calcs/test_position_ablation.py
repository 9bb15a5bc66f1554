import pytest

from tracedit.calcs import PositionAblation
from tracedit._private.interface import WrappedFunctionException

import os
import json

def _spec(tiny_pipeline,**kwargs):

    spec = {"corpus":tiny_pipeline["corpus"],
            "base":tiny_pipeline["base"],
            "seeds":[0],
            "r_w":2,
            "precision":"f64"}
    spec.update(kwargs)
    return spec

def test_PositionAblation(tiny_pipeline,tmpdir):

    cwd = os.getcwd()
    os.chdir(tmpdir)

    exp = PositionAblation(_spec(tiny_pipeline))
    df = exp.run(output_directory="out",domain="device",dev_fraction=0.3)

    assert list(df["policy"]) == ["none","aspect","last","mid"]
    assert list(df["experiment"]) == ["no-edit"] + ["ablate-positions"]*3

    # every policy trains the same number of parameters
    edited = df[df["experiment"] == "ablate-positions"]
    assert len(set(edited["trainable_params"])) == 1

    with open(os.path.join("out","manifest.json")) as f:
        manifest = json.load(f)
    assert manifest["calc_params"]["policies"] == ["aspect","last","mid"]
    assert manifest["calc_params"]["dev_fraction"] == 0.3

    df = exp.run(output_directory="aliases",domain="device",
                 policies=["last-token","random-mid-token"],dev_fraction=0.3)
    assert list(df["policy"]) == ["none","last","mid"]

    for bad in [{"dev_fraction":0},{"dev_fraction":1},{"policies":["everywhere"]},
                {"dev_fraction":0.001}]:
        print(bad)
        with pytest.raises(WrappedFunctionException):
            exp.run(output_directory="bad",domain="device",**bad)

    # weight-only suites have no positions to ablate
    exp = PositionAblation(_spec(tiny_pipeline,mode="weight"))
    with pytest.raises(WrappedFunctionException):
        exp.run(output_directory="weight")

    os.chdir(cwd)
