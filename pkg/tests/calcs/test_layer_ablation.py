import pytest

from tracedit.calcs import LayerAblation
from tracedit._private.interface import WrappedFunctionException

import os
import json

def test_LayerAblation(tiny_pipeline,tmpdir):

    cwd = os.getcwd()
    os.chdir(tmpdir)

    exp = LayerAblation({"corpus":tiny_pipeline["corpus"],
                         "base":tiny_pipeline["base"],
                         "seeds":[0],
                         "r_w":2,
                         "precision":"f64"})

    budgets = exp._band_budgets({"early":(1,),"all":(1,2,3)})
    assert budgets["all"] == 3*budgets["early"]

    df = exp.run(output_directory="out",domain="restaurant")

    # all is always added
    assert list(df["layers"]) == ["none","early","mid","late","all"]
    assert list(df["experiment"]) == ["no-edit"] + ["ablate-layers"]*4
    assert set(df["domain_pair"]) == {"restaurant->restaurant"}

    # one layer per band in a three layer model, so the budgets match
    thirds = df[df["layers"].isin(["early","mid","late"])]
    assert len(set(thirds["trainable_params"])) == 1
    all_row = df[df["layers"] == "all"]
    assert int(all_row["trainable_params"].iloc[0]) == 3*int(thirds["trainable_params"].iloc[0])

    with open(os.path.join("out","manifest.json")) as f:
        manifest = json.load(f)
    assert manifest["calc_params"]["bands"] == {"early":[1],"mid":[2],"late":[3],"all":[1,2,3]}

    # custom bands keep their names
    with pytest.warns(UserWarning,match="differ in size"):
        df = exp.run(output_directory="custom",domain="device",bands=["1-2","3"])
    assert list(df["layers"]) == ["none","1-2","3","all"]

    # overlapping bands
    with pytest.raises(WrappedFunctionException):
        exp.run(output_directory="bad",bands=["1-2","2-3"])

    os.chdir(cwd)
