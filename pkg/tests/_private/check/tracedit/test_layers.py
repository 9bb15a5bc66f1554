import pytest

from tracedit._private.check.tracedit import layer_bands
from tracedit._private.check.tracedit import check_layers
from tracedit._private.check.tracedit import check_bands

def test_layer_bands():

    bands = layer_bands(8)
    assert bands["early"] == (1,2,3)
    assert bands["mid"] == (4,5,6)
    assert bands["late"] == (7,8)
    assert bands["all"] == tuple(range(1,9))

    bands = layer_bands(3)
    assert bands["early"] == (1,)
    assert bands["mid"] == (2,)
    assert bands["late"] == (3,)

    bands = layer_bands(9)
    assert [len(bands[k]) for k in ["early","mid","late"]] == [3,3,3]

    # too few layers for three bands
    bands = layer_bands(2)
    assert bands["late"] == ()

    with pytest.raises(ValueError):
        layer_bands(0)

def test_check_layers():

    assert check_layers("mid",8) == (4,5,6)
    assert check_layers(" Late ",8) == (7,8)
    assert check_layers("all",3) == (1,2,3)
    assert check_layers("4,5,6",8) == (4,5,6)
    assert check_layers("4-6",8) == (4,5,6)
    assert check_layers("1-2,7",8) == (1,2,7)
    assert check_layers("6,4",8) == (4,6)
    assert check_layers([3,1],8) == (1,3)
    assert check_layers((2,),8) == (2,)
    assert check_layers([],8) == ()

    bad_values = ["9","0","4-2","1,1","middle",[0],[9],[1,1],[1.5],5,None,
                  {"a":1},int]
    for b in bad_values:
        print(b)
        with pytest.raises(ValueError):
            check_layers(b,8)

    # empty band
    with pytest.raises(ValueError):
        check_layers("late",2)

def test_check_bands():

    bands = check_bands(["early","late"],8)
    assert bands == {"early":(1,2,3),"late":(7,8)}
    assert list(bands) == ["early","late"]

    bands = check_bands(["1-2","5"],8)
    assert bands == {"1-2":(1,2),"5":(5,)}

    bands = check_bands([[1,2],[3]],8)
    assert bands == {"1,2":(1,2),"3":(3,)}

    bands = check_bands({"low":"1-4","high":[5,6,7,8]},8)
    assert bands == {"low":(1,2,3,4),"high":(5,6,7,8)}

    # all may overlap everything
    bands = check_bands(["early","all"],8)
    assert bands["all"] == tuple(range(1,9))

    with pytest.raises(ValueError):
        check_bands(["1-4","4-6"],8)
    with pytest.raises(ValueError):
        check_bands("early",8)
    with pytest.raises(ValueError):
        check_bands(5,8)
    with pytest.raises(ValueError):
        check_bands(["9"],8)
