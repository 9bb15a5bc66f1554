import pytest

from tracedit.calcs.read_json import _validate_calc_kwargs
from tracedit.calcs.read_json import read_json
from tracedit.calcs.read_json import read_config_path
from tracedit.calcs import InDomainExperiment

import os
import json

def test__validate_calc_kwargs():

    # No arg type/error checking. Internal function.

    calc_type = "dummy" # only used in the error message

    class TestClassSomeRequired:
        def __init__(self,
                     required_one,
                     required_two,
                     not_required_one=1,
                     not_required_two=2):
            """
            Docstring.
            """
            pass

    class TestClassNoneRequired:
        def __init__(self,
                     not_required_one=1,
                     not_required_two=2):
            """
            Docstring.
            """
            pass

    kwargs = {}
    with pytest.raises(ValueError):
        _validate_calc_kwargs(calc_type=calc_type,
                              calc_function=TestClassSomeRequired.__init__,
                              kwargs=kwargs)

    new_kwargs = _validate_calc_kwargs(calc_type=calc_type,
                                       calc_function=TestClassNoneRequired.__init__,
                                       kwargs=kwargs)
    assert new_kwargs is kwargs

    kwargs = {"required_one":1}
    with pytest.raises(ValueError):
        _validate_calc_kwargs(calc_type=calc_type,
                              calc_function=TestClassSomeRequired.__init__,
                              kwargs=kwargs)

    kwargs = {"required_one":1,"required_two":2}
    new_kwargs = _validate_calc_kwargs(calc_type=calc_type,
                                       calc_function=TestClassSomeRequired.__init__,
                                       kwargs=kwargs)
    assert new_kwargs is kwargs

    kwargs = {"required_one":1,"required_two":2,"not_required_two":5}
    new_kwargs = _validate_calc_kwargs(calc_type=calc_type,
                                       calc_function=TestClassSomeRequired.__init__,
                                       kwargs=kwargs)
    assert new_kwargs is kwargs

    kwargs = {"required_one":1,"required_two":2,"extra":5}
    with pytest.raises(ValueError):
        _validate_calc_kwargs(calc_type=calc_type,
                              calc_function=TestClassSomeRequired.__init__,
                              kwargs=kwargs)

    kwargs = {"extra":5}
    with pytest.raises(ValueError):
        _validate_calc_kwargs(calc_type=calc_type,
                              calc_function=TestClassNoneRequired.__init__,
                              kwargs=kwargs)

def test_read_config_path(tmpdir):

    json_file = os.path.join(str(tmpdir),"calc.json")
    assert read_config_path(json_file,"corpus.jsonl") == os.path.join(str(tmpdir),"corpus.jsonl")
    assert read_config_path(json_file,"/abs/corpus.jsonl") == "/abs/corpus.jsonl"
    assert read_config_path(json_file,None) is None

def test_read_json(tiny_pipeline,tmpdir):

    cwd = os.getcwd()
    os.chdir(tmpdir)

    spec = {"corpus":tiny_pipeline["corpus"],
            "base":tiny_pipeline["base"],
            "seeds":[0]}

    calc = {"calc_type":"in-domain",
            "spec":spec,
            "calc_params":{"output_directory":"out","domains":["device"]}}
    with open("calc.json","w") as f:
        json.dump(calc,f)

    experiment, calc_params = read_json("calc.json")
    assert issubclass(type(experiment),InDomainExperiment)
    assert calc_params == {"output_directory":"out","domains":["device"]}
    assert experiment.spec.seeds == [0]

    # relative paths are resolved against the json file
    os.mkdir("inputs")
    rel = dict(calc)
    rel["spec"] = dict(spec,corpus=os.path.relpath(tiny_pipeline["corpus"],"inputs"))
    with open(os.path.join("inputs","calc.json"),"w") as f:
        json.dump(rel,f)
    experiment, _ = read_json(os.path.join("inputs","calc.json"))
    assert len(experiment.samples) == 64

    # run() has defaults for everything, so calc_params may be empty or absent
    for extra in [{"calc_params":{}},{}]:
        with open("defaults.json","w") as f:
            json.dump(dict({"calc_type":"in-domain","spec":spec},**extra),f)
        experiment, calc_params = read_json("defaults.json")
        assert issubclass(type(experiment),InDomainExperiment)
        assert calc_params == {}

    bad_inputs = [{"spec":spec},
                  {"calc_type":"not_a_calc","spec":spec},
                  {"calc_type":5,"spec":spec},
                  {"calc_type":"in-domain"},
                  {"calc_type":"in-domain","spec":spec,
                   "calc_params":{"output_directory":"out","not_a_param":1}},
                  {"calc_type":"in-domain","spec":dict(spec,not_a_key=1),
                   "calc_params":{"output_directory":"out"}}]

    for bad in bad_inputs:
        print(bad)
        with open("bad.json","w") as f:
            json.dump(bad,f)
        with pytest.raises(ValueError):
            read_json("bad.json")

    with pytest.raises(ValueError):
        read_json("missing.json")

    os.chdir(cwd)
