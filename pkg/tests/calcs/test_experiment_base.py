import pytest

from tracedit.calcs.experiment_base import Experiment, ExperimentSpec, load_base
from tracedit.calcs.experiment_base import _layer_label
from tracedit.core.model import BaseParams
from tracedit.core.editing import EditSuite
from tracedit.corpus import Vocab, domain_tags
from tracedit.io import save_checkpoint, load_checkpoint
from tracedit.analysis import ReportRow

import numpy as np

import os
import json

class Experiment_no_run(Experiment):
    """
    Bad dummy class. Does not have run defined, so it should throw
    NotImplementedError.
    """

    calc_type = "fake_no_run"

class Experiment_no_calc_type(Experiment):
    """
    Bad dummy class. Does not have calc_type defined, so it should throw
    NotImplementedError.
    """

    def run(self,*args,**kwargs):
        pass

class ExperimentTester(Experiment):
    """
    Experiment cannot be run on its own. This dummy subclass can be used to
    test its core functionality.
    """

    calc_type = "fake"

    def run(self,output_directory,value=1):

        self._prepare_calc(output_directory=output_directory,
                           calc_params={"value":value})

        with open("output_file.txt","w") as f:
            f.write("fake\n")

        rows = [ReportRow(experiment="fake",domain_pair="device->device",
                          layers="mid",policy="aspect",trainable_fraction=0.1,
                          accuracies=[0.5,0.7],seeds=[0,1])]
        return self._complete_calc(rows)

def test_ExperimentSpec(tiny_pipeline):

    spec = ExperimentSpec(corpus=tiny_pipeline["corpus"],base=tiny_pipeline["base"])
    assert spec.seeds == [0,1,2]
    assert spec.layers == "mid"
    assert spec.policy == "aspect"
    assert spec.mode == "hybrid"
    assert spec.r_w == 4
    assert spec.r_rep == 2
    assert spec.precision == "f32"

    config = spec.train_config(5)
    assert config.seed == 5
    assert config.lr_w == spec.lr_w
    assert config.lr_rep == spec.lr_rep

    d = spec.to_dict()
    assert ExperimentSpec.from_dict(d) == spec

    # aliases are normalized
    spec = ExperimentSpec(corpus="x",base="y",policy="last-token",mode="rep")
    assert spec.policy == "last"

    with pytest.raises(ValueError):
        ExperimentSpec.from_dict({"corpus":"x","base":"y","not_a_key":1})

    bad_values = [{"seeds":[]},
                  {"seeds":[-1]},
                  {"seeds":"0"},
                  {"policy":"everywhere"},
                  {"mode":"both"},
                  {"r_w":0},
                  {"r_rep":0},
                  {"lr_w":-1},
                  {"epochs":0},
                  {"batch_size":0},
                  {"precision":"f16"}]
    for bad in bad_values:
        print(bad)
        with pytest.raises(ValueError):
            ExperimentSpec(corpus="x",base="y",**bad)

def test_load_base(tiny_pipeline,tiny_suite,tmpdir):

    params, vocab, extra = load_base(tiny_pipeline["base"],precision="f64")
    assert issubclass(type(params),BaseParams)
    assert issubclass(type(vocab),Vocab)
    assert params.dtype == np.float64
    assert len(vocab) == params.config.vocab_size
    assert extra["template"] == "default"
    assert extra["objective"] == "absc"

    params, _, _ = load_base(tiny_pipeline["base"],precision="f32")
    assert params.dtype == np.float32

    cwd = os.getcwd()
    os.chdir(tmpdir)

    # edit suites are not base models
    save_checkpoint(tiny_suite,"suite.ckpt")
    with pytest.raises(ValueError):
        load_base("suite.ckpt")

    # base models need a stored vocabulary
    save_checkpoint(load_checkpoint(tiny_pipeline["base"]),"novocab.ckpt")
    with pytest.raises(ValueError):
        load_base("novocab.ckpt")

    with pytest.raises(FileNotFoundError):
        load_base("missing.ckpt")

    os.chdir(cwd)

def test_Experiment(tiny_pipeline):

    spec = {"corpus":tiny_pipeline["corpus"],
            "base":tiny_pipeline["base"],
            "seeds":[0]}

    with pytest.raises(NotImplementedError):
        Experiment(spec)

    with pytest.raises(NotImplementedError):
        Experiment_no_run(spec)

    with pytest.raises(NotImplementedError):
        Experiment_no_calc_type(spec)

    exp = ExperimentTester(spec)
    assert exp.spec.seeds == [0]
    assert issubclass(type(exp.params),BaseParams)
    assert exp.template == "default"
    assert exp.layers == (2,)
    assert len(exp.samples) == 64

    exp = ExperimentTester(ExperimentSpec(**spec))
    assert exp.spec.seeds == [0]

    # explicit template overrides the stored one
    exp = ExperimentTester(dict(spec,template="question"))
    assert exp.template == "question"

    with pytest.raises(ValueError):
        ExperimentTester("not_a_spec")

    with pytest.raises(ValueError):
        ExperimentTester(dict(spec,layers="7"))

    with pytest.raises(ValueError):
        ExperimentTester(spec,verbose="yes")

    with pytest.raises(FileNotFoundError):
        ExperimentTester(dict(spec,base="missing.ckpt"))

def test_Experiment__domain(tiny_pipeline):

    exp = ExperimentTester({"corpus":tiny_pipeline["corpus"],
                            "base":tiny_pipeline["base"],
                            "seeds":[0]})

    assert exp._domain(None) == domain_tags(exp.samples)[0]
    assert exp._domain("restaurant") == "restaurant"
    with pytest.raises(ValueError):
        exp._domain("not_a_domain")

def test_Experiment__prepare_calc(tiny_pipeline,tmpdir):

    cwd = os.getcwd()
    os.chdir(tmpdir)

    exp = ExperimentTester({"corpus":tiny_pipeline["corpus"],
                            "base":tiny_pipeline["base"],
                            "seeds":[0]})
    df = exp.run("test_dir",value=5)

    assert os.getcwd() == str(tmpdir)
    assert os.path.isfile(os.path.join("test_dir","output_file.txt"))
    assert os.path.isfile(os.path.join("test_dir","report.csv"))
    assert os.path.isfile(os.path.join("test_dir","report.txt"))

    with open(os.path.join("test_dir","manifest.json")) as f:
        manifest = json.load(f)
    assert manifest["calc_type"] == "fake"
    assert manifest["calc_params"]["value"] == 5
    assert manifest["calc_params"]["resolved_layers"] == [2]
    assert manifest["calc_params"]["spec"]["seeds"] == [0]
    assert manifest["calc_params"]["base_checksum"] == exp.params.checksum()

    assert len(df) == 1
    assert np.isclose(df.loc[0,"accuracy_mean"],0.6)

    # existing, non-empty directory
    with pytest.raises(FileExistsError):
        exp.run("test_dir")
    os.chdir(tmpdir)

    # existing, empty directory is fine
    os.mkdir("empty_dir")
    exp.run("empty_dir")
    assert os.path.isfile(os.path.join("empty_dir","report.csv"))

    os.chdir(cwd)

def test_Experiment__edit_row(tiny_pipeline,tmpdir):

    cwd = os.getcwd()
    os.chdir(tmpdir)

    exp = ExperimentTester({"corpus":tiny_pipeline["corpus"],
                            "base":tiny_pipeline["base"],
                            "seeds":[0,1],
                            "r_w":2,
                            "precision":"f64"})

    train = [s for s in exp.samples if s.domain == "device" and s.split == "train"]
    test = [s for s in exp.samples if s.domain == "device" and s.split == "test"]

    row = exp._edit_row("in-domain","device->device",train,test)
    assert row.experiment == "in-domain"
    assert row.layers == "mid"
    assert row.policy == "aspect"
    assert row.seeds == [0,1]
    assert len(row.accuracies) == 2
    assert row.trainable_params > 0
    assert 0 < row.trainable_fraction < 1

    for seed in [0,1]:
        root = os.path.join("runs",f"in-domain_device-to-device_mid_aspect_seed{seed}")
        suite = load_checkpoint(f"{root}.ckpt")
        assert issubclass(type(suite),EditSuite)
        assert suite.seed == seed
        with open(f"{root}.json") as f:
            out = json.load(f)
        assert np.isclose(out["test"]["accuracy"],row.accuracies[seed])

    row = exp._baseline_row("device->device",test)
    assert row.experiment == "no-edit"
    assert row.trainable_params == 0
    assert len(row.accuracies) == 1
    assert os.path.isfile(os.path.join("runs","no-edit_device-to-device_seed0.json"))

    os.chdir(cwd)

def test__layer_label():

    assert _layer_label("mid",(3,4,5)) == "mid"
    assert _layer_label(" Late ",(6,7,8)) == "late"
    assert _layer_label("3-5",(3,4,5)) == "3,4,5"
    assert _layer_label([1,2],(1,2)) == "1,2"
