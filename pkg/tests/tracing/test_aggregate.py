import pytest

from tracedit.tracing import TraceGrid, TraceSummary, aggregate, role_buckets
from tracedit.tracing import bootstrap_aspect_contrast
from tracedit.tracing.aggregate import bucket_effects
from tracedit.corpus import PromptRendering
from tracedit.core.data import ROLE_BUCKETS
from tracedit.core.errors import NoRetainedSamplesError

import numpy as np
import pandas as pd

def _prompt(sample_id,length,aspect_positions):
    return PromptRendering(sample_id=sample_id,
                           token_ids=np.arange(length),
                           aspect_positions=aspect_positions,
                           gold_id=2,
                           gold_label="positive",
                           template="default")

def _grid(sample_id,ie,p_clean=0.8,p_corrupted=0.3,retained=True):
    return TraceGrid(sample_id=sample_id,
                     p_clean=p_clean,
                     p_corrupted=p_corrupted,
                     ie=np.array(ie,dtype=np.float64),
                     gold_label="positive",
                     clean_label="positive",
                     corrupted_label="negative" if retained else "positive")

def test_role_buckets():

    buckets = role_buckets(_prompt(0,10,(4,5,6)))
    assert buckets == {"first":[1],
                       "pre-aspect":[2,3],
                       "aspect-first":[4],
                       "aspect-middle":[5],
                       "aspect-last":[6],
                       "post-aspect":[7,8,9],
                       "last":[10]}

    # one-token aspect right after the first token: empty buckets are dropped
    buckets = role_buckets(_prompt(0,4,(2,)))
    assert buckets == {"first":[1],
                       "aspect-first":[2],
                       "aspect-last":[2],
                       "post-aspect":[3],
                       "last":[4]}

    with pytest.raises(ValueError):
        role_buckets(_prompt(0,4,()))

def test_role_buckets_aspect_at_edges():

    # question template with a sentence that opens on the aspect: position 1
    # is aspect only
    buckets = role_buckets(_prompt(0,9,(1,2)))
    assert buckets == {"aspect-first":[1],
                       "aspect-last":[2],
                       "post-aspect":[3,4,5,6,7,8],
                       "last":[9]}

    # aspect running to the final token
    buckets = role_buckets(_prompt(0,5,(4,5)))
    assert buckets == {"first":[1],
                       "pre-aspect":[2,3],
                       "aspect-first":[4],
                       "aspect-last":[5]}

    # no position is shared between first/last and the aspect buckets
    for length, aspect in [(9,(1,2)),(5,(4,5)),(3,(1,2,3)),(1,(1,))]:
        buckets = role_buckets(_prompt(0,length,aspect))
        edges = set(buckets.get("first",[])) | set(buckets.get("last",[]))
        assert edges.isdisjoint(aspect)

    ie = np.arange(18,dtype=np.float64).reshape(2,9)
    out = bucket_effects(_grid(0,ie),_prompt(0,9,(1,2)))
    rows = {b:out[ROLE_BUCKETS.index(b)] for b in ROLE_BUCKETS}
    assert np.all(np.isnan(rows["first"]))
    assert np.allclose(rows["aspect-first"],ie[:,0])

def test_bucket_effects():

    prompt = _prompt(0,5,(2,3))
    ie = np.arange(10,dtype=np.float64).reshape(2,5)
    out = bucket_effects(_grid(0,ie),prompt)

    assert out.shape == (len(ROLE_BUCKETS),2)
    rows = {b:out[ROLE_BUCKETS.index(b)] for b in ROLE_BUCKETS}
    assert np.allclose(rows["first"],ie[:,0])
    assert np.all(np.isnan(rows["pre-aspect"]))
    assert np.allclose(rows["aspect-first"],ie[:,1])
    assert np.all(np.isnan(rows["aspect-middle"]))
    assert np.allclose(rows["aspect-last"],ie[:,2])
    assert np.allclose(rows["post-aspect"],ie[:,3])
    assert np.allclose(rows["last"],ie[:,4])

def test_aggregate():

    prompts = [_prompt(0,4,(2,)),_prompt(1,6,(3,4)),_prompt(2,4,(2,))]
    grids = [_grid(0,np.ones((2,4)),p_clean=0.9,p_corrupted=0.1),
             _grid(1,np.full((2,6),3.0),p_clean=0.5,p_corrupted=0.3),
             _grid(2,np.full((2,4),100.0),retained=False)]

    summary = aggregate(grids,prompts,meta={"noise":{"multiplier":3}})
    assert issubclass(type(summary),TraceSummary)
    assert summary.n_total == 3
    assert summary.n_retained == 2
    assert summary.n_layers == 2
    assert np.isclose(summary.ate,(0.8 + 0.2)/2)
    assert summary.meta["retained_ids"] == [0,1]
    assert summary.meta["noise"] == {"multiplier":3}

    assert issubclass(type(summary.aie_buckets),pd.DataFrame)
    assert list(summary.aie_buckets.index) == list(ROLE_BUCKETS)
    assert list(summary.aie_buckets.columns) == [1,2]
    assert np.allclose(summary.aie_buckets.loc["first"],2.0)

    # a two-token aspect has no middle token
    assert np.all(np.isnan(summary.aie_buckets.loc["aspect-middle"]))
    assert np.allclose(summary.aie_buckets.loc["pre-aspect"],3.0)

    # positions past the shorter prompt average over the longer one only
    pos = summary.aie_positions
    assert list(pos.index) == list(range(1,7))
    assert np.allclose(pos.loc[1],2.0)
    assert np.allclose(pos.loc[6],3.0)

def test_aggregate_errors():

    prompts = [_prompt(0,4,(2,))]

    with pytest.raises(ValueError):
        aggregate([],prompts)

    with pytest.raises(NoRetainedSamplesError):
        aggregate([_grid(0,np.ones((2,4)),retained=False)],prompts)

    with pytest.raises(ValueError):
        aggregate([_grid(5,np.ones((2,4)))],prompts)

    with pytest.raises(ValueError):
        aggregate([_grid(0,np.ones((2,5)))],prompts)

def test_bootstrap_aspect_contrast():

    prompts = [_prompt(k,5,(3,)) for k in range(4)]

    grids = []
    for k in range(4):
        ie = np.zeros((3,5))
        ie[:,2] = k + 1.0
        grids.append(_grid(k,ie))

    contrast, stderr = bootstrap_aspect_contrast(grids,prompts,band="mid",n_boot=500,seed=0)
    assert np.isclose(contrast,2.5)
    assert stderr > 0

    again = bootstrap_aspect_contrast(grids,prompts,band="mid",n_boot=500,seed=0)
    assert again == (contrast,stderr)

    _, stderr = bootstrap_aspect_contrast(grids,prompts,band=[1,2],n_boot=1)
    assert stderr == 0.0

    # identical samples have no spread
    same = [_grid(k,np.eye(3,5)) for k in range(4)]
    contrast, stderr = bootstrap_aspect_contrast(same,prompts,band="all",n_boot=50)
    assert np.isclose(stderr,0)

    with pytest.raises(ValueError):
        bootstrap_aspect_contrast(grids,prompts,band="mid",n_boot=0)
    with pytest.raises(ValueError):
        bootstrap_aspect_contrast(grids,prompts,band=[],n_boot=10)
