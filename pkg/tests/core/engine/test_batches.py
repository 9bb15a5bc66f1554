import pytest

from tracedit.core.engine.batches import batch_indexes, edit_positions
from tracedit.core.engine.batches import final_logits, gold_ids, gold_nll
from tracedit.core.model import forward
from tracedit.core.editing import select_positions, init_edit_suite
from tracedit.core.autodiff import Tensor

import numpy as np

def test_batch_indexes():

    batches = batch_indexes(10,4)
    assert [list(b) for b in batches] == [[0,1,2,3],[4,5,6,7],[8,9]]

    gen = np.random.default_rng(0)
    batches = batch_indexes(10,3,gen)
    assert [len(b) for b in batches] == [3,3,3,1]
    assert sorted(np.concatenate(batches)) == list(range(10))

    # same generator seed, same order
    again = batch_indexes(10,3,np.random.default_rng(0))
    assert all(np.array_equal(a,b) for a, b in zip(batches,again))

def test_edit_positions(tiny_config,tiny_prompts):

    assert edit_positions(tiny_prompts,None) is None

    suite = init_edit_suite(tiny_config,layers="mid",policy="mid",seed=4)
    positions = edit_positions(tiny_prompts[:5],suite)
    assert positions == [select_positions(p,"mid",seed=4) for p in tiny_prompts[:5]]

    suite = init_edit_suite(tiny_config,layers="mid",policy="last")
    positions = edit_positions(tiny_prompts[:3],suite)
    assert positions == [(p.length,) for p in tiny_prompts[:3]]

def test_final_logits(tiny_params,tiny_suite,tiny_prompts):

    prompts = tiny_prompts[:5]
    logits = final_logits(tiny_params,prompts)
    assert logits.shape == (5,tiny_params.config.vocab_size)

    for b, p in enumerate(prompts):
        single, _ = forward(p.token_ids,tiny_params)
        assert np.allclose(logits.data[b],single.data[-1])

    # identity suite at init
    edited = final_logits(tiny_params,prompts,tiny_suite)
    assert np.allclose(edited.data,logits.data)

def test_gold_ids(tiny_prompts):

    ids = gold_ids(tiny_prompts[:3],100)
    assert ids.dtype == np.int64
    assert list(ids) == [p.gold_id for p in tiny_prompts[:3]]

    with pytest.raises(ValueError):
        gold_ids(tiny_prompts[:3],1)

def test_gold_nll():

    logits = np.log(np.array([[1.0,1.0,2.0],[1.0,3.0,4.0]]))
    nll = gold_nll(Tensor(logits,dtype=np.float64),np.array([2,0]))
    assert np.allclose(nll.data,[-np.log(0.5),-np.log(1/8)])
