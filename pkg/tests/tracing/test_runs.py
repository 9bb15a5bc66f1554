import pytest

from tracedit.tracing import NoiseSpec, TraceRun
from tracedit.tracing import clean_run, corrupted_run, restoration_run, restoration_sweep
from tracedit.core.model import forward, HiddenCache
from tracedit.core.model.readout import label_probabilities

import numpy as np

def test_clean_run(tiny_params,tiny_prompts,tiny_vocab):

    verbalizer = tiny_vocab.verbalizer
    prompt = tiny_prompts[0]

    run = clean_run(tiny_params,prompt,verbalizer)
    assert issubclass(type(run),TraceRun)
    assert issubclass(type(run.cache),HiddenCache)
    assert run.cache.n_positions == prompt.length

    logits, _ = forward(prompt.token_ids,tiny_params)
    labels, probs = label_probabilities(logits.data[-1],verbalizer)
    assert np.isclose(run.probability,probs[labels.index(prompt.gold_label)])
    assert run.label == labels[int(np.argmax(probs))]
    assert set(run.probs) == set(verbalizer)

    bad = {k:v for k, v in verbalizer.items() if k != prompt.gold_label}
    with pytest.raises(ValueError):
        clean_run(tiny_params,prompt,bad)

def test_corrupted_run(tiny_params,tiny_prompts,tiny_vocab):

    verbalizer = tiny_vocab.verbalizer
    prompt = tiny_prompts[0]
    clean = clean_run(tiny_params,prompt,verbalizer)

    # no noise, no change
    run = corrupted_run(tiny_params,prompt,verbalizer,NoiseSpec(multiplier=0))
    assert np.isclose(run.probability,clean.probability)
    assert run.cache is None

    run = corrupted_run(tiny_params,prompt,verbalizer,NoiseSpec(multiplier=10))
    assert not np.isclose(run.probability,clean.probability)

    again = corrupted_run(tiny_params,prompt,verbalizer,NoiseSpec(multiplier=10))
    assert again.probability == run.probability

def test_restoration_run(tiny_params,tiny_prompts,tiny_vocab):

    verbalizer = tiny_vocab.verbalizer
    prompt = tiny_prompts[0]
    T = prompt.length
    L = tiny_params.config.n_layers
    noise = NoiseSpec(multiplier=10)

    clean = clean_run(tiny_params,prompt,verbalizer)

    # the final state decides the readout
    p = restoration_run(tiny_params,prompt,verbalizer,noise,(L,T),clean.cache)
    assert np.isclose(p,clean.probability)

    # every position of one layer together restores the clean run too
    cells = [(1,i) for i in range(1,T + 1)]
    p = restoration_run(tiny_params,prompt,verbalizer,noise,cells,clean.cache)
    assert np.isclose(p,clean.probability)

    with pytest.raises(ValueError):
        restoration_run(tiny_params,prompt,verbalizer,noise,(L + 1,T),clean.cache)
    with pytest.raises(ValueError):
        restoration_run(tiny_params,prompt,verbalizer,noise,(L,T + 1),clean.cache)
    with pytest.raises(ValueError):
        restoration_run(tiny_params,prompt,verbalizer,noise,(L,),clean.cache)
    with pytest.raises(ValueError):
        restoration_run(tiny_params,prompt,verbalizer,noise,(L,T),clean.cache.states)

    other = clean_run(tiny_params,tiny_prompts[1],verbalizer)
    if other.cache.n_positions != T:
        with pytest.raises(ValueError):
            restoration_run(tiny_params,prompt,verbalizer,noise,(L,1),other.cache)

    wide = HiddenCache(np.zeros((L + 1,T,tiny_params.config.d_model + 1)))
    with pytest.raises(ValueError):
        restoration_run(tiny_params,prompt,verbalizer,noise,(L,T),wide)

def test_restoration_sweep(tiny_params,tiny_prompts,tiny_vocab):

    verbalizer = tiny_vocab.verbalizer
    prompt = tiny_prompts[2]
    T = prompt.length
    L = tiny_params.config.n_layers
    noise = NoiseSpec(multiplier=5,seed=3)

    clean = clean_run(tiny_params,prompt,verbalizer)
    cells = [(l,i) for l in range(0,L + 1) for i in (1,prompt.aspect_positions[0],T)]

    swept = restoration_sweep(tiny_params,prompt,verbalizer,noise,cells,clean.cache,
                              batch_size=4)
    assert swept.shape == (len(cells),)
    assert swept.dtype == np.float64

    for cell, p in zip(cells,swept):
        single = restoration_run(tiny_params,prompt,verbalizer,noise,cell,clean.cache)
        assert np.isclose(p,single)

    with pytest.raises(ValueError):
        restoration_sweep(tiny_params,prompt,verbalizer,noise,cells,clean.cache,batch_size=0)

def test_run_invariants_random_samples(tiny_params,tiny_vocab,random_prompts):

    verbalizer = tiny_vocab.verbalizer
    L = tiny_params.config.n_layers
    noise = NoiseSpec(multiplier=3,scope="aspect",seed=2)

    prompts = random_prompts(50,tiny_params.config.vocab_size,seed=7,min_length=3,max_length=16)
    for prompt in prompts:

        T = prompt.length
        clean = clean_run(tiny_params,prompt,verbalizer)
        corrupted = corrupted_run(tiny_params,prompt,verbalizer,noise)
        total_effect = clean.probability - corrupted.probability

        # restoring (L,T) gives back the whole total effect
        p = restoration_run(tiny_params,prompt,verbalizer,noise,(L,T),clean.cache)
        assert abs((p - corrupted.probability) - total_effect) <= 1e-6

        # no indirect effect at cells left of the corrupted span
        first = prompt.aspect_positions[0]
        cells = [(l,i) for l in range(L + 1) for i in range(1,first)]
        if len(cells) > 0:
            swept = restoration_sweep(tiny_params,prompt,verbalizer,noise,cells,clean.cache)
            assert np.max(np.abs(swept - corrupted.probability)) <= 1e-6

        # restoring every corrupted layer-0 state recovers the clean run
        cells = [(0,i) for i in noise.positions(prompt)]
        p = restoration_run(tiny_params,prompt,verbalizer,noise,cells,clean.cache)
        assert abs(p - clean.probability) <= 1e-6
