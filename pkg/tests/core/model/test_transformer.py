import pytest

from tracedit.core.model import forward, block_forward, ForwardOptions
from tracedit.core.model import RestorePatch, HiddenCache
from tracedit.core.autodiff import Tensor
from tracedit.corpus import pad_batch
from tracedit.core.rng import RngStream

import numpy as np

def _noise(prompt,d,seed=0,positions=None):

    noise = np.random.default_rng(seed).normal(size=(prompt.length,d))
    if positions is not None:
        mask = np.zeros((prompt.length,1))
        mask[np.array(positions) - 1] = 1
        noise = noise*mask
    return noise

def test_HiddenCache():

    states = np.arange(3*4*2,dtype=np.float64).reshape(3,4,2)
    cache = HiddenCache(states)

    assert cache.n_layers == 2
    assert cache.n_positions == 4
    assert cache.width == 2
    assert np.array_equal(cache[0,1],states[0,0])
    assert np.array_equal(cache[2,4],states[2,3])

    # copied and read-only
    states[0,0,0] = 100
    assert cache[0,1][0] == 0
    with pytest.raises(ValueError):
        cache.states[0,0,0] = 1

    with pytest.raises(ValueError):
        cache[3,1]
    with pytest.raises(ValueError):
        cache[0,0]
    with pytest.raises(ValueError):
        cache[0,5]

    short = cache.truncate(2)
    assert short.n_positions == 2
    assert np.array_equal(short[1,2],cache[1,2])

    with pytest.raises(ValueError):
        HiddenCache(np.zeros((3,4)))

def test_forward(tiny_params,tiny_prompts):

    config = tiny_params.config
    prompt = tiny_prompts[0]
    T = prompt.length

    logits, cache = forward(prompt.token_ids,tiny_params)
    assert logits.shape == (T,config.vocab_size)
    assert cache is None
    assert logits.dtype == np.float64

    logits2, cache = forward(prompt.token_ids,tiny_params,ForwardOptions(record_hidden=True))
    assert np.array_equal(logits.data,logits2.data)
    assert cache.n_layers == config.n_layers
    assert cache.n_positions == T
    assert cache.width == config.d_model

    # layer 0 is token plus position embedding
    token = prompt.token_ids[2]
    expected = tiny_params["embed.token"].data[token] + tiny_params["embed.position"].data[2]
    assert np.allclose(cache[0,3],expected)

    # readout at one position
    final, _ = forward(prompt.token_ids,tiny_params,ForwardOptions(readout_positions=[T]))
    assert final.shape == (config.vocab_size,)
    assert np.allclose(final.data,logits.data[-1])

def test_forward_batch(tiny_params,tiny_prompts):

    prompts = tiny_prompts[:4]
    tokens, lengths = pad_batch(prompts)

    logits, caches = forward(tokens,tiny_params,ForwardOptions(record_hidden=True,
                                                               readout_positions=lengths))
    assert logits.shape == (4,tiny_params.config.vocab_size)
    assert len(caches) == 4

    # right padding does not reach earlier positions through causal attention
    for b, p in enumerate(prompts):
        single, cache = forward(p.token_ids,tiny_params,ForwardOptions(record_hidden=True))
        assert np.allclose(logits.data[b],single.data[-1])
        assert np.allclose(caches[b].truncate(p.length).states,cache.states)

def test_forward_deterministic(tiny_params,tiny_prompts):

    prompt = tiny_prompts[1]
    a, _ = forward(prompt.token_ids,tiny_params)
    b, _ = forward(prompt.token_ids,tiny_params)
    assert np.array_equal(a.data,b.data)

def test_forward_bad_tokens(tiny_params):

    config = tiny_params.config

    with pytest.raises(ValueError):
        forward(np.array([1.0,2.0]),tiny_params)
    with pytest.raises(ValueError):
        forward(np.array([0,config.vocab_size]),tiny_params)
    with pytest.raises(ValueError):
        forward(np.array([-1,2]),tiny_params)
    with pytest.raises(ValueError):
        forward(np.ones(config.max_seq + 1,dtype=int),tiny_params)
    with pytest.raises(ValueError):
        forward(np.ones((1,1,2),dtype=int),tiny_params)
    with pytest.raises(ValueError):
        forward(np.array([1,2]),tiny_params.to_arrays())

def test_forward_bad_options(tiny_params,tiny_prompts):

    prompt = tiny_prompts[0]
    T = prompt.length
    d = tiny_params.config.d_model
    L = tiny_params.config.n_layers

    with pytest.raises(ValueError):
        forward(prompt.token_ids,tiny_params,ForwardOptions(noise=np.zeros((T + 1,d))))
    with pytest.raises(ValueError):
        forward(prompt.token_ids,tiny_params,ForwardOptions(readout_positions=[T + 1]))
    with pytest.raises(ValueError):
        forward(prompt.token_ids,tiny_params,ForwardOptions(readout_positions=[0]))

    bad_patches = [RestorePatch(L + 1,1,np.zeros(d)),
                   RestorePatch(-1,1,np.zeros(d)),
                   RestorePatch(0,0,np.zeros(d)),
                   RestorePatch(0,T + 1,np.zeros(d)),
                   RestorePatch(0,1,np.zeros(d + 1)),
                   RestorePatch(0,1,np.zeros(d),row=1)]
    for patch in bad_patches:
        with pytest.raises(ValueError):
            forward(prompt.token_ids,tiny_params,ForwardOptions(restore=[patch]))

def test_forward_noise_is_causal(tiny_params,tiny_prompts):

    prompt = tiny_prompts[0]
    d = tiny_params.config.d_model
    _, clean = forward(prompt.token_ids,tiny_params,ForwardOptions(record_hidden=True))

    # corrupt position 4 only: nothing before it moves at any layer
    noise = _noise(prompt,d,positions=[4])
    _, noisy = forward(prompt.token_ids,tiny_params,
                       ForwardOptions(record_hidden=True,noise=noise))

    assert np.allclose(noisy.states[:,:3],clean.states[:,:3])
    assert not np.allclose(noisy.states[:,3],clean.states[:,3])
    assert np.allclose(noisy[0,4],clean[0,4] + noise[3])

def test_forward_restore(tiny_params,tiny_prompts):

    prompt = tiny_prompts[0]
    T = prompt.length
    d = tiny_params.config.d_model
    L = tiny_params.config.n_layers

    clean_logits, clean = forward(prompt.token_ids,tiny_params,ForwardOptions(record_hidden=True))
    noise = _noise(prompt,d)

    corrupt_logits, _ = forward(prompt.token_ids,tiny_params,ForwardOptions(noise=noise))
    assert not np.allclose(corrupt_logits.data,clean_logits.data)

    # restoring every position at any single layer recovers the clean run
    for layer in range(L + 1):
        patches = [RestorePatch(layer,i,clean[layer,i]) for i in range(1,T + 1)]
        restored, _ = forward(prompt.token_ids,tiny_params,
                              ForwardOptions(noise=noise,restore=patches))
        assert np.allclose(restored.data,clean_logits.data)

    # restoring the last layer at the final position fixes the final readout
    patch = RestorePatch(L,T,clean[L,T])
    restored, cache = forward(prompt.token_ids,tiny_params,
                              ForwardOptions(noise=noise,restore=[patch],record_hidden=True,
                                             readout_positions=[T]))
    assert np.allclose(restored.data,clean_logits.data[-1])
    assert np.allclose(cache[L,T],clean[L,T])

def test_forward_restore_rows(tiny_params,tiny_prompts):

    prompt = tiny_prompts[0]
    T = prompt.length
    d = tiny_params.config.d_model

    _, clean = forward(prompt.token_ids,tiny_params,ForwardOptions(record_hidden=True))
    noise = _noise(prompt,d)

    tokens = np.tile(prompt.token_ids,(2,1))
    patches = [RestorePatch(1,2,clean[1,2],row=1)]
    _, caches = forward(tokens,tiny_params,ForwardOptions(noise=noise,restore=patches,
                                                          record_hidden=True))

    assert np.allclose(caches[1][1,2],clean[1,2])
    assert not np.allclose(caches[0][1,2],clean[1,2])

    # row 0 is the plain corrupted run
    _, corrupted = forward(prompt.token_ids,tiny_params,ForwardOptions(noise=noise,
                                                                       record_hidden=True))
    assert np.allclose(caches[0].states,corrupted.states)

def test_forward_edits_identity(tiny_params,tiny_suite,tiny_prompts):

    prompt = tiny_prompts[0]
    plain, _ = forward(prompt.token_ids,tiny_params)
    options = ForwardOptions(edits=tiny_suite,edit_positions=prompt.aspect_positions)
    edited, _ = forward(prompt.token_ids,tiny_params,options)

    assert np.allclose(plain.data,edited.data)

    with pytest.raises(ValueError):
        forward(prompt.token_ids,tiny_params,
                ForwardOptions(edits=tiny_suite,edit_positions=[prompt.length + 1]))

def test_forward_edits_change_output(tiny_params,tiny_suite,tiny_prompts):

    prompt = tiny_prompts[0]
    layer = tiny_suite.layers[0]
    d = tiny_params.config.d_model

    b = Tensor(np.ones(tiny_suite.r_rep),dtype=np.float64)
    suite = tiny_suite.with_parameters({f"layer{layer}.b":b})

    positions = [prompt.aspect_positions[0]]
    _, cache = forward(prompt.token_ids,tiny_params,
                       ForwardOptions(record_hidden=True,edits=suite,edit_positions=positions))
    _, clean = forward(prompt.token_ids,tiny_params,ForwardOptions(record_hidden=True))

    # states before the edited layer and before the edited position are untouched
    p = positions[0]
    assert np.allclose(cache.states[:layer],clean.states[:layer])
    assert np.allclose(cache.states[:,:p - 1],clean.states[:,:p - 1])

    # the edit writes b into the R subspace at the edited position
    R = suite.rep_edit(layer)[0].data
    assert np.allclose(R @ cache[layer,p],R @ clean[layer,p] + 1)
    assert np.allclose(cache[layer,p + 1],clean[layer,p + 1])

    # weight edit: nonzero B changes every position of the edited layer
    B = Tensor(np.full((tiny_suite.r_w,d),0.1),dtype=np.float64)
    suite = tiny_suite.with_parameters({f"layer{layer}.B":B})
    _, cache = forward(prompt.token_ids,tiny_params,
                       ForwardOptions(record_hidden=True,edits=suite,edit_positions=positions))
    assert np.allclose(cache.states[:layer],clean.states[:layer])
    assert not np.allclose(cache[layer,1],clean[layer,1])

def test_block_forward(tiny_params,tiny_prompts):

    prompt = tiny_prompts[0]
    L = tiny_params.config.n_layers
    _, clean = forward(prompt.token_ids,tiny_params,ForwardOptions(record_hidden=True))

    for layer in range(1,L + 1):
        h = Tensor(clean.states[layer - 1],dtype=np.float64)
        out = block_forward(h,layer,tiny_params)
        assert out.shape == h.shape
        assert np.allclose(out.data,clean.states[layer])

    h = Tensor(clean.states[0],dtype=np.float64)
    with pytest.raises(ValueError):
        block_forward(h,0,tiny_params)
    with pytest.raises(ValueError):
        block_forward(h,L + 1,tiny_params)

def test_forward_invariants_random_samples(tiny_params,random_prompts):

    config = tiny_params.config
    L, d = config.n_layers, config.d_model

    prompts = random_prompts(100,config.vocab_size,seed=11,min_length=2,max_length=24)

    moved = 0
    for start in range(0,len(prompts),10):

        # right-padded batch of mixed lengths
        batch = prompts[start:start + 10]
        tokens, lengths = pad_batch(batch)
        B, T = tokens.shape
        assert len(set(lengths)) > 1

        clean_logits, clean = forward(tokens,tiny_params,
                                      ForwardOptions(record_hidden=True,
                                                     readout_positions=lengths))

        noise = np.zeros((B,T,d))
        for b, p in enumerate(batch):
            draw = RngStream("corruption-noise",0,counter=p.sample_id).generator()
            rows = np.array(p.aspect_positions) - 1
            noise[b,rows] = draw.standard_normal((len(rows),d))

        corrupt_logits, noisy = forward(tokens,tiny_params,
                                        ForwardOptions(noise=noise,record_hidden=True,
                                                       readout_positions=lengths))
        for b in range(B):
            moved += not np.allclose(corrupt_logits.data[b],clean_logits.data[b])

        # states left of the corrupted span never move, at any layer
        for b, p in enumerate(batch):
            first = p.aspect_positions[0]
            diff = np.abs(noisy[b].states[:,:first - 1] - clean[b].states[:,:first - 1])
            assert diff.size == 0 or np.max(diff) <= 1e-6

        # restoring every corrupted layer-0 state reproduces the clean logits
        patches = [RestorePatch(0,i,clean[b][0,i],row=b)
                   for b, p in enumerate(batch) for i in p.aspect_positions]
        restored, _ = forward(tokens,tiny_params,
                              ForwardOptions(noise=noise,restore=patches,
                                             readout_positions=lengths))
        assert np.max(np.abs(restored.data - clean_logits.data)) <= 1e-6

        # the readout only sees the final-layer state at the final position
        patches = [RestorePatch(L,p.length,clean[b][L,p.length],row=b)
                   for b, p in enumerate(batch)]
        restored, _ = forward(tokens,tiny_params,
                              ForwardOptions(noise=noise,restore=patches,
                                             readout_positions=lengths))
        assert np.max(np.abs(restored.data - clean_logits.data)) <= 1e-6

    assert moved > 0
