import pytest

from tracedit.corpus import Sample, PromptRendering

import numpy as np

def test_Sample():

    s = Sample(sentence="the screen was great",aspect="screen",
               polarity="positive",domain="device")
    assert s.sample_id == 0
    assert s.split == "train"
    assert s.contrastive is False
    assert s.pair_id == -1
    assert s.lead_polarity == "positive"
    assert s.group_id == ("single",0)

    s = Sample(sentence="x",aspect="x",polarity="negative",domain="d",
               sample_id=np.int64(5),contrastive=np.bool_(True),pair_id=2,
               lead_polarity="positive",split="test")
    assert type(s.sample_id) is int
    assert s.contrastive is True
    assert s.group_id == ("pair",2)

    d = s.to_dict()
    assert Sample(**d) == s

    with pytest.raises(ValueError):
        Sample(sentence="x",aspect="x",polarity="happy",domain="d")
    with pytest.raises(ValueError):
        Sample(sentence="x",aspect="x",polarity="positive",domain="d",lead_polarity="meh")
    with pytest.raises(ValueError):
        Sample(sentence="x",aspect="x",polarity="positive",domain="d",split="dev")

    # frozen
    with pytest.raises(Exception):
        s.polarity = "neutral"

def test_PromptRendering():

    p = PromptRendering(sample_id=3,
                        token_ids=np.array([4,5,6]),
                        aspect_positions=(2,),
                        gold_id=2,
                        gold_label="positive",
                        template="default")
    assert p.length == 3
    assert p.contrastive is False

    d = p.to_dict()
    assert d["token_ids"] == [4,5,6]
    assert d["aspect_positions"] == [2]
    assert type(d["token_ids"][0]) is int
