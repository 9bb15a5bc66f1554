"""
Sample and PromptRendering records.
"""

from tracedit.core.data import POLARITIES

import numpy as np

from dataclasses import dataclass, asdict

@dataclass(frozen=True)
class Sample:
    """
    One aspect-based sentiment example.

    Parameters
    ----------
    sentence : str
        review sentence S
    aspect : str
        aspect A; occurs verbatim (as whole words) in sentence
    polarity : str
        positive, negative, or neutral: the sentiment toward aspect
    domain : str
        domain tag
    sample_id : int, default=0
        unique id within a corpus (keys per-sample random draws)
    split : str, default="train"
        train or test
    contrastive : bool, default=False
        whether the sentence mentions two aspects with different polarities
    pair_id : int, default=-1
        shared by a contrastive sample and its mirror; -1 for single-aspect
        samples
    lead_polarity : str, optional
        polarity toward the first aspect mentioned in the sentence (defaults
        to polarity)
    """

    sentence: str
    aspect: str
    polarity: str
    domain: str
    sample_id: int = 0
    split: str = "train"
    contrastive: bool = False
    pair_id: int = -1
    lead_polarity: str = None

    def __post_init__(self):

        if self.polarity not in POLARITIES:
            err = f"\npolarity '{self.polarity}' should be one of {POLARITIES}\n\n"
            raise ValueError(err)

        if self.lead_polarity is None:
            object.__setattr__(self,"lead_polarity",self.polarity)
        elif self.lead_polarity not in POLARITIES:
            err = f"\nlead_polarity '{self.lead_polarity}' should be one of {POLARITIES}\n\n"
            raise ValueError(err)

        if self.split not in ("train","test"):
            err = f"\nsplit '{self.split}' should be 'train' or 'test'\n\n"
            raise ValueError(err)

        # bool/np.bool_ from json or pandas
        object.__setattr__(self,"contrastive",bool(self.contrastive))
        object.__setattr__(self,"sample_id",int(self.sample_id))
        object.__setattr__(self,"pair_id",int(self.pair_id))

    def to_dict(self):
        return asdict(self)

    @property
    def group_id(self):
        """
        Key that keeps mirror pairs together when splitting.
        """
        if self.pair_id >= 0:
            return ("pair",self.pair_id)
        return ("single",self.sample_id)


@dataclass(frozen=True)
class PromptRendering:
    """
    Tokenized prompt q for a sample.

    Parameters
    ----------
    sample_id : int
        id of the rendered sample
    token_ids : numpy.ndarray
        int64 token ids (length T)
    aspect_positions : tuple
        1-based positions of the aspect tokens inside the embedded sentence
    gold_id : int
        verbalizer token id of the gold label
    gold_label : str
        gold polarity
    template : str
        prompt template name
    contrastive : bool, default=False
        copied from the sample
    domain : str, default=""
        copied from the sample
    """

    sample_id: int
    token_ids: np.ndarray
    aspect_positions: tuple
    gold_id: int
    gold_label: str
    template: str
    contrastive: bool = False
    domain: str = ""

    @property
    def length(self):
        return int(len(self.token_ids))

    def to_dict(self):
        return {"sample_id":self.sample_id,
                "token_ids":[int(t) for t in self.token_ids],
                "aspect_positions":list(self.aspect_positions),
                "gold_id":self.gold_id,
                "gold_label":self.gold_label,
                "template":self.template,
                "contrastive":self.contrastive,
                "domain":self.domain}
