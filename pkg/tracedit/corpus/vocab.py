"""
Word-level tokenization and the vocabulary.
"""

from tracedit.core.data import POLARITIES, PAD_WORD, UNK_WORD, PROMPT_TEMPLATES

import numpy as np

import re

_TOKEN_PATTERN = re.compile(r"<[a-z]+>|[a-z0-9']+|[^\sa-z0-9']")

def tokenize(text):
    """
    Lowercase, split on whitespace, and split punctuation into its own
    tokens. "The screen, sadly." -> ["the","screen",",","sadly","."]
    """

    return _TOKEN_PATTERN.findall(text.lower())


class Vocab:
    """
    Dense word <-> id mapping with reserved padding/unknown ids and
    single-token verbalizer words.

    Parameters
    ----------
    words : list-like of str
        words in id order. Must start with the padding and unknown words and
        contain every verbalizer word exactly once.
    verbalizer : list-like of str, default=POLARITIES
        label words
    """

    def __init__(self,words,verbalizer=POLARITIES):

        words = list(words)
        if len(words) < 2 or words[0] != PAD_WORD or words[1] != UNK_WORD:
            err = f"\nvocabulary must start with '{PAD_WORD}' and '{UNK_WORD}'\n\n"
            raise ValueError(err)

        if len(set(words)) != len(words):
            err = "\nvocabulary words must be unique\n\n"
            raise ValueError(err)

        self._words = words
        self._ids = {w:i for i, w in enumerate(words)}

        self._verbalizer = {}
        for label in verbalizer:
            if label not in self._ids:
                err = f"\nverbalizer word '{label}' missing from vocabulary\n\n"
                raise ValueError(err)
            self._verbalizer[label] = self._ids[label]

    def encode(self,tokens):
        """
        Map words to ids (unknown words -> unk id).
        """
        unk = self.unk_id
        return np.array([self._ids.get(t,unk) for t in tokens],dtype=np.int64)

    def decode(self,ids):
        """
        Map ids back to words.
        """
        return [self._words[int(i)] for i in ids]

    def __getitem__(self,word):
        return self._ids[word]

    def __contains__(self,word):
        return word in self._ids

    def __len__(self):
        return len(self._words)

    @property
    def pad_id(self):
        return 0

    @property
    def unk_id(self):
        return 1

    @property
    def verbalizer(self):
        """
        Dictionary keying label to token id.
        """
        return dict(self._verbalizer)

    @property
    def words(self):
        return list(self._words)

    def to_dict(self):
        return {"words":list(self._words),
                "verbalizer":list(self._verbalizer)}

    @classmethod
    def from_dict(cls,values):
        return cls(values["words"],verbalizer=values.get("verbalizer",POLARITIES))


def build_vocab(samples,templates=None,verbalizer=POLARITIES,max_size=None):
    """
    Build a vocabulary covering every word of every prompt that can be
    rendered from samples.

    Ids: 0 padding, 1 unknown, then verbalizer words in label order, then all
    other words sorted alphabetically (so the result does not depend on
    sample order).

    Parameters
    ----------
    samples : list of Sample
        corpus (non-empty)
    templates : dict, optional
        prompt templates (default PROMPT_TEMPLATES)
    verbalizer : list-like of str, default=POLARITIES
        label words
    max_size : int, optional
        largest allowed vocabulary (usually ModelConfig.vocab_size)

    Returns
    -------
    Vocab
    """

    if len(samples) == 0:
        err = "\nsamples must not be empty\n\n"
        raise ValueError(err)

    if templates is None:
        templates = PROMPT_TEMPLATES

    words = set()
    for template in templates.values():
        words.update(tokenize(template.replace("{S}"," ").replace("{A}"," ")))

    for s in samples:
        words.update(tokenize(s.sentence))
        words.update(tokenize(s.aspect))

    reserved = [PAD_WORD,UNK_WORD] + list(verbalizer)
    words = reserved + sorted(words - set(reserved))

    if max_size is not None and len(words) > max_size:
        err = f"\nvocabulary has {len(words)} words, more than the allowed {max_size}\n\n"
        raise ValueError(err)

    return Vocab(words,verbalizer=verbalizer)
