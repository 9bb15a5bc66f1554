"""
Synthetic multi-domain aspect sentiment corpus.
"""

from tracedit.core.data import DOMAIN_ASPECTS, OPINIONS, POLARITIES
from tracedit.core.data import SINGLE_TEMPLATES, CONTRASTIVE_TEMPLATES
from tracedit.core.rng import RngStream
from tracedit._private.check.standard import check_int
from tracedit._private.check.standard import check_float
from tracedit._private.logger import log
from .sample import Sample
from .vocab import tokenize
from .prompt import find_subsequence

import numpy as np

import copy
import itertools
from dataclasses import dataclass, field, fields

# "shuffle" counters below this are reserved for per-sample draws
SPLIT_COUNTER = 2**33

def _default(value):
    return field(default_factory=lambda: copy.deepcopy(value))

@dataclass
class CorpusSpec:
    """
    Everything generate_corpus needs.

    Parameters
    ----------
    domains : dict
        dictionary keying domain tag to a list of aspect terms
    opinions : dict
        dictionary keying polarity to a list of opinion words. Polarities
        with no words are never generated.
    single_templates : list of str
        sentence templates with {a} and {o} slots
    contrastive_templates : list of str
        sentence templates with {a1} {o1} {a2} {o2} slots
    per_domain : int, default=1200
        samples per domain
    contrastive_fraction : float, default=0.6
        fraction of samples drawn from contrastive templates (rounded down to
        whole mirror pairs)
    test_fraction : float, default=0.2
        fraction of each domain placed in the test split
    seed : int, default=0
        seed for the data-gen and shuffle streams
    """

    domains: dict = _default(DOMAIN_ASPECTS)
    opinions: dict = _default(OPINIONS)
    single_templates: list = _default(SINGLE_TEMPLATES)
    contrastive_templates: list = _default(CONTRASTIVE_TEMPLATES)
    per_domain: int = 1200
    contrastive_fraction: float = 0.6
    test_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):

        self.per_domain = check_int(self.per_domain,"per_domain",minimum_allowed=1)
        self.contrastive_fraction = check_float(self.contrastive_fraction,
                                                "contrastive_fraction",
                                                minimum_allowed=0,
                                                maximum_allowed=1)
        self.test_fraction = check_float(self.test_fraction,
                                         "test_fraction",
                                         minimum_allowed=0,
                                         maximum_allowed=1,
                                         maximum_inclusive=False)
        self.seed = check_int(self.seed,"seed",minimum_allowed=0)

        if len(self.domains) == 0:
            err = "\ndomains must not be empty\n\n"
            raise ValueError(err)

        for polarity in self.opinions:
            if polarity not in POLARITIES:
                err = f"\nopinion polarity '{polarity}' should be one of {POLARITIES}\n\n"
                raise ValueError(err)

    def to_dict(self):
        return {f.name:copy.deepcopy(getattr(self,f.name)) for f in fields(self)}

    @classmethod
    def from_dict(cls,values):
        allowed = {f.name for f in fields(cls)}
        unknown = set(values) - allowed
        if len(unknown) > 0:
            err = f"\nunrecognized CorpusSpec keys: {sorted(unknown)}\n\n"
            raise ValueError(err)
        return cls(**values)


def _overlaps(a,b):
    """
    True if either aspect's tokens occur inside the other's.
    """
    ta, tb = tokenize(a), tokenize(b)
    return find_subsequence(ta,tb) >= 0 or find_subsequence(tb,ta) >= 0

def _check_spec(spec):
    """
    Validate that every template slot has a lexicon to draw from. Returns the
    polarities that can be generated and the ordered polarity pairs for
    contrastive samples.
    """

    polarities = [p for p in POLARITIES if len(spec.opinions.get(p,[])) > 0]
    if len(polarities) == 0:
        err = "\nevery opinion lexicon is empty; no sample can be generated\n\n"
        raise ValueError(err)

    n_single, n_contrastive = _sample_counts(spec)

    if n_single > 0 and len(spec.single_templates) == 0:
        err = "\nsingle-aspect samples requested but single_templates is empty\n\n"
        raise ValueError(err)

    for t in spec.single_templates:
        if "{a}" not in t or "{o}" not in t:
            err = f"\nsingle template '{t}' needs {{a}} and {{o}} slots\n\n"
            raise ValueError(err)

    pairs = list(itertools.permutations(polarities,2))
    if n_contrastive > 0:

        if len(spec.contrastive_templates) == 0:
            err = "\ncontrastive samples requested but contrastive_templates is empty\n\n"
            raise ValueError(err)

        for t in spec.contrastive_templates:
            for slot in ("{a1}","{o1}","{a2}","{o2}"):
                if slot not in t:
                    err = f"\ncontrastive template '{t}' is missing the {slot} slot\n\n"
                    raise ValueError(err)

        if len(pairs) == 0:
            err = "\ncontrastive samples need opinion words for at least two polarities\n\n"
            raise ValueError(err)

    for domain, aspects in spec.domains.items():

        if len(aspects) == 0:
            err = f"\ndomain '{domain}' has an empty aspect lexicon\n\n"
            raise ValueError(err)

        if n_contrastive > 0:
            usable = [(a,b) for a, b in itertools.permutations(aspects,2)
                      if not _overlaps(a,b)]
            if len(usable) == 0:
                err = f"\ndomain '{domain}' needs two non-overlapping aspects for\n"
                err += "contrastive templates\n\n"
                raise ValueError(err)

    return polarities, pairs

def _sample_counts(spec):
    n_contrastive = int(np.floor(spec.per_domain*spec.contrastive_fraction/2))*2
    return spec.per_domain - n_contrastive, n_contrastive

def _pick(gen,values):
    return values[int(gen.integers(len(values)))]

def _domain_units(spec,domain,polarities,pairs,gen):
    """
    Generate the samples of one domain as units (a single sample or a mirror
    pair) without ids or splits.
    """

    aspects = list(spec.domains[domain])
    usable = [(a,b) for a, b in itertools.permutations(aspects,2) if not _overlaps(a,b)]
    n_single, n_contrastive = _sample_counts(spec)

    units = []
    for k in range(n_contrastive//2):

        p1, p2 = pairs[k % len(pairs)]
        a1, a2 = _pick(gen,usable)
        template = _pick(gen,spec.contrastive_templates)
        o1 = _pick(gen,spec.opinions[p1])
        o2 = _pick(gen,spec.opinions[p2])
        sentence = template.format(a1=a1,o1=o1,a2=a2,o2=o2)

        units.append([dict(sentence=sentence,aspect=a1,polarity=p1,lead_polarity=p1),
                      dict(sentence=sentence,aspect=a2,polarity=p2,lead_polarity=p1)])

    for k in range(n_single):

        p = polarities[k % len(polarities)]
        a = _pick(gen,aspects)
        template = _pick(gen,spec.single_templates)
        o = _pick(gen,spec.opinions[p])
        sentence = template.format(a=a,o=o)

        units.append([dict(sentence=sentence,aspect=a,polarity=p,lead_polarity=p)])

    return units

def generate_corpus(spec=None,verbose=False):
    """
    Generate the corpus described by spec.

    Contrastive samples come in mirror pairs (same sentence, the other
    aspect, a different label) that always share a split, so sentence-only
    features cannot beat chance on the contrastive subset. Labels rotate
    through the available polarities, keeping classes balanced.

    Parameters
    ----------
    spec : CorpusSpec, optional
        corpus description (default CorpusSpec())
    verbose : bool, default=False
        log per-domain counts

    Returns
    -------
    samples : list of Sample
        every sample of every domain; Sample.split is "train" or "test"
    """

    if spec is None:
        spec = CorpusSpec()

    if not issubclass(type(spec),CorpusSpec):
        err = f"\nspec should be a CorpusSpec, not {type(spec)}\n\n"
        raise ValueError(err)

    polarities, pairs = _check_spec(spec)

    samples = []
    next_id = 0
    next_pair = 0
    for domain_index, domain in enumerate(spec.domains):

        gen = RngStream("data-gen",spec.seed,counter=domain_index).generator()
        units = _domain_units(spec,domain,polarities,pairs,gen)

        # Shuffle units, then send the first test_fraction of them to test
        shuffle = RngStream("shuffle",spec.seed,counter=SPLIT_COUNTER + domain_index).generator()
        order = shuffle.permutation(len(units))
        n_test = int(np.round(len(units)*spec.test_fraction))
        test_units = set(int(i) for i in order[:n_test])

        for u, unit in enumerate(units):

            split = "test" if u in test_units else "train"
            pair_id = -1
            if len(unit) == 2:
                pair_id = next_pair
                next_pair += 1

            for values in unit:
                samples.append(Sample(domain=domain,
                                      sample_id=next_id,
                                      split=split,
                                      contrastive=len(unit) == 2,
                                      pair_id=pair_id,
                                      **values))
                next_id += 1

        if verbose:
            n_train = sum(1 for s in samples if s.domain == domain and s.split == "train")
            n_test = sum(1 for s in samples if s.domain == domain and s.split == "test")
            log(f"generated domain '{domain}': {n_train} train, {n_test} test")

    return samples


def domain_unique_fraction(spec):
    """
    Fraction of each domain's aspect words (tokens) not used by any other
    domain.

    Returns
    -------
    dict
        dictionary keying domain to fraction
    """

    words = {d:set(w for a in aspects for w in tokenize(a))
             for d, aspects in spec.domains.items()}

    out = {}
    for d, mine in words.items():
        others = set()
        for o, theirs in words.items():
            if o != d:
                others |= theirs
        out[d] = len(mine - others)/len(mine)

    return out
