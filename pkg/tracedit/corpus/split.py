"""
Domain and development splits.
"""

from tracedit.core.rng import RngStream
from tracedit._private.check.standard import check_float
from tracedit._private.check.standard import check_int
from tracedit._private.logger import log

import numpy as np

from collections import namedtuple

class DomainSplit(namedtuple("DomainSplit",["train","in_test","out_test",
                                             "in_domain_tag","out_domain_tag"])):
    """
    Train/in-domain test/out-of-domain test sets for a domain pair.
    """

    __slots__ = ()

    @property
    def in_domain(self):
        """
        True when source and target domain are the same.
        """
        return self.in_domain_tag == self.out_domain_tag

def domain_tags(samples):
    """
    Domain tags in order of first appearance.
    """
    return list(dict.fromkeys(s.domain for s in samples))

def split_domains(samples,in_domain,out_domain):
    """
    Partition a corpus for training on in_domain and testing on out_domain.

    Parameters
    ----------
    samples : list of Sample
        generated corpus
    in_domain : str
        domain to train on (its train split) and test in-domain (its test
        split)
    out_domain : str
        domain whose test split is the out-of-domain test set. May equal
        in_domain, in which case out_test is the in-domain test set and the
        result is flagged with DomainSplit.in_domain.

    Returns
    -------
    DomainSplit
    """

    tags = domain_tags(samples)
    for tag in (in_domain,out_domain):
        if tag not in tags:
            err = f"\ndomain '{tag}' not found. Available domains:\n"
            for t in tags:
                err += f"    {t}\n"
            raise ValueError(err + "\n")

    train = [s for s in samples if s.domain == in_domain and s.split == "train"]
    in_test = [s for s in samples if s.domain == in_domain and s.split == "test"]
    out_test = [s for s in samples if s.domain == out_domain and s.split == "test"]

    if in_domain == out_domain:
        log(f"domain pair ({in_domain}, {out_domain}) is an in-domain pair")

    return DomainSplit(train,in_test,out_test,in_domain,out_domain)

def split_dev(train,fraction=0.1,seed=0):
    """
    Carve a development set out of a training set, keeping mirror pairs
    together.

    Parameters
    ----------
    train : list of Sample
        training samples
    fraction : float, default=0.1
        fraction of groups (mirror pairs or single samples) moved to dev
    seed : int, default=0
        seed of the shuffle stream

    Returns
    -------
    train : list of Sample
        remaining training samples (original order)
    dev : list of Sample
        development samples (original order)
    """

    fraction = check_float(fraction,"fraction",minimum_allowed=0,maximum_allowed=1,
                           maximum_inclusive=False)
    seed = check_int(seed,"seed",minimum_allowed=0)

    groups = list(dict.fromkeys(s.group_id for s in train))

    # Counter offset keeps this draw apart from the corpus shuffles
    gen = RngStream("shuffle",seed,counter=2**32 + 1).generator()
    order = gen.permutation(len(groups))
    n_dev = int(np.round(len(groups)*fraction))
    dev_groups = set(groups[int(i)] for i in order[:n_dev])

    kept = [s for s in train if s.group_id not in dev_groups]
    dev = [s for s in train if s.group_id in dev_groups]

    return kept, dev
