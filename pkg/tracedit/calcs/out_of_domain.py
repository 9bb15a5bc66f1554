"""
Train edits on one domain and test them on another.
"""

from .experiment_base import Experiment
from tracedit.analysis import domain_pair_tag
from tracedit.corpus import domain_tags
from tracedit._private.check.standard import check_iter
from tracedit._private.interface import run_cleanly
from tracedit._private.logger import warn

import itertools

def _parse_pair(pair):
    """
    Accept ("device","laptop"), "device:laptop" or "device->laptop".
    """

    if issubclass(type(pair),str):
        for sep in ("->",":"):
            if sep in pair:
                source, _, target = pair.partition(sep)
                return source.strip(), target.strip()
        err = f"\ndomain pair '{pair}' should look like 'source:target'\n\n"
        raise ValueError(err)

    pair = check_iter(pair,"domain pair",minimum_allowed=2,maximum_allowed=2)
    return tuple(pair)


class OutOfDomainExperiment(Experiment):

    calc_type = "ood"

    @run_cleanly
    def run(self,
            output_directory="tracedit_ood",
            pairs=None):
        """
        Train one suite per (source, seed) on the source training split and
        score it on the target domain's test split only. Each pair also gets
        a no-edit baseline row. A pair whose source and target are the same
        is flagged as in-domain.

        Parameters
        ----------
        output_directory : str, default="tracedit_ood"
            write outputs here
        pairs : list, optional
            ordered (source, target) pairs as tuples or "source:target"
            strings. Default: every ordered pair of distinct domains.

        Returns
        -------
        pandas.DataFrame
            the report table
        """

        tags = domain_tags(self._samples)
        if pairs is None:
            if len(tags) < 2:
                err = "\nout-of-domain runs need at least two domains in the corpus\n\n"
                raise ValueError(err)
            pairs = list(itertools.permutations(tags,2))

        pairs = check_iter(pairs,"pairs",minimum_allowed=1,is_not_type=str)
        pairs = [_parse_pair(p) for p in pairs]
        pairs = [(self._domain(s),self._domain(t)) for s, t in pairs]

        self._prepare_calc(output_directory=output_directory,
                           calc_params={"pairs":[list(p) for p in pairs]})

        rows = []
        for source, target in pairs:

            split = self._split(source,target)
            pair = domain_pair_tag(source,target)

            experiment = self.calc_type
            if split.in_domain:
                warn(f"pair {pair} is in-domain; reporting it as an in-domain row")
                experiment = "in-domain"

            rows.append(self._baseline_row(pair,split.out_test))
            rows.append(self._edit_row(experiment,pair,split.train,split.out_test))

        return self._complete_calc(rows)
