"""
Train and test edits within each domain.
"""

from .experiment_base import Experiment
from tracedit.analysis import domain_pair_tag
from tracedit.corpus import domain_tags
from tracedit._private.check.standard import check_iter
from tracedit._private.interface import run_cleanly


class InDomainExperiment(Experiment):

    calc_type = "in-domain"

    @run_cleanly
    def run(self,
            output_directory="tracedit_in_domain",
            domains=None):
        """
        Train a fresh edit suite per (domain, seed) on the domain's training
        split and score it on the same domain's test split. Each domain also
        gets a no-edit baseline row.

        Parameters
        ----------
        output_directory : str, default="tracedit_in_domain"
            write outputs (manifest.json, report.csv, report.txt, runs/) here
        domains : list of str, optional
            domains to run (default every domain in the corpus)

        Returns
        -------
        pandas.DataFrame
            the report table
        """

        if domains is None:
            domains = domain_tags(self._samples)
        domains = check_iter(domains,"domains",minimum_allowed=1,is_not_type=str)
        domains = [self._domain(d) for d in domains]

        self._prepare_calc(output_directory=output_directory,
                           calc_params={"domains":domains})

        rows = []
        for domain in domains:
            split = self._split(domain,domain)
            pair = domain_pair_tag(domain,domain)
            rows.append(self._baseline_row(pair,split.in_test))
            rows.append(self._edit_row(self.calc_type,pair,split.train,split.in_test))

        return self._complete_calc(rows)
