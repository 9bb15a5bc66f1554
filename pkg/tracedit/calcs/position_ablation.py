"""
Compare representation-edit position policies on a development split.
"""

from .experiment_base import Experiment
from tracedit.analysis import domain_pair_tag
from tracedit.corpus import split_dev
from tracedit._private.check.standard import check_iter
from tracedit._private.check.standard import check_float
from tracedit._private.check.tracedit import check_position_policy
from tracedit._private.interface import run_cleanly


class PositionAblation(Experiment):

    calc_type = "ablate-positions"

    @run_cleanly
    def run(self,
            output_directory="tracedit_ablate_positions",
            domain=None,
            policies=None,
            dev_fraction=0.1):
        """
        Train one suite per (policy, seed) on the ExperimentSpec layers and score it
        on a development split carved from the domain's training split. All
        policies share one parameter budget.

        Parameters
        ----------
        output_directory : str, default="tracedit_ablate_positions"
            write outputs here
        domain : str, optional
            domain to run (default the first domain in the corpus)
        policies : list of str, optional
            position policies (default aspect, last, mid)
        dev_fraction : float, default=0.1
            fraction of training groups held out for scoring

        Returns
        -------
        pandas.DataFrame
            the report table
        """

        if self._spec.mode == "weight":
            err = "\nposition ablation needs representation edits (mode hybrid or rep)\n\n"
            raise ValueError(err)

        domain = self._domain(domain)
        if policies is None:
            policies = ["aspect","last","mid"]
        policies = check_iter(policies,"policies",minimum_allowed=1,is_not_type=str)
        policies = [check_position_policy(p) for p in policies]
        dev_fraction = check_float(dev_fraction,"dev_fraction",
                                   minimum_allowed=0,maximum_allowed=1,
                                   minimum_inclusive=False,maximum_inclusive=False)

        self._prepare_calc(output_directory=output_directory,
                           calc_params={"domain":domain,
                                        "policies":policies,
                                        "dev_fraction":dev_fraction})

        split = self._split(domain,domain)
        train, dev = split_dev(split.train,fraction=dev_fraction,seed=self._spec.seeds[0])
        if len(dev) == 0:
            err = f"\ndev_fraction {dev_fraction} leaves an empty development split\n\n"
            raise ValueError(err)

        pair = domain_pair_tag(domain,domain)
        rows = [self._baseline_row(pair,dev)]
        for policy in policies:
            rows.append(self._edit_row(self.calc_type,pair,train,dev,policy=policy))

        return self._complete_calc(rows)
