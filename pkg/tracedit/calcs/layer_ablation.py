"""
Compare edit accuracy across layer bands.
"""

from .experiment_base import Experiment
from tracedit.analysis import domain_pair_tag
from tracedit.core.editing import count_params, init_edit_suite
from tracedit._private.check.tracedit import check_bands
from tracedit._private.interface import run_cleanly
from tracedit._private.logger import warn


class LayerAblation(Experiment):

    calc_type = "ablate-layers"

    def _band_budgets(self,bands):
        """
        Trainable parameter count per band.
        """

        budgets = {}
        for name, layers in bands.items():
            suite = init_edit_suite(self._params.config,layers,
                                    r_w=self._spec.r_w,r_rep=self._spec.r_rep,
                                    mode=self._spec.mode)
            budgets[name] = count_params(suite,self._params)[0]
        return budgets

    @run_cleanly
    def run(self,
            output_directory="tracedit_ablate_layers",
            domain=None,
            bands=None):
        """
        Train one suite per (band, seed) on a domain's training split and
        score it on that domain's test split. The "all" band is always
        added and reported with its own (larger) parameter count.

        Parameters
        ----------
        output_directory : str, default="tracedit_ablate_layers"
            write outputs here
        domain : str, optional
            domain to run (default the first domain in the corpus)
        bands : list, optional
            layer bands to compare: band names and/or layer selections such
            as "1-3". Non-"all" bands may not overlap. Default early, mid,
            late.

        Returns
        -------
        pandas.DataFrame
            the report table
        """

        domain = self._domain(domain)
        if bands is None:
            bands = ["early","mid","late"]

        bands = check_bands(bands,self._params.config.n_layers)
        if "all" not in bands:
            bands.update(check_bands(["all"],self._params.config.n_layers))

        budgets = self._band_budgets(bands)
        thirds = {budgets[k] for k in bands if k != "all"}
        if len(thirds) > 1:
            warn("layer bands differ in size, so their trainable parameter counts differ: "
                + ", ".join(f"{k}={budgets[k]}" for k in bands))

        self._prepare_calc(output_directory=output_directory,
                           calc_params={"domain":domain,
                                        "bands":{k:list(v) for k, v in bands.items()},
                                        "budgets":budgets})

        split = self._split(domain,domain)
        pair = domain_pair_tag(domain,domain)

        rows = [self._baseline_row(pair,split.in_test)]
        for name, layers in bands.items():
            rows.append(self._edit_row(self.calc_type,pair,split.train,split.in_test,
                                       layers=layers,layer_label=name))

        return self._complete_calc(rows)
