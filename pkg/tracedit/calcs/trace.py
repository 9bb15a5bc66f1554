"""
Causal tracing of the base model over many samples.
"""

from .experiment_base import Experiment
from tracedit.tracing import NoiseSpec, trace_samples, aggregate
from tracedit.tracing import bootstrap_aspect_contrast
from tracedit.io import export_heatmap, write_trace_effects
from tracedit.core.rng import RngStream
from tracedit._private.check.standard import check_int
from tracedit._private.check.standard import check_choice
from tracedit._private.check.tracedit import check_layers
from tracedit._private.interface import run_cleanly
from tracedit._private.logger import log

import os

# "shuffle" counter of the sample selection draw
TRACE_SAMPLE_COUNTER = 2**37


class TraceExperiment(Experiment):

    calc_type = "trace"

    def _select(self,split,samples):
        """
        Draw the samples to trace from one corpus split.
        """

        pool = [s for s in self._samples if s.split == split]
        if len(pool) == 0:
            err = f"\ncorpus has no '{split}' samples to trace\n\n"
            raise ValueError(err)

        gen = RngStream("shuffle",self._spec.seeds[0],counter=TRACE_SAMPLE_COUNTER).generator()
        order = gen.permutation(len(pool))[:samples]
        return [pool[int(i)] for i in sorted(order)]

    @run_cleanly
    def run(self,
            output_directory="tracedit_trace",
            samples=400,
            noise_scale=3.0,
            noise_scope="aspect",
            layers="all",
            split="test",
            band="mid",
            n_boot=1000,
            batch_size=64):
        """
        Trace samples through the base model: clean, corrupted and
        restoration runs for every (layer, position), then average the
        effects over samples whose clean run is right and corrupted run is
        wrong. Writes heatmap.csv (AIE by role bucket), heatmap_positions.csv
        (AIE by absolute position), heatmap.json (ATE, counts, noise, seeds,
        aspect contrast) and trace_effects.csv (per-sample TE).

        Parameters
        ----------
        output_directory : str, default="tracedit_trace"
            write outputs here
        samples : int, default=400
            number of samples to trace
        noise_scale : float, default=3.0
            noise std in units of the embedding standard deviation
        noise_scope : str, default="aspect"
            corrupt the aspect tokens ("aspect") or every position ("all")
        layers : str or list, default="all"
            layers to restore
        split : str, default="test"
            corpus split to draw samples from
        band : str, default="mid"
            layer band for the aspect-versus-context contrast
        n_boot : int, default=1000
            bootstrap resamples for the contrast standard error
        batch_size : int, default=64
            restoration cells per forward pass

        Returns
        -------
        TraceSummary
        """

        samples = check_int(samples,"samples",minimum_allowed=1)
        split = check_choice(split,("train","test"),"split")
        noise = NoiseSpec(multiplier=noise_scale,scope=noise_scope,seed=self._spec.seeds[0])
        layers = check_layers(layers,self._params.config.n_layers)
        band_layers = check_layers(band,self._params.config.n_layers)

        calc_params = {"samples":samples,
                       "noise":noise.to_dict(),
                       "layers":list(layers),
                       "split":split,
                       "band":list(band_layers),
                       "n_boot":n_boot,
                       "batch_size":batch_size}
        self._prepare_calc(output_directory=output_directory,
                           calc_params=calc_params)

        selected = self._select(split,samples)
        prompts = self._render(selected)

        grids = trace_samples(self._params,prompts,self._vocab.verbalizer,
                              noise=noise,layers=layers,batch_size=batch_size,
                              verbose=self._verbose)
        write_trace_effects(grids,"trace_effects.csv")

        meta = {"noise":noise.to_dict(),
                "seeds":list(self._spec.seeds),
                "layers":list(layers),
                "sample_ids":[p.sample_id for p in prompts]}
        summary = aggregate(grids,prompts,meta=meta)

        if set(band_layers) <= set(layers):
            contrast, stderr = bootstrap_aspect_contrast(grids,prompts,band_layers,
                                                         n_boot=n_boot,
                                                         seed=self._spec.seeds[0])
            summary.meta["aspect_contrast"] = {"band":list(band_layers),
                                               "mean":contrast,
                                               "stderr":stderr}
            log(f"aspect minus context AIE in layers {list(band_layers)}: "
                f"{contrast:.4f} +/- {stderr:.4f}")

        export_heatmap(summary,"heatmap.csv")
        log(f"traced {summary.n_total} samples, {summary.n_retained} retained, "
            f"ATE {summary.ate:.4f}")

        os.chdir(self._current_dir)

        return summary
