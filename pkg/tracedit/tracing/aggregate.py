"""
Aggregate per-sample traces into average total and indirect effects.
"""

from tracedit.core.data import ROLE_BUCKETS, ASPECT_BUCKETS
from tracedit.core.errors import NoRetainedSamplesError
from tracedit.core.rng import RngStream
from tracedit._private.check.standard import check_int
from tracedit._private.check.tracedit import check_layers
from tracedit._private.logger import log

import numpy as np
import pandas as pd

from dataclasses import dataclass, field

# "shuffle" counter of the bootstrap resampling stream
BOOTSTRAP_COUNTER = 2**36

# Buckets compared against the aspect buckets in the bootstrap contrast
CONTEXT_BUCKETS = ("first","pre-aspect","post-aspect")

def role_buckets(prompt):
    """
    Map each role bucket to the 1-based positions it covers in prompt.

    first is position 1 and last is position T. aspect-first and aspect-last
    are the first and last aspect tokens (the same token for one-token
    aspects); aspect-middle holds the tokens between them. pre-aspect and
    post-aspect are the remaining positions before and after the aspect.
    Every position lands in at most one bucket: when the aspect starts at
    position 1 (or ends at T) that token is counted as aspect, not as first
    (or last). Buckets with no positions are omitted.
    """

    T = prompt.length
    aspect = sorted(prompt.aspect_positions)
    if len(aspect) == 0:
        err = f"\nsample {prompt.sample_id} has no aspect positions\n\n"
        raise ValueError(err)

    first_a, last_a = aspect[0], aspect[-1]
    buckets = {"first":[1] if first_a > 1 else [],
               "pre-aspect":list(range(2,first_a)),
               "aspect-first":[first_a],
               "aspect-middle":list(range(first_a + 1,last_a)),
               "aspect-last":[last_a],
               "post-aspect":list(range(last_a + 1,T)),
               "last":[T] if last_a < T else []}

    return {k:v for k, v in buckets.items() if len(v) > 0}

@dataclass
class TraceSummary:
    """
    Averages over retained samples.

    Attributes
    ----------
    ate : float
        mean total effect
    aie_buckets : pandas.DataFrame
        AIE indexed by role bucket, one column per layer (1..L)
    aie_positions : pandas.DataFrame
        AIE indexed by absolute position, one column per layer (1..L)
    n_total : int
        samples traced
    n_retained : int
        samples passing the expected-prediction filter
    meta : dict
        noise spec, seeds and other run information for the sidecar
    """

    ate: float
    aie_buckets: pd.DataFrame
    aie_positions: pd.DataFrame
    n_total: int
    n_retained: int
    meta: dict = field(default_factory=dict)

    @property
    def n_layers(self):
        return self.aie_buckets.shape[1]


def _match(grids,prompts):
    """
    Pair each grid with its prompt by sample id.
    """

    by_id = {p.sample_id:p for p in prompts}
    pairs = []
    for g in grids:
        if g.sample_id not in by_id:
            err = f"\nno prompt for traced sample {g.sample_id}\n\n"
            raise ValueError(err)
        p = by_id[g.sample_id]
        if g.n_positions != p.length:
            err = f"\ntrace grid for sample {g.sample_id} has {g.n_positions} positions, "
            err += f"prompt has {p.length}\n\n"
            raise ValueError(err)
        pairs.append((g,p))

    return pairs

def _retained_pairs(grids,prompts):

    if len(grids) == 0:
        err = "\naggregate needs at least one trace grid\n\n"
        raise ValueError(err)

    pairs = _match(grids,prompts)
    retained = [(g,p) for g, p in pairs if g.retained]
    if len(retained) == 0:
        err = f"\nnone of the {len(grids)} traced samples met the expected-prediction\n"
        err += "filter (clean run correct, corrupted run wrong).\n\n"
        log(err.strip())
        raise NoRetainedSamplesError(err)

    return retained

def bucket_effects(grid,prompt):
    """
    (buckets x L) array of the sample's IE averaged over each bucket's
    positions. Buckets absent from the prompt are NaN.
    """

    out = np.full((len(ROLE_BUCKETS),grid.n_layers),np.nan)
    for bucket, positions in role_buckets(prompt).items():
        idx = np.array(positions) - 1
        out[ROLE_BUCKETS.index(bucket)] = np.mean(grid.ie[:,idx],axis=1)

    return out

def _nanmean(stack):
    """
    Mean over axis 0 ignoring NaN; cells with no data stay NaN.
    """

    counts = np.sum(~np.isnan(stack),axis=0)
    sums = np.nansum(stack,axis=0)
    with np.errstate(invalid="ignore",divide="ignore"):
        return np.where(counts > 0,sums/np.maximum(counts,1),np.nan)

def aggregate(grids,prompts,meta=None):
    """
    Average total and indirect effects over the retained samples.

    Parameters
    ----------
    grids : list of TraceGrid
        traced samples (non-empty)
    prompts : list of PromptRendering
        prompts the grids were traced on (matched by sample_id)
    meta : dict, optional
        run information to carry into the summary sidecar

    Returns
    -------
    TraceSummary

    Raises
    ------
    NoRetainedSamplesError
        no sample passed the expected-prediction filter
    """

    retained = _retained_pairs(grids,prompts)

    L = retained[0][0].n_layers
    layers = list(range(1,L + 1))

    ate = float(np.mean([g.te for g, _ in retained]))

    buckets = np.stack([bucket_effects(g,p) for g, p in retained])
    aie_buckets = pd.DataFrame(_nanmean(buckets),index=list(ROLE_BUCKETS),columns=layers)
    aie_buckets.index.name = "bucket"

    T_max = max(g.n_positions for g, _ in retained)
    positions = np.full((len(retained),L,T_max),np.nan)
    for k, (g, _) in enumerate(retained):
        positions[k,:,:g.n_positions] = g.ie
    aie_positions = pd.DataFrame(_nanmean(positions).T,
                                 index=list(range(1,T_max + 1)),
                                 columns=layers)
    aie_positions.index.name = "position"

    summary_meta = {} if meta is None else dict(meta)
    summary_meta["retained_ids"] = sorted(int(g.sample_id) for g, _ in retained)

    return TraceSummary(ate=ate,
                        aie_buckets=aie_buckets,
                        aie_positions=aie_positions,
                        n_total=len(grids),
                        n_retained=len(retained),
                        meta=summary_meta)

def bootstrap_aspect_contrast(grids,prompts,band,n_boot=1000,seed=0):
    """
    Mean IE of the aspect buckets minus that of the context buckets (first,
    pre-aspect, post-aspect) within a layer band, with a bootstrap standard
    error over retained samples.

    Parameters
    ----------
    grids : list of TraceGrid
        traced samples
    prompts : list of PromptRendering
        prompts matched by sample_id
    band : str or list-like
        layers to average over (band name such as "mid", or layers)
    n_boot : int, default=1000
        bootstrap resamples
    seed : int, default=0
        seed of the resampling stream

    Returns
    -------
    contrast : float
        mean per-sample contrast
    stderr : float
        bootstrap standard error of the mean contrast
    """

    retained = _retained_pairs(grids,prompts)
    n_boot = check_int(n_boot,"n_boot",minimum_allowed=1)

    L = retained[0][0].n_layers
    band = np.array(check_layers(band,L),dtype=int) - 1
    if len(band) == 0:
        err = "\nbootstrap_aspect_contrast needs a non-empty layer band\n\n"
        raise ValueError(err)

    aspect_rows = [ROLE_BUCKETS.index(b) for b in ASPECT_BUCKETS]
    context_rows = [ROLE_BUCKETS.index(b) for b in CONTEXT_BUCKETS]

    per_sample = []
    for g, p in retained:
        effects = bucket_effects(g,p)[:,band]
        aspect = np.nanmean(effects[aspect_rows])
        context = effects[context_rows]
        if np.all(np.isnan(context)):
            continue
        per_sample.append(aspect - np.nanmean(context))

    if len(per_sample) == 0:
        err = "\nno retained sample has context positions to contrast against\n\n"
        raise ValueError(err)

    per_sample = np.array(per_sample)
    gen = RngStream("shuffle",seed,counter=BOOTSTRAP_COUNTER).generator()
    draws = gen.integers(0,len(per_sample),size=(n_boot,len(per_sample)))
    boot_means = per_sample[draws].mean(axis=1)

    stderr = 0.0
    if n_boot > 1:
        stderr = float(np.std(boot_means,ddof=1))

    return float(per_sample.mean()), stderr
