"""
Write and read average-indirect-effect heatmaps: a role-bucket CSV, an
absolute-position CSV and a JSON sidecar.
"""

from tracedit.tracing import TraceSummary
from tracedit._private.utility import prep_for_json

import pandas as pd
import numpy as np

import json
import os

def heatmap_paths(filename):
    """
    (bucket csv, position csv, sidecar json) file names for filename.
    """

    root, _ = os.path.splitext(filename)
    return f"{root}.csv", f"{root}_positions.csv", f"{root}.json"

def export_heatmap(summary,filename):
    """
    Write a TraceSummary. The bucket CSV has a "bucket" column followed by
    one column per layer (1..L); the positions CSV has a "position" column
    followed by the layers. Buckets or positions with no data are written
    empty. The sidecar holds ATE, sample counts and the run metadata.

    Parameters
    ----------
    summary : TraceSummary
        aggregated trace
    filename : str
        bucket CSV name (e.g. heatmap.csv)

    Returns
    -------
    list of str
        files written
    """

    if not issubclass(type(summary),TraceSummary):
        err = f"\nsummary should be a TraceSummary, not {type(summary)}\n\n"
        raise ValueError(err)

    if summary.n_retained < 1:
        err = "\ncannot export an empty trace summary\n\n"
        raise ValueError(err)

    bucket_file, position_file, sidecar_file = heatmap_paths(filename)

    summary.aie_buckets.to_csv(bucket_file,float_format="%.10g")
    summary.aie_positions.to_csv(position_file,float_format="%.10g")

    sidecar = {"ate":summary.ate,
               "n_total":summary.n_total,
               "n_retained":summary.n_retained,
               "layers":list(summary.aie_buckets.columns)}
    sidecar.update(summary.meta)

    with open(sidecar_file,"w") as f:
        json.dump(prep_for_json(sidecar),f,indent=2,sort_keys=True)

    return [bucket_file,position_file,sidecar_file]

def _read_grid(filename,index_name):

    df = pd.read_csv(filename,index_col=0)
    df.index.name = index_name
    df.columns = [int(c) for c in df.columns]
    return df.astype(np.float64)

def read_heatmap(filename):
    """
    Read the files written by export_heatmap back into a TraceSummary.
    """

    bucket_file, position_file, sidecar_file = heatmap_paths(filename)

    aie_buckets = _read_grid(bucket_file,"bucket")
    aie_positions = _read_grid(position_file,"position")

    with open(sidecar_file) as f:
        meta = json.load(f)

    ate = meta.pop("ate")
    n_total = meta.pop("n_total")
    n_retained = meta.pop("n_retained")
    meta.pop("layers",None)

    return TraceSummary(ate=ate,
                        aie_buckets=aie_buckets,
                        aie_positions=aie_positions,
                        n_total=n_total,
                        n_retained=n_retained,
                        meta=meta)

def write_trace_effects(grids,filename):
    """
    Per-sample total effects and filter outcome as CSV.
    """

    df = pd.DataFrame([g.to_dict() for g in grids])
    df.to_csv(filename,index=False)
    return df
