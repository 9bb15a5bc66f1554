"""
Report rows summarizing accuracy over seeds, written as CSV and aligned text.
"""

from tracedit._private.utility import prep_for_json

import numpy as np
import pandas as pd

import os
from dataclasses import dataclass, field

REPORT_COLUMNS = ["experiment","domain_pair","layers","policy","mode",
                  "trainable_params","trainable_fraction","n_seeds",
                  "accuracy_mean","accuracy_std",
                  "contrastive_mean","contrastive_std","seeds"]

@dataclass
class ReportRow:
    """
    One line of an experiment report.

    Attributes
    ----------
    experiment : str
        experiment id (in-domain, ood, ablate-layers, ablate-positions, or
        no-edit for baseline rows)
    domain_pair : str
        "source->target"
    layers : str
        band name or layer list ("none" for baselines)
    policy : str
        position policy ("none" for baselines)
    trainable_fraction : float
        trainable edit parameters / base parameters
    accuracies : list of float
        test accuracy per seed
    contrastive_accuracies : list of float
        contrastive-subset accuracy per seed (may be empty)
    seeds : list of int
        seeds behind accuracies
    mode : str, default="hybrid"
        edit suite mode
    trainable_params : int, default=0
        trainable edit parameter count
    """

    experiment: str
    domain_pair: str
    layers: str
    policy: str
    trainable_fraction: float
    accuracies: list
    contrastive_accuracies: list = field(default_factory=list)
    seeds: list = field(default_factory=list)
    mode: str = "hybrid"
    trainable_params: int = 0

    @staticmethod
    def _std(values):
        # std needs at least two seeds
        if len(values) < 2:
            return None
        return float(np.std(values,ddof=1))

    @property
    def mean(self):
        return float(np.mean(self.accuracies))

    @property
    def std(self):
        return self._std(self.accuracies)

    @property
    def contrastive_mean(self):
        if len(self.contrastive_accuracies) == 0:
            return None
        return float(np.mean(self.contrastive_accuracies))

    @property
    def contrastive_std(self):
        return self._std(self.contrastive_accuracies)

    def to_dict(self):

        out = {"experiment":self.experiment,
               "domain_pair":self.domain_pair,
               "layers":self.layers,
               "policy":self.policy,
               "mode":self.mode,
               "trainable_params":self.trainable_params,
               "trainable_fraction":self.trainable_fraction,
               "n_seeds":len(self.accuracies),
               "accuracy_mean":self.mean,
               "accuracy_std":self.std,
               "contrastive_mean":self.contrastive_mean,
               "contrastive_std":self.contrastive_std,
               "seeds":" ".join(str(s) for s in self.seeds)}

        return prep_for_json(out)


def domain_pair_tag(source,target):
    return f"{source}->{target}"

def rows_to_dataframe(rows):
    """
    Convert ReportRows into a dataframe with REPORT_COLUMNS.
    """

    return pd.DataFrame([r.to_dict() for r in rows],columns=REPORT_COLUMNS)

def format_report(df):
    """
    Aligned plain-text rendering of a report dataframe.
    """

    def _fmt(v):
        if pd.isna(v):
            return "-"
        return f"{v:.4f}"

    formatters = {c:_fmt for c in ["trainable_fraction","accuracy_mean","accuracy_std",
                                   "contrastive_mean","contrastive_std"]
                  if c in df.columns}

    return df.to_string(index=False,formatters=formatters,na_rep="-")

def write_report(rows,output_root="report"):
    """
    Write rows to output_root.csv and output_root.txt.

    Parameters
    ----------
    rows : list of ReportRow or pandas.DataFrame
        report content
    output_root : str, default="report"
        file name without extension

    Returns
    -------
    pandas.DataFrame
        the report table
    """

    if issubclass(type(rows),pd.DataFrame):
        df = rows
    else:
        df = rows_to_dataframe(rows)

    df.to_csv(f"{output_root}.csv",index=False)
    with open(f"{output_root}.txt","w") as f:
        f.write(format_report(df))
        f.write("\n")

    return df

def gather_reports(directories,filename="report.csv"):
    """
    Concatenate the report CSVs found under one or more experiment
    directories (searched recursively).

    Parameters
    ----------
    directories : str or list of str
        directories to search
    filename : str, default="report.csv"
        report file name to look for

    Returns
    -------
    pandas.DataFrame
        all rows, with a "source" column naming the directory each row came
        from
    """

    if issubclass(type(directories),str):
        directories = [directories]

    frames = []
    for directory in directories:

        if not os.path.isdir(directory):
            err = f"\n'{directory}' is not a directory\n\n"
            raise ValueError(err)

        for root, _, files in sorted(os.walk(directory)):
            if filename in files:
                df = pd.read_csv(os.path.join(root,filename),dtype={"seeds":str})
                df.insert(0,"source",os.path.relpath(root,directory))
                frames.append(df)

    if len(frames) == 0:
        err = f"\nno '{filename}' files found under {list(directories)}\n\n"
        raise ValueError(err)

    return pd.concat(frames,ignore_index=True)
