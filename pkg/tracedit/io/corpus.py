"""
Read and write corpus and rendered-prompt JSON-lines files.
"""

from tracedit.corpus import Sample

import pandas as pd
import numpy as np

REQUIRED_COLUMNS = ("sentence","aspect","polarity","domain")
OPTIONAL_COLUMNS = ("sample_id","split","contrastive","pair_id","lead_polarity")

def write_corpus(samples,filename):
    """
    Write samples to a JSON-lines file, one object per sample.

    Parameters
    ----------
    samples : list of Sample
        samples to write
    filename : str
        output file
    """

    columns = list(REQUIRED_COLUMNS) + list(OPTIONAL_COLUMNS)
    df = pd.DataFrame([s.to_dict() for s in samples],columns=columns)
    df.to_json(filename,orient="records",lines=True)

def read_corpus(corpus):
    """
    Read a corpus. Each line must hold sentence, aspect, polarity and domain.
    Missing sample_id values are filled with the line index; the other
    optional fields fall back to the Sample defaults.

    Parameters
    ----------
    corpus : str or pandas.DataFrame
        JSON-lines file or a dataframe with the same columns

    Returns
    -------
    list of Sample
    """

    if issubclass(type(corpus),str):
        df = pd.read_json(corpus,lines=True,dtype=False,convert_dates=False)
    elif issubclass(type(corpus),pd.DataFrame):
        df = corpus.copy()
    else:
        err = f"\n\n'corpus' {corpus} not recognized. Should be the filename of\n"
        err += "a JSON-lines corpus or a pandas dataframe.\n"
        raise ValueError(err)

    missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
    if len(missing) > 0:
        err = "\ncorpus is missing required fields:\n"
        for m in missing:
            err += f"    {m}\n"
        raise ValueError(err + "\n")

    if "sample_id" not in df.columns:
        df["sample_id"] = np.arange(len(df))

    samples = []
    for _, row in df.iterrows():

        kwargs = {c:row[c] for c in REQUIRED_COLUMNS}
        for c in OPTIONAL_COLUMNS:
            if c in df.columns and not pd.isna(row[c]):
                kwargs[c] = row[c]

        samples.append(Sample(**kwargs))

    ids = [s.sample_id for s in samples]
    if len(set(ids)) != len(ids):
        err = "\ncorpus sample_id values must be unique\n\n"
        raise ValueError(err)

    return samples

def write_prompts(prompts,filename):
    """
    Debug dump of rendered prompts (token ids and aspect positions) as
    JSON-lines.
    """

    df = pd.DataFrame([p.to_dict() for p in prompts])
    df.to_json(filename,orient="records",lines=True)
