"""
Read experiment configuration json files and write run manifests.
"""

from tracedit._private.utility import prep_for_json
from tracedit.__version__ import __version__

import json
import os

def read_config(json_file):
    """
    Load a json configuration file. Relative paths stored under keys ending
    in "_file" and the corpus, checkpoint, base and suite keys are resolved
    against the directory holding json_file.

    Parameters
    ----------
    json_file : str
        file to read

    Returns
    -------
    dict
        configuration
    """

    if not os.path.isfile(json_file):
        err = f"\nconfig file '{json_file}' does not exist\n\n"
        raise ValueError(err)

    with open(json_file) as f:
        try:
            config = json.load(f)
        except json.JSONDecodeError as e:
            err = f"\nconfig file '{json_file}' is not valid json:\n{e}\n\n"
            raise ValueError(err) from e

    if not issubclass(type(config),dict):
        err = f"\nconfig file '{json_file}' should hold a json object at the top level\n\n"
        raise ValueError(err)

    base_path = os.path.dirname(os.path.abspath(json_file))
    for k, v in config.items():
        is_path = k.endswith("_file") or k in ("corpus","checkpoint","base","suite")
        if is_path and issubclass(type(v),str) and not os.path.isabs(v):
            config[k] = os.path.join(base_path,v)

    return config

def write_manifest(output_directory,calc_type,calc_params,filename="manifest.json"):
    """
    Write the fully resolved configuration of a run.

    Parameters
    ----------
    output_directory : str
        directory to write into
    calc_type : str
        what was run
    calc_params : dict
        resolved parameters
    filename : str, default="manifest.json"
        name of the manifest

    Returns
    -------
    str
        path of the manifest
    """

    out = {"calc_type":calc_type,
           "calc_params":calc_params,
           "tracedit_version":__version__}
    out = prep_for_json(out)

    path = os.path.join(output_directory,filename)
    with open(path,"w") as f:
        json.dump(out,f,indent=2,sort_keys=True)

    return path
