"""
Load and validate experiment json files.
"""

from tracedit.calcs import CALC_AVAILABLE
from tracedit.io import read_config

import inspect
import os

def _validate_calc_kwargs(calc_type,
                          calc_function,
                          kwargs):
    """
    Make sure the keys in kwargs match the arguments of calc_function. Types
    are checked by the function itself; this only checks names and builds a
    human-readable error listing missing and unexpected keys.
    """

    kwargs_found = set(kwargs)

    sig = inspect.signature(calc_function)

    required = set()
    have_defaults = set()
    for param in sig.parameters:
        if param == "self":
            continue
        if sig.parameters[param].default is inspect.Parameter.empty:
            required.add(param)
        else:
            have_defaults.add(param)

    missing_required = sorted(required - kwargs_found)
    extra_args = sorted(kwargs_found - (required | have_defaults))

    if len(missing_required) == 0 and len(extra_args) == 0:
        return kwargs

    err = "\nThe json file does not have the correct arguments for calc_type\n"
    err += f"'{calc_type}'.\n\n"

    if len(missing_required) > 0:
        err += "The following required keys are not defined:\n"
        for m in missing_required:
            err += f"    {m}\n"
        err += "\n"

    if len(extra_args) > 0:
        err += "The following keys are not allowed:\n"
        for e in extra_args:
            err += f"    {e}\n"
        err += "\n"

    name = f"{calc_function}"
    dashes = len(name)*"-"
    err += f"\ncalc_type '{calc_type}' details:\n\n{name}\n{dashes}\n"
    err += f"{calc_function.__doc__}\n\n"

    raise ValueError(err)

def read_json(json_file,verbose=False):
    """
    Load a json file describing an experiment. The file must have the
    top-level keys:

        "calc_type" : which experiment to run (see CALC_AVAILABLE)
        "spec" : ExperimentSpec fields (corpus, base, layers, seeds, ...)

    and may have:

        "calc_params" : keyword arguments for the experiment's run method
        "tracedit_version" : version that wrote the file (ignored)

    Relative corpus and base paths are resolved against the json file's
    directory.

    Parameters
    ----------
    json_file : str
        json file to load
    verbose : bool, default=False
        show progress bars during the run

    Returns
    -------
    experiment : Experiment subclass
        initialized experiment
    calc_params : dict
        experiment.run(**calc_params) runs the calculation
    """

    calc_input = read_config(json_file)

    if "calc_type" not in calc_input:
        err = "\njson must have a 'calc_type' key in the top level naming the\n"
        err += "experiment.\n\n"
        raise ValueError(err)
    calc_type = calc_input.pop("calc_type")

    if not issubclass(type(calc_type),str) or calc_type not in CALC_AVAILABLE:
        err = f"\ncalc_type '{calc_type}' is not recognized. calc_type should\n"
        err += "be one of:\n"
        for a in CALC_AVAILABLE:
            err += f"    {a}\n"
        raise ValueError(err + "\n")

    calc_class = CALC_AVAILABLE[calc_type]

    if "spec" not in calc_input:
        err = "\njson must have a 'spec' key holding the experiment inputs\n\n"
        raise ValueError(err)

    spec = dict(calc_input["spec"])
    for key in ("corpus","base"):
        if key in spec:
            spec[key] = read_config_path(json_file,spec[key])

    experiment = calc_class(spec,verbose=verbose)

    calc_params = calc_input.get("calc_params",{})
    calc_params = _validate_calc_kwargs(calc_type=calc_type,
                                        calc_function=experiment.run,
                                        kwargs=calc_params)

    return experiment, calc_params

def read_config_path(json_file,value):
    """
    Resolve a path stored in a json file against the file's directory.
    """

    if not issubclass(type(value),str) or os.path.isabs(value):
        return value
    return os.path.join(os.path.dirname(os.path.abspath(json_file)),value)
