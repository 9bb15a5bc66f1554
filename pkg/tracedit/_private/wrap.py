"""
Build command line argument parsers from function signatures and merge the
parsed flags with json config values and function defaults.
"""

import argparse
import inspect
import os
import re

class IterFromFile(argparse.Action):
    """
    Argparse action for intelligently handling list-like arguments. Processes
    arguments assuming either 1) multiple arguments that are then put into a
    list of appropriate type or 2) a single file that has values on each line.
    When reading the file, class will delete everything after "#" on a line and
    will skip blank lines.
    """
    def __init__(self, option_strings, dest, value_type, **kwargs):
        # every entry in the iterable is cast to value_type
        self._value_type = value_type
        super().__init__(option_strings, dest, **kwargs)

    def _cast(self,v,option_string,source=None):

        type_name = self._value_type.__name__
        try:
            return self._value_type(v)
        except (TypeError,ValueError):

            err = "\n\n"
            if source is not None:
                err += f"Reading '{option_string} {source}' as a file.\n"
            err += f"Could not parse '{v}' as '{type_name}'. {option_string} should\n"
            err += f"either have a single argument that points to a file with one '{type_name}'\n"
            err += f"on each line or have one or more arguments that can be interpreted as\n"
            err += f"{type_name}. Examples:\n\n"
            err += f"    {option_string} SOME_FILE\n"
            err += f"    {option_string} {type_name}1 {type_name}2 ...\n\n"
            raise ValueError(err)

    def __call__(self, parser, namespace, values, option_string=None):

        if len(values) == 1 and os.path.isfile(values[0]):

            final_values = []
            with open(values[0]) as f:
                for line in f:

                    # Split on # for comments
                    v = line.split("#")[0].strip()
                    if v == "":
                        continue

                    final_values.append(self._cast(v,option_string,values[0]))

        else:
            final_values = [self._cast(v,option_string) for v in values]

        setattr(namespace, self.dest, final_values)


def flag_name(param):
    """
    Command line flag for a function parameter (rank_w -> --rank-w).
    """
    return "--" + re.sub("_","-",param)

def function_parameters(fcn,skip=()):
    """
    Ordered dictionary of parameter name to default for fcn, leaving out
    self, the names in skip and **kwargs-style parameters. Required
    parameters map to inspect.Parameter.empty.
    """

    out = {}
    param = inspect.signature(fcn).parameters
    for p in param:
        if p == "self" or p in skip:
            continue
        if param[p].kind in (param[p].VAR_POSITIONAL,param[p].VAR_KEYWORD):
            continue
        out[p] = param[p].default

    return out

def add_function_arguments(parser,
                           fcn,
                           skip=(),
                           optional_arg_types={},
                           rename={}):
    """
    Add one flag per parameter of fcn to parser.

    Every flag defaults to argparse.SUPPRESS so the parsed namespace only
    holds flags the user actually passed; defaults are filled later by
    resolve_arguments. Required parameters become flags too (they can come
    from a config file) and are checked in resolve_arguments.

    Parameters
    ----------
    parser : argparse.ArgumentParser
        parser (or subparser) to populate
    fcn : function or class
        callable whose signature defines the flags
    skip : list-like, optional
        parameter names to leave out
    optional_arg_types : dict, optional
        types for parameters whose default is None. A one-element list
        such as [str] means "one or more values of that type". Parameters
        default None that are not listed are treated as str.
    rename : dict, optional
        map parameter name to the flag name used on the command line

    Returns
    -------
    params : dict
        parameter name to default for every flag added
    """

    params = function_parameters(fcn,skip)
    for p, param_default in params.items():

        flag = flag_name(rename.get(p,p))

        if param_default is inspect.Parameter.empty:
            arg_type = optional_arg_types.get(p,str)
        elif param_default is None:
            arg_type = optional_arg_types.get(p,str)
        else:
            arg_type = type(param_default)

        kwargs = {"dest":p,"default":argparse.SUPPRESS}

        if arg_type is bool:
            if param_default is True:
                kwargs["action"] = "store_false"
            else:
                kwargs["action"] = "store_true"

        # one-element list marks "list of this type"
        elif issubclass(type(arg_type),list):
            kwargs["action"] = IterFromFile
            kwargs["value_type"] = arg_type[0]
            kwargs["nargs"] = "+"

        # non-str iterable default: read from a file or take + args in a row
        elif hasattr(arg_type,"__iter__") and arg_type is not str:
            kwargs["action"] = IterFromFile
            kwargs["value_type"] = type(param_default[0])
            kwargs["nargs"] = "+"

        else:
            kwargs["type"] = arg_type

        if param_default is inspect.Parameter.empty:
            kwargs["help"] = "(required)"
        else:
            kwargs["help"] = f"(default: {param_default})"

        parser.add_argument(flag,**kwargs)

    return params

def resolve_arguments(params,cli_kwargs,config_kwargs=None,command=None):
    """
    Merge argument sources with precedence command line > config file >
    function default.

    Parameters
    ----------
    params : dict
        parameter name to default (from add_function_arguments)
    cli_kwargs : dict
        values parsed from the command line
    config_kwargs : dict, optional
        values read from a json config file. Keys that are not parameters
        of this command are ignored so one file can serve several
        commands.
    command : str, optional
        command name used in error messages

    Returns
    -------
    kwargs : dict
        complete keyword arguments for the function

    Raises
    ------
    ValueError
        a required parameter is missing from every source
    """

    if config_kwargs is None:
        config_kwargs = {}

    kwargs = {}
    missing = []
    for p, default in params.items():
        if p in cli_kwargs:
            kwargs[p] = cli_kwargs[p]
        elif p in config_kwargs:
            kwargs[p] = config_kwargs[p]
        elif default is inspect.Parameter.empty:
            missing.append(p)
        else:
            kwargs[p] = default

    if len(missing) > 0:
        name = "" if command is None else f"'{command}' "
        err = f"\n{name}is missing required argument(s):\n"
        for m in missing:
            err += f"    {flag_name(m)}\n"
        err += "\nPass them on the command line or in the --config file.\n\n"
        raise ValueError(err)

    return kwargs
