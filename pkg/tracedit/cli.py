"""
The `tracedit` command line: one subcommand per pipeline step or experiment.

Argument precedence is command line flag > --config json > function
default. Exit codes: 0 on success, 1 for invalid input (bad flags, bad
values, unreadable files), 2 for runtime failures (divergence, missed
accuracy gate, anything unexpected).
"""

from tracedit.calcs import generate_data, train_base_model, train_suite, evaluate_model
from tracedit.calcs import ExperimentSpec
from tracedit.calcs import TraceExperiment, InDomainExperiment, OutOfDomainExperiment
from tracedit.calcs import LayerAblation, PositionAblation
from tracedit.analysis import gather_reports, write_report, format_report
from tracedit.io import read_config, write_manifest
from tracedit._private.wrap import add_function_arguments, resolve_arguments
from tracedit._private.wrap import function_parameters
from tracedit._private.interface import WrappedFunctionException
from tracedit.__version__ import __version__

import argparse
import os
import sys

# subcommand -> (function, parameters supplied by the global flags)
PIPELINE_COMMANDS = {
    "gen-data":(generate_data,("out_dir","seed")),
    "train-base":(train_base_model,("out_dir","seed","precision","verbose")),
    "edit":(train_suite,("out_dir","seed","precision","verbose")),
    "eval":(evaluate_model,("out_dir","precision","verbose")),
}

# subcommand -> (experiment class, ExperimentSpec fields it does not use)
EXPERIMENT_COMMANDS = {
    "trace":(TraceExperiment,("layers","policy","r_w","r_rep","mode","lr_w",
                              "lr_rep","epochs","batch_size","weight_decay")),
    "in-domain":(InDomainExperiment,()),
    "ood":(OutOfDomainExperiment,()),
    "ablate-layers":(LayerAblation,("layers",)),
    "ablate-positions":(PositionAblation,("policy",)),
}

# parameter name -> flag name
RENAME = {"r_w":"rank_w",
          "r_rep":"rank_rep",
          "policy":"positions"}

OPTIONAL_ARG_TYPES = {"domain":str,
                      "domains":[str],
                      "pairs":[str],
                      "bands":[str],
                      "policies":[str],
                      "template":str,
                      "suite":str}

GLOBAL_DEFAULTS = {"seed":0,
                   "n_seeds":3,
                   "out_dir":None,
                   "precision":"f32"}

VALIDATION_ERRORS = (ValueError,FileNotFoundError,FileExistsError)


class _Parser(argparse.ArgumentParser):
    """
    ArgumentParser that exits with status 1 (not argparse's 2) on bad
    arguments so usage errors count as validation errors.
    """

    def error(self,message):
        self.print_usage(sys.stderr)
        self.exit(1,f"{self.prog}: error: {message}\n")


def _global_parser():

    parser = _Parser(add_help=False)
    group = parser.add_argument_group("global flags")
    group.add_argument("--config",default=None,
                       help="json file with argument values (flags override it)")
    group.add_argument("--seed",type=int,default=argparse.SUPPRESS,
                       help="random seed; experiments use seed..seed+n_seeds-1 (default: 0)")
    group.add_argument("--out-dir",dest="out_dir",default=argparse.SUPPRESS,
                       help="output directory")
    group.add_argument("--precision",choices=("f32","f64"),default=argparse.SUPPRESS,
                       help="floating point precision (default: f32)")
    group.add_argument("--verbose",action="store_true",default=False,
                       help="show progress bars")

    return parser

def build_parser():
    """
    Construct the full `tracedit` argument parser.

    Returns
    -------
    parser : argparse.ArgumentParser
    commands : dict
        subcommand name to dictionary of parameter defaults, split into
        "function", "spec" and "run" groups
    """

    parent = _global_parser()
    parser = _Parser(prog="tracedit",
                     description="Causal tracing and hybrid editing of small transformer sentiment models.")
    parser.add_argument("--version",action="version",version=f"tracedit {__version__}")
    subparsers = parser.add_subparsers(dest="command",metavar="command")

    commands = {}

    for name, (fcn, supplied) in PIPELINE_COMMANDS.items():
        sub = subparsers.add_parser(name,
                                    parents=[parent],
                                    help=fcn.__doc__.strip().split("\n")[0],
                                    description=fcn.__doc__,
                                    formatter_class=argparse.RawTextHelpFormatter)
        params = add_function_arguments(sub,fcn,skip=supplied,
                                        optional_arg_types=OPTIONAL_ARG_TYPES)
        commands[name] = {"function":params}

    for name, (cls, unused) in EXPERIMENT_COMMANDS.items():
        sub = subparsers.add_parser(name,
                                    parents=[parent],
                                    help=cls.run.__doc__.strip().split("\n")[0],
                                    description=cls.run.__doc__,
                                    formatter_class=argparse.RawTextHelpFormatter)
        sub.add_argument("--n-seeds",dest="n_seeds",type=int,default=argparse.SUPPRESS,
                         help="number of seeds (default: 3)")
        spec = add_function_arguments(sub,ExperimentSpec,
                                      skip=("seeds","precision") + tuple(unused),
                                      optional_arg_types=OPTIONAL_ARG_TYPES,
                                      rename=RENAME)
        run = add_function_arguments(sub,cls.run,skip=("output_directory",),
                                     optional_arg_types=OPTIONAL_ARG_TYPES)
        commands[name] = {"spec":spec,"run":run}

    sub = subparsers.add_parser("report",
                                parents=[parent],
                                help="gather report.csv files into one table",
                                description=run_report.__doc__,
                                formatter_class=argparse.RawTextHelpFormatter)
    sub.add_argument("directories",nargs="+",help="experiment output directories")
    commands["report"] = {}

    return parser, commands

def _config_values(config_file):
    """
    Read a --config file, accepting dashed or underscored keys and the
    command line names of renamed parameters.
    """

    if config_file is None:
        return {}

    config = read_config(config_file)

    inverse = {v:k for k, v in RENAME.items()}
    out = {}
    for k, v in config.items():
        k = k.replace("-","_")
        out[inverse.get(k,k)] = v

    return out

def _seeds(cli,config):

    if "seeds" in config and "seed" not in cli and "n_seeds" not in cli:
        return list(config["seeds"])

    glob = resolve_arguments(GLOBAL_DEFAULTS,cli,config)
    return list(range(glob["seed"],glob["seed"] + glob["n_seeds"]))

def run_report(directories,out_dir="."):
    """
    Gather the report.csv files found under one or more experiment
    directories and write them to report.csv and report.txt in out_dir.
    """

    df = gather_reports(directories)

    os.makedirs(out_dir,exist_ok=True)
    write_report(df,os.path.join(out_dir,"report"))
    write_manifest(out_dir,"report",{"directories":[os.path.abspath(d) for d in directories]})

    print(format_report(df),flush=True)

    return df

def dispatch(args,commands):
    """
    Run the subcommand described by parsed args.
    """

    cli = dict(vars(args))
    command = cli.pop("command")
    verbose = cli.pop("verbose")
    config = _config_values(cli.pop("config"))

    glob = resolve_arguments(GLOBAL_DEFAULTS,cli,config,command)

    if command == "report":
        out_dir = "." if glob["out_dir"] is None else glob["out_dir"]
        return run_report(cli["directories"],out_dir=out_dir)

    if command in PIPELINE_COMMANDS:

        fcn, supplied = PIPELINE_COMMANDS[command]
        kwargs = resolve_arguments(commands[command]["function"],cli,config,command)

        takes = function_parameters(fcn)
        for key in supplied:
            if key == "verbose":
                kwargs[key] = verbose
            elif key == "out_dir":
                kwargs[key] = "." if glob["out_dir"] is None else glob["out_dir"]
            elif key in takes:
                kwargs[key] = glob[key]

        return fcn(**kwargs)

    cls, _ = EXPERIMENT_COMMANDS[command]

    spec = resolve_arguments(commands[command]["spec"],cli,config,command)
    spec["seeds"] = _seeds(cli,config)
    spec["precision"] = glob["precision"]

    run = resolve_arguments(commands[command]["run"],cli,config,command)
    if glob["out_dir"] is not None:
        run["output_directory"] = glob["out_dir"]

    experiment = cls(spec,verbose=verbose)
    return experiment.run(**run)

def _root_cause(e):

    while issubclass(type(e),WrappedFunctionException) and e.__cause__ is not None:
        e = e.__cause__
    return e

def main(argv=None):
    """
    Entry point for the `tracedit` script.

    Parameters
    ----------
    argv : list, optional
        arguments to parse. if None, use sys.argv[1:]

    Returns
    -------
    int
        exit code
    """

    if argv is None:
        argv = sys.argv[1:]

    parser, commands = build_parser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code is None else e.code

    if args.command is None:
        parser.print_help(sys.stderr)
        return 1

    try:
        dispatch(args,commands)
    except Exception as e:
        cause = _root_cause(e)
        sys.stderr.write(f"tracedit {args.command}: {type(cause).__name__}: {cause}\n")
        if issubclass(type(cause),VALIDATION_ERRORS):
            return 1
        return 2

    return 0
