"""
Generic logging. Messages go to stdout with a TRACEDIT prefix; warnings also
go through the warnings module so callers can filter or escalate them.
"""

import warnings

PREFIX = "TRACEDIT"

def log(msg):
    """
    Print to stdout.
    """
    print(f"{PREFIX}: {msg}",flush=True)

def warn(msg,category=UserWarning):
    """
    Log msg and issue it as a warning attributed to the caller's caller.
    """

    log(f"warning: {msg}")
    warnings.warn(msg,category,stacklevel=3)
