"""
Private functions used within tracedit for things like validating arguments,
building the command line, writing json, etc.
"""
