"""
Position policies deciding where representation edits act.
"""

from tracedit.core.rng import RngStream
from tracedit._private.check.standard import check_int
from tracedit._private.check.tracedit import check_position_policy

def middle_third(length):
    """
    Inclusive 1-based bounds of the middle third of [1,length]:
    [length//3 + 1, length - length//3]. For length 9 this is [4,6].
    """

    length = check_int(length,"length",minimum_allowed=1)
    third = length//3
    return third + 1, length - third

def select_positions(prompt,policy,seed=0):
    """
    Positions (1-based) that receive the representation edit.

    Parameters
    ----------
    prompt : PromptRendering
        rendered prompt (uses length, aspect_positions, sample_id)
    policy : str
        aspect: every aspect token; last: the final position; mid: one
        position drawn uniformly from the middle third of the prompt,
        fixed per (sample_id, seed)
    seed : int, default=0
        seed of the "shuffle" stream used by the mid policy

    Returns
    -------
    positions : tuple
        sorted 1-based positions
    """

    policy = check_position_policy(policy)
    length = prompt.length

    if policy == "aspect":
        positions = tuple(prompt.aspect_positions)
        if len(positions) == 0:
            err = "\nprompt has no aspect positions; the aspect policy needs at least one\n\n"
            raise ValueError(err)
        return positions

    if policy == "last":
        return (length,)

    low, high = middle_third(length)
    stream = RngStream("shuffle",seed,counter=prompt.sample_id)
    return (int(stream.generator().integers(low,high + 1)),)
