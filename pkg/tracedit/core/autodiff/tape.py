"""
Gradient tape: an ordered record of primitive operations that can be replayed
backward once to produce gradients.
"""

from tracedit.core.errors import TapeError

import numpy as np

import threading
from collections import namedtuple

# One record per primitive call. vjp maps the output gradient to a tuple of
# input gradients (None where an input does not need one).
Node = namedtuple("Node",["op_name","inputs","output","vjp"])

_local = threading.local()

def _tape_stack():
    if not hasattr(_local,"stack"):
        _local.stack = []
    return _local.stack

def current_tape():
    """
    Return the innermost active GradientTape on this thread, or None.
    """

    stack = _tape_stack()
    if len(stack) == 0:
        return None
    return stack[-1]


class GradientTape:
    """
    Record primitive operations performed inside a ``with`` block so a scalar
    result can be differentiated with respect to every ``requires_grad``
    tensor that fed into it.

    Tapes are single-use and single-writer. Each thread keeps its own stack of
    active tapes, so independent forward evaluations can run in parallel as
    long as each owns its tape.

    Example
    -------

    .. code-block:: python

        x = Tensor([3.0],requires_grad=True)
        with GradientTape() as tape:
            y = (x*x).sum()
        grads = tape.backward(y)
        grads[x].data   # array([6.])
    """

    def __init__(self):

        self._nodes = []
        self._produced = set()
        self._consumed = False

    def __enter__(self):

        if self._consumed:
            err = "\nThis GradientTape has already been consumed by backward.\n\n"
            raise TapeError(err)

        _tape_stack().append(self)
        return self

    def __exit__(self,exc_type,exc_value,traceback):

        stack = _tape_stack()
        if self in stack:
            stack.remove(self)

    def record(self,node):
        """
        Append a primitive record. Called by the primitives in
        tracedit.core.autodiff.functional.
        """

        if self._consumed:
            err = "\nCannot record onto a consumed GradientTape.\n\n"
            raise TapeError(err)

        self._nodes.append(node)
        self._produced.add(id(node.output))

    def backward(self,loss,params=None):
        """
        Replay the tape in reverse, visiting each recorded operation once.

        Parameters
        ----------
        loss : Tensor
            scalar tensor produced by primitives recorded on this tape
        params : list-like of Tensor, optional
            parameters to report. Parameters the loss does not depend on map
            to zero gradients. If None, return every requires_grad leaf that
            the loss reached.

        Returns
        -------
        grads : dict
            dictionary keying parameter Tensors to gradient Tensors
        """

        from .tensor import Tensor

        if self._consumed:
            err = "\nThis GradientTape has already been consumed by backward.\n\n"
            raise TapeError(err)

        if not issubclass(type(loss),Tensor):
            err = f"\nloss should be a Tensor, not {type(loss)}\n\n"
            raise ValueError(err)

        if loss.size != 1:
            err = f"\nloss must be a scalar. It has shape {loss.shape}.\n\n"
            raise ValueError(err)

        if id(loss) not in self._produced:
            err = "\nloss was not produced by operations recorded on this tape.\n"
            err += "Make sure the forward pass runs inside the 'with GradientTape()'\n"
            err += "block and depends on at least one requires_grad tensor.\n\n"
            raise TapeError(err)

        grads = {id(loss):np.ones(loss.shape,dtype=loss.dtype)}
        leaves = {}

        for node in reversed(self._nodes):

            g = grads.pop(id(node.output),None)
            if g is None:
                continue

            input_grads = node.vjp(g)
            for t, gt in zip(node.inputs,input_grads):

                if gt is None or not t.requires_grad:
                    continue

                key = id(t)
                if key in grads:
                    grads[key] = grads[key] + gt
                else:
                    grads[key] = gt

                if key not in self._produced:
                    leaves[key] = t

        self._consumed = True
        self._nodes = []
        self._produced = set()

        out = {}
        if params is None:
            for key, t in leaves.items():
                out[t] = Tensor(np.asarray(grads[key],dtype=t.dtype))
        else:
            for p in params:
                g = grads.get(id(p))
                if g is None:
                    g = np.zeros(p.shape,dtype=p.dtype)
                out[p] = Tensor(np.asarray(g,dtype=p.dtype))

        return out

    @property
    def consumed(self):
        return self._consumed

    def __len__(self):
        return len(self._nodes)
