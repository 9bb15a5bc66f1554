"""
Differentiable primitives. Each primitive computes its output with numpy,
refuses non-finite results, and (when a tape is active and an input requires
a gradient) records a vector-Jacobian product on the tape.
"""

from tracedit.core.errors import NonFiniteError
from .tape import Node, current_tape
from .tensor import Tensor

import numpy as np

# Constant used by the tanh approximation of GELU
_GELU_C = float(np.sqrt(2.0/np.pi))

def as_tensor(value,like=None):
    """
    Wrap value as a constant Tensor (no gradient). If like is given, match its
    dtype.
    """

    if issubclass(type(value),Tensor):
        return value

    dtype = None if like is None else like.dtype
    return Tensor(np.asarray(value),dtype=dtype)

def _coerce(a,b):
    """
    Promote a pair of Tensor/array/scalar inputs to Tensors with matching
    dtype.
    """

    if issubclass(type(a),Tensor):
        b = as_tensor(b,like=a)
    else:
        b = as_tensor(b)
        a = as_tensor(a,like=b)

    return a, b

def unbroadcast(grad,shape):
    """
    Sum grad down to shape, undoing numpy broadcasting.
    """

    shape = tuple(shape)
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)

    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis,keepdims=True)

    return grad.reshape(shape)

def _finish(op_name,data,inputs,vjp):
    """
    Wrap a primitive's output, check it is finite, and record it.
    """

    data = np.asarray(data)
    if not np.all(np.isfinite(data)):
        raise NonFiniteError(op_name)

    requires_grad = any(t.requires_grad for t in inputs)
    out = Tensor._wrap(data,requires_grad)

    if requires_grad:
        tape = current_tape()
        if tape is not None:
            tape.record(Node(op_name,tuple(inputs),out,vjp))

    return out

# ----------------------------------------------------------------------------
# Elementwise arithmetic

def add(a,b):
    a, b = _coerce(a,b)

    def vjp(g):
        return unbroadcast(g,a.shape), unbroadcast(g,b.shape)

    return _finish("add",a.data + b.data,(a,b),vjp)

def sub(a,b):
    a, b = _coerce(a,b)

    def vjp(g):
        return unbroadcast(g,a.shape), unbroadcast(-g,b.shape)

    return _finish("sub",a.data - b.data,(a,b),vjp)

def mul(a,b):
    a, b = _coerce(a,b)

    def vjp(g):
        ga = unbroadcast(g*b.data,a.shape) if a.requires_grad else None
        gb = unbroadcast(g*a.data,b.shape) if b.requires_grad else None
        return ga, gb

    return _finish("mul",a.data*b.data,(a,b),vjp)

def div(a,b):
    a, b = _coerce(a,b)

    with np.errstate(divide="ignore",invalid="ignore"):
        out = a.data/b.data

    def vjp(g):
        ga = unbroadcast(g/b.data,a.shape) if a.requires_grad else None
        gb = None
        if b.requires_grad:
            gb = unbroadcast(-g*a.data/(b.data*b.data),b.shape)
        return ga, gb

    return _finish("div",out,(a,b),vjp)

def neg(a):
    a = as_tensor(a)

    def vjp(g):
        return (-g,)

    return _finish("neg",-a.data,(a,),vjp)

def power(a,exponent):
    """
    Raise a to a constant real exponent.
    """

    a = as_tensor(a)
    exponent = float(exponent)

    with np.errstate(divide="ignore",invalid="ignore"):
        out = a.data**exponent

    def vjp(g):
        with np.errstate(divide="ignore",invalid="ignore"):
            return (g*exponent*a.data**(exponent - 1),)

    return _finish("power",out,(a,),vjp)

def exp(a):
    a = as_tensor(a)

    with np.errstate(over="ignore"):
        out = np.exp(a.data)

    def vjp(g):
        return (g*out,)

    return _finish("exp",out,(a,),vjp)

def log(a):
    a = as_tensor(a)

    with np.errstate(divide="ignore",invalid="ignore"):
        out = np.log(a.data)

    def vjp(g):
        return (g/a.data,)

    return _finish("log",out,(a,),vjp)

def gelu(a):
    """
    GELU with the tanh approximation.
    """

    a = as_tensor(a)
    x = a.data
    inner = _GELU_C*(x + 0.044715*x**3)
    t = np.tanh(inner)
    out = 0.5*x*(1 + t)

    def vjp(g):
        d_inner = _GELU_C*(1 + 3*0.044715*x**2)
        return (g*(0.5*(1 + t) + 0.5*x*(1 - t*t)*d_inner),)

    return _finish("gelu",out,(a,),vjp)

# ----------------------------------------------------------------------------
# Linear algebra and shape manipulation

def matmul(a,b):
    """
    Matrix product over the last two axes, with numpy batch broadcasting.
    Both inputs must have at least two dimensions.
    """

    a, b = _coerce(a,b)
    if a.ndim < 2 or b.ndim < 2:
        err = f"\nmatmul needs inputs with >= 2 dims, got {a.shape} and {b.shape}\n\n"
        raise ValueError(err)

    if a.shape[-1] != b.shape[-2]:
        err = f"\nmatmul shape mismatch: {a.shape} @ {b.shape}\n\n"
        raise ValueError(err)

    out = a.data @ b.data

    def vjp(g):

        ga = None
        gb = None
        if a.requires_grad:
            ga = unbroadcast(g @ np.swapaxes(b.data,-1,-2),a.shape)

        if b.requires_grad:
            if b.ndim == 2 and a.ndim > 2:
                a2 = a.data.reshape(-1,a.shape[-1])
                g2 = g.reshape(-1,g.shape[-1])
                gb = a2.T @ g2
            else:
                gb = unbroadcast(np.swapaxes(a.data,-1,-2) @ g,b.shape)

        return ga, gb

    return _finish("matmul",out,(a,b),vjp)

def transpose(a,axes=None):
    a = as_tensor(a)
    if axes is not None and len(axes) == 0:
        axes = None

    if axes is None:
        axes = tuple(range(a.ndim))[::-1]
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))

    def vjp(g):
        return (np.transpose(g,inverse),)

    return _finish("transpose",np.transpose(a.data,axes),(a,),vjp)

def swap_last(a):
    """
    Swap the last two axes.
    """

    a = as_tensor(a)
    axes = list(range(a.ndim))
    axes[-1], axes[-2] = axes[-2], axes[-1]
    return transpose(a,axes)

def reshape(a,shape):
    a = as_tensor(a)

    def vjp(g):
        return (g.reshape(a.shape),)

    return _finish("reshape",a.data.reshape(shape),(a,),vjp)

def sum(a,axis=None,keepdims=False):
    a = as_tensor(a)
    out = np.sum(a.data,axis=axis,keepdims=keepdims)

    def vjp(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g,axis)
        return (np.broadcast_to(g,a.shape).copy(),)

    return _finish("sum",out,(a,),vjp)

def mean(a,axis=None,keepdims=False):
    a = as_tensor(a)
    out = np.mean(a.data,axis=axis,keepdims=keepdims)

    if axis is None:
        count = a.size
    else:
        axes = axis if hasattr(axis,"__iter__") else (axis,)
        count = int(np.prod([a.shape[ax] for ax in axes]))

    def vjp(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g,axis)
        return (np.broadcast_to(g/count,a.shape).copy(),)

    return _finish("mean",out,(a,),vjp)

# ----------------------------------------------------------------------------
# Softmax family

def softmax(a,axis=-1,mask=None):
    """
    Softmax along axis. If mask (bool array broadcastable to a) is given,
    entries where mask is False get zero probability. Every softmax row must
    keep at least one unmasked entry.
    """

    a = as_tensor(a)
    x = a.data
    if mask is not None:
        x = np.where(mask,x,-np.inf)

    m = np.max(x,axis=axis,keepdims=True)
    with np.errstate(invalid="ignore"):
        e = np.exp(x - m)
        p = e/np.sum(e,axis=axis,keepdims=True)

    def vjp(g):
        return (p*(g - np.sum(g*p,axis=axis,keepdims=True)),)

    return _finish("softmax",p,(a,),vjp)

def log_softmax(a,axis=-1):
    a = as_tensor(a)
    x = a.data
    m = np.max(x,axis=axis,keepdims=True)
    shifted = x - m
    lse = np.log(np.sum(np.exp(shifted),axis=axis,keepdims=True))
    out = shifted - lse

    def vjp(g):
        p = np.exp(out)
        return (g - p*np.sum(g,axis=axis,keepdims=True),)

    return _finish("log_softmax",out,(a,),vjp)

# ----------------------------------------------------------------------------
# Indexing

def embedding(table,ids):
    """
    Gather rows of a (V,d) table by integer ids of any shape.
    """

    table = as_tensor(table)
    ids = np.asarray(ids,dtype=np.int64)
    if ids.size > 0 and (ids.min() < 0 or ids.max() >= table.shape[0]):
        err = f"\ntoken ids must be in [0,{table.shape[0]}).\n\n"
        raise ValueError(err)

    def vjp(g):
        out = np.zeros(table.shape,dtype=g.dtype)
        np.add.at(out,ids.reshape(-1),g.reshape(-1,table.shape[1]))
        return (out,)

    return _finish("embedding",table.data[ids],(table,),vjp)

def gather_positions(x,index):
    """
    Pick one position per batch row from x (B,T,d) using 0-based index (B,),
    returning (B,d).
    """

    x = as_tensor(x)
    index = np.asarray(index,dtype=np.int64)
    rows = np.arange(x.shape[0])

    def vjp(g):
        out = np.zeros(x.shape,dtype=g.dtype)
        out[rows,index] = g
        return (out,)

    return _finish("gather_positions",x.data[rows,index],(x,),vjp)

def pick(x,index):
    """
    Pick x[b,index[b]] from a (B,K) tensor, returning (B,).
    """

    x = as_tensor(x)
    index = np.asarray(index,dtype=np.int64)
    rows = np.arange(x.shape[0])

    def vjp(g):
        out = np.zeros(x.shape,dtype=g.dtype)
        out[rows,index] = g
        return (out,)

    return _finish("pick",x.data[rows,index],(x,),vjp)

def where(mask,a,b):
    """
    Elementwise select: a where mask is True, b elsewhere. mask is a constant
    boolean array broadcastable to the output.
    """

    a, b = _coerce(a,b)
    mask = np.asarray(mask,dtype=bool)
    out = np.where(mask,a.data,b.data)

    def vjp(g):
        ga = unbroadcast(np.where(mask,g,0),a.shape) if a.requires_grad else None
        gb = unbroadcast(np.where(mask,0,g),b.shape) if b.requires_grad else None
        return ga, gb

    return _finish("where",out,(a,b),vjp)
