"""
Immutable dense tensor that participates in reverse-mode differentiation.
"""

import numpy as np

DEFAULT_DTYPE = np.float32

class Tensor:
    """
    Dense, immutable, row-major array of IEEE-754 values.

    Values are held in a read-only numpy array. Arithmetic returns new tensors
    and, when a GradientTape is active and any input requires a gradient, the
    operation is recorded on that tape.

    Parameters
    ----------
    data : array-like
        values. Floating point numpy arrays keep their dtype; anything else
        is cast to ``dtype`` (default float32).
    requires_grad : bool, default=False
        whether gradients should be accumulated for this tensor
    dtype : numpy dtype, optional
        force this dtype
    name : str, optional
        label used in repr and error messages
    """

    # Make numpy hand binary ops back to Tensor (ndarray + Tensor -> Tensor)
    __array_ufunc__ = None

    __slots__ = ("_data","_requires_grad","_name","__weakref__")

    def __init__(self,data,requires_grad=False,dtype=None,name=None):

        if issubclass(type(data),Tensor):
            data = data._data

        if dtype is None:
            if issubclass(type(data),np.ndarray) and np.issubdtype(data.dtype,np.floating):
                dtype = data.dtype
            else:
                dtype = DEFAULT_DTYPE

        arr = np.array(data,dtype=dtype,copy=True)
        if arr.ndim > 0 and 0 in arr.shape:
            err = f"\ntensor shape must be positive integers, got {arr.shape}\n\n"
            raise ValueError(err)

        arr.flags.writeable = False

        self._data = arr
        self._requires_grad = bool(requires_grad)
        self._name = name

    @classmethod
    def _wrap(cls,arr,requires_grad):
        """
        Build a tensor around a freshly computed array without copying.
        """

        t = cls.__new__(cls)
        arr.flags.writeable = False
        t._data = arr
        t._requires_grad = requires_grad
        t._name = None
        return t

    # ------------------------------------------------------------------------
    # Properties

    @property
    def data(self):
        """
        Read-only numpy view of the values.
        """
        return self._data

    def numpy(self):
        """
        Writable copy of the values.
        """
        return self._data.copy()

    @property
    def requires_grad(self):
        return self._requires_grad

    @property
    def shape(self):
        return self._data.shape

    @property
    def ndim(self):
        return self._data.ndim

    @property
    def size(self):
        return self._data.size

    @property
    def dtype(self):
        return self._data.dtype

    @property
    def name(self):
        return self._name

    def item(self):
        return self._data.item()

    def detach(self):
        """
        Same values, no gradient tracking.
        """
        return Tensor._wrap(self._data,False)

    def astype(self,dtype):
        """
        Copy with a new floating dtype (not differentiable).
        """
        return Tensor(self._data,requires_grad=self._requires_grad,
                      dtype=dtype,name=self._name)

    def __repr__(self):
        name = "" if self._name is None else f"'{self._name}', "
        return f"Tensor({name}shape={self.shape}, dtype={self.dtype}, requires_grad={self._requires_grad})"

    # ------------------------------------------------------------------------
    # Operators (all routed through functional primitives)

    def __add__(self,other):
        return F.add(self,other)

    def __radd__(self,other):
        return F.add(other,self)

    def __sub__(self,other):
        return F.sub(self,other)

    def __rsub__(self,other):
        return F.sub(other,self)

    def __mul__(self,other):
        return F.mul(self,other)

    def __rmul__(self,other):
        return F.mul(other,self)

    def __truediv__(self,other):
        return F.div(self,other)

    def __rtruediv__(self,other):
        return F.div(other,self)

    def __neg__(self):
        return F.neg(self)

    def __pow__(self,exponent):
        return F.power(self,exponent)

    def __matmul__(self,other):
        return F.matmul(self,other)

    def __rmatmul__(self,other):
        return F.matmul(other,self)

    @property
    def T(self):
        """
        Swap the last two axes.
        """
        return F.swap_last(self)

    def transpose(self,*axes):
        return F.transpose(self,axes)

    def reshape(self,*shape):
        if len(shape) == 1 and hasattr(shape[0],"__iter__"):
            shape = tuple(shape[0])
        return F.reshape(self,shape)

    def sum(self,axis=None,keepdims=False):
        return F.sum(self,axis=axis,keepdims=keepdims)

    def mean(self,axis=None,keepdims=False):
        return F.mean(self,axis=axis,keepdims=keepdims)

    def exp(self):
        return F.exp(self)

    def log(self):
        return F.log(self)


from . import functional as F  # noqa: E402
