"""
Edit operations: low-rank weight updates, subspace representation edits,
and keeping edit subspaces orthonormal.
"""

from tracedit.core.autodiff import Tensor
from tracedit.core.autodiff import functional as F

import numpy as np

def apply_weight_edit(W,A,B):
    """
    W' = W + A B. W is not modified.

    Parameters
    ----------
    W : Tensor
        (d,k) weight
    A : Tensor
        (d,r) left factor
    B : Tensor
        (r,k) right factor

    Returns
    -------
    Tensor
        (d,k) edited weight
    """

    W, A, B = (F.as_tensor(x) for x in (W,A,B))

    if A.ndim != 2 or B.ndim != 2 or W.ndim != 2:
        err = "\nW, A, and B must all be matrices\n\n"
        raise ValueError(err)

    if A.shape[0] != W.shape[0] or B.shape[1] != W.shape[1] or A.shape[1] != B.shape[0]:
        err = f"\nshape mismatch: W {W.shape}, A {A.shape}, B {B.shape}\n\n"
        raise ValueError(err)

    return W + A @ B

def apply_rep_edit(h,R,W_star,b,mask=None):
    """
    Rewrite the rank-r subspace spanned by the rows of R:

        alpha(h) = h + (h W*^T + b - h R^T) R

    (row-vector form of h + R^T(W* h + b - R h)).

    Parameters
    ----------
    h : Tensor
        states with width d on the last axis
    R : Tensor
        (r,d) projection with orthonormal rows
    W_star : Tensor
        (r,d) target projection
    b : Tensor
        (r,) target offset
    mask : numpy.ndarray, optional
        boolean array over h's leading axes. Where False, h passes through
        untouched.

    Returns
    -------
    Tensor
        edited states, same shape as h
    """

    h, R, W_star, b = (F.as_tensor(x) for x in (h,R,W_star,b))

    d = h.shape[-1]
    r = R.shape[0]
    if R.shape != (r,d) or W_star.shape != (r,d) or b.shape != (r,):
        err = f"\nshape mismatch: h {h.shape}, R {R.shape}, W_star {W_star.shape}, b {b.shape}\n\n"
        raise ValueError(err)

    squeeze = h.ndim == 1
    if squeeze:
        h = h.reshape(1,d)

    delta = (h @ W_star.T + b - h @ R.T) @ R
    edited = h + delta

    if mask is not None:
        mask = np.asarray(mask,dtype=bool)
        if squeeze:
            mask = mask.reshape(1)
        if mask.shape != h.shape[:-1]:
            err = f"\nmask shape {mask.shape} does not match states {h.shape[:-1]}\n\n"
            raise ValueError(err)
        edited = F.where(mask[...,None],edited,h)

    if squeeze:
        edited = edited.reshape(d)

    return edited

def orthonormality_error(R):
    """
    max |R R^T - I|.
    """

    R = R.data if issubclass(type(R),Tensor) else np.asarray(R)
    R = R.astype(np.float64)
    return float(np.max(np.abs(R @ R.T - np.eye(R.shape[0]))))

def reorthonormalize(R,tol=1e-10):
    """
    Project R onto the nearest matrix with orthonormal rows spanning the same
    row space (QR of R^T with a positive-diagonal sign convention).

    Parameters
    ----------
    R : Tensor or numpy.ndarray
        (r,d) matrix with full row rank, r <= d
    tol : float, default=1e-10
        relative size below which a diagonal entry of the triangular factor
        counts as rank deficient

    Returns
    -------
    Tensor
        (r,d) matrix with orthonormal rows, same dtype and requires_grad as
        the input
    """

    requires_grad = False
    dtype = None
    name = None
    if issubclass(type(R),Tensor):
        requires_grad = R.requires_grad
        dtype = R.dtype
        name = R.name
        R = R.data

    R = np.asarray(R)
    if dtype is None:
        dtype = R.dtype if np.issubdtype(R.dtype,np.floating) else np.float64

    if R.ndim != 2 or R.shape[0] > R.shape[1]:
        err = f"\nR should be (r,d) with r <= d, got shape {R.shape}\n\n"
        raise ValueError(err)

    q, tri = np.linalg.qr(R.astype(np.float64).T)
    diag = np.diag(tri)
    scale = max(float(np.max(np.abs(diag))),np.finfo(np.float64).tiny)
    if np.any(np.abs(diag) <= tol*scale) or not np.all(np.isfinite(diag)):
        err = "\nR is rank deficient; its rows cannot be re-orthonormalized.\n\n"
        raise ValueError(err)

    signs = np.where(diag < 0,-1.0,1.0)
    q = q*signs[None,:]

    return Tensor(q.T,requires_grad=requires_grad,dtype=dtype,name=name)

def fuse_weight_edits(params,suite):
    """
    Fold every weight edit of suite into a copy of params (W_O <- W_O + A B).
    Representation edits stay dynamic because they depend on position.

    Parameters
    ----------
    params : BaseParams
        base parameters (not modified)
    suite : EditSuite
        edit suite

    Returns
    -------
    BaseParams
        parameters with fused attention output projections
    """

    updates = {}
    for layer in suite.layers:
        weight_edit = suite.weight_edit(layer)
        if weight_edit is None:
            continue
        name = f"layer{layer}.W_O"
        fused = apply_weight_edit(params[name].detach(),
                                  weight_edit[0].detach(),
                                  weight_edit[1].detach())
        updates[name] = Tensor(fused.data,dtype=params.dtype,name=name)

    return params.replace(updates)
