"""Pure-numpy versions of the hot loops. Same signatures as ``_kernels_numba``."""

import numpy as np


def _rows(indptr):
    n = indptr.shape[0] - 1
    return np.repeat(np.arange(n), np.diff(indptr))


def csr_matvec(indptr, indices, data, x):
    n = indptr.shape[0] - 1
    return np.bincount(_rows(indptr), weights=data * x[indices], minlength=n)


def power_iteration(indptr, indices, data, scale, y0, shift, deflate, tol, max_iter):
    """Power iteration on ``T = (S + shift*I) / (1 + shift)`` with ``S = diag(scale) W diag(scale)``.

    ``deflate`` is a (k, n) array of orthonormal vectors projected out every step;
    the residual is taken before projection so it reflects the true operator.
    The residual is reported for ``M = diag(scale**2) W`` (the similar, generally
    non-symmetric operator), i.e. ``||M x - lam x|| / ||x||`` with ``x = scale * y``.
    Returns (y, lam, iterations, residual, history).
    """
    n = y0.shape[0]
    rows = _rows(indptr)
    y = y0.astype(np.float64).copy()
    for k in range(deflate.shape[0]):
        y -= deflate[k] * (deflate[k] @ y)
    y /= np.linalg.norm(y)
    history = np.empty(max_iter)
    lam = 0.0
    res = np.inf
    for it in range(max_iter):
        sy = scale * np.bincount(rows, weights=data * (scale * y)[indices], minlength=n)
        lam = float(y @ sy)
        r = sy - lam * y
        for k in range(deflate.shape[0]):
            sy -= deflate[k] * (deflate[k] @ sy)
        res = float(np.linalg.norm(scale * r) / np.linalg.norm(scale * y))
        history[it] = res
        if res <= tol:
            return y, lam, it + 1, res, history[: it + 1]
        z = (sy + shift * y) / (1.0 + shift)
        nz = np.linalg.norm(z)
        if nz == 0.0:
            # operator annihilates y; y is an eigenvector with eigenvalue 0
            history[it] = 0.0
            return y, 0.0, it + 1, 0.0, history[: it + 1]
        y = z / nz
    return y, lam, max_iter, res, history


def component_labels(indptr, indices, mask):
    """Label connected components of the subgraph induced by ``mask``.

    Label = smallest node id in the component; -1 outside the mask.
    """
    n = indptr.shape[0] - 1
    labels = np.full(n, -1, dtype=np.int64)
    rows = _rows(indptr)
    keep = mask[rows] & mask[indices]
    src, dst = rows[keep], indices[keep]
    lab = np.where(mask, np.arange(n), -1)
    # min-label propagation with pointer jumping
    while True:
        new = lab.copy()
        np.minimum.at(new, src, lab[dst])
        active = new >= 0
        new[active] = new[new[active]]
        if np.array_equal(new, lab):
            break
        lab = new
    labels[mask] = lab[mask]
    return labels


def revealed_vote(indptr, indices, ell):
    n = indptr.shape[0] - 1
    return np.bincount(_rows(indptr), weights=ell[indices].astype(np.float64), minlength=n)
