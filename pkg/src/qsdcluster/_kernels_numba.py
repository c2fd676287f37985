"""numba versions of the hot loops. Same signatures as ``_kernels_numpy``."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def csr_matvec(indptr, indices, data, x):
    n = indptr.shape[0] - 1
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * x[indices[k]]
        out[i] = acc
    return out


@njit(cache=True, nogil=True)
def _scaled_matvec(indptr, indices, data, scale, y, out):
    n = indptr.shape[0] - 1
    for i in range(n):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            acc += data[k] * scale[j] * y[j]
        out[i] = scale[i] * acc


@njit(cache=True, nogil=True)
def _norm(v):
    acc = 0.0
    for i in range(v.shape[0]):
        acc += v[i] * v[i]
    return np.sqrt(acc)


@njit(cache=True, nogil=True)
def _project_out(deflate, v):
    for k in range(deflate.shape[0]):
        c = 0.0
        for i in range(v.shape[0]):
            c += deflate[k, i] * v[i]
        for i in range(v.shape[0]):
            v[i] -= c * deflate[k, i]


@njit(cache=True, nogil=True)
def power_iteration(indptr, indices, data, scale, y0, shift, deflate, tol, max_iter):
    n = y0.shape[0]
    y = y0.astype(np.float64).copy()
    _project_out(deflate, y)
    ny = _norm(y)
    for i in range(n):
        y[i] /= ny
    sy = np.empty(n)
    history = np.empty(max_iter)
    lam = 0.0
    res = np.inf
    for it in range(max_iter):
        _scaled_matvec(indptr, indices, data, scale, y, sy)
        lam = 0.0
        for i in range(n):
            lam += y[i] * sy[i]
        num = 0.0
        den = 0.0
        for i in range(n):
            t = scale[i] * (sy[i] - lam * y[i])
            num += t * t
            u = scale[i] * y[i]
            den += u * u
        res = np.sqrt(num) / np.sqrt(den)
        history[it] = res
        if res <= tol:
            return y, lam, it + 1, res, history[: it + 1]
        _project_out(deflate, sy)
        nz = 0.0
        for i in range(n):
            sy[i] = (sy[i] + shift * y[i]) / (1.0 + shift)
            nz += sy[i] * sy[i]
        nz = np.sqrt(nz)
        if nz == 0.0:
            history[it] = 0.0
            return y, 0.0, it + 1, 0.0, history[: it + 1]
        for i in range(n):
            y[i] = sy[i] / nz
    return y, lam, max_iter, res, history


@njit(cache=True, nogil=True)
def component_labels(indptr, indices, mask):
    n = indptr.shape[0] - 1
    labels = np.full(n, -1, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    for s in range(n):
        if not mask[s] or labels[s] >= 0:
            continue
        # s is the smallest unvisited id, hence the component minimum
        labels[s] = s
        top = 0
        stack[top] = s
        top += 1
        while top > 0:
            top -= 1
            u = stack[top]
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if mask[v] and labels[v] < 0:
                    labels[v] = s
                    stack[top] = v
                    top += 1
    return labels


@njit(cache=True, nogil=True)
def revealed_vote(indptr, indices, ell):
    n = indptr.shape[0] - 1
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += ell[indices[k]]
        out[i] = acc
    return out
