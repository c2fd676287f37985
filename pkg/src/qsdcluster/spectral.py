"""Transition submatrices with absorbing revealed sets, and their eigenpairs.

The principal eigenpair of ``P_i = (D^-1 A)|_{V_i}`` is computed by power
iteration on the symmetric similarity ``D_i^-1/2 A_i D_i^-1/2`` and mapped
back by the diagonal scaling ``pi = D_i^-1/2 y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import ConvergenceError, DegenerateGapError, DisconnectedError, ParameterError
from .model import LabeledGraph

DEFAULT_TOL = 1e-10

# Lazy-walk shift for principal eigenpairs: T = (S + I) / 2 has spectrum in
# [0, 1], so near-bipartite pieces (trees hanging off the core) cannot make
# the iteration oscillate.
_LAZY = 1.0


def default_max_iter(n: int) -> int:
    return int(100 * math.sqrt(n)) + 1000


@dataclass(frozen=True, eq=False)
class EigenPair:
    value: float
    vector: np.ndarray
    normalization: str  # "L1" or "L2"
    iterations: int = 0
    residual: float = 0.0
    history: np.ndarray = field(default=None, repr=False)


@dataclass(frozen=True, eq=False)
class TransitionView:
    """``P_i`` restricted to ``retained = V \\ R_i``, with full-graph degrees.

    ``indptr``/``indices``/``data`` hold the retained block of the (weighted)
    adjacency in local ids; ``local[g]`` maps a parent id to its local id or -1.
    ``components`` labels the connected pieces of the retained block.
    """

    retained: np.ndarray
    local: np.ndarray
    degrees: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    components: np.ndarray
    revealed_side: int = 0

    @property
    def size(self) -> int:
        return self.retained.shape[0]

    @property
    def n_components(self) -> int:
        return int(np.unique(self.components).shape[0])

    @property
    def connected(self) -> bool:
        return self.n_components <= 1

    def row_sums(self) -> np.ndarray:
        rows = np.repeat(np.arange(self.size), np.diff(self.indptr))
        return np.bincount(rows, weights=self.data, minlength=self.size) / self.degrees

    def dense(self) -> np.ndarray:
        """Dense ``P_i`` (debugging and small-instance checks)."""
        m = np.zeros((self.size, self.size))
        rows = np.repeat(np.arange(self.size), np.diff(self.indptr))
        np.add.at(m, (rows, self.indices), self.data)
        return m / self.degrees[:, None]

    @classmethod
    def from_matrix(cls, weights, retained, revealed_side=0, disconnected="error") -> TransitionView:
        """View over a dense symmetric non-negative weight matrix (self-weights allowed)."""
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or not np.allclose(w, w.T) or (w < 0).any():
            raise ParameterError("weights must be a square symmetric non-negative matrix")
        n = w.shape[0]
        retained = np.sort(np.asarray(retained, dtype=np.int64))
        sub = w[np.ix_(retained, retained)]
        rows, cols = np.nonzero(sub)
        indptr = np.zeros(retained.shape[0] + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=retained.shape[0]), out=indptr[1:])
        return cls._make(n, retained, w.sum(axis=1)[retained], indptr, cols.astype(np.int64),
                         sub[rows, cols], revealed_side, disconnected)

    @classmethod
    def _make(cls, n, retained, degrees, indptr, indices, data, side, disconnected):
        if retained.shape[0] == 0:
            raise ParameterError("no retained nodes: every node is revealed on this side")
        if np.any(degrees <= 0):
            bad = retained[np.flatnonzero(degrees <= 0)[0]]
            raise DisconnectedError(
                f"node {bad} has degree 0; restrict the analysis to the giant component first"
            )
        local = np.full(n, -1, dtype=np.int64)
        local[retained] = np.arange(retained.shape[0])
        comps = _backend.component_labels(indptr, indices, np.ones(retained.shape[0], dtype=np.bool_))
        view = cls(retained, local, degrees.astype(np.float64), indptr, indices,
                   data.astype(np.float64), comps, side)
        if disconnected == "error" and not view.connected:
            raise DisconnectedError(
                f"subgraph on V \\ R_{'+' if side > 0 else '-'} has {view.n_components} components; "
                "the quasi-stationary distribution is not unique"
            )
        if disconnected not in ("error", "dominant"):
            raise ParameterError(f"disconnected must be 'error' or 'dominant', got {disconnected!r}")
        return view


def build_transition_view(g: LabeledGraph, revealed_side: int, disconnected: str = "error") -> TransitionView:
    """Restrict ``P = D^-1 A`` to ``V \\ R_side``.

    With ``disconnected="dominant"`` a disconnected retained set is accepted and
    the principal eigenvector lives on the piece with the largest eigenvalue
    (the Yaglom limit of the walk started from any positive distribution).
    """
    if revealed_side not in (1, -1):
        raise ParameterError("revealed_side must be +1 or -1")
    retained = np.flatnonzero(g.ell != revealed_side)
    local = np.full(g.n, -1, dtype=np.int64)
    local[retained] = np.arange(retained.shape[0])
    rows = local[np.repeat(np.arange(g.n), g.degrees)]
    cols = local[g.indices]
    keep = (rows >= 0) & (cols >= 0)
    rows, cols = rows[keep], cols[keep]
    indptr = np.zeros(retained.shape[0] + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=retained.shape[0]), out=indptr[1:])
    return TransitionView._make(g.n, retained, g.degrees[retained], indptr, cols,
                                np.ones(cols.shape[0]), revealed_side, disconnected)


def _sub_csr(indptr, indices, data, nodes):
    n = indptr.shape[0] - 1
    local = np.full(n, -1, dtype=np.int64)
    local[nodes] = np.arange(nodes.shape[0])
    rows = local[np.repeat(np.arange(n), np.diff(indptr))]
    cols = local[indices]
    keep = (rows >= 0) & (cols >= 0)
    sub_ptr = np.zeros(nodes.shape[0] + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows[keep], minlength=nodes.shape[0]), out=sub_ptr[1:])
    return sub_ptr, cols[keep], data[keep]


def _principal_block(indptr, indices, data, degrees, tol, max_iter):
    scale = 1.0 / np.sqrt(degrees)
    y0 = np.sqrt(degrees)  # exact for the non-absorbing walk, close otherwise
    empty = np.zeros((0, degrees.shape[0]))
    y, lam, its, res, hist = _backend.power_iteration(
        indptr, indices, data, scale, y0, _LAZY, empty, tol, max_iter
    )
    if res > tol:
        raise ConvergenceError("principal eigenpair did not converge", res, its)
    return y, lam, its, res, hist


def principal_right_eigenpair(view: TransitionView, tol: float = DEFAULT_TOL, max_iter: int | None = None) -> EigenPair:
    """``(lambda_1(P_i), pi_i)`` with ``pi_i >= 0`` and ``||pi_i||_2 = 1``."""
    if max_iter is None:
        max_iter = default_max_iter(view.size)
    if view.connected:
        y, lam, its, res, hist = _principal_block(view.indptr, view.indices, view.data, view.degrees, tol, max_iter)
        nodes = np.arange(view.size)
    else:
        y, lam, its, res, hist, nodes = _dominant_piece(view, tol, max_iter)
    pi = np.zeros(view.size)
    pi[nodes] = y / np.sqrt(view.degrees[nodes])
    if pi.sum() < 0:
        pi = -pi
    norm = np.linalg.norm(pi)
    pi /= norm
    return EigenPair(float(lam), pi, "L2", int(its), float(res), hist)


def _dominant_piece(view, tol, max_iter):
    labels, sizes = np.unique(view.components, return_counts=True)
    order = np.argsort(-sizes, kind="stable")
    bound = view.row_sums()  # lambda of a piece <= its max row sum
    best = None
    runner_up = -np.inf
    for lab in labels[order]:
        nodes = np.flatnonzero(view.components == lab)
        if best is not None and bound[nodes].max() < best[1] - 10 * tol:
            continue
        ptr, idx, dat = _sub_csr(view.indptr, view.indices, view.data, nodes)
        y, lam, its, res, hist = _principal_block(ptr, idx, dat, view.degrees[nodes], tol, max_iter)
        if best is None or lam > best[1]:
            if best is not None:
                runner_up = max(runner_up, best[1])
            best = (y, lam, its, res, hist, nodes)
        else:
            runner_up = max(runner_up, lam)
    if best[1] - runner_up <= 10 * tol:
        raise DegenerateGapError(
            "two disconnected pieces share the principal eigenvalue; the quasi-stationary limit is not unique"
        )
    return best


def principal_left_eigenvector(view: TransitionView, right: EigenPair) -> EigenPair:
    """``mu_i = D_i pi_i / ||D_i pi_i||_1``, the quasi-stationary distribution."""
    if right.normalization != "L2" or right.vector.shape != (view.size,):
        raise ParameterError("expected a principal right eigenpair of this view")
    dp = view.degrees * right.vector
    mu = dp / np.abs(dp).sum()
    # mu^T P_i = (A_i pi)^T / Z since A is symmetric
    left = _backend.csr_matvec(view.indptr, view.indices, view.data, right.vector) / np.abs(dp).sum()
    res = float(np.abs(left - right.value * mu).sum())
    return EigenPair(right.value, mu, "L1", right.iterations, res)


def left_residual(view: TransitionView, mu: EigenPair) -> float:
    """``||mu^T P_i - lambda mu^T||_1`` computed directly from ``P_i`` rows."""
    w = mu.vector / view.degrees
    rows = np.repeat(np.arange(view.size), np.diff(view.indptr))
    left = np.bincount(view.indices, weights=view.data * w[rows], minlength=view.size)
    return float(np.abs(left - mu.value * mu.vector).sum())


def _as_symmetric_csr(adj):
    if isinstance(adj, LabeledGraph):
        return adj.indptr, adj.indices, np.ones(adj.indices.shape[0]), adj.ell
    w = np.asarray(adj, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or not np.allclose(w, w.T):
        raise ParameterError("adjacency must be a LabeledGraph or a square symmetric matrix")
    rows, cols = np.nonzero(w)
    indptr = np.zeros(w.shape[0] + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=w.shape[0]), out=indptr[1:])
    return indptr, cols.astype(np.int64), w[rows, cols], None


def top_adjacency_eigenpair(adj, tol: float = DEFAULT_TOL, max_iter: int | None = None) -> EigenPair:
    indptr, indices, data, _ = _as_symmetric_csr(adj)
    n = indptr.shape[0] - 1
    if max_iter is None:
        max_iter = default_max_iter(n)
    rowsum = np.bincount(np.repeat(np.arange(n), np.diff(indptr)), weights=np.abs(data), minlength=n)
    # positive shift breaks the +/- lambda_1 tie of bipartite graphs
    shift = 0.25 * float(rowsum.mean()) if n else 0.0
    y, lam, its, res, hist = _backend.power_iteration(
        indptr, indices, data, np.ones(n), np.ones(n), shift, np.zeros((0, n)), tol, max_iter
    )
    if res > tol:
        raise ConvergenceError("top adjacency eigenpair did not converge", res, its)
    if y.sum() < 0:
        y = -y
    return EigenPair(float(lam), y / np.linalg.norm(y), "L2", int(its), float(res), hist)


def second_adjacency_eigenvector(adj, tol: float = DEFAULT_TOL, max_iter: int | None = None,
                                 ell=None, top: EigenPair | None = None) -> EigenPair:
    """Second eigenpair of ``A`` by deflated (shift-free) power iteration.

    The sign is fixed so that the sum over ``R_+`` minus the sum over ``R_-`` is
    non-negative; without revealed labels the largest-magnitude entry is made
    positive.
    """
    indptr, indices, data, g_ell = _as_symmetric_csr(adj)
    ell = g_ell if ell is None else np.asarray(ell)
    n = indptr.shape[0] - 1
    if max_iter is None:
        max_iter = default_max_iter(n)
    if top is None:
        top = top_adjacency_eigenpair(adj, tol * 0.1, max_iter)
    y0 = np.random.default_rng(0x5EED).standard_normal(n)
    y, lam, its, res, hist = _backend.power_iteration(
        indptr, indices, data, np.ones(n), y0, 0.0, top.vector[None, :].copy(), tol, max_iter
    )
    if res > tol:
        raise ConvergenceError("second adjacency eigenpair did not converge", res, its)
    if abs(top.value - lam) < 1e-8:
        raise DegenerateGapError(f"|lambda_1 - lambda_2| = {abs(top.value - lam):.3e} below 1e-8")
    y = y / np.linalg.norm(y)
    if ell is not None and np.any(ell != 0):
        if y[ell > 0].sum() - y[ell < 0].sum() < 0:
            y = -y
    elif y[np.argmax(np.abs(y))] < 0:
        y = -y
    return EigenPair(float(lam), y, "L2", int(its), float(res), hist)
