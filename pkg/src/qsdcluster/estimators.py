"""QSD, simple-voting and mixed classifiers, plus the adjacency spectral baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import _backend
from .errors import MissingGroundTruthError, ParameterError
from .model import LabeledGraph, SbmParams
from .spectral import (
    DEFAULT_TOL,
    EigenPair,
    build_transition_view,
    principal_left_eigenvector,
    principal_right_eigenpair,
    second_adjacency_eigenvector,
)
from .theory import MeanFieldConstants, mean_field_constants

TIEBREAK_HOPS = 3


class Method(str, Enum):
    QSD = "qsd"
    SIMPLE_VOTE = "vote"
    MIXED = "mixed"
    SPECTRAL = "spectral"

    @classmethod
    def parse(cls, value) -> Method:
        if isinstance(value, cls):
            return value
        v = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {"qsd": cls.QSD, "vote": cls.SIMPLE_VOTE, "simplevote": cls.SIMPLE_VOTE,
                   "mixed": cls.MIXED, "spectral": cls.SPECTRAL, "spectralbaseline": cls.SPECTRAL}
        if v not in aliases:
            raise ParameterError(f"unknown method {value!r}")
        return aliases[v]


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Real scores on the unrevealed nodes ``nodes`` (sorted ids).

    ``tiebreak`` rows are consulted in order wherever the score is exactly 0.
    """

    method: Method
    nodes: np.ndarray
    scores: np.ndarray
    tiebreak: np.ndarray | None = None
    constants: MeanFieldConstants | None = None

    def as_dict(self) -> dict:
        return dict(zip(self.nodes.tolist(), self.scores.tolist()))

    def __mul__(self, c):
        tb = None if self.tiebreak is None else self.tiebreak * c
        return replace(self, scores=self.scores * c, tiebreak=tb)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


@dataclass(frozen=True, eq=False)
class Prediction:
    method: Method
    nodes: np.ndarray
    labels: np.ndarray
    error_rate: float | None = None

    @property
    def recovery_rate(self) -> float | None:
        return None if self.error_rate is None else 1.0 - self.error_rate

    def as_dict(self) -> dict:
        return dict(zip(self.nodes.tolist(), self.labels.tolist()))

    def to_json(self) -> dict:
        return {
            "method": self.method.value,
            "recovery_rate": self.recovery_rate,
            "assignments": [[int(u), int(s)] for u, s in zip(self.nodes, self.labels)],
        }


def hop_votes(g: LabeledGraph, hops: int = TIEBREAK_HOPS) -> np.ndarray:
    """Rows ``A^k ell`` for k = 1..hops (signed walk counts into the revealed sets)."""
    ell = g.ell.astype(np.float64)
    out = np.empty((hops, g.n))
    x = ell
    for k in range(hops):
        x = _backend.revealed_vote(g.indptr, g.indices, x)
        out[k] = x
    return out


def _qsd_pair(g, tol, max_iter, disconnected):
    mus = {}
    for side in (1, -1):
        view = build_transition_view(g, side, disconnected)
        right = principal_right_eigenpair(view, tol, max_iter)
        mu = principal_left_eigenvector(view, right)
        mus[side] = (view, mu)
    return mus


def qsd_score(g: LabeledGraph, tol: float = DEFAULT_TOL, max_iter: int | None = None,
              disconnected: str = "error") -> ScoreVector:
    """``Q(u) = mu_-(u) - mu_+(u)`` on the unrevealed nodes."""
    u = g.unrevealed
    mus = _qsd_pair(g, tol, max_iter, disconnected)
    (vp, mup), (vm, mum) = mus[1], mus[-1]
    q = mum.vector[vm.local[u]] - mup.vector[vp.local[u]]
    return ScoreVector(Method.QSD, u, q, hop_votes(g)[:, u])


def simple_vote_score(g: LabeledGraph) -> ScoreVector:
    """``S(u) = |N(u) & R_+| - |N(u) & R_-|``."""
    u = g.unrevealed
    hv = hop_votes(g)
    return ScoreVector(Method.SIMPLE_VOTE, u, hv[0, u].copy(), hv[1:, u])


def mixed_weight(params: SbmParams) -> tuple[float, MeanFieldConstants]:
    c = mean_field_constants(params.a, params.b, params.delta)
    return c.cbar * c.gamma * params.n * math.log(params.n), c


def mixed_score(g: LabeledGraph, params: SbmParams, tol: float = DEFAULT_TOL, max_iter: int | None = None,
                disconnected: str = "error", qsd: ScoreVector | None = None) -> ScoreVector:
    """``M(u) = cbar * gamma * n log(n) * Q(u) - S(u)``."""
    if params is None:
        raise ParameterError("the mixed estimator needs (a, b, delta, n)")
    w, c = mixed_weight(params)
    if qsd is None:
        qsd = qsd_score(g, tol, max_iter, disconnected)
    s = simple_vote_score(g)
    return ScoreVector(Method.MIXED, qsd.nodes, w * qsd.scores - s.scores, qsd.tiebreak, c)


def _sign_with_ties(primary, tiebreak):
    lab = np.sign(primary)
    if tiebreak is not None:
        for row in tiebreak:
            zero = lab == 0
            if not zero.any():
                break
            lab[zero] = np.sign(row[zero])
    lab[lab == 0] = 1
    return lab.astype(np.int8)


def classify(scores: ScoreVector) -> Prediction:
    """``sgn`` of the scores; exact zeros fall back to tie-break rows, then to +1."""
    return Prediction(scores.method, scores.nodes, _sign_with_ties(scores.scores, scores.tiebreak))


def spectral_baseline(g: LabeledGraph, tol: float = DEFAULT_TOL, max_iter: int | None = None,
                      eig: EigenPair | None = None) -> Prediction:
    """Sign of the second adjacency eigenvector, oriented by majority agreement on revealed nodes."""
    if eig is None:
        eig = second_adjacency_eigenvector(g, tol, max_iter)
    v = eig.vector
    lab = np.where(v >= 0, 1, -1).astype(np.int8)
    revealed = np.flatnonzero(g.ell != 0)
    agree = int(np.sum(lab[revealed] == g.ell[revealed]))
    flip = 2 * agree < revealed.shape[0]
    if 2 * agree == revealed.shape[0]:
        flip = v[g.ell > 0].sum() - v[g.ell < 0].sum() < 0
    if flip:
        lab = -lab
    u = g.unrevealed
    return Prediction(Method.SPECTRAL, u, lab[u])


def evaluate(pred: Prediction, g: LabeledGraph) -> float:
    """Fraction of ``pred.nodes`` whose label differs from the ground truth."""
    truth = g.sigma[pred.nodes]
    if np.any(truth == 0):
        raise MissingGroundTruthError(f"{int(np.sum(truth == 0))} evaluated node(s) lack ground truth")
    if pred.nodes.shape[0] == 0:
        return 0.0
    return float(np.mean(pred.labels != truth))


def with_error_rate(pred: Prediction, g: LabeledGraph) -> Prediction:
    return replace(pred, error_rate=evaluate(pred, g))
