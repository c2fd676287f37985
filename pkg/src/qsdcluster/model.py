"""Labeled graphs, PL-SBM generation, giant components and edge-list I/O."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path

import numpy as np

from . import _backend
from .errors import GraphFormatError, ParameterError

logger = logging.getLogger(__name__)

_LABEL_TOKENS = {"+1": 1, "1": 1, "-1": -1, "−1": -1, "0": 0}


def _freeze(a):
    a.setflags(write=False)
    return a


def _csr_from_pairs(n, u, v):
    """Symmetric CSR (sorted neighbor lists) from undirected pairs, deduplicated."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    rows = np.concatenate([u, v])
    cols = np.concatenate([v, u])
    if rows.size:
        key = np.unique(rows * n + cols)
        rows, cols = key // n, key % n
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return indptr, cols.astype(np.int64)


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    """Undirected simple graph with ground truth ``sigma`` and partial labels ``ell``.

    ``sigma[v]`` is +1/-1, or 0 where the ground truth is unknown. ``ell[v]`` is
    +1/-1 for revealed nodes and 0 otherwise. Adjacency is CSR with neighbor
    lists sorted by id.
    """

    indptr: np.ndarray
    indices: np.ndarray
    sigma: np.ndarray
    ell: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "indptr", _freeze(np.ascontiguousarray(self.indptr, dtype=np.int64)))
        object.__setattr__(self, "indices", _freeze(np.ascontiguousarray(self.indices, dtype=np.int64)))
        object.__setattr__(self, "sigma", _freeze(np.array(self.sigma, dtype=np.int8)))
        object.__setattr__(self, "ell", _freeze(np.array(self.ell, dtype=np.int8)))
        self.validate()

    @classmethod
    def from_edges(cls, n, edges, sigma=None, ell=None) -> LabeledGraph:
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ParameterError("edge endpoint outside 0..n-1")
        keep = edges[:, 0] != edges[:, 1]
        indptr, indices = _csr_from_pairs(n, edges[keep, 0], edges[keep, 1])
        sigma = np.zeros(n, np.int8) if sigma is None else sigma
        ell = np.zeros(n, np.int8) if ell is None else ell
        return cls(indptr, indices, sigma, ell)

    def validate(self):
        n = self.n
        if self.sigma.shape != (n,) or self.ell.shape != (n,):
            raise ParameterError("sigma and ell must have one entry per node")
        if not np.isin(self.sigma, (-1, 0, 1)).all() or not np.isin(self.ell, (-1, 0, 1)).all():
            raise ParameterError("labels must be in {-1, 0, +1}")
        revealed = self.ell != 0
        if np.any(self.ell[revealed] != self.sigma[revealed]):
            raise ParameterError("revealed label disagrees with ground truth")
        rows = np.repeat(np.arange(n), np.diff(self.indptr))
        if np.any(rows == self.indices):
            raise ParameterError("self-loop in adjacency")
        fwd = rows * n + self.indices
        if np.any(np.diff(fwd) <= 0):
            raise ParameterError("neighbor lists must be sorted and duplicate-free")
        if not np.array_equal(np.sort(self.indices * n + rows), fwd):
            raise ParameterError("adjacency is not symmetric")

    @property
    def n(self) -> int:
        return self.indptr.shape[0] - 1

    @property
    def num_edges(self) -> int:
        return self.indices.shape[0] // 2

    @cached_property
    def degrees(self) -> np.ndarray:
        return _freeze(np.diff(self.indptr))

    def neighbors(self, u) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def edges(self) -> np.ndarray:
        """(m, 2) array of pairs u < v in lexicographic order."""
        rows = np.repeat(np.arange(self.n), self.degrees)
        upper = rows < self.indices
        return np.column_stack([rows[upper], self.indices[upper]])

    def revealed(self, side: int) -> np.ndarray:
        return np.flatnonzero(self.ell == side)

    @property
    def unrevealed(self) -> np.ndarray:
        return np.flatnonzero(self.ell == 0)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        rows = np.repeat(np.arange(self.n), self.degrees)
        a[rows, self.indices] = 1.0
        return a

    def with_labels(self, ell) -> LabeledGraph:
        return LabeledGraph(self.indptr, self.indices, self.sigma, ell)

    def permuted(self, perm) -> LabeledGraph:
        """Relabel node ``u`` as ``perm[u]``."""
        perm = np.asarray(perm, dtype=np.int64)
        e = perm[self.edges()]
        sigma = np.empty_like(self.sigma)
        ell = np.empty_like(self.ell)
        sigma[perm] = self.sigma
        ell[perm] = self.ell
        return LabeledGraph.from_edges(self.n, e, sigma, ell)


class Regime(str, Enum):
    CONNECTED = "connected"
    BOUNDED_DEGREE = "bounded"

    @classmethod
    def parse(cls, value) -> Regime:
        if isinstance(value, cls):
            return value
        v = str(value).strip().lower().replace("-", "_")
        aliases = {"connected": cls.CONNECTED, "bounded": cls.BOUNDED_DEGREE,
                   "bounded_degree": cls.BOUNDED_DEGREE, "boundeddegree": cls.BOUNDED_DEGREE}
        if v not in aliases:
            raise ParameterError(f"unknown regime {value!r}")
        return aliases[v]


@dataclass(frozen=True)
class SbmParams:
    n: int
    a: float
    b: float
    delta: float
    regime: Regime = Regime.CONNECTED

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime.parse(self.regime))
        if not isinstance(self.n, (int, np.integer)) or self.n <= 0 or self.n % 2:
            raise ParameterError(f"n must be a positive even integer, got {self.n!r}")
        if self.a < 0 or self.b < 0:
            raise ParameterError("a and b must be non-negative")
        if not 0.0 <= self.delta < 1.0:
            raise ParameterError(f"delta must lie in [0, 1), got {self.delta}")

    @property
    def scale(self) -> float:
        return math.log(self.n) if self.regime is Regime.CONNECTED else 1.0

    @property
    def p(self) -> float:
        return self.a * self.scale / self.n

    @property
    def q(self) -> float:
        return self.b * self.scale / self.n

    @property
    def revealed_per_side(self) -> int:
        # floor, tolerant of float noise such as 0.1 * 2000 / 2 = 99.999...
        return int(math.floor(self.delta * self.n / 2 + 1e-9))

    def to_dict(self) -> dict:
        return {"n": self.n, "a": self.a, "b": self.b, "delta": self.delta, "regime": self.regime.value}


def _bernoulli_positions(total, p, rng):
    """Sorted indices in [0, total) each kept independently with probability p."""
    if total <= 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    chunks = []
    last = -1
    while True:
        remaining = total - 1 - last
        expect = remaining * p
        size = int(expect + 6.0 * math.sqrt(expect) + 16)
        pos = last + np.cumsum(rng.geometric(p, size=size))
        if pos[-1] >= total:
            chunks.append(pos[pos < total])
            break
        chunks.append(pos)
        last = int(pos[-1])
    return np.concatenate(chunks).astype(np.int64)


def _upper_pairs(m, k):
    """Map linear indices of the strict upper triangle of an m x m block to (i, j)."""
    offsets = np.cumsum(np.arange(m - 1, -1, -1)) - np.arange(m - 1, -1, -1)
    i = np.searchsorted(offsets, k, side="right") - 1
    j = i + 1 + (k - offsets[i])
    return i, j


def generate_plsbm(params: SbmParams, seed: int) -> LabeledGraph:
    """Sample a partially labeled balanced two-community SBM.

    Nodes ``0..n/2-1`` start in community +1, the rest in -1; ids are then
    shuffled by a seeded permutation. Each community gets a uniformly random
    revealed subset of ``floor(delta*n/2)`` nodes.
    """
    p, q = params.p, params.q
    if p > 1.0 or q > 1.0:
        raise ParameterError(f"edge probability exceeds 1 (p={p:.4g}, q={q:.4g}); increase n or lower a, b")
    n = params.n
    m = n // 2
    rng = np.random.default_rng(seed)

    us, vs = [], []
    for offset in (0, m):
        k = _bernoulli_positions(m * (m - 1) // 2, p, rng)
        i, j = _upper_pairs(m, k)
        us.append(i + offset)
        vs.append(j + offset)
    k = _bernoulli_positions(m * m, q, rng)
    us.append(k // m)
    vs.append(k % m + m)

    perm = rng.permutation(n)
    u = perm[np.concatenate(us)]
    v = perm[np.concatenate(vs)]
    sigma = np.empty(n, dtype=np.int8)
    sigma[perm[:m]] = 1
    sigma[perm[m:]] = -1

    ell = np.zeros(n, dtype=np.int8)
    r = params.revealed_per_side
    for side in (1, -1):
        members = np.flatnonzero(sigma == side)
        ell[rng.choice(members, size=r, replace=False)] = side

    indptr, indices = _csr_from_pairs(n, u, v)
    return LabeledGraph(indptr, indices, sigma, ell)


@dataclass(frozen=True, eq=False)
class ComponentView:
    """One connected component of ``parent``; local id ``i`` is ``members[i]``."""

    parent: LabeledGraph
    members: np.ndarray
    local: np.ndarray = field(repr=False)

    @classmethod
    def of(cls, parent, members) -> ComponentView:
        members = _freeze(np.sort(np.asarray(members, dtype=np.int64)))
        local = np.full(parent.n, -1, dtype=np.int64)
        local[members] = np.arange(members.shape[0])
        return cls(parent, members, _freeze(local))

    @property
    def size(self) -> int:
        return self.members.shape[0]

    def to_global(self, local_ids) -> np.ndarray:
        return self.members[np.asarray(local_ids, dtype=np.int64)]

    def to_local(self, global_ids) -> np.ndarray:
        return self.local[np.asarray(global_ids, dtype=np.int64)]

    @cached_property
    def graph(self) -> LabeledGraph:
        """Induced subgraph relabeled to local ids (labels carried over)."""
        g = self.parent
        rows = self.local[np.repeat(np.arange(g.n), g.degrees)]
        cols = self.local[g.indices]
        keep = (rows >= 0) & (cols >= 0)
        rows, cols = rows[keep], cols[keep]
        indptr = np.zeros(self.size + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=self.size), out=indptr[1:])
        return LabeledGraph(indptr, cols, g.sigma[self.members], g.ell[self.members])


def component_labels(g: LabeledGraph, mask=None) -> np.ndarray:
    """Component id (= smallest member id) per node; -1 where ``mask`` is False."""
    if mask is None:
        mask = np.ones(g.n, dtype=np.bool_)
    return _backend.component_labels(g.indptr, g.indices, np.asarray(mask, dtype=np.bool_))


def giant_component(g: LabeledGraph) -> ComponentView:
    """Largest connected component; ties go to the component with the smallest node id."""
    labels = component_labels(g)
    sizes = np.bincount(labels, minlength=g.n)
    best = int(np.argmax(sizes))  # first maximum = smallest minimum id
    return ComponentView.of(g, np.flatnonzero(labels == best))


# ---------------------------------------------------------------- file formats


@dataclass
class EdgeListStats:
    n: int
    edges: np.ndarray
    self_loops: int = 0
    duplicates: int = 0


def read_edge_list(path) -> EdgeListStats:
    """Parse ``u v`` lines. ``# nodes N`` fixes the node count; other ``#`` lines are comments."""
    path = Path(path)
    pairs = []
    declared = None
    with path.open() as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "nodes":
                    try:
                        declared = int(parts[1])
                    except ValueError:
                        raise GraphFormatError(f"bad node-count header {line!r}", path, lineno) from None
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphFormatError(f"expected 'u v', got {line!r}", path, lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"non-integer node id in {line!r}", path, lineno) from None
            if u < 0 or v < 0:
                raise GraphFormatError(f"negative node id in {line!r}", path, lineno)
            if declared is not None and max(u, v) >= declared:
                raise GraphFormatError(f"unknown node id {max(u, v)} (graph has {declared} nodes)", path, lineno)
            pairs.append((u, v))
    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    n = declared if declared is not None else (int(edges.max()) + 1 if edges.size else 0)
    loops = edges[:, 0] == edges[:, 1]
    e = np.sort(edges[~loops], axis=1)
    uniq = np.unique(e, axis=0) if e.size else e
    return EdgeListStats(n=n, edges=uniq, self_loops=int(loops.sum()), duplicates=int(e.shape[0] - uniq.shape[0]))


def read_labels(path, n=None) -> np.ndarray:
    path = Path(path)
    out = []
    with path.open() as fh:
        for lineno, raw in enumerate(fh, 1):
            tok = raw.strip()
            if not tok or tok.startswith("#"):
                continue
            if tok not in _LABEL_TOKENS:
                raise GraphFormatError(f"label must be +1 or -1, got {tok!r}", path, lineno)
            out.append(_LABEL_TOKENS[tok])
    if n is not None and len(out) != n:
        raise GraphFormatError(f"{len(out)} labels for {n} nodes", path)
    return np.array(out, dtype=np.int8)


def read_ids(path, n) -> np.ndarray:
    path = Path(path)
    ids = []
    with path.open() as fh:
        for lineno, raw in enumerate(fh, 1):
            tok = raw.strip()
            if not tok or tok.startswith("#"):
                continue
            try:
                v = int(tok)
            except ValueError:
                raise GraphFormatError(f"bad node id {tok!r}", path, lineno) from None
            if not 0 <= v < n:
                raise GraphFormatError(f"unknown node id {v}", path, lineno)
            ids.append(v)
    return np.array(ids, dtype=np.int64)


def sample_revealed(sigma, candidates, delta, seed) -> np.ndarray:
    """``ell`` revealing ``floor(delta * |C_i|)`` random candidates of each community."""
    rng = np.random.default_rng(seed)
    ell = np.zeros(sigma.shape[0], dtype=np.int8)
    for side in (1, -1):
        pool = candidates[sigma[candidates] == side]
        k = int(math.floor(delta * pool.shape[0] + 1e-9))
        ell[rng.choice(pool, size=k, replace=False)] = side
    return ell


def load_edge_list(path, labels_path, delta: float, seed: int) -> LabeledGraph:
    """Load an external graph and reveal a ``delta`` fraction of each community.

    Revealed nodes are drawn from the giant component only, so each one can act
    as an absorbing state.
    """
    if not 0.0 <= delta < 1.0:
        raise ParameterError(f"delta must lie in [0, 1), got {delta}")
    stats = read_edge_list(path)
    if stats.self_loops:
        logger.warning("%s: dropped %d self-loop(s)", path, stats.self_loops)
    sigma = read_labels(labels_path, stats.n)
    g = LabeledGraph.from_edges(stats.n, stats.edges, sigma)
    giant = giant_component(g)
    return g.with_labels(sample_revealed(g.sigma, giant.members, delta, seed))


def read_graph(path, labels_path=None, revealed_path=None) -> LabeledGraph:
    """Read a graph written by :func:`write_graph` (sidecars default to ``<path>.labels``/``.revealed``)."""
    path = Path(path)
    labels_path = Path(labels_path) if labels_path else Path(str(path) + ".labels")
    revealed_path = Path(revealed_path) if revealed_path else Path(str(path) + ".revealed")
    stats = read_edge_list(path)
    sigma = read_labels(labels_path, stats.n)
    ell = np.zeros(stats.n, dtype=np.int8)
    if revealed_path.exists():
        ids = read_ids(revealed_path, stats.n)
        if np.any(sigma[ids] == 0):
            raise GraphFormatError("revealed node without a label", revealed_path)
        ell[ids] = sigma[ids]
    return LabeledGraph.from_edges(stats.n, stats.edges, sigma, ell)


def write_graph(g: LabeledGraph, path) -> list[Path]:
    """Write ``path`` (edge list), ``path.labels`` and ``path.revealed``."""
    path = Path(path)
    lines = [f"# nodes {g.n}"] + [f"{u} {v}" for u, v in g.edges()]
    path.write_text("\n".join(lines) + "\n")
    labels = Path(str(path) + ".labels")
    labels.write_text("".join(("+1\n" if s > 0 else "-1\n" if s < 0 else "0\n") for s in g.sigma))
    revealed = Path(str(path) + ".revealed")
    revealed.write_text("".join(f"{v}\n" for v in np.flatnonzero(g.ell != 0)))
    return [path, labels, revealed]
