import numpy as np
import pytest

from qsdcluster import LabeledGraph, SbmParams, generate_plsbm


def random_connected(n, p, seed, delta=0.2):
    """Erdos-Renyi graph plus a random spanning path, with balanced labels."""
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.shape[0]) < p
    order = rng.permutation(n)
    path = np.column_stack([order[:-1], order[1:]])
    edges = np.vstack([np.column_stack([iu[keep], ju[keep]]), path])
    edges = np.unique(np.sort(edges, axis=1), axis=0)
    sigma = np.where(rng.permutation(n) < n // 2, 1, -1).astype(np.int8)
    ell = np.zeros(n, np.int8)
    k = max(1, int(delta * n / 2))
    for side in (1, -1):
        ell[rng.choice(np.flatnonzero(sigma == side), k, replace=False)] = side
    return LabeledGraph.from_edges(n, edges, sigma, ell)


def dense_principal(P):
    """Largest real eigenvalue of a dense matrix and its right eigenvector (unit L2, positive sum)."""
    w, v = np.linalg.eig(P)
    k = int(np.argmax(w.real))
    x = v[:, k].real
    x = x / np.linalg.norm(x)
    return float(w[k].real), x if x.sum() > 0 else -x


@pytest.fixture
def barbell():
    # triangles {0,1,2} and {3,4,5} joined by 2-3; node 0 and node 5 revealed
    edges = [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]
    sigma = [1, 1, 1, -1, -1, -1]
    ell = [1, 0, 0, 0, 0, -1]
    return LabeledGraph.from_edges(6, edges, sigma, ell)


@pytest.fixture(scope="session")
def sbm_small():
    return generate_plsbm(SbmParams(200, 6.0, 1.0, 0.1), seed=11)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.REPORT):
        terminalreporter.write_line(mod.REPORT[num])
