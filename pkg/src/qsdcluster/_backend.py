"""Kernel backend selection.

Set ``QSD_BACKEND=numpy`` to force the pure-numpy kernels (also used when
numba is not importable). The default is ``numba``.
"""

import logging
import os

logger = logging.getLogger(__name__)

BACKEND = os.environ.get("QSD_BACKEND", "numba").strip().lower()

if BACKEND not in ("numba", "numpy"):
    raise ImportError(f"QSD_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")

if BACKEND == "numba":
    try:
        from . import _kernels_numba as kernels
    except ImportError:  # pragma: no cover - depends on environment
        logger.warning("numba unavailable, falling back to numpy kernels")
        BACKEND = "numpy"
        from . import _kernels_numpy as kernels
else:
    from . import _kernels_numpy as kernels

csr_matvec = kernels.csr_matvec
power_iteration = kernels.power_iteration
component_labels = kernels.component_labels
revealed_vote = kernels.revealed_vote

__all__ = ["BACKEND", "csr_matvec", "power_iteration", "component_labels", "revealed_vote"]
