"""Kernel dispatch: compiled extension when available, NumPy otherwise.

``BACKEND`` reports which implementation is active ("cython" or "numpy").
Set the environment variable ``LPFLATS_FORCE_NUMPY=1`` to skip the
extension, e.g. for benchmarking the fallback.
"""

from __future__ import annotations

import os

if os.environ.get("LPFLATS_FORCE_NUMPY") == "1":
    from lpflats._kernels_py import BACKEND, cross_min_sum, pairwise_min_sum
else:
    try:
        from lpflats._gridkern import BACKEND, cross_min_sum, pairwise_min_sum
    except ImportError:
        from lpflats._kernels_py import BACKEND, cross_min_sum, pairwise_min_sum

__all__ = ["BACKEND", "pairwise_min_sum", "cross_min_sum"]
