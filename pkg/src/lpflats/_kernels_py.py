"""NumPy fallback for the hot grid-search kernels.

Same signatures and results as the compiled versions in ``_gridkern``;
selected at import time by ``_kernels`` when the extension is missing.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def pairwise_min_sum(dp: np.ndarray) -> np.ndarray:
    """out[i, j] = sum_n min(dp[i, n], dp[j, n]) for all row pairs.

    dp is an (m, n) nonnegative array (per-candidate point energies).
    Symmetric, so only the upper triangle is computed.
    """
    dp = np.ascontiguousarray(dp, dtype=np.float64)
    m = dp.shape[0]
    out = np.empty((m, m), dtype=np.float64)
    for i in range(m):
        row = np.minimum(dp[i], dp[i:]).sum(axis=1)
        out[i, i:] = row
        out[i:, i] = row
    return out


def cross_min_sum(da: np.ndarray, db: np.ndarray) -> np.ndarray:
    """out[i, j] = sum_n min(da[i, n], db[j, n]); da (ma, n), db (mb, n)."""
    da = np.ascontiguousarray(da, dtype=np.float64)
    db = np.ascontiguousarray(db, dtype=np.float64)
    ma = da.shape[0]
    out = np.empty((ma, db.shape[0]), dtype=np.float64)
    for i in range(ma):
        out[i] = np.minimum(da[i], db).sum(axis=1)
    return out
