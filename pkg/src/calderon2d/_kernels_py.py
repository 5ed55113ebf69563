"""Pure-NumPy fallback for the direct-summation Cauchy kernel.

Same contract as the compiled ``_kernels.cauchy_apply``; works in blocks so
the (targets x sources) distance matrix never exceeds ~64 MB.
"""

from __future__ import annotations

import numpy as np

_BLOCK_BYTES = 64 * 2**20


def cauchy_apply(targets: np.ndarray, sources: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Sum q[s, :] / (targets[t] - sources[s]) over s, skipping exact hits."""
    targets = np.ascontiguousarray(targets, dtype=np.complex128)
    sources = np.ascontiguousarray(sources, dtype=np.complex128)
    q = np.ascontiguousarray(q, dtype=np.complex128)
    if sources.shape[0] != q.shape[0]:
        raise ValueError("sources and q must have matching lengths")
    n_t = targets.shape[0]
    out = np.empty((n_t, q.shape[1]), dtype=np.complex128)
    block = max(1, int(_BLOCK_BYTES // (16 * max(sources.shape[0], 1))))
    for lo in range(0, n_t, block):
        hi = min(lo + block, n_t)
        diff = targets[lo:hi, None] - sources[None, :]
        hit = diff == 0
        if hit.any():
            diff[hit] = 1.0
        np.reciprocal(diff, out=diff)
        if hit.any():
            diff[hit] = 0.0
        out[lo:hi] = diff @ q
    return out
