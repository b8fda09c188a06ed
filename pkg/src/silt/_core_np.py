"""Pure-numpy fallback for the compiled pair-sum kernel.

Works in row blocks against the preceding points: squared distances via the
Gram-matrix identity, then one masked reduction per block.  Accumulation
order is fixed (block by block, numpy pairwise sums within), so repeated
calls are bit-identical.
"""

import numpy as np

_BLOCK = 256


def pair_sum_gaussian(points, eps):
    """sum_{j < i} exp(-|points[i] - points[j]|^2 / (2 eps))."""
    pts = np.ascontiguousarray(points, dtype=float)
    n = len(pts)
    inv_two_eps = 0.5 / eps
    sq = np.einsum("ij,ij->i", pts, pts)
    total = 0.0
    for lo in range(1, n, _BLOCK):
        hi = min(lo + _BLOCK, n)
        d2 = sq[lo:hi, None] + sq[None, :hi] - 2.0 * (pts[lo:hi] @ pts[:hi].T)
        np.maximum(d2, 0.0, out=d2)  # Gram roundoff can go slightly negative
        w = np.exp(-d2 * inv_two_eps)
        total += float(w[:, :lo].sum())  # full columns j < lo
        b = hi - lo
        if b > 1:  # strict lower triangle of the diagonal block
            total += float(w[:, lo:hi][np.tril_indices(b, k=-1)].sum())
    return total
