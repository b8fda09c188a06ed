# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernel: the O(N^2) Gaussian pair sum over a discretized path.

The summation order (row-major over the strict lower triangle) is fixed, so
results are deterministic and match the numpy fallback up to floating-point
reassociation only.
"""

from libc.math cimport exp


def pair_sum_gaussian(double[:, ::1] points, double eps):
    """sum_{j < i} exp(-|points[i] - points[j]|^2 / (2 eps))."""
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t i, j
    cdef double dx, dy, inv_two_eps = 0.5 / eps
    cdef double row, total = 0.0
    with nogil:
        for i in range(1, n):
            row = 0.0
            for j in range(i):
                dx = points[i, 0] - points[j, 0]
                dy = points[i, 1] - points[j, 1]
                row += exp(-(dx * dx + dy * dy) * inv_two_eps)
            total += row
    return total
