# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled radix-2 kernel. Operates in place on C-contiguous complex128 rows."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def fft_rows(double complex[:, ::1] data, const Py_ssize_t[::1] perm,
             const double complex[::1] twiddles, bint inverse):
    """Iterative decimation-in-time FFT applied to every row of ``data``.

    ``perm`` is the bit-reversal permutation and ``twiddles`` holds
    exp(-2j*pi*k/n) for k < n/2. The inverse is *not* scaled here.
    """
    cdef Py_ssize_t rows = data.shape[0]
    cdef Py_ssize_t n = data.shape[1]
    cdef Py_ssize_t r, i, j, k, start, half, size, step
    cdef double complex u, t, w
    cdef double complex tmp

    for r in range(rows):
        for i in range(n):
            j = perm[i]
            if j > i:
                tmp = data[r, i]
                data[r, i] = data[r, j]
                data[r, j] = tmp
        size = 2
        while size <= n:
            half = size >> 1
            step = n // size
            for start in range(0, n, size):
                for k in range(half):
                    w = twiddles[k * step]
                    if inverse:
                        w = w.conjugate()
                    u = data[r, start + k]
                    t = w * data[r, start + k + half]
                    data[r, start + k] = u + t
                    data[r, start + k + half] = u - t
            size <<= 1
