"""Pure-numpy fallback for the radix-2 kernel.

Same contract as the compiled ``fft_rows``: in-place, unscaled, one
transform per row. Butterflies are vectorised across rows and groups, so
the Python-level loop only runs once per stage.
"""

import numpy as np


def fft_rows(data, perm, twiddles, inverse):
    rows, n = data.shape
    work = data[:, perm]
    w_all = np.conj(twiddles) if inverse else twiddles
    size = 2
    while size <= n:
        half = size // 2
        w = w_all[:: n // size][:half]
        view = work.reshape(rows, n // size, size)
        u = view[:, :, :half].copy()
        t = view[:, :, half:] * w
        view[:, :, :half] = u + t
        view[:, :, half:] = u - t
        size *= 2
    data[...] = work
