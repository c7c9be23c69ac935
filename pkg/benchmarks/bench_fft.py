"""Time the compiled FFT kernel against the pure-Python fallback.

    python3 benchmarks/bench_fft.py --rows 1000 --repeat 5

Both kernels run on identical inputs through the same plan; the script
checks that their outputs agree before reporting timings.
"""

import argparse
import timeit

import numpy as np

from wsnradio import _backend
from wsnradio.dsp import _plan


def time_kernel(kernel, data, perm, twiddles, repeat):
    def once():
        kernel(data.copy(), perm, twiddles, False)

    return min(timeit.repeat(once, number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=1000, help="blocks per batch")
    parser.add_argument("--repeat", type=int, default=5, help="best of this many runs")
    parser.add_argument("--sizes", type=int, nargs="+", default=[64, 256, 1024, 4096])
    args = parser.parse_args(argv)

    if _backend.compiled_fft_rows is None:
        print("compiled kernel not built; only the fallback is available")
    rng = np.random.default_rng(0)
    print(f"{'N':>6} {'rows':>6} {'python ms':>10} {'compiled ms':>12} {'speedup':>8}")
    for n in args.sizes:
        data = rng.standard_normal((args.rows, n)) + 1j * rng.standard_normal((args.rows, n))
        perm, twiddles = _plan(n)
        py = time_kernel(_backend.fallback_fft_rows, data, perm, twiddles, args.repeat)
        line = f"{n:>6} {args.rows:>6} {1e3 * py:>10.2f}"
        if _backend.compiled_fft_rows is not None:
            a, b = data.copy(), data.copy()
            _backend.fallback_fft_rows(a, perm, twiddles, False)
            _backend.compiled_fft_rows(b, perm, twiddles, False)
            np.testing.assert_allclose(a, b, rtol=0, atol=1e-9 * n)
            c = time_kernel(_backend.compiled_fft_rows, data, perm, twiddles, args.repeat)
            line += f" {1e3 * c:>12.2f} {py / c:>7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
