"""Select the FFT kernel at import time.

The compiled extension is preferred. Setting ``WSNRADIO_PURE_PYTHON=1``
forces the numpy fallback, which is also used when the extension was not
built.
"""

import os

from . import _fftpy

fallback_fft_rows = _fftpy.fft_rows

compiled_fft_rows = None
try:
    from ._fftcore import fft_rows as compiled_fft_rows
except ImportError:  # extension not built
    pass

if compiled_fft_rows is not None and os.environ.get("WSNRADIO_PURE_PYTHON", "") not in ("1", "true"):
    fft_rows = compiled_fft_rows
    BACKEND = "compiled"
else:
    fft_rows = fallback_fft_rows
    BACKEND = "python"
