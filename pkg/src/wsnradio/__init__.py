"""Baseband physical-layer simulation for high-data-rate wireless sensor links.

Covers single-carrier PSK/QAM links, OFDM, SC-FDE and SC-FDMA, a PAPR
toolkit and Monte Carlo experiment runners.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .dsp import dft, idft

__all__ = ["BACKEND", "__version__", "dft", "idft"]
