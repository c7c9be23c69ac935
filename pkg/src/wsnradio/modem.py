"""Bit mapping, hard-decision demapping and closed-form AWGN BER curves.

Every constellation has unit mean energy. Points are stored in order of
their integer bit label, so the minimum-distance demapper resolves exact
ties toward the lexicographically smallest bit pattern.
"""

import enum
import math
from functools import lru_cache

import numpy as np
from scipy.special import erfc

from .dsp import as_block
from .errors import SizeError


class Scheme(enum.Enum):
    OOK = "OOK"
    BFSK = "BFSK"
    BPSK = "BPSK"
    QPSK = "QPSK"
    QAM16 = "QAM16"

    @property
    def bits_per_symbol(self):
        return {"QPSK": 2, "QAM16": 4}.get(self.value, 1)

    @classmethod
    def parse(cls, name):
        key = str(name).strip().upper().replace("-", "").replace("_", "")
        aliases = {"16QAM": "QAM16", "BFSKCOHERENT": "BFSK", "FSK": "BFSK"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown modulation scheme {name!r}") from None


# Per-axis Gray levels for 16-QAM, indexed by the 2-bit label (b0 b1).
_QAM16_AXIS = {0b00: -3.0, 0b01: -1.0, 0b11: 1.0, 0b10: 3.0}


@lru_cache(maxsize=None)
def constellation(scheme):
    """Points indexed by integer bit label (MSB = first bit in the stream).

    BFSK is represented in its two-dimensional signal space: tone 0 on the
    real axis, tone 1 on the imaginary axis.
    """
    scheme = Scheme(scheme)
    if scheme is Scheme.OOK:
        pts = [0.0, math.sqrt(2.0)]
    elif scheme is Scheme.BFSK:
        pts = [1.0, 1j]
    elif scheme is Scheme.BPSK:
        pts = [1.0, -1.0]
    elif scheme is Scheme.QPSK:
        # first bit selects the quadrature sign, second the in-phase sign
        pts = [
            complex(1 - 2 * (label & 1), 1 - 2 * (label >> 1)) / math.sqrt(2.0)
            for label in range(4)
        ]
    else:
        pts = [
            complex(_QAM16_AXIS[label >> 2], _QAM16_AXIS[label & 0b11]) / math.sqrt(10.0)
            for label in range(16)
        ]
    out = np.array(pts, dtype=np.complex128)
    out.setflags(write=False)
    return out


def _labels_from_bits(bits, k):
    b = np.asarray(bits, dtype=np.int64).reshape(-1, k)
    weights = 1 << np.arange(k - 1, -1, -1)
    return b @ weights


def map_bits(bits, scheme):
    """Map a 0/1 sequence onto Gray-coded unit-energy symbols."""
    scheme = Scheme(scheme)
    b = np.asarray(bits)
    if b.ndim != 1:
        raise SizeError("bits must be a 1-D sequence")
    if b.size and not np.isin(b, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    k = scheme.bits_per_symbol
    if b.size % k:
        raise SizeError(f"{b.size} bits is not a multiple of {k} for {scheme.value}")
    return constellation(scheme)[_labels_from_bits(b, k)]


def demap_symbols(symbols, scheme):
    """Minimum-Euclidean-distance hard decision back to bits (uint8)."""
    scheme = Scheme(scheme)
    y = np.asarray(symbols, dtype=np.complex128).ravel()
    k = scheme.bits_per_symbol
    if y.size == 0:
        return np.zeros(0, dtype=np.uint8)
    as_block(y, "symbols")
    pts = constellation(scheme)
    labels = np.empty(y.size, dtype=np.int64)
    # chunked so the distance matrix stays small for long streams
    for start in range(0, y.size, 1 << 16):
        chunk = y[start : start + (1 << 16)]
        d = np.abs(chunk[:, None] - pts[None, :]) ** 2
        labels[start : start + chunk.size] = np.argmin(d, axis=1)
    shifts = np.arange(k - 1, -1, -1)
    return ((labels[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def q_function(x):
    """Gaussian tail probability Q(x) = 0.5 * erfc(x / sqrt(2))."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def theoretical_ber(scheme, ebn0_db):
    """Closed-form AWGN bit error rate with coherent detection.

    BPSK and QPSK use Q(sqrt(2 Eb/N0)); coherent BFSK and OOK use
    Q(sqrt(Eb/N0)); 16-QAM uses the Gray approximation
    (3/4) Q(sqrt(4/5 Eb/N0)).
    """
    scheme = Scheme(scheme)
    g = 10.0 ** (np.asarray(ebn0_db, dtype=float) / 10.0)
    if scheme in (Scheme.BPSK, Scheme.QPSK):
        out = q_function(np.sqrt(2.0 * g))
    elif scheme in (Scheme.BFSK, Scheme.OOK):
        out = q_function(np.sqrt(g))
    else:
        out = 0.75 * q_function(np.sqrt(0.8 * g))
    return float(out) if out.ndim == 0 else out
