"""Core signal processing: radix-2 DFT, raised-cosine shaping, PSD and
occupied bandwidth.

Signals are plain numpy ``complex128`` arrays. A 1-D array is one block;
functions that say so also accept 2-D arrays and work row by row.

Transform scaling is fixed here for the whole package: the forward
transform is the unscaled DFT sum and the inverse carries the 1/N factor,
so ``dft(dft(x), inverse=True) == x``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _backend
from .errors import DomainError, MeasurementError, SizeError

MAX_DFT_LENGTH = 1 << 16


def as_block(samples, name="block"):
    """Validate and coerce ``samples`` to a finite, non-empty complex array."""
    x = np.asarray(samples, dtype=np.complex128)
    if x.ndim == 0 or x.shape[-1] == 0:
        raise SizeError(f"{name} must contain at least one sample")
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} contains NaN or Inf")
    return x


def is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


@lru_cache(maxsize=32)
def _plan(n):
    bits = n.bit_length() - 1
    idx = np.arange(n)
    perm = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        perm |= ((idx >> b) & 1) << (bits - 1 - b)
    twiddles = np.exp(-2j * np.pi * np.arange(n // 2) / n)
    perm.setflags(write=False)
    twiddles.setflags(write=False)
    return perm, twiddles


def dft(block, inverse=False):
    """Radix-2 discrete Fourier transform along the last axis.

    Parameters
    ----------
    block : array_like
        Complex samples, 1-D or 2-D. The last-axis length must be a power of
        two between 2 and 65536.
    inverse : bool
        If true, compute the inverse transform including the 1/N factor.

    Returns
    -------
    numpy.ndarray
        Transform with the same shape as the input.
    """
    x = np.asarray(block, dtype=np.complex128)
    if x.ndim == 0 or x.size == 0:
        raise SizeError("dft input is empty")
    if x.ndim > 2:
        raise SizeError("dft accepts 1-D or 2-D input")
    n = x.shape[-1]
    if n < 2 or n > MAX_DFT_LENGTH or not is_power_of_two(n):
        raise SizeError(f"dft length must be a power of two in [2, {MAX_DFT_LENGTH}], got {n}")
    rows = np.array(x.reshape(-1, n), dtype=np.complex128, order="C", copy=True)
    perm, twiddles = _plan(n)
    _backend.fft_rows(rows, perm, twiddles, bool(inverse))
    if inverse:
        rows /= n
    return rows.reshape(x.shape)


def idft(block):
    return dft(block, inverse=True)


@dataclass(frozen=True)
class PulseShape:
    roll_off: float
    samples_per_symbol: int
    span_symbols: int
    taps: np.ndarray
    root: bool = False

    @property
    def delay(self):
        """Group delay in samples (index of the center tap)."""
        return self.span_symbols * self.samples_per_symbol // 2


def _check_shape_args(roll_off, samples_per_symbol, span_symbols):
    if not 0.0 <= roll_off <= 1.0:
        raise DomainError(f"roll_off must lie in [0, 1], got {roll_off}")
    if int(samples_per_symbol) != samples_per_symbol or samples_per_symbol < 2:
        raise DomainError("samples_per_symbol must be an integer >= 2")
    if int(span_symbols) != span_symbols or span_symbols < 4 or span_symbols % 2:
        raise DomainError("span_symbols must be an even integer >= 4")


def _time_axis(samples_per_symbol, span_symbols):
    half = span_symbols * samples_per_symbol // 2
    return np.arange(-half, half + 1) / samples_per_symbol


def raised_cosine_taps(roll_off, samples_per_symbol, span_symbols):
    """Raised-cosine impulse response, normalised so the center tap is 1.

    The removable singularities at ``t = 0`` and ``|t| = T/(2*roll_off)``
    take their analytic limits.
    """
    _check_shape_args(roll_off, samples_per_symbol, span_symbols)
    t = _time_axis(samples_per_symbol, span_symbols)
    a = float(roll_off)
    taps = np.sinc(t)
    if a > 0:
        denom = 1.0 - (2.0 * a * t) ** 2
        singular = np.isclose(np.abs(t), 1.0 / (2.0 * a), rtol=0, atol=1e-12)
        safe = np.where(singular, 1.0, denom)
        taps = np.where(
            singular,
            (np.pi / 4.0) * np.sinc(1.0 / (2.0 * a)),
            np.sinc(t) * np.cos(np.pi * a * t) / safe,
        )
    taps = taps / taps[len(taps) // 2]
    return PulseShape(a, int(samples_per_symbol), int(span_symbols), taps)


def root_raised_cosine_taps(roll_off, samples_per_symbol, span_symbols):
    """Root-raised-cosine impulse response with unit energy.

    Cascading two of these gives the raised-cosine link response.
    """
    _check_shape_args(roll_off, samples_per_symbol, span_symbols)
    t = _time_axis(samples_per_symbol, span_symbols)
    a = float(roll_off)
    if a == 0:
        taps = np.sinc(t)
    else:
        at0 = np.isclose(t, 0.0, rtol=0, atol=1e-12)
        edge = np.isclose(np.abs(t), 1.0 / (4.0 * a), rtol=0, atol=1e-12)
        regular = ~(at0 | edge)
        tr = np.where(regular, t, 1.0)
        num = np.sin(np.pi * tr * (1 - a)) + 4 * a * tr * np.cos(np.pi * tr * (1 + a))
        den = np.pi * tr * (1 - (4 * a * tr) ** 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            body = num / den
        edge_val = (a / np.sqrt(2)) * (
            (1 + 2 / np.pi) * np.sin(np.pi / (4 * a)) + (1 - 2 / np.pi) * np.cos(np.pi / (4 * a))
        )
        taps = np.where(regular, body, np.where(at0, 1 - a + 4 * a / np.pi, edge_val))
    taps = taps / np.sqrt(np.sum(taps**2))
    return PulseShape(a, int(samples_per_symbol), int(span_symbols), taps, root=True)


def shape_symbols(symbols, pulse):
    """Upsample by zero insertion and filter with ``pulse``.

    Output has ``len(symbols) * sps`` samples, aligned so sample ``k*sps``
    sits on symbol ``k`` (filter delay removed).
    """
    x = as_block(symbols, "symbols")
    sps = pulse.samples_per_symbol
    up = np.zeros(x.size * sps, dtype=np.complex128)
    up[::sps] = x
    full = np.convolve(up, pulse.taps)
    return full[pulse.delay : pulse.delay + up.size]


@dataclass(frozen=True)
class SpectrumEstimate:
    frequencies: np.ndarray
    psd_db: np.ndarray


def estimate_psd(block, segment_len=1024, sample_rate=1.0):
    """Averaged periodogram: Hann window, 50 % overlap, peak at 0 dB.

    The frequency grid runs from ``-fs/2`` upward in steps of
    ``fs/segment_len``.
    """
    x = as_block(block)
    if x.ndim != 1:
        raise SizeError("estimate_psd expects a 1-D block")
    if not is_power_of_two(segment_len) or segment_len < 2:
        raise SizeError("segment_len must be a power of two")
    if x.size < 4 * segment_len:
        raise SizeError(f"need at least {4 * segment_len} samples, got {x.size}")
    hop = segment_len // 2
    starts = np.arange(0, x.size - segment_len + 1, hop)
    segs = x[starts[:, None] + np.arange(segment_len)]
    segs = segs * np.hanning(segment_len)
    power = np.mean(np.abs(dft(segs)) ** 2, axis=0)
    peak = power.max()
    if not peak > 0:
        raise MeasurementError("signal has no power; spectrum undefined")
    power = np.fft.fftshift(power)
    freqs = (np.arange(segment_len) - segment_len // 2) * (sample_rate / segment_len)
    with np.errstate(divide="ignore"):
        psd_db = 10.0 * np.log10(power / peak)
    return SpectrumEstimate(freqs, psd_db)


def occupied_bandwidth(spectrum, level_db):
    """Width of the band outside which the PSD stays below ``-level_db``.

    Crossings are linearly interpolated (in dB) between grid points.
    """
    if not level_db > 0:
        raise DomainError("level_db must be positive (attenuation below peak)")
    f = np.asarray(spectrum.frequencies, dtype=float)
    p = np.asarray(spectrum.psd_db, dtype=float)
    thr = -float(level_db)
    above = np.flatnonzero(p >= thr)
    if above.size == 0:
        raise MeasurementError("spectrum never reaches the reference level")
    lo, hi = above[0], above[-1]
    if lo == 0 or hi == p.size - 1:
        raise MeasurementError("spectrum does not fall below the level inside the grid")

    def crossing(inner, outer):
        p_in, p_out = p[inner], p[outer]
        frac = 0.0 if np.isneginf(p_out) else (p_in - thr) / (p_in - p_out)
        return f[inner] + frac * (f[outer] - f[inner])

    return crossing(hi, hi + 1) - crossing(lo, lo - 1)
