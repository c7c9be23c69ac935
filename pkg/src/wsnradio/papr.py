"""Peak-to-average power ratio: metric, CCDF, histograms and reduction.

Reduction methods are signal clipping, selective mapping (SLM) and
partial-IFFT combining (partial transmit sequences, PTS).
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .dsp import dft, is_power_of_two
from .errors import ConfigError, DegenerateSignalError, SizeError, StatisticsError
from .ofdm import add_cyclic_prefix, ofdm_blocks

DEFAULT_OVERSAMPLE = 4


def oversample_block(samples, factor):
    """Band-limited interpolation by zero-padding the spectrum.

    Works row-wise on 2-D input. The original samples reappear at every
    ``factor``-th output position.
    """
    x = np.asarray(samples, dtype=np.complex128)
    if factor == 1:
        return x
    if not is_power_of_two(factor):
        raise SizeError("oversample factor must be a power of two")
    n = x.shape[-1]
    if not is_power_of_two(n) or n < 2:
        raise SizeError("oversampled PAPR needs a power-of-two block length")
    X = dft(x)
    padded = np.zeros(x.shape[:-1] + (n * factor,), dtype=np.complex128)
    padded[..., : n // 2] = X[..., : n // 2]
    padded[..., -(n // 2) :] = X[..., n // 2 :]
    return dft(padded, inverse=True) * factor


def papr_db(samples, oversample=DEFAULT_OVERSAMPLE):
    """10 log10(peak power / mean power) of a block, or of each row of a 2-D array.

    ``oversample > 1`` approximates the continuous-time peak; the block
    length must then be a power of two.
    """
    x = np.asarray(samples, dtype=np.complex128)
    if x.size == 0:
        raise SizeError("empty signal")
    if int(oversample) != oversample or oversample < 1:
        raise SizeError("oversample must be a positive integer")
    p = np.abs(oversample_block(x, int(oversample))) ** 2
    mean = p.mean(axis=-1)
    if np.any(mean == 0):
        raise DegenerateSignalError("all-zero signal has no PAPR")
    out = 10.0 * np.log10(p.max(axis=-1) / mean)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CcdfCurve:
    thresholds_db: np.ndarray
    prob_exceed: np.ndarray
    block_count: int

    def threshold_at(self, prob):
        """Smallest grid threshold whose exceedance probability is <= ``prob``,
        linearly interpolated against the preceding grid point."""
        t, p = self.thresholds_db, self.prob_exceed
        hit = np.flatnonzero(p <= prob)
        if hit.size == 0:
            raise StatisticsError(f"CCDF never drops to {prob} on this grid")
        i = hit[0]
        if i == 0 or p[i - 1] == p[i]:
            return float(t[i])
        frac = (p[i - 1] - prob) / (p[i - 1] - p[i])
        return float(t[i - 1] + frac * (t[i] - t[i - 1]))


def ccdf_from_values(papr_values, grid):
    v = np.asarray(papr_values, dtype=float).ravel()
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0 or np.any(np.diff(g) <= 0):
        raise ConfigError("threshold grid must be strictly increasing", "grid")
    prob = (v[None, :] > g[:, None]).mean(axis=1)
    return CcdfCurve(g, prob, v.size)


def estimate_ccdf(block_source, n_blocks, grid, oversample=DEFAULT_OVERSAMPLE, min_blocks=1000):
    """Empirical P(PAPR > threshold) over ``n_blocks`` blocks.

    ``block_source`` may be a 2-D array or an iterable yielding single
    blocks or 2-D batches; rows beyond ``n_blocks`` are ignored.
    """
    if n_blocks < min_blocks:
        raise StatisticsError(f"need at least {min_blocks} blocks, got {n_blocks}")
    if isinstance(block_source, np.ndarray):
        block_source = [block_source]
    values, seen = [], 0
    for item in block_source:
        rows = np.atleast_2d(np.asarray(item, dtype=np.complex128))[: n_blocks - seen]
        values.append(np.atleast_1d(papr_db(rows, oversample)))
        seen += rows.shape[0]
        if seen >= n_blocks:
            break
    if seen < n_blocks:
        raise StatisticsError(f"source ran dry after {seen} of {n_blocks} blocks")
    return ccdf_from_values(np.concatenate(values), grid)


def clip(samples, clip_ratio_db):
    """Limit magnitudes so the clipped block's PAPR is at most ``clip_ratio_db``.

    The clipping level is measured against the mean power of the *output*
    (a fixed point found by bisection), which makes the bound hold exactly
    at the sample rate. Phases are preserved and samples under the level
    are returned unchanged. 2-D input is clipped row by row.
    """
    x = np.asarray(samples, dtype=np.complex128)
    rows = np.atleast_2d(x)
    p = np.abs(rows) ** 2
    ratio = 10.0 ** (float(clip_ratio_db) / 10.0)
    peak = p.max(axis=1)
    untouched = ratio * p.mean(axis=1) >= peak
    lo = np.zeros_like(peak)
    hi = peak.copy()
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        ok = mid <= ratio * np.minimum(p, mid[:, None]).mean(axis=1)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    level = np.where(untouched, peak, lo)
    over = p > level[:, None]
    scale = np.ones_like(p)
    np.divide(np.sqrt(level)[:, None], np.sqrt(p), out=scale, where=over)
    out = rows * scale
    return out.reshape(x.shape)


@dataclass(frozen=True)
class SlmCodeSet:
    """Unit-modulus phase sequences; the all-ones code must be present."""

    codes: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.codes, dtype=np.complex128))
        if not np.allclose(np.abs(c), 1.0, atol=1e-12):
            raise ConfigError("every code entry must have unit modulus", "codes")
        if not np.any(np.all(np.isclose(c, 1.0, atol=1e-12), axis=1)):
            raise ConfigError("the all-ones code must be in the set", "codes")
        object.__setattr__(self, "codes", c)

    @classmethod
    def random_qpsk(cls, n_codes, length, rng):
        """All-ones code followed by ``n_codes - 1`` random {±1, ±j} sequences."""
        phases = rng.integers(0, 4, size=(n_codes - 1, length))
        return cls(np.vstack([np.ones((1, length)), 1j**phases]))


def selective_mapping(freq_symbols, codes, cfg, oversample=DEFAULT_OVERSAMPLE):
    """Try every code, keep the candidate with the lowest PAPR.

    Returns the framed waveform (with cyclic prefix) and the index of the
    chosen code. PAPR is judged on the symbol body, excluding the prefix.
    """
    s = np.asarray(freq_symbols, dtype=np.complex128).ravel()
    if s.size != cfg.n_active or codes.codes.shape[1] != s.size:
        raise SizeError("code length, symbol count and active subcarriers must agree")
    bodies = ofdm_blocks((codes.codes * s).ravel(), cfg)
    best = int(np.argmin(papr_db(bodies, oversample)))
    return add_cyclic_prefix(bodies[best], cfg.cp_len), best


def partial_ifft_combine(freq_symbols, cfg, n_subblocks=4, phase_candidates=(1, -1, 1j, -1j),
                         oversample=DEFAULT_OVERSAMPLE):
    """Partial transmit sequences with an exhaustive rotation search.

    The subcarrier grid is cut into ``n_subblocks`` contiguous pieces, each
    inverse-transformed on its own. Every assignment of a candidate factor
    to every piece is tried and the lowest-PAPR sum wins; ties go to the
    earliest assignment, with factor 1 ordered first.
    """
    s = np.asarray(freq_symbols, dtype=np.complex128).ravel()
    n = cfg.n_subcarriers
    if s.size != cfg.n_active:
        raise SizeError("symbol count must equal the number of active subcarriers")
    if n_subblocks < 1 or n % n_subblocks:
        raise SizeError("n_subcarriers must be divisible by n_subblocks")
    cands = [complex(c) for c in phase_candidates]
    if not any(np.isclose(c, 1.0) for c in cands):
        raise ConfigError("phase candidates must include 1", "phase_candidates")
    cands.sort(key=lambda c: not np.isclose(c, 1.0))
    grid = np.zeros(n, dtype=np.complex128)
    grid[list(cfg.active)] = s
    width = n // n_subblocks
    pieces = np.zeros((n_subblocks, n), dtype=np.complex128)
    for v in range(n_subblocks):
        pieces[v, v * width : (v + 1) * width] = grid[v * width : (v + 1) * width]
    parts = dft(pieces, inverse=True)
    parts_os = oversample_block(parts, oversample)
    combos = np.array(list(itertools.product(cands, repeat=n_subblocks)))
    best = int(np.argmin(papr_db(combos @ parts_os, 1)))
    factors = combos[best]
    return add_cyclic_prefix(factors @ parts, cfg.cp_len), tuple(factors)


@dataclass(frozen=True)
class AmplitudeHistogram:
    bin_edges: np.ndarray
    counts: np.ndarray

    @property
    def bin_centers(self):
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


def amplitude_histogram(samples, n_bins=64):
    """Histogram of |x| on equal-width bins spanning [0, max|x|]."""
    a = np.abs(np.asarray(samples, dtype=np.complex128)).ravel()
    if a.size == 0:
        raise SizeError("empty signal")
    if n_bins < 2:
        raise SizeError("n_bins must be >= 2")
    top = a.max()
    if top == 0:
        raise DegenerateSignalError("all-zero signal has no amplitude distribution")
    counts, edges = np.histogram(a, bins=n_bins, range=(0.0, top))
    return AmplitudeHistogram(edges, counts)
