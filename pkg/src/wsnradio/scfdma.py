"""SC-FDE and SC-FDMA (DFT-spread OFDM) transmit and receive chains.

A block of N symbols is spread by an N-point DFT, placed on N of the M
system subcarriers, and brought back to time with an M-point inverse DFT.
SC-FDE is the special case N = M with the identity mapping.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .dsp import as_block, dft, is_power_of_two
from .errors import ConfigError, SizeError
from .ofdm import ChannelEstimate, Equalizer, add_cyclic_prefix, equalize_one_tap, remove_cyclic_prefix


class Mapping(enum.Enum):
    LOCALIZED = "localized"
    INTERLEAVED = "interleaved"
    DISTRIBUTED = "distributed"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"lfdma": "localized", "ifdma": "interleaved", "dfdma": "distributed"}
        return cls(aliases.get(key, key))


@dataclass(frozen=True)
class ScfdmaConfig:
    """Spreading size ``n_spread`` (N), system size ``m_total`` (M) and mapping.

    ``stride`` is only read for ``Mapping.DISTRIBUTED``: the user's
    subcarriers are ``stride`` apart and ``stride`` must divide Q = M/N.
    Stride 1 reproduces the localized layout, stride Q the interleaved one.
    """

    n_spread: int
    m_total: int
    mapping: Mapping = Mapping.INTERLEAVED
    user_index: int = 0
    cp_len: int = None
    stride: int = 1

    def __post_init__(self):
        n, m = self.n_spread, self.m_total
        object.__setattr__(self, "mapping", Mapping.parse(self.mapping))
        if not is_power_of_two(m) or m < 2:
            raise ConfigError("must be a power of two >= 2", "m_total")
        if not is_power_of_two(n) or n < 2:
            raise ConfigError("must be a power of two >= 2", "n_spread")
        if n > m or m % n:
            raise ConfigError("m_total must be a multiple of n_spread", "m_total")
        if not 0 <= self.user_index < m // n:
            raise ConfigError(f"must lie in [0, {m // n})", "user_index")
        if self.mapping is Mapping.DISTRIBUTED and (self.stride < 1 or (m // n) % self.stride):
            raise ConfigError("stride must divide the expansion factor M/N", "stride")
        cp = m // 4 if self.cp_len is None else int(self.cp_len)
        if not 0 <= cp < m:
            raise ConfigError("must satisfy 0 <= cp_len < m_total", "cp_len")
        object.__setattr__(self, "cp_len", cp)

    @property
    def expansion(self):
        """Bandwidth expansion factor Q = M/N."""
        return self.m_total // self.n_spread

    @property
    def frame_len(self):
        return self.m_total + self.cp_len

    def for_user(self, user_index):
        return ScfdmaConfig(self.n_spread, self.m_total, self.mapping, user_index, self.cp_len, self.stride)


@dataclass(frozen=True)
class SubcarrierMap:
    """``indices[k]`` is the subcarrier carrying spread symbol k; ``slots`` is
    the inverse view (-1 marks an empty subcarrier)."""

    indices: np.ndarray
    m_total: int

    @property
    def slots(self):
        s = np.full(self.m_total, -1, dtype=np.int64)
        s[self.indices] = np.arange(self.indices.size)
        return s


def build_map(cfg):
    n, q, u = cfg.n_spread, cfg.expansion, cfg.user_index
    k = np.arange(n)
    if cfg.mapping is Mapping.LOCALIZED:
        idx = u * n + k
    elif cfg.mapping is Mapping.INTERLEAVED:
        idx = u + q * k
    else:
        s = cfg.stride
        idx = (u // s) * s * n + (u % s) + s * k
    idx.setflags(write=False)
    return SubcarrierMap(idx, cfg.m_total)


def scfdma_blocks(symbols, cfg):
    """Time-domain SC-FDMA blocks (one per row) without cyclic prefix."""
    s = as_block(symbols, "symbols").ravel()
    if s.size % cfg.n_spread:
        raise SizeError(f"{s.size} symbols is not a multiple of N={cfg.n_spread}")
    spread = dft(s.reshape(-1, cfg.n_spread))
    grid = np.zeros((spread.shape[0], cfg.m_total), dtype=np.complex128)
    grid[:, build_map(cfg).indices] = spread
    return dft(grid, inverse=True)


def scfdma_modulate(symbols, cfg):
    """N-point DFT, subcarrier mapping, M-point inverse DFT, cyclic prefix."""
    return add_cyclic_prefix(scfdma_blocks(symbols, cfg), cfg.cp_len)


def scfdma_demodulate(samples, cfg, est=None, method=Equalizer.ZF):
    """Strip CP, M-point DFT, de-map this user's slots, equalize, N-point inverse DFT.

    ``est`` covers all M subcarriers; only the user's occupied slots are
    equalized. Its noise variance is relative to the per-subcarrier signal
    power (see :func:`subcarrier_noise_variance`).
    """
    rows = remove_cyclic_prefix(samples, cfg.m_total, cfg.cp_len)
    Y = dft(rows)
    if est is None:
        est = ChannelEstimate.identity(cfg.m_total)
    if est.gains.size != cfg.m_total:
        raise SizeError("channel estimate length differs from m_total")
    idx = build_map(cfg).indices
    X = equalize_one_tap(Y[:, idx], est.subset(idx), method)
    return dft(X, inverse=True).ravel()


def subcarrier_noise_variance(noise_var_per_sample, cfg):
    """Convert time-domain noise variance into the equalizer's normalised units.

    With unit-energy symbols each occupied subcarrier carries power N and
    each bin of the M-point DFT collects M times the per-sample noise.
    """
    return noise_var_per_sample * cfg.m_total / cfg.n_spread


def multiuser_superpose(waveforms):
    """Element-wise sum of equal-length user waveforms."""
    waves = [np.asarray(w, dtype=np.complex128).ravel() for w in waveforms]
    if not waves:
        raise SizeError("need at least one waveform")
    if len({w.size for w in waves}) != 1:
        raise SizeError("waveforms differ in length")
    return np.sum(waves, axis=0)
