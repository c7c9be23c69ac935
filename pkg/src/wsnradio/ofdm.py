"""OFDM modulator and demodulator with cyclic prefix and one-tap FDE."""

import enum
from dataclasses import dataclass

import numpy as np

from .dsp import as_block, dft, is_power_of_two
from .errors import ConfigError, SingularChannelError, SizeError


class Equalizer(enum.Enum):
    ZF = "ZF"
    MMSE = "MMSE"

    @classmethod
    def parse(cls, value):
        if value is None or isinstance(value, cls):
            return value
        return cls(str(value).upper())


@dataclass(frozen=True)
class OfdmConfig:
    """OFDM framing parameters.

    ``cp_len`` defaults to a quarter of the symbol and ``active`` to every
    subcarrier (DC included).
    """

    n_subcarriers: int = 128
    cp_len: int = None
    active: tuple = None

    def __post_init__(self):
        n = self.n_subcarriers
        if not is_power_of_two(n) or n < 2:
            raise ConfigError("must be a power of two >= 2", "n_subcarriers")
        cp = n // 4 if self.cp_len is None else int(self.cp_len)
        if not 0 <= cp < n:
            raise ConfigError("must satisfy 0 <= cp_len < n_subcarriers", "cp_len")
        active = tuple(range(n)) if self.active is None else tuple(int(k) for k in self.active)
        if not active:
            raise ConfigError("at least one active subcarrier required", "active")
        if len(set(active)) != len(active) or min(active) < 0 or max(active) >= n:
            raise ConfigError("indices must be distinct and in [0, n_subcarriers)", "active")
        object.__setattr__(self, "cp_len", cp)
        object.__setattr__(self, "active", active)

    @property
    def n_active(self):
        return len(self.active)

    @property
    def frame_len(self):
        return self.n_subcarriers + self.cp_len


@dataclass(frozen=True)
class ChannelEstimate:
    """Per-subcarrier complex gains and the noise variance seen by the equalizer.

    ``noise_variance`` is expressed relative to unit signal power on each
    subcarrier, which is the convention the MMSE gain assumes.
    """

    gains: np.ndarray
    noise_variance: float = 0.0

    def __post_init__(self):
        g = np.asarray(self.gains, dtype=np.complex128).ravel()
        if not np.all(np.isfinite(g)):
            raise ValueError("channel gains must be finite")
        if not self.noise_variance >= 0:
            raise ValueError("noise_variance must be >= 0")
        object.__setattr__(self, "gains", g)

    @classmethod
    def identity(cls, n):
        return cls(np.ones(n, dtype=np.complex128), 0.0)

    def subset(self, indices):
        return ChannelEstimate(self.gains[np.asarray(indices)], self.noise_variance)


def equalize_one_tap(Y, est, method=Equalizer.ZF):
    """Divide out the channel per subcarrier (ZF) or apply the MMSE gain.

    ``Y`` may be 1-D or 2-D; the last axis runs over subcarriers.
    ``method=None`` returns ``Y`` untouched (unequalized receiver).
    """
    method = Equalizer.parse(method)
    Y = np.asarray(Y, dtype=np.complex128)
    H = est.gains
    if Y.shape[-1] != H.size:
        raise SizeError(f"{Y.shape[-1]} subcarriers but {H.size} channel gains")
    if method is None:
        return Y.copy()
    power = np.abs(H) ** 2
    if method is Equalizer.ZF:
        if np.any(H == 0):
            raise SingularChannelError("zero-forcing through a zero channel gain")
        return Y / H
    denom = power + est.noise_variance
    if np.any(denom == 0):
        raise SingularChannelError("MMSE with a zero gain and zero noise variance")
    return Y * (np.conj(H) / denom)


def add_cyclic_prefix(blocks, cp_len):
    """Prepend the last ``cp_len`` samples of every row and flatten."""
    blocks = np.atleast_2d(blocks)
    if cp_len:
        blocks = np.concatenate([blocks[:, -cp_len:], blocks], axis=1)
    return blocks.ravel()


def remove_cyclic_prefix(samples, n, cp_len):
    """Split a frame stream into rows of ``n`` samples, dropping each prefix."""
    x = np.asarray(samples, dtype=np.complex128).ravel()
    frame = n + cp_len
    if x.size == 0 or x.size % frame:
        raise SizeError(f"{x.size} samples is not a whole number of {frame}-sample frames")
    return x.reshape(-1, frame)[:, cp_len:]


def ofdm_blocks(symbols, cfg):
    """Inverse-transformed OFDM symbols, one per row, without cyclic prefix."""
    s = as_block(symbols, "symbols").ravel()
    if s.size % cfg.n_active:
        raise SizeError(f"{s.size} symbols is not a multiple of {cfg.n_active} active subcarriers")
    grid = np.zeros((s.size // cfg.n_active, cfg.n_subcarriers), dtype=np.complex128)
    grid[:, list(cfg.active)] = s.reshape(-1, cfg.n_active)
    return dft(grid, inverse=True)


def ofdm_modulate(symbols, cfg):
    """Map symbols onto the active subcarriers, inverse transform, add CP.

    The symbol stream fills OFDM symbols in order; the frames are
    concatenated into one sample stream.
    """
    return add_cyclic_prefix(ofdm_blocks(symbols, cfg), cfg.cp_len)


def ofdm_demodulate(samples, cfg, est=None, method=Equalizer.ZF):
    """Strip CP, transform, equalize per subcarrier, return active-subcarrier symbols."""
    rows = remove_cyclic_prefix(samples, cfg.n_subcarriers, cfg.cp_len)
    Y = dft(rows)
    if est is None:
        est = ChannelEstimate.identity(cfg.n_subcarriers)
    if est.gains.size != cfg.n_subcarriers:
        raise SizeError("channel estimate length differs from n_subcarriers")
    X = equalize_one_tap(Y, est, method)
    return X[:, list(cfg.active)].ravel()


def subcarrier_noise_variance(noise_var_per_sample, cfg):
    """Noise variance per subcarrier after the unscaled forward DFT.

    Unit-energy symbols keep unit power per subcarrier, so this is already
    in the units :class:`ChannelEstimate` expects.
    """
    return noise_var_per_sample * cfg.n_subcarriers
