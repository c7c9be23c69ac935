"""AWGN and static tapped-delay-line channels.

Randomness comes from Philox, a counter-based generator. Each trial gets
its own stream keyed by (seed, trial index), so trials can run in any
order or in parallel without changing a single output bit.
"""

from dataclasses import dataclass

import numpy as np

from .dsp import as_block, dft, is_power_of_two
from .errors import CalibrationError, DomainError, SizeError
from .ofdm import ChannelEstimate


def trial_rng(seed, *stream):
    """Generator for one named stream of one trial.

    ``stream`` is any tuple of non-negative ints (trial index, sweep point,
    purpose tag...). Distinct tuples give independent streams.
    """
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *map(int, stream)])
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class AwgnSpec:
    ebn0_db: float
    bits_per_symbol: int = 1
    samples_per_symbol: int = 1
    seed: int = 0
    stream: tuple = ()

    def __post_init__(self):
        if self.bits_per_symbol < 1 or self.samples_per_symbol < 1:
            raise DomainError("bits_per_symbol and samples_per_symbol must be >= 1")


def noise_variance(spec, signal_power):
    """Complex noise variance per sample for the requested Eb/N0."""
    if not signal_power > 0:
        raise CalibrationError("signal power must be positive to calibrate noise")
    ebn0 = 10.0 ** (spec.ebn0_db / 10.0)
    return signal_power * spec.samples_per_symbol / (spec.bits_per_symbol * ebn0)


def apply_awgn(samples, spec, measured_signal_power=None):
    """Add circularly-symmetric complex Gaussian noise.

    If ``measured_signal_power`` is omitted, the mean power of ``samples``
    is used.
    """
    x = as_block(samples, "samples")
    if measured_signal_power is None:
        measured_signal_power = float(np.mean(np.abs(x) ** 2))
    var = noise_variance(spec, measured_signal_power)
    rng = trial_rng(spec.seed, *spec.stream)
    noise = rng.standard_normal(x.shape + (2,)) @ np.array([1.0, 1j])
    return x + np.sqrt(var / 2.0) * noise


@dataclass(frozen=True)
class MultipathSpec:
    taps: np.ndarray
    seed: int = 0

    def __post_init__(self):
        t = np.asarray(self.taps, dtype=np.complex128).ravel()
        if t.size == 0 or not np.all(np.isfinite(t)) or not np.any(t != 0):
            raise DomainError("taps must be finite with at least one nonzero entry")
        object.__setattr__(self, "taps", t)

    @property
    def memory(self):
        """Channel memory in samples (delay spread)."""
        return self.taps.size - 1

    @classmethod
    def random(cls, n_taps, seed, decay_db_per_tap=3.0):
        """Complex Gaussian taps with an exponential power-delay profile, unit total power."""
        rng = trial_rng(seed, 0xC4A7)
        power = 10.0 ** (-decay_db_per_tap * np.arange(n_taps) / 10.0)
        power /= power.sum()
        g = (rng.standard_normal(n_taps) + 1j * rng.standard_normal(n_taps)) / np.sqrt(2.0)
        return cls(g * np.sqrt(power), seed)


def apply_multipath(samples, spec):
    """Linear convolution with the taps, truncated to the input length."""
    x = as_block(samples, "samples")
    if spec.taps.size > x.shape[-1]:
        raise SizeError("channel is longer than the signal")
    return np.convolve(x, spec.taps)[: x.size]


def true_channel_estimate(spec, m_total, noise_variance=0.0):
    """Ground-truth per-subcarrier gains: M-point DFT of the zero-padded taps."""
    if not is_power_of_two(m_total) or m_total < 2:
        raise SizeError("m_total must be a power of two >= 2")
    if m_total < spec.taps.size:
        raise SizeError("m_total must be at least the tap count")
    padded = np.zeros(m_total, dtype=np.complex128)
    padded[: spec.taps.size] = spec.taps
    return ChannelEstimate(dft(padded), float(noise_variance))
