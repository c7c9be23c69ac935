import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsnradio.channel import MultipathSpec, apply_multipath, true_channel_estimate
from wsnradio.errors import ConfigError, SingularChannelError, SizeError
from wsnradio.modem import Scheme, constellation, map_bits
from wsnradio.ofdm import ChannelEstimate, Equalizer, OfdmConfig, equalize_one_tap, ofdm_blocks, \
    ofdm_demodulate, ofdm_modulate
from wsnradio.papr import papr_db

from conftest import random_complex, random_qpsk
from oracles import circular_convolve, naive_dft


class TestConfig:
    def test_defaults(self):
        cfg = OfdmConfig()
        assert (cfg.n_subcarriers, cfg.cp_len, cfg.n_active) == (128, 32, 128)

    @pytest.mark.parametrize("kwargs", [dict(n_subcarriers=100), dict(cp_len=128), dict(cp_len=-1),
                                        dict(active=()), dict(active=(0, 0)), dict(active=(128,))])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            OfdmConfig(**kwargs)


class TestModulate:
    @pytest.mark.parametrize("k", [0, 1, 5, 63])
    def test_single_tone(self, k):
        n = 64
        cfg = OfdmConfig(n, 0, (k,))
        x = ofdm_modulate([1.0], cfg)
        np.testing.assert_allclose(x, np.exp(2j * np.pi * k * np.arange(n) / n) / n, atol=1e-15)
        assert np.ptp(np.abs(x)) < 1e-15

    def test_all_identical_symbols_peak(self):
        cfg = OfdmConfig(128, 0)
        x = ofdm_modulate(np.full(128, (1 + 1j) / np.sqrt(2)), cfg)
        ratio = np.max(np.abs(x) ** 2) / np.mean(np.abs(x) ** 2)
        assert ratio == pytest.approx(128.0, rel=1e-12)
        assert papr_db(x, 1) == pytest.approx(21.07, abs=0.01)

    def test_matches_naive_inverse_dft(self, rng):
        cfg = OfdmConfig(16, 4, (1, 2, 3, 9, 15))
        s = random_qpsk(rng, 10)
        x = ofdm_modulate(s, cfg).reshape(2, 20)
        for row, syms in zip(x, s.reshape(2, 5)):
            grid = np.zeros(16, complex)
            grid[list(cfg.active)] = syms
            body = naive_dft(grid, inverse=True)
            np.testing.assert_allclose(row[4:], body, atol=1e-12)
            np.testing.assert_allclose(row[:4], body[-4:], atol=1e-12)

    @pytest.mark.parametrize("n_active", [8, 32, 64])
    def test_mean_power_scales_with_load(self, n_active):
        n = 64
        cfg = OfdmConfig(n, 0, tuple(range(n_active)))
        s = map_bits(np.random.default_rng(0).integers(0, 2, 2 * n_active * 200), Scheme.QPSK)
        x = ofdm_modulate(s, cfg)
        # unscaled forward / 1/N inverse: mean power = |active| / N**2
        assert np.mean(np.abs(x) ** 2) == pytest.approx(n_active / n**2, rel=1e-12)

    def test_size_error(self):
        with pytest.raises(SizeError):
            ofdm_modulate(np.ones(7), OfdmConfig(8, 0))


class TestRoundTrip:
    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from([4, 16, 64, 128]), st.integers(0, 3), st.sampled_from(list(Scheme)),
           st.integers(0, 2**31))
    def test_identity_channel(self, n, cp_quarter, scheme, seed):
        rng = np.random.default_rng(seed)
        active = tuple(sorted(rng.choice(n, size=max(1, n // 2), replace=False)))
        cfg = OfdmConfig(n, cp_quarter * n // 4 if cp_quarter < 4 else 0, active)
        pts = constellation(scheme)
        s = pts[rng.integers(0, pts.size, len(active) * 3)]
        out = ofdm_demodulate(ofdm_modulate(s, cfg), cfg)
        assert np.max(np.abs(out - s)) <= 1e-10

    def test_identity_estimate_explicit(self, rng):
        cfg = OfdmConfig(32, 8)
        s = random_qpsk(rng, 96)
        out = ofdm_demodulate(ofdm_modulate(s, cfg), cfg, ChannelEstimate.identity(32), "ZF")
        assert np.max(np.abs(out - s)) < 1e-12

    def test_length_mismatch(self):
        with pytest.raises(SizeError):
            ofdm_demodulate(np.ones(41), OfdmConfig(32, 8))


class TestMultipathRecovery:
    taps = np.array([0.9 + 0.1j, -0.35 + 0.2j, 0.15 - 0.05j])

    def test_cp_makes_convolution_circular(self, rng):
        cfg = OfdmConfig(64, 4)
        s = random_qpsk(rng, 64 * 3)
        rx = apply_multipath(ofdm_modulate(s, cfg), MultipathSpec(self.taps)).reshape(3, 68)
        bodies = ofdm_blocks(s, cfg)
        for r in range(1, 3):  # the first frame has no predecessor, later ones see the previous tail
            np.testing.assert_allclose(rx[r, 4:], circular_convolve(bodies[r], self.taps), atol=1e-12)

    def test_per_subcarrier_gain(self, rng):
        cfg = OfdmConfig(64, 2)
        s = random_qpsk(rng, 64 * 4)
        rx = apply_multipath(ofdm_modulate(s, cfg), MultipathSpec(self.taps))
        Y = ofdm_demodulate(rx, cfg, method=None)
        padded = np.zeros(64, complex)
        padded[:3] = self.taps
        H = naive_dft(padded)
        np.testing.assert_allclose(Y.reshape(4, 64), H * s.reshape(4, 64), atol=1e-9)

    def test_zf_recovers(self, rng):
        cfg = OfdmConfig(64, 2)
        s = random_qpsk(rng, 64 * 6)
        spec = MultipathSpec(self.taps)
        out = ofdm_demodulate(apply_multipath(ofdm_modulate(s, cfg), spec), cfg,
                              true_channel_estimate(spec, 64), Equalizer.ZF)
        assert np.max(np.abs(out - s)) <= 1e-9

    @pytest.mark.parametrize("cp", [0, 1])
    def test_short_cp_leaves_isi(self, rng, cp):
        cfg = OfdmConfig(64, cp)
        s = random_qpsk(rng, 64 * 6)
        spec = MultipathSpec(self.taps)
        out = ofdm_demodulate(apply_multipath(ofdm_modulate(s, cfg), spec), cfg,
                              true_channel_estimate(spec, 64), Equalizer.ZF)
        assert np.max(np.abs(out - s)) > 1e-3


class TestEqualizer:
    def test_identity(self, rng):
        y = random_complex(rng, 16)
        np.testing.assert_array_equal(equalize_one_tap(y, ChannelEstimate.identity(16), "ZF"), y)
        np.testing.assert_allclose(equalize_one_tap(y, ChannelEstimate.identity(16), "MMSE"), y)

    def test_zf_gain_two(self, rng):
        y = random_complex(rng, 8)
        np.testing.assert_allclose(equalize_one_tap(y, ChannelEstimate(np.full(8, 2.0)), "ZF"), y / 2)

    def test_mmse_tends_to_zf(self, rng):
        y = random_complex(rng, 8)
        zf = equalize_one_tap(y, ChannelEstimate(np.full(8, 0.5)), "ZF")
        mmse = equalize_one_tap(y, ChannelEstimate(np.full(8, 0.5), 1e-12), "MMSE")
        assert np.max(np.abs(zf - mmse)) < 1e-9

    def test_mmse_formula(self, rng):
        y, h = random_complex(rng, 8), random_complex(rng, 8)
        out = equalize_one_tap(y, ChannelEstimate(h, 0.3), Equalizer.MMSE)
        np.testing.assert_allclose(out, np.conj(h) * y / (np.abs(h) ** 2 + 0.3))

    def test_singular(self):
        h = np.array([1.0, 0.0])
        with pytest.raises(SingularChannelError):
            equalize_one_tap(np.ones(2), ChannelEstimate(h), "ZF")
        with pytest.raises(SingularChannelError):
            equalize_one_tap(np.ones(2), ChannelEstimate(h, 0.0), "MMSE")
        out = equalize_one_tap(np.ones(2), ChannelEstimate(h, 0.1), "MMSE")
        assert out[1] == 0

    def test_length_mismatch(self):
        with pytest.raises(SizeError):
            equalize_one_tap(np.ones(3), ChannelEstimate.identity(4))
