import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsnradio.errors import ConfigError, DegenerateSignalError, SizeError, StatisticsError
from wsnradio.modem import Scheme, map_bits
from wsnradio.ofdm import OfdmConfig, ofdm_blocks, ofdm_modulate
from wsnradio.papr import SlmCodeSet, amplitude_histogram, ccdf_from_values, clip, estimate_ccdf, \
    oversample_block, papr_db, partial_ifft_combine, selective_mapping
from wsnradio.scfdma import ScfdmaConfig, scfdma_blocks

from conftest import random_complex, random_qpsk


def qpsk_blocks(seed, n_blocks, n):
    return random_qpsk(np.random.default_rng(seed), n_blocks * n).reshape(n_blocks, n)


class TestMetric:
    def test_constant_envelope(self, rng):
        x = np.exp(2j * np.pi * rng.random(64))
        assert papr_db(x, 1) == pytest.approx(0.0, abs=1e-12)

    def test_two_samples(self):
        assert papr_db([1, 0], 1) == pytest.approx(10 * np.log10(2))
        assert papr_db([1, 0], 1) == pytest.approx(3.01, abs=0.005)

    @pytest.mark.parametrize("oversample", [1, 2, 4, 8])
    def test_ofdm_128_peak(self, oversample):
        x = ofdm_blocks(np.full(128, (1 - 1j) / np.sqrt(2)), OfdmConfig(128, 0))[0]
        assert papr_db(x, oversample) == pytest.approx(21.07, abs=0.01)

    def test_peak_is_the_maximum(self):
        cfg = OfdmConfig(32, 0)
        worst = papr_db(ofdm_blocks(np.ones(32), cfg)[0], 4)
        assert worst == pytest.approx(10 * np.log10(32), abs=1e-9)
        rows = ofdm_blocks(qpsk_blocks(1, 2000, 32), cfg)
        assert np.all(papr_db(rows, 4) <= worst + 1e-9)

    def test_degenerate(self):
        with pytest.raises(DegenerateSignalError):
            papr_db(np.zeros(16), 1)

    def test_rows(self, rng):
        x = random_complex(rng, 5, 32)
        np.testing.assert_allclose(papr_db(x, 2), [papr_db(r, 2) for r in x])

    def test_oversampling_keeps_original_samples(self, rng):
        x = random_complex(rng, 64)
        np.testing.assert_allclose(oversample_block(x, 4)[::4], x, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31), st.sampled_from([8, 64, 256]))
    def test_oversampling_monotone(self, seed, n):
        x = random_complex(np.random.default_rng(seed), n)
        assert papr_db(x, 4) >= papr_db(x, 1) - 1e-12

    def test_oversample_needs_power_of_two(self):
        with pytest.raises(SizeError):
            papr_db(np.ones(12), 4)
        assert papr_db(np.ones(12), 1) == 0


class TestCcdf:
    grid = np.arange(0, 14, 0.05)

    def test_constant_envelope_source(self, rng):
        blocks = np.exp(2j * np.pi * rng.random((1000, 64)))
        c = estimate_ccdf(blocks, 1000, self.grid, 1)
        assert np.all(c.prob_exceed[self.grid > 0] == 0)

    def test_ofdm64_regression_band(self):
        rows = ofdm_blocks(qpsk_blocks(7, 10_000, 64), OfdmConfig(64, 0))
        c = estimate_ccdf(rows, 10_000, self.grid, 4)
        assert 9.5 <= c.threshold_at(1e-3) <= 12.0

    def test_monotone_and_bounded(self):
        rows = ofdm_blocks(qpsk_blocks(8, 1000, 64), OfdmConfig(64, 0))
        c = estimate_ccdf(rows, 1000, self.grid)
        assert np.all(np.diff(c.prob_exceed) <= 0)
        assert c.prob_exceed[0] >= c.prob_exceed[-1]
        assert np.all((c.prob_exceed >= 0) & (c.prob_exceed <= 1))
        assert c.block_count == 1000

    def test_generator_source(self):
        cfg = OfdmConfig(16, 0)

        def source():
            for i in range(50):
                yield ofdm_blocks(qpsk_blocks(i, 40, 16), cfg)

        a = estimate_ccdf(source(), 1000, self.grid, 1)
        b = estimate_ccdf(np.vstack([ofdm_blocks(qpsk_blocks(i, 40, 16), cfg) for i in range(25)]),
                          1000, self.grid, 1)
        np.testing.assert_array_equal(a.prob_exceed, b.prob_exceed)

    def test_too_few_blocks(self):
        with pytest.raises(StatisticsError):
            estimate_ccdf(np.ones((10, 8)), 10, self.grid)

    def test_source_runs_dry(self):
        with pytest.raises(StatisticsError):
            estimate_ccdf(np.ones((500, 8)), 1000, self.grid)

    def test_ofdm_dominates_ifdma(self):
        data = qpsk_blocks(9, 10_000, 64)
        ofdm = ccdf_from_values(papr_db(ofdm_blocks(data, OfdmConfig(256, 0, tuple(range(64)))), 1), self.grid)
        ifdma = ccdf_from_values(papr_db(scfdma_blocks(data, ScfdmaConfig(64, 256, "interleaved", 0, 0)), 1),
                                 self.grid)
        assert np.all(ofdm.prob_exceed >= ifdma.prob_exceed)

    def test_chain_ordering_at_1e3(self):
        data = qpsk_blocks(10, 10_000, 64)
        q = {}
        for name, rows in {
            "ifdma": scfdma_blocks(data, ScfdmaConfig(64, 256, "interleaved", 0, 0)),
            "lfdma": scfdma_blocks(data, ScfdmaConfig(64, 256, "localized", 0, 0)),
            "ofdm": ofdm_blocks(data, OfdmConfig(256, 0, tuple(range(64)))),
        }.items():
            q[name] = ccdf_from_values(papr_db(rows, 1), self.grid).threshold_at(1e-3)
        assert q["ifdma"] < q["lfdma"] < q["ofdm"]

    def test_threshold_at(self):
        c = ccdf_from_values([1.0, 2.0, 3.0, 4.0], [0.0, 1.5, 2.5, 3.5, 4.5])
        np.testing.assert_allclose(c.prob_exceed, [1, 0.75, 0.5, 0.25, 0])
        assert c.threshold_at(0.5) == 2.5
        assert c.threshold_at(0.6) == pytest.approx(2.1)


class TestClip:
    def test_below_threshold_unchanged(self, rng):
        x = np.exp(2j * np.pi * rng.random(32))
        np.testing.assert_array_equal(clip(x, 3.0), x)

    def test_bound_and_phase(self, rng):
        x = ofdm_blocks(qpsk_blocks(2, 200, 64), OfdmConfig(64, 0))
        y = clip(x, 10.0)
        assert np.all(papr_db(y, 1) <= 10.01)
        keep = np.abs(x) > 0
        np.testing.assert_allclose(np.angle(y[keep]), np.angle(x[keep]), atol=1e-12)
        assert np.all(np.abs(y) <= np.abs(x) + 1e-15)

    def test_single_spike(self):
        # a mean-relative level taken before clipping would leave PAPR above 3 dB here
        x = np.array([10.0, 1.0, 1.0, 1.0], dtype=complex)
        y = clip(x, 3.0)
        assert papr_db(y, 1) == pytest.approx(3.0, abs=1e-9)
        np.testing.assert_array_equal(y[1:], x[1:])

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**31), st.floats(0.5, 15.0), st.integers(2, 300))
    def test_bound_property(self, seed, ratio_db, n):
        x = random_complex(np.random.default_rng(seed), n) ** 3
        assert papr_db(clip(x, ratio_db), 1) <= ratio_db + 0.01

    def test_16qam_64_point_experiment(self):
        bits = np.random.default_rng(4).integers(0, 2, 4 * 64 * 1000)
        rows = oversample_block(ofdm_blocks(map_bits(bits, Scheme.QAM16), OfdmConfig(64, 0)), 4)
        before, after = papr_db(rows, 1), papr_db(clip(rows, 10.0), 1)
        assert before.max() > 10.0
        assert after.max() <= 10.01
        assert np.all(after <= before + 1e-12)


class TestSlm:
    def test_all_ones_only_is_plain_ofdm(self, rng):
        cfg = OfdmConfig(64, 16)
        s = random_qpsk(rng, 64)
        out, idx = selective_mapping(s, SlmCodeSet(np.ones((1, 64))), cfg)
        assert idx == 0
        np.testing.assert_array_equal(out, ofdm_modulate(s, cfg))

    def test_never_worse_and_mean_gain(self):
        cfg = OfdmConfig(64, 0)
        rng = np.random.default_rng(12)
        codes = SlmCodeSet.random_qpsk(4, 64, rng)
        data = qpsk_blocks(13, 1000, 64)
        plain = papr_db(ofdm_blocks(data, cfg), 4)
        chosen = np.array([papr_db(selective_mapping(d, codes, cfg)[0], 4) for d in data])
        assert np.all(chosen <= plain + 1e-12)
        assert plain.mean() - chosen.mean() > 0.5

    def test_choice_is_exhaustive_minimum(self, rng):
        cfg = OfdmConfig(32, 0)
        codes = SlmCodeSet.random_qpsk(6, 32, rng)
        s = random_qpsk(rng, 32)
        out, idx = selective_mapping(s, codes, cfg)
        each = [papr_db(ofdm_modulate(s * c, cfg), 4) for c in codes.codes]
        assert idx == int(np.argmin(each))
        np.testing.assert_allclose(out, ofdm_modulate(s * codes.codes[idx], cfg))

    def test_code_set_validation(self):
        with pytest.raises(ConfigError):
            SlmCodeSet(np.full((2, 4), 1j))
        with pytest.raises(ConfigError):
            SlmCodeSet(np.array([[1, 1, 1, 1], [1, 2, 1, 1]]))

    def test_length_mismatch(self):
        with pytest.raises(SizeError):
            selective_mapping(np.ones(8), SlmCodeSet(np.ones((1, 4))), OfdmConfig(8, 0))


class TestPts:
    def test_single_subblock(self, rng):
        cfg = OfdmConfig(64, 16)
        s = random_qpsk(rng, 64)
        out, factors = partial_ifft_combine(s, cfg, 1, (1,))
        np.testing.assert_allclose(out, ofdm_modulate(s, cfg), atol=1e-15)
        assert factors == (1,)
        out, (f,) = partial_ifft_combine(s, cfg, 1)
        np.testing.assert_allclose(out, f * ofdm_modulate(s, cfg), atol=1e-15)

    def test_identity_factors_sum_to_full_transform(self, rng):
        cfg = OfdmConfig(64, 0)
        s = random_qpsk(rng, 64)
        out, _ = partial_ifft_combine(s, cfg, 4, (1,))
        np.testing.assert_allclose(out, ofdm_modulate(s, cfg), atol=1e-15)

    def test_never_worse(self):
        cfg = OfdmConfig(64, 0)
        data = qpsk_blocks(14, 300, 64)
        for d in data:
            out, factors = partial_ifft_combine(d, cfg)
            assert papr_db(out, 4) <= papr_db(ofdm_modulate(d, cfg), 4) + 1e-12
            assert len(factors) == 4

    def test_partial_load(self, rng):
        cfg = OfdmConfig(64, 8, tuple(range(4, 60)))
        s = random_qpsk(rng, 56)
        out, _ = partial_ifft_combine(s, cfg)
        assert out.size == 72
        assert papr_db(out[8:], 4) <= papr_db(ofdm_modulate(s, cfg)[8:], 4) + 1e-12

    def test_errors(self):
        cfg = OfdmConfig(64, 0)
        with pytest.raises(SizeError):
            partial_ifft_combine(np.ones(64), cfg, 3)
        with pytest.raises(ConfigError):
            partial_ifft_combine(np.ones(64), cfg, 4, (-1, 1j))


class TestHistogram:
    def test_constant_envelope_single_bin(self, rng):
        h = amplitude_histogram(0.7 * np.exp(2j * np.pi * rng.random(1000)), 16)
        assert h.counts.sum() == 1000
        assert np.count_nonzero(h.counts) == 1
        assert np.all(np.diff(h.bin_edges) > 0)

    def test_ofdm_rayleigh_tail(self):
        rows = ofdm_blocks(qpsk_blocks(15, 782, 128), OfdmConfig(128, 0))
        x = rows.ravel()[:100_000]
        rms = np.sqrt(np.mean(np.abs(x) ** 2))
        tail = np.mean(np.abs(x) > 3 * rms)
        assert 0 < tail < 1.5e-2
        assert np.count_nonzero(amplitude_histogram(x, 64).counts) >= 20

    def test_scfde_spike(self, rng):
        x = scfdma_blocks(random_qpsk(rng, 128 * 50), ScfdmaConfig(128, 128, "localized", 0, 0))
        h = amplitude_histogram(x, 64)
        peak_bin = np.argmax(h.counts)
        assert h.counts[peak_bin] == x.size
        assert h.bin_edges[peak_bin] <= 1.0 <= h.bin_edges[peak_bin + 1] + 1e-12

    def test_errors(self):
        with pytest.raises(SizeError):
            amplitude_histogram([], 8)
        with pytest.raises(SizeError):
            amplitude_histogram([1.0], 1)
        with pytest.raises(DegenerateSignalError):
            amplitude_histogram(np.zeros(4), 8)
