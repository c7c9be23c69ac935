"""Named experiments producing self-describing CSV text.

Every random draw comes from a stream keyed by (seed, task coordinates),
never from shared state, so the output is a pure function of the
configuration regardless of ``workers``.
"""

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .. import __version__
from ..channel import AwgnSpec, apply_awgn, trial_rng
from ..dsp import dft, estimate_psd, is_power_of_two, occupied_bandwidth, raised_cosine_taps, \
    root_raised_cosine_taps, shape_symbols
from ..errors import ConfigError
from ..modem import Scheme, demap_symbols, map_bits, theoretical_ber
from ..ofdm import OfdmConfig, ofdm_blocks
from ..papr import SlmCodeSet, amplitude_histogram, ccdf_from_values, clip, oversample_block, papr_db, \
    partial_ifft_combine, selective_mapping
from ..scfdma import ScfdmaConfig, scfdma_blocks
from .rates import rate_table_rows

COLUMNS = {
    "ber": ("ebn0_db", "scheme", "ber_simulated", "ber_theoretical", "n_bits"),
    "papr": ("threshold_db", "chain", "prob_exceed"),
    "bandwidth": ("symbol_rate", "bandwidth_20db_hz"),
    "histogram": ("bin_center", "count", "chain"),
    "rates": ("modulation", "coding_rate", "freq_rep", "time_rep", "rate_mbps"),
}

SIMULATED_SCHEMES = (Scheme.BPSK, Scheme.QPSK, Scheme.QAM16)
PAPR_CHAINS = ("OFDM", "SC-FDE", "SC-FDMA-localized", "SC-FDMA-interleaved", "control")
REDUCTIONS = ("clip", "slm", "pts")
HISTOGRAM_CHAINS = ("OFDM", "SC-FDE")

BER_CHUNK_BITS = 1 << 18
PAPR_CHUNK_BLOCKS = 1000

# stream tags keep unrelated draws apart
_BITS, _NOISE, _PAYLOAD, _CODES = 1, 2, 3, 4


def fmt(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def _pmap(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _scheme(cfg, key):
    try:
        return Scheme.parse(cfg.text(key))
    except ValueError as exc:
        raise ConfigError(str(exc), f"parameters.{key}") from None


def _random_symbols(rng, scheme, count):
    bits = rng.integers(0, 2, size=count * scheme.bits_per_symbol, dtype=np.uint8)
    return map_bits(bits, scheme)


# --- BER ------------------------------------------------------------------

def simulate_ber(scheme, ebn0_db, n_bits, seed, stream=()):
    """Monte Carlo BER of ``scheme`` over AWGN. Returns (errors, bits simulated)."""
    scheme = Scheme(scheme)
    k = scheme.bits_per_symbol
    errors = total = chunk = 0
    while total < n_bits:
        m = min(BER_CHUNK_BITS, n_bits - total)
        m = -(-m // k) * k
        bits = trial_rng(seed, *stream, chunk, _BITS).integers(0, 2, size=m, dtype=np.uint8)
        tx = map_bits(bits, scheme)
        rx = apply_awgn(tx, AwgnSpec(ebn0_db, k, 1, seed, (*stream, chunk, _NOISE)))
        errors += int(np.count_nonzero(demap_symbols(rx, scheme) != bits))
        total += m
        chunk += 1
    return errors, total


def run_ber(cfg):
    try:
        schemes = [Scheme.parse(s) for s in cfg.names("schemes")]
    except ValueError as exc:
        raise ConfigError(str(exc), "parameters.schemes") from None
    sweep = cfg.sweep()
    order = list(Scheme)
    tasks = [(s, i, e) for s in schemes for i, e in enumerate(sweep)]

    def point(task):
        scheme, i, ebn0 = task
        theory = theoretical_ber(scheme, ebn0)
        if scheme not in SIMULATED_SCHEMES:
            return [fmt(ebn0), scheme.value, "", fmt(theory), "0"]
        errors, n = simulate_ber(scheme, ebn0, cfg.n_trials, cfg.seed, (order.index(scheme), i))
        return [fmt(ebn0), scheme.value, fmt(errors / n), fmt(theory), fmt(n)]

    return _pmap(point, tasks, cfg.workers), []


# --- PAPR -----------------------------------------------------------------

def _parse_chain(name):
    base, _, reduction = name.partition("+")
    base, reduction = base.strip(), reduction.strip().lower()
    if base not in PAPR_CHAINS:
        raise ConfigError(f"unknown chain {base!r}; choose from {PAPR_CHAINS}", "parameters.chains")
    if reduction and reduction not in REDUCTIONS:
        raise ConfigError(f"unknown reduction {reduction!r}; choose from {REDUCTIONS}", "parameters.chains")
    if reduction in ("slm", "pts") and base != "OFDM":
        raise ConfigError(f"{reduction} applies to the OFDM chain only", "parameters.chains")
    return base, reduction


def _circular_shape(rows, pulse):
    """Upsample each row and filter it circularly, so the block stays periodic."""
    sps = pulse.samples_per_symbol
    length = rows.shape[1] * sps
    if pulse.taps.size > length:
        raise ConfigError("pulse is longer than the upsampled block", "parameters.span_symbols")
    up = np.zeros((rows.shape[0], length), dtype=np.complex128)
    up[:, ::sps] = rows
    kernel = np.zeros(length, dtype=np.complex128)
    kernel[: pulse.taps.size] = pulse.taps
    kernel = np.roll(kernel, -pulse.delay)
    return dft(dft(up) * dft(kernel), inverse=True)


class PaprSetup:
    """Validated PAPR-experiment parameters plus per-chain block generators."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.chains = [(name, *_parse_chain(name)) for name in cfg.names("chains")]
        self.scheme = _scheme(cfg, "constellation")
        self.n = cfg.integer("n_spread", 2)
        self.m = cfg.integer("m_total", 2)
        if not (is_power_of_two(self.n) and is_power_of_two(self.m)) or self.m % self.n:
            raise ConfigError("n_spread and m_total must be powers of two with n_spread <= m_total",
                              "parameters.m_total")
        self.oversample = cfg.integer("oversample", 1)
        if not is_power_of_two(self.oversample):
            raise ConfigError("must be a power of two", "parameters.oversample")
        self.grid = cfg.sweep()
        self.clip_db = cfg.real("clip_ratio_db")
        self.slm_codes = cfg.integer("slm_codes", 1)
        self.pts_subblocks = cfg.integer("pts_subblocks", 1)
        if self.m % self.pts_subblocks:
            raise ConfigError("must divide m_total", "parameters.pts_subblocks")
        shaping = cfg.text("shaping").lower()
        if shaping not in ("none", "rc", "rrc"):
            raise ConfigError("must be none, rc or rrc", "parameters.shaping")
        self.pulse = None
        if shaping != "none":
            sps = cfg.integer("samples_per_symbol", 2)
            if not is_power_of_two(sps):
                raise ConfigError("must be a power of two", "parameters.samples_per_symbol")
            make = raised_cosine_taps if shaping == "rc" else root_raised_cosine_taps
            try:
                self.pulse = make(cfg.real("roll_off"), sps, cfg.integer("span_symbols"))
            except ValueError as exc:
                raise ConfigError(str(exc), "parameters.roll_off") from None
        self.ofdm_cfg = OfdmConfig(self.m, 0, tuple(range(self.n)))
        self.codes = SlmCodeSet.random_qpsk(self.slm_codes, self.n, trial_rng(cfg.seed, _CODES))

    def bodies(self, base, payload):
        if base == "OFDM":
            return ofdm_blocks(payload[:, : self.n], self.ofdm_cfg)
        if base == "SC-FDE":
            return scfdma_blocks(payload, ScfdmaConfig(self.m, self.m, "localized", 0, 0))
        if base == "control":
            # one occupied subcarrier: constant envelope at any interpolation rate
            return ofdm_blocks(payload[:, :1], OfdmConfig(self.m, 0, (1,)))
        mapping = base.rsplit("-", 1)[1]
        return scfdma_blocks(payload[:, : self.n], ScfdmaConfig(self.n, self.m, mapping, 0, 0))

    def chain_papr(self, base, reduction, payload):
        if reduction == "slm":
            rows = np.array([selective_mapping(p[: self.n], self.codes, self.ofdm_cfg, self.oversample)[0]
                             for p in payload])
        elif reduction == "pts":
            rows = np.array([partial_ifft_combine(p[: self.n], self.ofdm_cfg, self.pts_subblocks,
                                                  oversample=self.oversample)[0]
                             for p in payload])
        else:
            rows = self.bodies(base, payload)
            if reduction == "clip":
                # clip the interpolated waveform so the bound holds at the measurement rate
                if self.pulse is None and self.oversample > 1:
                    return papr_db(clip(oversample_block(rows, self.oversample), self.clip_db), 1)
                rows = clip(rows, self.clip_db)
        if self.pulse is not None:
            return papr_db(_circular_shape(rows, self.pulse), 1)
        return papr_db(rows, self.oversample)


def run_papr(cfg):
    setup = PaprSetup(cfg)
    n_chunks = math.ceil(cfg.n_trials / PAPR_CHUNK_BLOCKS)

    def chunk(c):
        count = min(PAPR_CHUNK_BLOCKS, cfg.n_trials - c * PAPR_CHUNK_BLOCKS)
        payload = _random_symbols(trial_rng(cfg.seed, _PAYLOAD, c), setup.scheme, count * setup.m)
        payload = payload.reshape(count, setup.m)
        return [np.atleast_1d(setup.chain_papr(base, red, payload))
                for _, base, red in setup.chains]

    parts = _pmap(chunk, list(range(n_chunks)), cfg.workers)
    rows, notes = [], []
    for j, (name, _, _) in enumerate(setup.chains):
        values = np.concatenate([p[j] for p in parts])
        curve = ccdf_from_values(values, setup.grid)
        q = np.quantile(values, 1 - 1e-3, method="higher")
        notes.append(f"summary chain={name} mean_papr_db={fmt(values.mean())} "
                     f"max_papr_db={fmt(values.max())} papr_at_ccdf_1e-3_db={fmt(q)}")
        rows += [[fmt(t), name, fmt(p)] for t, p in zip(curve.thresholds_db, curve.prob_exceed)]
    return rows, notes


# --- occupied bandwidth ---------------------------------------------------

def run_bandwidth(cfg):
    rates = cfg.sweep()
    if any(r <= 0 for r in rates):
        raise ConfigError("symbol rates must be positive", "parameters.sweep")
    shaping = cfg.text("shaping").lower()
    if shaping not in ("rc", "rrc"):
        raise ConfigError("must be rc or rrc", "parameters.shaping")
    make = raised_cosine_taps if shaping == "rc" else root_raised_cosine_taps
    try:
        pulse = make(cfg.real("roll_off"), cfg.integer("samples_per_symbol"), cfg.integer("span_symbols"))
    except ValueError as exc:
        raise ConfigError(str(exc), "parameters.roll_off") from None
    seg = cfg.integer("segment_len", 2)
    if not is_power_of_two(seg):
        raise ConfigError("must be a power of two", "parameters.segment_len")
    if cfg.n_trials * pulse.samples_per_symbol < 4 * seg:
        raise ConfigError(f"need at least {4 * seg // pulse.samples_per_symbol} symbols", "experiment.trials")
    # one payload shared by every rate: the spectra differ only by a frequency scale
    symbols = _random_symbols(trial_rng(cfg.seed, _PAYLOAD), Scheme.QPSK, cfg.n_trials)
    waveform = shape_symbols(symbols, pulse)

    def point(rate):
        spectrum = estimate_psd(waveform, seg, pulse.samples_per_symbol * rate)
        return [fmt(rate), fmt(occupied_bandwidth(spectrum, 20.0))]

    return _pmap(point, rates, cfg.workers), []


# --- amplitude histograms -------------------------------------------------

def run_histogram(cfg):
    chains = cfg.names("chains")
    for c in chains:
        if c not in HISTOGRAM_CHAINS:
            raise ConfigError(f"unknown chain {c!r}; choose from {HISTOGRAM_CHAINS}", "parameters.chains")
    scheme = _scheme(cfg, "constellation")
    m = cfg.integer("m_total", 2)
    if not is_power_of_two(m):
        raise ConfigError("must be a power of two", "parameters.m_total")
    n_bins = cfg.integer("n_bins", 2)
    n_blocks = math.ceil(cfg.n_trials / m)
    payload = _random_symbols(trial_rng(cfg.seed, _PAYLOAD), scheme, n_blocks * m)

    def chain(name):
        if name == "OFDM":
            x = ofdm_blocks(payload, OfdmConfig(m, 0))
        else:
            x = scfdma_blocks(payload, ScfdmaConfig(m, m, "localized", 0, 0))
        hist = amplitude_histogram(x.ravel()[: cfg.n_trials], n_bins)
        return [[fmt(c), fmt(k), name] for c, k in zip(hist.bin_centers, hist.counts)]

    return [r for rows in _pmap(chain, chains, cfg.workers) for r in rows], []


def run_rates(cfg):
    return [row.as_strings() for row in rate_table_rows()], []


RUNNERS = {
    "ber": run_ber,
    "papr": run_papr,
    "bandwidth": run_bandwidth,
    "histogram": run_histogram,
    "rates": run_rates,
}


def run(cfg):
    """Run the configured experiment and return the full CSV text."""
    rows, notes = RUNNERS[cfg.experiment](cfg)
    buf = io.StringIO()
    buf.write(f"# wsnradio {__version__}\n")
    for key, value in cfg.echo():
        buf.write(f"# {key} = {value}\n")
    for note in notes:
        buf.write(f"# {note}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS[cfg.experiment])
    writer.writerows(rows)
    return buf.getvalue()


def read_csv(text):
    """Parse CSV text written by :func:`run`, skipping ``#`` comment lines."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
