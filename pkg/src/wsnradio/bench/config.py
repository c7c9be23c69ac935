"""Experiment configuration: INI files with an [experiment] and a [parameters] section.

Example::

    [experiment]
    name = ber
    seed = 7
    trials = 1000000

    [parameters]
    schemes = BPSK, QPSK
    sweep = 0, 2, 4, 6, 8

``sweep`` accepts a comma list or a ``start:stop:step`` range (stop
inclusive). Command-line flags override file values.
"""

import configparser
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError

EXPERIMENTS = ("ber", "papr", "bandwidth", "histogram", "rates")

# Defaults reproduce the published configuration of each experiment.
DEFAULTS = {
    "ber": {
        "trials": 1_000_000,
        "parameters": {"schemes": "BPSK, QPSK", "sweep": "0, 2, 4, 6, 8"},
    },
    "papr": {
        "trials": 10_000,
        "parameters": {
            "chains": "OFDM, SC-FDMA-localized, SC-FDMA-interleaved",
            "constellation": "QPSK",
            "n_spread": "64",
            "m_total": "256",
            "oversample": "1",
            "sweep": "0:14:0.05",
            "clip_ratio_db": "10",
            "slm_codes": "4",
            "pts_subblocks": "4",
            "shaping": "none",
            "roll_off": "0.33",
            "samples_per_symbol": "4",
            "span_symbols": "8",
        },
    },
    "bandwidth": {
        "trials": 32768,
        "parameters": {
            "sweep": "500e3, 1e6, 5e6, 10e6",
            "roll_off": "0.33",
            "shaping": "rrc",
            "samples_per_symbol": "8",
            "span_symbols": "32",
            "segment_len": "1024",
        },
    },
    "histogram": {
        "trials": 100_000,
        "parameters": {
            "chains": "OFDM, SC-FDE",
            "constellation": "QPSK",
            "m_total": "128",
            "n_bins": "64",
        },
    },
    "rates": {"trials": 1, "parameters": {}},
}


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict = field(default_factory=dict)
    n_trials: int = 1
    seed: int = 0
    output_path: str = None
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}", "experiment.name")
        if int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise ConfigError("must be an integer >= 1", "experiment.trials")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError("must be an unsigned 64-bit integer", "experiment.seed")
        if self.workers < 1:
            raise ConfigError("must be >= 1", "experiment.workers")

    # typed accessors; every failure names the offending key

    def text(self, key):
        if key not in self.params:
            raise ConfigError("missing", f"parameters.{key}")
        return str(self.params[key]).strip()

    def integer(self, key, minimum=None):
        raw = self.text(key)
        try:
            value = int(float(raw))
            if value != float(raw):
                raise ValueError
        except ValueError:
            raise ConfigError(f"expected an integer, got {raw!r}", f"parameters.{key}") from None
        if minimum is not None and value < minimum:
            raise ConfigError(f"must be >= {minimum}", f"parameters.{key}")
        return value

    def real(self, key):
        raw = self.text(key)
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"expected a number, got {raw!r}", f"parameters.{key}") from None
        if not np.isfinite(value):
            raise ConfigError("must be finite", f"parameters.{key}")
        return value

    def names(self, key):
        items = [s.strip() for s in self.text(key).split(",")]
        if not items or any(not s for s in items):
            raise ConfigError("empty name in list", f"parameters.{key}")
        return items

    def sweep(self):
        return parse_sweep(self.text("sweep"))

    def echo(self):
        """Deterministically ordered (key, value) pairs for CSV metadata."""
        items = [("experiment", self.experiment), ("seed", str(self.seed)), ("trials", str(self.n_trials))]
        items += [(f"parameters.{k}", str(self.params[k]).strip()) for k in sorted(self.params)]
        return items


def parse_sweep(raw, key="parameters.sweep"):
    raw = str(raw).strip()
    try:
        if ":" in raw:
            start, stop, step = (float(v) for v in raw.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + i * step, 10) for i in range(count)]
        else:
            values = [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse sweep {raw!r}", key) from None
    if not values:
        raise ConfigError("sweep is empty", key)
    if not all(np.isfinite(values)):
        raise ConfigError("sweep values must be finite", key)
    return values


def build_config(experiment, path=None, seed=None, trials=None, out=None, workers=None):
    """Merge defaults, an optional INI file and command-line overrides."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}", "experiment.name")
    base = DEFAULTS[experiment]
    params = dict(base["parameters"])
    n_trials, file_seed, file_out, file_workers = base["trials"], 0, None, 1
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config: {exc}", "config") from None
        if parser.has_section("experiment"):
            sec = parser["experiment"]
            name = sec.get("name", experiment).strip()
            if name != experiment:
                raise ConfigError(f"file is for {name!r}, not {experiment!r}", "experiment.name")
            n_trials = _int_field(sec, "trials", n_trials)
            file_seed = _int_field(sec, "seed", file_seed)
            file_workers = _int_field(sec, "workers", file_workers)
            file_out = sec.get("output", file_out)
        if parser.has_section("parameters"):
            for key, value in parser["parameters"].items():
                if key not in params and experiment != "rates":
                    raise ConfigError("unknown parameter", f"parameters.{key}")
                params[key] = value
        unknown = set(parser.sections()) - {"experiment", "parameters"}
        if unknown:
            raise ConfigError(f"unknown section(s) {sorted(unknown)}", "config")
    return ExperimentConfig(
        experiment=experiment,
        params=params,
        n_trials=n_trials if trials is None else trials,
        seed=file_seed if seed is None else seed,
        output_path=file_out if out is None else out,
        workers=file_workers if workers is None else workers,
    )


def _int_field(section, key, default):
    raw = section.get(key)
    if raw is None:
        return default
    try:
        return int(raw.replace("_", ""))
    except ValueError:
        raise ConfigError(f"expected an integer, got {raw!r}", f"experiment.{key}") from None
