"""Command-line entry point.

    wsnradio ber --seed 7 --out ber.csv
    wsnradio papr --config configs/papr_ifdma.ini --trials 10000
    wsnradio rates

Exit status: 0 success, 1 configuration error, 2 runtime or statistics error.
"""

import argparse
import sys

from ..errors import ConfigError, WsnRadioError
from .config import EXPERIMENTS, build_config
from .experiments import run

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

_HELP = {
    "ber": "Monte Carlo BER vs Eb/N0 over AWGN, with closed-form curves",
    "papr": "PAPR CCDF per transmit chain, optional clipping/SLM/PTS and shaping",
    "bandwidth": "20 dB occupied bandwidth of raised-cosine shaped QPSK",
    "histogram": "amplitude histograms of OFDM and SC-FDE waveforms",
    "rates": "MB-OFDM PHY data-rate table",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def make_parser():
    parser = _Parser(prog="wsnradio", description="Baseband PHY experiments")
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--config", metavar="PATH", help="INI file with [experiment] and [parameters]")
        p.add_argument("--seed", type=int, help="unsigned 64-bit seed (overrides config)")
        p.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")
        p.add_argument("--trials", type=int, help="bits / blocks / symbols / samples, per experiment")
        p.add_argument("--workers", type=int, help="parallel tasks; output is identical for any value")
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args.experiment, args.config, args.seed, args.trials, args.out, args.workers)
        text = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WsnRadioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
