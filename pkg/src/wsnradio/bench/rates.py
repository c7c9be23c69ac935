"""MB-OFDM PHY data-rate arithmetic.

Every row of the ECMA-368 rate table follows from one coded bit rate:
200 coded bits per 312.5 ns OFDM symbol = 640 Mb/s, scaled by the code
rate and divided by the frequency and time spreading factors. Published
figures truncate to one decimal (106.66... is listed as 106.6).
"""

from dataclasses import dataclass
from fractions import Fraction

from ..errors import DomainError

CODED_BIT_RATE_MBPS = Fraction(640)

MODULATIONS = ("QPSK", "DCM")
CODING_RATES = (Fraction(1, 3), Fraction(1, 2), Fraction(5, 8), Fraction(3, 4))
REPETITION_FACTORS = (1, 2)

RATE_TABLE = (
    ("QPSK", Fraction(1, 3), 2, 2),
    ("QPSK", Fraction(1, 2), 2, 2),
    ("QPSK", Fraction(1, 3), 1, 2),
    ("QPSK", Fraction(1, 2), 1, 2),
    ("QPSK", Fraction(5, 8), 1, 2),
    ("DCM", Fraction(1, 2), 1, 1),
    ("DCM", Fraction(5, 8), 1, 1),
    ("DCM", Fraction(3, 4), 1, 1),
)


@dataclass(frozen=True)
class MbOfdmRateRow:
    modulation: str
    coding_rate: Fraction
    freq_rep: int
    time_rep: int
    rate_mbps: Fraction

    def as_strings(self):
        return [self.modulation, str(self.coding_rate), str(self.freq_rep),
                str(self.time_rep), format_rate(self.rate_mbps)]


def mb_ofdm_rate(modulation, coding_rate, freq_rep, time_rep):
    """Information rate in Mb/s, truncated to one decimal (exact Fraction)."""
    modulation = str(modulation).upper()
    coding_rate = Fraction(coding_rate).limit_denominator(64)
    if modulation not in MODULATIONS:
        raise DomainError(f"modulation must be one of {MODULATIONS}")
    if coding_rate not in CODING_RATES:
        raise DomainError(f"coding rate {coding_rate} not in {[str(r) for r in CODING_RATES]}")
    if freq_rep not in REPETITION_FACTORS or time_rep not in REPETITION_FACTORS:
        raise DomainError("repetition factors must be 1 or 2")
    exact = CODED_BIT_RATE_MBPS * coding_rate / (freq_rep * time_rep)
    return Fraction(int(exact * 10), 10)


def format_rate(rate):
    """'80' for whole numbers, otherwise one decimal ('53.3')."""
    tenths = int(Fraction(rate) * 10)
    whole, frac = divmod(tenths, 10)
    return str(whole) if frac == 0 else f"{whole}.{frac}"


def rate_table_rows():
    return [MbOfdmRateRow(m, r, f, t, mb_ofdm_rate(m, r, f, t)) for m, r, f, t in RATE_TABLE]
