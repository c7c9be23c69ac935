"""Exception hierarchy shared by all modules."""


class WsnRadioError(Exception):
    """Base class for every error raised by this package."""


class SizeError(WsnRadioError, ValueError):
    """Array length or shape does not satisfy an operation's precondition."""


class DomainError(WsnRadioError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class ConfigError(WsnRadioError, ValueError):
    """Invalid configuration. ``field`` names the offending entry when known."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class SingularChannelError(WsnRadioError, ZeroDivisionError):
    """Equalizer would divide by a zero channel gain."""


class MeasurementError(WsnRadioError, RuntimeError):
    """A spectral or statistical measurement could not be taken."""


class CalibrationError(WsnRadioError, ValueError):
    """Noise cannot be calibrated against the supplied signal power."""


class DegenerateSignalError(WsnRadioError, ValueError):
    """Signal has no power, so a ratio against its mean is undefined."""


class StatisticsError(WsnRadioError, ValueError):
    """Too few samples for the requested statistic."""
