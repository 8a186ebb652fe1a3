class AdiWaveError(Exception):
    """Base class for all package errors."""


class ShapeMismatch(AdiWaveError, ValueError):
    pass


class ZeroPivot(AdiWaveError, ArithmeticError):
    pass


class TooSmallGrid(AdiWaveError, ValueError):
    pass


class NonFinite(AdiWaveError, ArithmeticError):
    """A field developed NaN/Inf or blew past the divergence threshold."""


class NonPositiveError(AdiWaveError, ValueError):
    pass


class TooFewRates(AdiWaveError, ValueError):
    pass


class ConfigError(AdiWaveError, ValueError):
    pass
