"""Exception types raised across the package."""


class ConfigError(ValueError):
    """A scenario or experiment parameter lies outside its valid domain."""


class NegativeInputError(ValueError):
    pass


class InvalidPhiError(ValueError):
    """Power split outside (0, 1]."""


class ZeroChannelError(ValueError):
    """Beamforming requested for an all-zero legitimate channel."""


class ToleranceNotMetError(RuntimeError):
    pass


class QuadratureFailure(RuntimeError):
    """Adaptive integration did not reach the requested accuracy."""


class InsufficientTransmissionsError(RuntimeError):
    """Too few Monte Carlo samples passed the on-off gate."""
