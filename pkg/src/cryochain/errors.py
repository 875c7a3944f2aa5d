"""Exception hierarchy shared by all blocks."""


class CryoChainError(Exception):
    pass


class DomainError(CryoChainError, ValueError):
    """Argument outside the physical domain of a model (e.g. T <= 0)."""


class InputError(CryoChainError, ValueError):
    """Malformed input: wrong length, out-of-range code, mismatched grids."""


class PreconditionError(CryoChainError, ValueError):
    """A numerical precondition is violated (step size, sampling rate...)."""


class UnsupportedPulseError(CryoChainError, ValueError):
    pass


class DecisionError(CryoChainError, ValueError):
    pass


class ConfigError(CryoChainError, ValueError):
    """Bad configuration document. The message names the offending key path."""
