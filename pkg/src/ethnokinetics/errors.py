"""Exception types raised across the package."""


class EthnoError(Exception):
    """Base class for all package errors."""


class NonFiniteState(EthnoError):
    """An integrator produced NaN/inf (or a non-positive population)."""

    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time


class ResidualTooLarge(EthnoError):
    pass


class ParamSignViolation(EthnoError):
    """beta12 or beta32 is positive where the stochastic analysis needs them <= 0."""


class KnotMisalignment(EthnoError):
    pass


class NoValidBase(EthnoError):
    pass


class NewtonDivergence(EthnoError):
    """Newton iteration from one seed failed; collected, never raised by the search."""

    def __init__(self, seed, reason):
        super().__init__(f"Newton diverged from seed {tuple(seed)}: {reason}")
        self.seed = tuple(float(v) for v in seed)
        self.reason = reason


class ParseError(EthnoError):
    def __init__(self, message, line=None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


class ValidationError(EthnoError):
    def __init__(self, field, message, line=None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{field}: {message}")
        self.field = field
        self.line = line


class UnknownPreset(EthnoError):
    pass
