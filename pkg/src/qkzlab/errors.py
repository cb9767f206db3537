"""Exception hierarchy for qkzlab."""


class QKZError(Exception):
    """Base class for all qkzlab errors."""


class PoleProximity(QKZError, ValueError):
    """An argument lies within tolerance of a pole of a meromorphic factor."""


class NonconvergentReduction(QKZError, RuntimeError):
    """Shift reduction into the fundamental strip needed too many steps."""


class InvalidNu(QKZError, ValueError):
    """The level-count vector is not weakly decreasing from N to 0."""


class ShapeMismatch(QKZError, ValueError):
    pass


class DegenerateSpectral(QKZError, ValueError):
    """A spectral parameter hits a zero of an R-matrix denominator."""


class UnresolvedPinch(QKZError, RuntimeError):
    """Two poles with opposite side requirements coincide after cancellation."""


class BandOverflow(QKZError, RuntimeError):
    pass


class ToleranceNotMet(QKZError, RuntimeError):
    pass


class DomainViolation(QKZError, ValueError):
    pass


class ConfigError(QKZError, ValueError):
    pass
