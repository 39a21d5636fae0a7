"""Exception hierarchy shared by all siegelwp modules."""


class SiegelWPError(Exception):
    """Base class for every error raised by the package."""


class NonSymmetric(SiegelWPError, ValueError):
    pass


class NotPositiveDefinite(SiegelWPError, ValueError):
    pass


class NotSymplectic(SiegelWPError, ValueError):
    pass


class NotUnitary(SiegelWPError, ValueError):
    pass


class NotOrthogonal(SiegelWPError, ValueError):
    pass


class NotSkew(SiegelWPError, ValueError):
    pass


class SingularDenominator(SiegelWPError, ArithmeticError):
    pass


class ConstraintViolation(SiegelWPError, ValueError):
    """Complex (Q, P) pair is off the symplectic constraint surface."""


class NotOnLevelSet(SiegelWPError, ValueError):
    pass


class TangencyViolation(SiegelWPError, ValueError):
    pass


class ShapeMismatch(SiegelWPError, ValueError):
    pass


class OffShell(ConstraintViolation):
    pass


class SingularQ(SiegelWPError, ArithmeticError):
    pass


class BLost(SiegelWPError, ArithmeticError):
    """Imaginary part B left the positive-definite cone during integration."""


class GridTooCoarse(SiegelWPError, ValueError):
    pass


class StepGuardViolation(SiegelWPError, RuntimeError):
    """arg det Q jumped by more than pi/2 in one step.

    The partially filled trajectory is attached as ``record``.
    """

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class EmptyRecord(SiegelWPError, ValueError):
    pass


class ConfigError(SiegelWPError, ValueError):
    """Scenario file problem; ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
