"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Raised when inputs, dimensions, or parameter settings are invalid."""


class OracleError(RuntimeError):
    """Raised when the black-box objective returns a non-finite value.

    Carries the offending evaluation point(s) and, when raised from inside a
    solver loop, a snapshot of the solver state (``state`` attribute).
    """

    def __init__(self, message, x=None, y=None, state=None):
        super().__init__(message)
        self.x = x
        self.y = y
        self.state = state
