"""Exception hierarchy."""


class RedmapError(Exception):
    """Base class for all library errors."""


class DimensionError(RedmapError, ValueError):
    pass


class NotHermitianError(RedmapError, ValueError):
    pass


class NotUnitaryError(RedmapError, ValueError):
    pass


class SingularMap(RedmapError):
    """The first-leg dynamical map is not invertible within the condition limit."""

    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(message)
        self.condition = condition


class MaximallyEntangled(RedmapError, ValueError):
    """The construction is undefined for maximally entangled states."""


class IncompleteKraus(RedmapError, ValueError):
    pass


class NonLocalUnitary(RedmapError, ValueError):
    pass


class NoConventionFits(RedmapError):
    pass


class UnknownScenario(RedmapError, ValueError):
    pass


class ConfigError(RedmapError, ValueError):
    pass
