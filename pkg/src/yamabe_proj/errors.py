"""Exception hierarchy shared by all modules."""


class YamabeError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(YamabeError, ValueError):
    """A problem or run configuration violates a constraint."""


class InvalidExponentError(ConfigError):
    pass


class DomainError(YamabeError, ValueError):
    """Evaluation point outside the open orbit interval."""


class PositivityError(YamabeError, ValueError):
    """u = w + 1 is no longer positive."""


class NumericalError(YamabeError, RuntimeError):
    """Base class for failures of an iterative numerical method."""


class IntegrationError(NumericalError):
    pass


class NoConvergenceError(NumericalError):
    pass


class FoldNotFoundError(NumericalError):
    """No turning point on the computed branch; the branch is attached."""

    def __init__(self, message, branch=None):
        super().__init__(message)
        self.branch = branch
