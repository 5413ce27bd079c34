"""Exception types shared across the simulation modules."""


class SimulationError(Exception):
    """Base class for all atomchain errors."""


class ConfigError(SimulationError):
    """Invalid or inconsistent input parameters / run configuration."""


class InvalidStateError(SimulationError):
    """A state vector contains non-finite or otherwise unusable entries."""


class DegenerateConfigurationError(SimulationError):
    """Atom positions coincide or are not strictly ordered."""


class IllConditionedError(SimulationError):
    """The coupling matrix is numerically singular.

    Carries an estimate of the 1-norm condition number in ``condition``.
    """

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class OrderingViolationError(SimulationError):
    """Integration step would make atoms cross or touch."""


class DivergenceError(SimulationError):
    """Non-finite values appeared during time integration."""


class ConvergenceTimeout(SimulationError):
    """Relaxation did not reach the requested tolerances in time.

    ``metrics`` holds the last convergence diagnostics (max momentum,
    max force, simulated time) and ``state`` the last chain state, so the
    caller can retry with stronger damping or a longer horizon.
    """

    def __init__(self, message, metrics=None, state=None):
        super().__init__(message)
        self.metrics = dict(metrics or {})
        self.state = state


class ParameterDomainError(SimulationError):
    """A quantity was requested outside its domain of definition."""


class NumericalError(SimulationError):
    """An underlying numerical routine failed."""
