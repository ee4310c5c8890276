"""Exception types shared across the package."""


class CovertRelayError(Exception):
    """Base class for domain errors."""


class InfeasibleRate(CovertRelayError):
    """The source-relay link cannot support the requested rate at any relay power."""


class PowerBudgetExceeded(CovertRelayError):
    """(mu+1)*P_delta >= P_r_max: the forwarding threshold is undefined."""


class ConditionBViolated(CovertRelayError):
    """Relay-destination gain below the forwarding threshold; the relay stays silent."""


class DomainError(CovertRelayError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class DegenerateSample(CovertRelayError):
    """Too few Monte Carlo draws satisfied the forwarding condition."""


class ConvergenceFailure(CovertRelayError):
    """Adaptive quadrature exhausted its subdivision budget."""
