"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain of a mathematical function."""


class QuadratureDivergence(ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance.

    Carries the partial result so callers can inspect how far it got.
    """

    def __init__(self, message, value, error_estimate, evaluations):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
        self.evaluations = evaluations


class ModelValidationError(ValueError):
    """A model violates one of the conditions its formulas rely on.

    ``condition`` names the failed check (e.g. ``"min_cond"``,
    ``"exponential_moment"``, ``"martingale"``, ``"feller"``).
    """

    def __init__(self, message, condition):
        super().__init__(message)
        self.condition = condition


class RegimeError(ValueError):
    """Moneyness regime incompatible with the requested expansion."""


class MCInstabilityError(RuntimeError):
    """Too many Monte Carlo paths produced non-finite weights."""

    def __init__(self, message, rejected, n_paths):
        super().__init__(message)
        self.rejected = rejected
        self.n_paths = n_paths
