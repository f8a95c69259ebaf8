"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(ValueError):
    """A requested value cannot be reached within the supported parameter range."""


class ConfigurationError(ValueError):
    """Free parameters (s, t, nome) are degenerate for the requested construction."""


class ContractError(ValueError):
    """An operator violates a precondition (e.g. Hermiticity) of a numerical routine."""


class InvariantViolation(RuntimeError):
    """A structural invariant asserted by the theory failed numerically."""


class PoleError(ZeroDivisionError):
    """Evaluation requested at a pole (e.g. a T-Q eigenvalue at a Bethe root)."""
