class OneSidedError(Exception):
    pass


class DomainError(OneSidedError, ValueError):
    """Argument lies outside the domain of the object being evaluated."""


class EvaluationError(OneSidedError, ArithmeticError):
    """A function produced a non-finite value."""


class ConfigurationError(OneSidedError, ValueError):
    pass


class CertificationError(OneSidedError, RuntimeError):
    """A one-sided construction could not be certified on its dense grid."""


class SolverError(OneSidedError, RuntimeError):
    pass
