"""Exception types raised by the toolkit."""


class WeightsFEMError(Exception):
    """Base class for all errors raised by weightsfem."""


class DegenerateNodes(WeightsFEMError):
    pass


class BoundaryViolation(WeightsFEMError):
    pass


class SingularVandermonde(WeightsFEMError):
    pass


class EigensolverNoConvergence(WeightsFEMError):
    pass


class NonMonotoneMapping(WeightsFEMError):
    pass


class NonPositiveCoefficient(WeightsFEMError):
    pass


class SingularFrequencyBlock(WeightsFEMError):
    """A corrected circulant block is not positive definite (inadmissible points)."""


class ConfigError(WeightsFEMError, ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


class SolverNotConverged(WeightsFEMError):
    """An iterative solve hit its iteration cap (CLI exit code 3)."""
