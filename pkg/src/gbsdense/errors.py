"""Exception types shared across the package.

Anything that stems from bad inputs or an unsatisfiable request derives from
``ValueError`` so that callers (and the command line front end) can treat the
whole family as a configuration problem.  Failures that can only be detected
mid-computation derive from ``RuntimeError``.
"""

__all__ = [
    "ScalingError",
    "PurityError",
    "DecompositionError",
    "InfeasiblePurityError",
    "CapacityError",
    "GraphFileError",
    "EmptyDistributionError",
]


class ScalingError(ValueError):
    """Kernel scaling is non-positive or at/beyond the spectral bound."""


class PurityError(ValueError):
    """A pure Gaussian state was required but the input is mixed."""


class DecompositionError(ValueError):
    """Matrix handed to a decomposition violates its structural precondition."""


class InfeasiblePurityError(ValueError):
    """Requested source purity cannot be met by the chosen Schmidt family."""


class CapacityError(ValueError):
    """Requested enumeration exceeds the supported problem size."""


class GraphFileError(ValueError):
    """Graph file is malformed or fails validation."""


class EmptyDistributionError(RuntimeError):
    """Sampling was requested from a distribution with no probability mass."""
