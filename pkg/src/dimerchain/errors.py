"""Exception types shared across the package."""


class DimerChainError(Exception):
    """Base class for all dimerchain errors."""


class GeometryError(DimerChainError):
    """Invalid chain geometry (non-positive lengths, ordering violations, ...)."""


class SingularityError(DimerChainError):
    """A scattering denominator vanished (|delta_omega^2 - J^2| below guard)."""


class ConditioningError(DimerChainError):
    """Dense scattering matrix too ill-conditioned to trust."""


class DisorderTooStrongError(DimerChainError):
    """Resampling budget exhausted; sigma incompatible with the geometry."""


class QuadratureError(DimerChainError):
    """Gauss quadrature failed its doubling convergence check."""


class ConfigError(DimerChainError):
    """Experiment configuration failed validation."""
