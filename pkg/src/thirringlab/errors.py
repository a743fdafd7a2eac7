"""Shared exception types for the laboratory."""


class SingularPointError(ValueError):
    """Evaluation requested exactly on a singular point or line."""


class DomainError(ValueError):
    """Requested point/region falls outside the valid computational domain."""


class StepSizeError(RuntimeError):
    """Mesh step too large: the per-step fixed-point iteration cannot contract."""


class ResolutionError(RuntimeError):
    """Discrete transform not resolved: result unstable under grid refinement."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""
