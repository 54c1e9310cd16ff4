"""Core plumbing for schattenlab: errors, configuration, manifests and suite registry."""

from .errors import (
    ConvergenceError,
    LatticeVerificationError,
    NumericalError,
    ParameterError,
    PropertyFailure,
    SchattenLabError,
    TruncationError,
)
from .config import ConfigManager, get_config, set_config
from .manifest import ManifestStore, RunManifest
from .suite_system import Check, SuiteContext, SuiteRegistry, SuiteResult, default_registry

__all__ = [
    "ConvergenceError",
    "LatticeVerificationError",
    "NumericalError",
    "ParameterError",
    "PropertyFailure",
    "SchattenLabError",
    "TruncationError",
    "ConfigManager",
    "get_config",
    "set_config",
    "ManifestStore",
    "RunManifest",
    "Check",
    "SuiteContext",
    "SuiteRegistry",
    "SuiteResult",
    "default_registry",
]
