"""
schattenlab
===========

Numerical experiments on Schatten classes of the integration operator
T_g f(z) = ∫_0^z f(ζ) g'(ζ) dζ on the weighted Dirichlet spaces D_α.

- Truncated operator matrices with Frobenius tail certificates
- Singular values, Schatten norms and closed-form spectra
- Besov, Dirichlet-Littlewood and X^p_α norm functionals
- Hyperbolic lattices, Luecking sums and Toeplitz operators
- Growth fits and regime classification for parameter sweeps

Core Example:
    >>> from schattenlab import Symbol, assemble_tg, singular_values, schatten_norm
    >>>
    >>> m = assemble_tg(Symbol.monomial(3), alpha=0.5, N=512)
    >>> schatten_norm(singular_values(m, [2.0]), 2.0).upper

Norms Example:
    >>> from schattenlab import Symbol, xpa_norm
    >>>
    >>> xpa_norm(Symbol.monomial(1), p=2.0, alpha=1.0, method="series").estimate
    1.289868133696...

Suites Example:
    >>> from schattenlab import SuiteContext, GridSpec, default_registry
    >>>
    >>> default_registry.run("lattice", SuiteContext(GridSpec(), quick=True)).passed
    True
"""

__version__ = "0.1.0"
__license__ = "MIT"

from .logging.modern import ModernLogger
from .core.errors import (
    ConvergenceError,
    LatticeVerificationError,
    NumericalError,
    ParameterError,
    PropertyFailure,
    SchattenLabError,
    TruncationError,
)
from .core.config import ConfigManager, get_config, set_config
from .core.manifest import ManifestStore, RunManifest
from .core.suite_system import SuiteContext, SuiteRegistry, SuiteResult, default_registry
from .numerics import (
    GridSpec,
    InnerProductMode,
    MeasureRep,
    Regime,
    SpaceParams,
    Symbol,
    assemble_mgprime,
    assemble_mgsecond,
    assemble_tg,
    assemble_toeplitz,
    bp_norm,
    build_lattice,
    dl_norm,
    fit_power_log,
    luecking_sum,
    monomial_spectrum_closed_form,
    regime_report,
    schatten_norm,
    singular_values,
    truncation_report,
    xpa_measure,
    xpa_norm,
)
from . import experiments

__all__ = [
    # Core
    "ModernLogger",
    "ConfigManager",
    "get_config",
    "set_config",
    "ManifestStore",
    "RunManifest",
    "SuiteContext",
    "SuiteRegistry",
    "SuiteResult",
    "default_registry",
    # Errors
    "ConvergenceError",
    "LatticeVerificationError",
    "NumericalError",
    "ParameterError",
    "PropertyFailure",
    "SchattenLabError",
    "TruncationError",
    # Numerics
    "GridSpec",
    "InnerProductMode",
    "MeasureRep",
    "Regime",
    "SpaceParams",
    "Symbol",
    "assemble_mgprime",
    "assemble_mgsecond",
    "assemble_tg",
    "assemble_toeplitz",
    "bp_norm",
    "build_lattice",
    "dl_norm",
    "fit_power_log",
    "luecking_sum",
    "monomial_spectrum_closed_form",
    "regime_report",
    "schatten_norm",
    "singular_values",
    "truncation_report",
    "xpa_measure",
    "xpa_norm",
    # Experiments
    "experiments",
]
