"""Numerical core: spaces, operator matrices, spectra, norm functionals, lattices and fits."""

from .spaces import (
    InnerProductMode,
    KernelEval,
    KernelKind,
    OrthonormalBasis,
    SpaceKind,
    SpaceParams,
    Symbol,
    SymbolKind,
    kernel_coefficients,
    kernel_norm,
    kernel_value,
    orthonormal_basis,
    symbol_coeffs,
)
from .quadrature import GridSpec, build_grid, integrate_disk, integrate_radial
from .hyperbolic import (
    Lattice,
    MeasureRep,
    bergman_metric,
    build_lattice,
    luecking_sum,
    measure_from_json,
    mobius,
    pseudo_hyperbolic,
)
from .operators import (
    OperatorKind,
    OperatorMatrix,
    OperatorSpec,
    assemble_bergman_multiplication,
    assemble_mgprime,
    assemble_mgsecond,
    assemble_monomial_multiplication,
    assemble_tg,
    assemble_toeplitz,
    operator_from_spec,
    truncation_report,
)
from .spectra import (
    ProbeKind,
    SchattenOrder,
    Spectrum,
    berezin_functional,
    berezin_sandwich,
    frame_lower_bound_check,
    monomial_spectrum_closed_form,
    multiplication_monomial_spectrum,
    schatten_norm,
    singular_values,
)
from .norms import (
    Functional,
    NormResult,
    bp_norm,
    bplog_norm,
    dl_norm,
    ga_norm_suite,
    ict_oracle,
    lacunary_trace_criterion,
    validate_ict,
    validate_li2,
    xpa_log_norm,
    xpa_measure,
    xpa_norm,
    xpa_shifted_norm,
)
from .asymptotics import GrowthFit, Regime, fit_power_log, regime_report

__all__ = [
    # Spaces
    "InnerProductMode",
    "KernelEval",
    "KernelKind",
    "OrthonormalBasis",
    "SpaceKind",
    "SpaceParams",
    "Symbol",
    "SymbolKind",
    "kernel_coefficients",
    "kernel_norm",
    "kernel_value",
    "orthonormal_basis",
    "symbol_coeffs",
    # Quadrature
    "GridSpec",
    "build_grid",
    "integrate_disk",
    "integrate_radial",
    # Hyperbolic geometry
    "Lattice",
    "MeasureRep",
    "bergman_metric",
    "build_lattice",
    "luecking_sum",
    "measure_from_json",
    "mobius",
    "pseudo_hyperbolic",
    # Operators
    "OperatorKind",
    "OperatorMatrix",
    "OperatorSpec",
    "assemble_bergman_multiplication",
    "assemble_mgprime",
    "assemble_mgsecond",
    "assemble_monomial_multiplication",
    "assemble_tg",
    "assemble_toeplitz",
    "operator_from_spec",
    "truncation_report",
    # Spectra
    "ProbeKind",
    "SchattenOrder",
    "Spectrum",
    "berezin_functional",
    "berezin_sandwich",
    "frame_lower_bound_check",
    "monomial_spectrum_closed_form",
    "multiplication_monomial_spectrum",
    "schatten_norm",
    "singular_values",
    # Norms
    "Functional",
    "NormResult",
    "bp_norm",
    "bplog_norm",
    "dl_norm",
    "ga_norm_suite",
    "ict_oracle",
    "lacunary_trace_criterion",
    "validate_ict",
    "validate_li2",
    "xpa_log_norm",
    "xpa_measure",
    "xpa_norm",
    "xpa_shifted_norm",
    # Asymptotics
    "GrowthFit",
    "Regime",
    "fit_power_log",
    "regime_report",
]
