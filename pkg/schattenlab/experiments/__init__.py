"""Orchestration behind the CLI: spectrum runs, parameter sweeps and validation suites."""

from . import validation
from .spectrum import OperatorChoice, SpectrumRun, parse_orders, run_spectrum
from .sweeps import (
    SweepResult,
    frontier,
    frontier_cells,
    kernel_power_levels,
    kernel_power_sweep,
    monomial_degrees,
    monomial_sweep,
)
from .validation import run_suites, suite_names

__all__ = [
    "validation",
    "OperatorChoice",
    "SpectrumRun",
    "parse_orders",
    "run_spectrum",
    "SweepResult",
    "frontier",
    "frontier_cells",
    "kernel_power_levels",
    "kernel_power_sweep",
    "monomial_degrees",
    "monomial_sweep",
    "run_suites",
    "suite_names",
]
