"""
Spectrum runs: assemble one operator, take its singular values and report Schatten norms.

A run carries two cross-checks next to the computed norms. Monomial symbols get
the closed-form spectrum of the same truncation, and analytic symbols get the
norm functionals that are comparable to ‖T_g‖_{S_p} (DL at p = 2 on the
Dirichlet space, X^p_α for p > 1).
"""

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Union

from ..core.errors import ParameterError, require
from ..numerics.hyperbolic import MeasureRep
from ..numerics.norms import NormResult, derivative_coeffs, dl_norm, xpa_norm
from ..numerics.operators import (
    OperatorKind,
    OperatorMatrix,
    assemble_bergman_multiplication,
    assemble_mgprime,
    assemble_mgsecond,
    assemble_monomial_multiplication,
    assemble_tg,
    assemble_toeplitz,
)
from ..numerics.quadrature import GridSpec
from ..numerics.spaces import InnerProductMode, Symbol, SymbolKind
from ..numerics.spectra import (
    SchattenNorm,
    Spectrum,
    monomial_spectrum_closed_form,
    multiplication_monomial_spectrum,
    schatten_norm,
    singular_values,
)

logger = logging.getLogger(__name__)

NORM_ROW_COLUMNS = (
    "p", "schatten_sum", "norm", "upper", "tail", "heuristic", "closed_form", "closed_form_dev",
)
COMPARISON_COLUMNS = ("functional", "p", "alpha", "schatten", "functional_value", "err", "ratio", "status")


class OperatorChoice(str, Enum):
    TG = "tg"
    MGPRIME = "mgprime"
    MGSECOND = "mgsecond"
    MONOMIAL = "mzj"
    BERGMAN = "bergman"
    TOEPLITZ = "toeplitz"


@dataclass
class SpectrumRun:
    """Everything one ``spectrum`` invocation computed."""

    matrix: OperatorMatrix
    spectrum: Spectrum
    norms: List[SchattenNorm]
    closed_form: Optional[Spectrum] = None
    functionals: List[NormResult] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def orders(self) -> List[float]:
        return [n.p for n in self.norms]

    def norm_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for n in self.norms:
            row: Dict[str, Any] = {
                "p": n.p,
                "schatten_sum": n.partial_sum,
                "norm": n.value,
                "upper": n.upper,
                "tail": n.tail,
                "heuristic": n.heuristic,
                "closed_form": None,
                "closed_form_dev": None,
            }
            if self.closed_form is not None:
                exact = self.closed_form.schatten_sum(n.p) ** (1.0 / n.p)
                row["closed_form"] = exact
                row["closed_form_dev"] = abs(n.value - exact) / exact if exact > 0 else abs(n.value)
            rows.append(row)
        return rows

    def comparison_rows(self) -> List[Dict[str, Any]]:
        """Schatten p-th powers (tail included) against the comparable functionals."""
        rows = []
        for res in self.functionals:
            p = float(res.params["p"])
            spp = self.spectrum.schatten_sum(p) + self.spectrum.tail(p).bound
            rows.append({
                "functional": res.functional.value,
                "p": p,
                "alpha": res.params.get("alpha"),
                "schatten": spp,
                "functional_value": res.estimate,
                "err": res.error + res.clip_remainder,
                "ratio": spp / res.estimate if res.estimate > 0 else math.inf,
                "status": res.status,
            })
        return rows

    def summary(self) -> Dict[str, Any]:
        m = self.matrix
        return {
            "operator": m.spec.label,
            "kind": m.spec.kind.value,
            "domain": m.spec.domain.to_dict(),
            "codomain": m.spec.codomain.to_dict(),
            "N": m.spec.N,
            "nnz": m.nnz,
            "bandwidth": m.bandwidth,
            "frobenius_tail": m.tail_certificate,
            "certificate_heuristic": m.certificate_heuristic,
            "quadrature_error": m.quadrature_error,
            "flags": list(m.flags),
            "top": self.spectrum.top,
            "count": len(self.spectrum),
            "norms": self.norm_rows(),
            "comparisons": self.comparison_rows(),
            "warnings": list(self.warnings),
        }


def assemble(
    operator: Union[OperatorChoice, str],
    symbol: Union[Symbol, MeasureRep],
    alpha: float,
    N: int,
    mode: InnerProductMode = InnerProductMode.COEFFICIENT,
    gamma: Optional[float] = None,
    grid: Optional[GridSpec] = None,
) -> OperatorMatrix:
    """Assemble the operator the command line names."""
    operator = OperatorChoice(operator)
    if operator is OperatorChoice.TOEPLITZ:
        require(isinstance(symbol, MeasureRep), "measure", "the toeplitz operator needs --measure")
        return assemble_toeplitz(symbol, alpha, N, grid, mode)
    require(isinstance(symbol, Symbol), "symbol", f"{operator.value} needs an analytic symbol")
    if operator is OperatorChoice.TG:
        return assemble_tg(symbol, alpha, N, mode)
    if operator is OperatorChoice.MGPRIME:
        return assemble_mgprime(symbol, alpha, N, mode)
    if operator is OperatorChoice.MGSECOND:
        return assemble_mgsecond(symbol, alpha, N, mode)
    if operator is OperatorChoice.MONOMIAL:
        require(symbol.kind is SymbolKind.MONOMIAL, "symbol", "mzj needs a monomial:j symbol")
        return assemble_monomial_multiplication(symbol.j, N)
    require(gamma is not None, "gamma", "bergman multiplication needs --gamma")
    return assemble_bergman_multiplication(symbol, alpha, gamma, N)


def closed_form_spectrum(m: OperatorMatrix) -> Optional[Spectrum]:
    """The exact spectrum of the same truncation, when one is known."""
    g = m.spec.symbol
    if not isinstance(g, Symbol) or g.kind is not SymbolKind.MONOMIAL or g.j > m.spec.N:
        return None
    if m.spec.kind is OperatorKind.MULTIPLICATION_MONOMIAL:
        return multiplication_monomial_spectrum(g.j, m.spec.N)
    if (m.spec.kind is OperatorKind.INTEGRATION_TG
            and m.spec.domain.inner_product_mode is InnerProductMode.COEFFICIENT):
        return monomial_spectrum_closed_form(g.j, m.spec.domain.alpha, m.spec.N)
    return None


def comparable_functionals(
    g: Symbol,
    alpha: float,
    orders: Sequence[float],
    grid: Optional[GridSpec] = None,
    executor: Optional[Executor] = None,
) -> List[NormResult]:
    """DL (α = 0, p = 2) and series X^p_α for every p > 1."""
    d = derivative_coeffs(g)
    if d is None:
        logger.info("%s has no coefficient series; functional comparison skipped", g.label)
        return []
    if d.size == 0:
        return []
    out: List[NormResult] = []
    if alpha == 0.0 and 2.0 in orders:
        res = dl_norm(g, grid, executor=executor)
        out.append(replace(res, params={**res.params, "alpha": 0.0}))
    for p in orders:
        if p > 1.0:
            out.append(xpa_norm(g, p, alpha, grid, method="series", executor=executor))
    return out


def run_spectrum(
    symbol: Union[Symbol, MeasureRep],
    alpha: float,
    N: int,
    orders: Sequence[float],
    operator: Union[OperatorChoice, str] = OperatorChoice.TG,
    mode: InnerProductMode = InnerProductMode.COEFFICIENT,
    gamma: Optional[float] = None,
    grid: Optional[GridSpec] = None,
    closed_form_check: bool = True,
    compare: bool = True,
    executor: Optional[Executor] = None,
) -> SpectrumRun:
    """Assemble, decompose and cross-check one operator.

    Example:
        >>> run = run_spectrum(Symbol.monomial(3), 0.5, 512, [1.5, 2.0])
        >>> [row["closed_form_dev"] < 1e-10 for row in run.norm_rows()]
        [True, True]
    """
    require(len(orders) > 0, "p", "at least one Schatten exponent is required")
    for p in orders:
        require(p > 0.0, "p", f"Schatten exponents must be positive, got {p}")
    orders = [float(p) for p in orders]
    operator = OperatorChoice(operator)
    m = assemble(operator, symbol, alpha, N, mode, gamma, grid)
    warnings: List[str] = []
    if isinstance(symbol, Symbol) and symbol.is_constant:
        warnings.append("constant symbol")
        logger.warning("constant symbol %s: the operator is zero", symbol.label)
    if m.certificate_heuristic:
        warnings.append("certificate heuristic")

    spectrum = singular_values(m, orders)
    norms = [schatten_norm(spectrum, p) for p in orders]
    closed = closed_form_spectrum(m) if closed_form_check else None
    if closed is not None:
        for n in norms:
            exact = closed.schatten_sum(n.p) ** (1.0 / n.p)
            dev = abs(n.value - exact) / exact
            if dev > 1e-10:
                logger.warning("p=%g: SVD norm deviates from the closed form by %.3g", n.p, dev)

    functionals: List[NormResult] = []
    if compare and operator is OperatorChoice.TG and isinstance(symbol, Symbol) and not symbol.is_constant:
        functionals = comparable_functionals(symbol, alpha, orders, grid, executor)
    logger.debug("spectrum of %s: %d values, top %.6g", m.spec.label, len(spectrum), spectrum.top)
    return SpectrumRun(m, spectrum, norms, closed, functionals, warnings)


def parse_orders(text: Union[str, Sequence[float]]) -> List[float]:
    """``"1.5,2"`` -> [1.5, 2.0]."""
    if not isinstance(text, str):
        return [float(p) for p in text]
    try:
        orders = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ParameterError("p", f"cannot parse Schatten exponents {text!r}") from exc
    if not orders:
        raise ParameterError("p", "at least one Schatten exponent is required")
    return orders
