"""
Parameter sweeps behind the ``sweep`` and ``frontier`` commands.

Every sweep evaluates independent parameter points through ``executor.map`` so
rows come back in submission order whatever the thread count, then fits the
growth of each column with :func:`fit_power_log`.
"""

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import ParameterError, require
from ..numerics.asymptotics import GrowthFit, RegimeReport, fit_power_log, regime_report
from ..numerics.norms import dl_norm, ga_norm_suite, xpa_norm, xpa_shifted_norm
from ..numerics.operators import assemble_tg
from ..numerics.quadrature import GridSpec
from ..numerics.spaces import InnerProductMode, Symbol
from ..numerics.spectra import monomial_spectrum_closed_form, schatten_norm, singular_values

logger = logging.getLogger(__name__)

MONOMIAL_COLUMNS = ("j", "N", "schatten", "schatten_upper", "xpa", "xpa_err", "ratio")
KERNELPOW_COLUMNS = (
    "a", "one_minus_a", "schatten", "schatten_source",
    "bp", "bp_err", "xp0", "xp0_err", "bplog", "bplog_err", "xplog", "xplog_err",
)
FRONTIER_COLUMNS = ("alpha", "p", "eps", "j", "schatten", "xpa", "xpa_shifted", "regime", "tag")

# the fraction of N a kernel-power SVD needs before its spectrum is captured
_SVD_RESOLUTION = 8


@dataclass
class SweepResult:
    """Rows of one sweep plus the growth fits of its columns."""

    family: str
    alpha: float
    p: float
    regime: RegimeReport
    columns: Tuple[str, ...]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    fits: Dict[str, GrowthFit] = field(default_factory=dict)
    params: Dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> Tuple[np.ndarray, np.ndarray]:
        """(sweep parameter, values) for the rows where ``name`` was computed."""
        key = "j" if self.family == "monomial" else "a"
        pairs = [(r[key], r[name]) for r in self.rows if r.get(name) is not None]
        if not pairs:
            return np.zeros(0), np.zeros(0)
        x, y = zip(*pairs)
        return np.asarray(x, dtype=float), np.asarray(y, dtype=float)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "alpha": self.alpha,
            "p": self.p,
            "regime": self.regime.to_dict(),
            "params": self.params,
            "fits": {name: fit.to_dict() for name, fit in self.fits.items()},
            "rows": self.rows,
        }


def _map(fn: Callable[[Any], Dict[str, Any]], items: Iterable[Any],
         executor: Optional[Executor]) -> List[Dict[str, Any]]:
    if executor is None:
        return [fn(item) for item in items]
    return list(executor.map(fn, items))


def _try_fit(name: str, x: np.ndarray, y: np.ndarray, **kwargs: Any) -> Optional[GrowthFit]:
    try:
        return fit_power_log(x, y, **kwargs)
    except ParameterError as exc:
        logger.warning("no %s fit: %s", name, exc.message)
        return None


# -------------------- monomials --------------------


def monomial_degrees(k_min: int = 2, k_max: int = 12) -> List[int]:
    """j = 2^k for k_min <= k <= k_max."""
    require(1 <= k_min <= k_max, "j_min_exp", f"need 1 <= k_min <= k_max, got {k_min}, {k_max}")
    return [2**k for k in range(k_min, k_max + 1)]


def monomial_sweep(
    alpha: float,
    p: float,
    degrees: Sequence[int],
    padding: int = 2048,
    grid: Optional[GridSpec] = None,
    with_functional: bool = True,
    executor: Optional[Executor] = None,
) -> SweepResult:
    """‖T_{z^j}‖_{S_p} from the closed-form spectra at N = 2j + padding, next to ‖z^j‖_{X^p_α}.

    At the boundary p(1-α) = 2 the S_p column also gets a fit with the
    exponent forced to 1/p, whose log power separates (j log j)^{1/p} from j^{1/p}.
    """
    require(p > 1.0, "p", f"monomial sweeps need p > 1 (S_p sums of T_z^j diverge otherwise), got {p}")
    require(alpha >= 0.0, "alpha", f"must be >= 0, got {alpha}")
    require(padding >= 0, "padding", f"must be >= 0, got {padding}")
    regime = regime_report(alpha, p)
    spec = grid or GridSpec()

    def point(j: int) -> Dict[str, Any]:
        N = 2 * j + padding
        norm = schatten_norm(monomial_spectrum_closed_form(j, alpha, N), p)
        row: Dict[str, Any] = {
            "j": j, "N": N, "schatten": norm.value, "schatten_upper": norm.upper,
            "xpa": None, "xpa_err": None, "ratio": None,
        }
        if with_functional:
            res = xpa_norm(Symbol.monomial(j), p, alpha, spec, method="series")
            row["xpa"] = res.norm
            row["xpa_err"] = res.error + res.clip_remainder
            row["ratio"] = res.norm / norm.upper
        logger.debug("monomial j=%d: S_p %.6g", j, norm.upper)
        return row

    rows = _map(point, list(degrees), executor)
    result = SweepResult("monomial", alpha, p, regime, MONOMIAL_COLUMNS, rows,
                         params={"padding": padding, "degrees": list(degrees), "grid": spec.to_dict()})
    x, y = result.column("schatten_upper")
    fit = _try_fit("S_p", x, y)
    if fit is not None:
        result.fits["schatten"] = fit
    if regime.boundary:
        forced = _try_fit("S_p (forced)", x, y, forced_exponent=1.0 / p)
        if forced is not None:
            result.fits["schatten_forced"] = forced
    if with_functional:
        x, y = result.column("xpa")
        fit = _try_fit("X^p_alpha", x, y)
        if fit is not None:
            result.fits["xpa"] = fit
        ratios = [r["ratio"] for r in rows]
        result.params["ratio_window"] = [min(ratios), max(ratios)]
    return result


# -------------------- kernel powers --------------------


def kernel_power_levels(k_min: int = 3, k_max: int = 14) -> List[float]:
    """a = 1 - 2^{-k} for k_min <= k <= k_max."""
    require(1 <= k_min <= k_max, "a_min_exp", f"need 1 <= k_min <= k_max, got {k_min}, {k_max}")
    return [1.0 - 2.0**-k for k in range(k_min, k_max + 1)]


def _kernel_power_schatten(a: float, gamma: float, alpha: float, p: float, N: int,
                           spec: GridSpec) -> Tuple[Optional[float], Optional[str]]:
    g = Symbol.kernel_power(a, gamma)
    if p == 2.0 and alpha == 0.0:
        # ‖T_g‖²_{S_2} on D equals the DL functional in the integral norm
        res = dl_norm(g, spec.with_clip(1.0))
        value = res.oracle if res.oracle is not None else res.estimate
        return math.sqrt(value), "hs identity"
    if 1.0 / (1.0 - a) * _SVD_RESOLUTION > N:
        return None, None
    m = assemble_tg(g, alpha, N, InnerProductMode.COEFFICIENT)
    return schatten_norm(singular_values(m, [p]), p).upper, "svd"


def kernel_power_sweep(
    alpha: float,
    p: float,
    gamma: float,
    levels: Sequence[float],
    N: int = 512,
    grid: Optional[GridSpec] = None,
    method: str = "series",
    executor: Optional[Executor] = None,
) -> SweepResult:
    """The g_a = (1 - az)^{-γ} table: ‖T_{g_a}‖_{S_p} and the four norm functionals.

    The S_p column comes from the HS identity at p = 2, α = 0 and from an SVD at
    truncation N otherwise; levels with 1/(1-a) beyond N/8 are left empty there.
    """
    require(p > 1.0 and gamma > 0.0, "p,gamma", f"need p > 1 and gamma > 0, got {p}, {gamma}")
    regime = regime_report(alpha, p)
    spec = grid or GridSpec()

    def point(a: float) -> Dict[str, Any]:
        row = ga_norm_suite(gamma, p, [a], spec, method=method)[0]
        out = {"a": a, "one_minus_a": 1.0 - a}
        for name in ("bp", "xp0", "bplog", "xplog"):
            res = getattr(row, name)
            out[name] = None if res is None else res.norm
            out[f"{name}_err"] = None if res is None else res.error + res.clip_remainder
        out["schatten"], out["schatten_source"] = _kernel_power_schatten(a, gamma, alpha, p, N, spec)
        return out

    rows = _map(point, list(levels), executor)
    result = SweepResult("kernelpow", alpha, p, regime, KERNELPOW_COLUMNS, rows,
                         params={"gamma": gamma, "N": N, "method": method, "grid": spec.to_dict()})
    for name in ("bp", "xp0", "bplog", "xplog", "schatten"):
        x, y = result.column(name)
        if x.size == 0:
            continue
        fit = _try_fit(name, x, y, model="decay")
        if fit is not None:
            result.fits[name] = fit
        forced = _try_fit(f"{name} (forced)", x, y, model="decay", forced_exponent=gamma)
        if forced is not None:
            result.fits[f"{name}_forced"] = forced
    return result


# -------------------- open region --------------------


def frontier_cells(alphas: Sequence[float], ps: Sequence[float]) -> List[Tuple[float, float]]:
    """The (α, p) grid points with p(1-α) >= 4."""
    return [(a, p) for a in alphas for p in ps if p * (1.0 - a) >= 4.0 - 1e-12]


def frontier(
    alphas: Sequence[float],
    ps: Sequence[float],
    degrees: Sequence[int],
    eps_fraction: float = 0.5,
    padding: int = 2048,
    grid: Optional[GridSpec] = None,
    executor: Optional[Executor] = None,
) -> List[SweepResult]:
    """Exploratory rows for the open region: S_p of T_{z^j} against X^p_α and X^p_{α-ε}.

    ε = eps_fraction·α; the shifted functional is left empty at α = 0.
    """
    require(0.0 < eps_fraction < 1.0, "eps", f"eps fraction must lie in (0, 1), got {eps_fraction}")
    cells = frontier_cells(alphas, ps)
    if not cells:
        raise ParameterError("p", "no (alpha, p) cell satisfies p(1-alpha) >= 4")
    spec = grid or GridSpec()
    results = []
    for alpha, p in cells:
        regime = regime_report(alpha, p)
        eps = eps_fraction * alpha

        def point(j: int, alpha: float = alpha, p: float = p, eps: float = eps,
                  regime: RegimeReport = regime) -> Dict[str, Any]:
            g = Symbol.monomial(j)
            norm = schatten_norm(monomial_spectrum_closed_form(j, alpha, 2 * j + padding), p)
            shifted = None
            if eps > 0.0:
                shifted = xpa_shifted_norm(g, p, alpha, eps, spec).norm
            return {
                "alpha": alpha, "p": p, "eps": eps if eps > 0.0 else None, "j": j,
                "schatten": norm.upper,
                "xpa": xpa_norm(g, p, alpha, spec, method="series").norm,
                "xpa_shifted": shifted,
                "regime": regime.regime.value,
                "tag": "open",
            }

        rows = _map(point, list(degrees), executor)
        result = SweepResult("monomial", alpha, p, regime, FRONTIER_COLUMNS, rows,
                             params={"eps": eps, "padding": padding, "exploratory": True})
        for name in ("schatten", "xpa", "xpa_shifted"):
            x, y = result.column(name)
            if x.size >= 6:
                fit = _try_fit(name, x, y)
                if fit is not None:
                    result.fits[name] = fit
        logger.info("frontier cell alpha=%g p=%g: %d rows tagged %s", alpha, p, len(rows), rows[0]["tag"])
        results.append(result)
    return results

