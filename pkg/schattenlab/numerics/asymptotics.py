"""Growth fits and regime bookkeeping.

Sweep tables become two numbers: a power exponent e and a log power m in

* ``power``: y ≈ C · x^e · (log x)^m            (x → ∞, e.g. the monomial degree j)
* ``decay``: y ≈ C · (1-x)^{-e} · log(e/(1-x))^m (x → 1, e.g. |a| of a kernel power)

The exponent is fitted on the largest decade of the data and the log power is
regressed on the residuals over the full range; the two stages alternate until
they agree.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import ParameterError, require

logger = logging.getLogger(__name__)

MIN_SAMPLES = 6
MIN_DECADES = 2.0
_BACKFIT_ROUNDS = 200


@dataclass(frozen=True)
class GrowthFit:
    exponent: float
    log_power: float
    r2: float
    window: Tuple[float, float]
    range: Tuple[float, float]
    model: str = "power"
    forced: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "exponent": self.exponent,
            "log_power": self.log_power,
            "r2": self.r2,
            "window": list(self.window),
            "range": list(self.range),
            "model": self.model,
            "forced_exponent": self.forced,
        }


def _scales(x: np.ndarray, model: str) -> Tuple[np.ndarray, np.ndarray]:
    """(log of the power scale, log of the log scale) for each sample."""
    if model == "power":
        return np.log(x), np.log(np.log(x))
    u = 1.0 - x
    return -np.log(u), np.log(np.log(math.e / u))


def _lstsq(columns: Sequence[np.ndarray], y: np.ndarray) -> np.ndarray:
    design = np.column_stack(columns)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return coef


def _fit_log_power(ones: np.ndarray, ls: np.ndarray, residual: np.ndarray,
                   fit_log: bool) -> Tuple[float, float]:
    if not fit_log:
        return float(np.mean(residual)), 0.0
    c0, m = _lstsq([ones, ls], residual)
    return float(c0), float(m)


def fit_power_log(
    x: Sequence[float],
    y: Sequence[float],
    model: str = "power",
    fit_log: bool = True,
    forced_exponent: Optional[float] = None,
) -> GrowthFit:
    """Fit y ≈ C · scale(x)^e · logscale(x)^m.

    With ``forced_exponent`` only the log power (and C) are fitted, which is
    how the boundary regime (j log j)^{1/p} is told apart from plain j^{1/p}.
    """
    require(model in ("power", "decay"), "model", f"expected power or decay, got {model!r}")
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    require(xs.shape == ys.shape and xs.ndim == 1, "samples", "x and y must be 1-D of equal length")
    require(xs.size >= MIN_SAMPLES, "samples", f"need at least {MIN_SAMPLES} samples, got {xs.size}")
    if not (np.all(np.isfinite(ys)) and np.all(ys > 0.0)):
        raise ParameterError("samples", "values must be finite and positive")
    if model == "power":
        require(bool(np.all(xs > 1.0)), "samples", "power model needs x > 1")
    else:
        require(bool(np.all((xs >= 0.0) & (xs < 1.0))), "samples", "decay model needs x in [0, 1)")
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]

    s, ls = _scales(xs, model)
    decades = (s[-1] - s[0]) / math.log(10.0)
    if decades < MIN_DECADES:
        raise ParameterError("samples", f"sweep spans {decades:.2f} decades, need {MIN_DECADES:g}")
    ly = np.log(ys)
    ones = np.ones_like(s)

    if forced_exponent is not None:
        exponent = float(forced_exponent)
        c0, log_power = _fit_log_power(ones, ls, ly - exponent * s, fit_log)
    else:
        top = s >= s[-1] - math.log(10.0)
        if np.count_nonzero(top) < 3:
            top = np.zeros_like(top)
            top[-3:] = True
        log_power = 0.0
        exponent = c0 = 0.0
        # alternate the two stages until they agree
        for _ in range(_BACKFIT_ROUNDS):
            previous = (exponent, log_power)
            exponent = float(_lstsq([ones[top], s[top]], (ly - log_power * ls)[top])[1])
            c0, log_power = _fit_log_power(ones, ls, ly - exponent * s, fit_log)
            if abs(exponent - previous[0]) + abs(log_power - previous[1]) < 1e-12:
                break
    model_ly = c0 + exponent * s + log_power * ls

    total = float(np.sum((ly - ly.mean()) ** 2))
    resid = float(np.sum((ly - model_ly) ** 2))
    r2 = 1.0 if total == 0.0 else min(1.0, max(0.0, 1.0 - resid / total))
    ratio = np.exp(ly - model_ly)
    window = (float(ratio.min()), float(ratio.max()))
    fit = GrowthFit(
        exponent=exponent,
        log_power=float(log_power),
        r2=r2,
        window=window,
        range=(float(xs[0]), float(xs[-1])),
        model=model,
        forced=forced_exponent is not None,
    )
    logger.debug("growth fit %s: e=%.4f m=%.4f r2=%.6f", model, fit.exponent, fit.log_power, r2)
    return fit


# -------------------- regimes --------------------


class Regime(str, Enum):
    CONSTANTS_ONLY = "constants only"
    BESOV = "X^p_alpha = B_p"
    LOG_BOUNDARY = "log boundary"
    XPA = "X^p_alpha"
    OPEN = "open"


@dataclass(frozen=True)
class RegimeReport:
    alpha: float
    p: float
    regime: Regime
    characterization: str
    monomial_growth: str
    boundary: bool = False
    exploratory: bool = False
    characterized: bool = True

    @property
    def product(self) -> float:
        return self.p * (1.0 - self.alpha)

    def expected_exponent(self) -> Optional[float]:
        """Exponent of ‖T_{z^j}‖_{S_p} in j, when the regime predicts one."""
        if self.regime in (Regime.BESOV, Regime.LOG_BOUNDARY):
            return 1.0 / self.p
        if self.regime is Regime.XPA or (self.regime is Regime.OPEN and self.product > 2.0):
            return (1.0 - self.alpha) / 2.0
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "p": self.p,
            "p(1-alpha)": self.product,
            "regime": self.regime.value,
            "characterization": self.characterization,
            "monomial_growth": self.monomial_growth,
            "boundary": self.boundary,
            "exploratory": self.exploratory,
            "characterized": self.characterized,
            "expected_exponent": self.expected_exponent(),
        }


def regime_report(alpha: float, p: float, tol: float = 1e-12) -> RegimeReport:
    """Which characterization of S_p membership of T_g on D_α applies at (α, p).

    Equality p(1-α) = 2 is treated as the log regime and flagged as a boundary.
    On the Dirichlet space (α = 0) only p <= 2 is settled; elsewhere the report
    keeps the monomial growth law but lists necessary and sufficient conditions.
    """
    require(alpha >= 0.0, "alpha", f"must be >= 0, got {alpha}")
    require(p > 0.0, "p", f"must be positive, got {p}")
    q = p * (1.0 - alpha)
    if p <= 1.0 + tol:
        return RegimeReport(alpha, p, Regime.CONSTANTS_ONLY,
                            "T_g in S_p iff g is constant", "none")
    if alpha >= 1.0:
        # D_1 = H^2 and D_α = A^2_{α-2} beyond
        return RegimeReport(alpha, p, Regime.BESOV, "T_g in S_p iff g in B_p", "j^(1/p)")
    if alpha == 0.0:
        return _dirichlet_report(p, tol)
    if abs(q - 2.0) <= tol:
        return RegimeReport(alpha, p, Regime.LOG_BOUNDARY, "T_g in S_p iff g in X^p_alpha",
                            "(j log(j+1))^(1/p)", boundary=True)
    if q < 2.0:
        return RegimeReport(alpha, p, Regime.BESOV, "T_g in S_p iff g in B_p", "j^(1/p)")
    if q < 4.0:
        return RegimeReport(alpha, p, Regime.XPA, "T_g in S_p iff g in X^p_alpha",
                            "j^((1-alpha)/2)")
    return RegimeReport(alpha, p, Regime.OPEN,
                        "sufficient: g in X^p_(alpha-eps); no characterization",
                        "j^((1-alpha)/2)", exploratory=True, characterized=False)


def _dirichlet_report(p: float, tol: float) -> RegimeReport:
    if abs(p - 2.0) <= tol:
        return RegimeReport(0.0, p, Regime.LOG_BOUNDARY, "T_g in S_2 iff g in DL",
                            "(j log(j+1))^(1/p)", boundary=True)
    if p < 2.0:
        return RegimeReport(0.0, p, Regime.BESOV,
                            "necessary: g in B_p; sufficient: g in B_p,log^(p/2) or g in X^p_0",
                            "j^(1/p)", characterized=False)
    necessary = "necessary: g in X^p_0 and g in B_p,log^(p/2)"
    if p < 4.0 - tol:
        return RegimeReport(0.0, p, Regime.XPA, f"{necessary}; sufficient: g in X^p_0,log^(p/4)",
                            "j^(1/2)", characterized=False)
    if p <= 4.0 + tol:
        return RegimeReport(0.0, p, Regime.OPEN, f"{necessary}; sufficient: g in X^p_0,log^(p/4)",
                            "j^(1/2)", exploratory=True, characterized=False)
    return RegimeReport(0.0, p, Regime.OPEN, f"{necessary}; no sufficient condition",
                        "j^(1/2)", exploratory=True, characterized=False)
