"""Norm functionals of analytic symbols and measures on the disk.

Every functional is an integral over the clipped disk |z| <= r_max with a
boundary-concentrated weight. Values come with three numbers that say how far
to trust them: the quadrature error (change under one grid refinement), the
clip remainder (an estimate of the part beyond r_max), and, where a
coefficient series exists, an independent oracle.

Functionals
-----------
* ``B_p``            ∫|g'|^p (1-|z|²)^{p-2} dA
* ``B_p,log^γ``      ∫|g'|^p log(e/(1-|z|))^γ (1-|z|²)^{p-2} dA
* ``DL``             ∫|g'|² log(e/(1-|z|²)) dA
* ``X^p_α``          |g(0)|^p + ∫((1-|w|²)^α I_α(w))^{p/2} (1-|w|²)^{p-2} dA(w)
* ``X^p_0,log^p/4``  the α = 0 variant with the extra factor log(e/(1-|w|))^{p/4}
* ``X^p_α(μ)``       the same outer integral over a measure instead of |g'|² dA_α

where I_α(w) = ∫|g'(z)|² dA_α(z) / |1 - w̄z|^{2+2α}.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special
from scipy.signal import fftconvolve

from ..core.errors import NumericalError, ParameterError, require
from .hyperbolic import MeasureRep
from .quadrature import (
    DIVERGENCE_SWEEP,
    GridSpec,
    QuadratureValue,
    build_grid,
    clip_remainder,
    integrate_disk,
    integrate_radial,
    ring_mean,
    ring_slices,
    sweep_trend,
)
from .spaces import SpaceParams, Symbol, SymbolKind, log_monomial_norms_sq

logger = logging.getLogger(__name__)

# node evaluations a nested X^p_α run may spend before it returns a partial result
NESTED_BUDGET = 400_000_000
_COEFF_RTOL = 1e-17
_SERIES_TOL = 1e-17
_SERIES_MAX = 1 << 23
_GRAM_MAX = 64
_FFT_CELLS = 1 << 22
_LOGLOG_FOCUS = 1.0 - 2.0**-40
_MAX_FOCUS_ATOMS = 8


class Functional(str, Enum):
    BP = "B_p"
    BPLOG = "B_p,log"
    DL = "DL"
    XPA = "X^p_alpha"
    XPA_LOG = "X^p_0,log"
    XPA_SHIFTED = "X^p_alpha-eps"
    XPA_MEASURE = "X^p_alpha(mu)"


@dataclass(frozen=True)
class NormResult:
    """One functional value; ``value`` is the integral over the clipped disk (a p-th power)."""

    value: float
    functional: Functional
    r_max: float
    error: float = 0.0
    oracle: Optional[float] = None
    clip_remainder: float = 0.0
    diverging: bool = False
    growth: Optional[float] = None
    status: str = "ok"
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (self.value >= 0.0 and math.isfinite(self.value)):
            raise NumericalError(
                f"{self.functional.value}: invalid functional value {self.value!r}",
                value=self.value,
            )

    @property
    def estimate(self) -> float:
        """Value with the clip remainder added back."""
        return self.value + self.clip_remainder

    @property
    def norm(self) -> float:
        """The p-th root of the estimate."""
        p = float(self.params.get("p", 1.0))
        return self.estimate ** (1.0 / p)

    @property
    def interval(self) -> Tuple[float, float]:
        return max(0.0, self.value - self.error), self.estimate + self.error

    def agrees_with_oracle(self, rtol: float = 1e-6) -> bool:
        if self.oracle is None:
            return True
        slack = self.error + self.clip_remainder + rtol * max(abs(self.oracle), 1e-300)
        return abs(self.estimate - self.oracle) <= slack

    def to_row(self, symbol: str) -> Dict[str, Any]:
        """One norm-table row (column order of the CSV export)."""
        return {
            "symbol": symbol,
            "functional": self.functional.value,
            "p": self.params.get("p"),
            "alpha": self.params.get("alpha"),
            "gamma": self.params.get("gamma"),
            "clip": self.r_max,
            "value": self.value,
            "err": self.error,
            "oracle": self.oracle,
        }


# -------------------- symbol helpers --------------------


def _kernel_power_length(x: float, gamma: float) -> int:
    # smallest m past the peak of (γ+1)_m/m! x^m where the term is below tolerance
    m = 16.0
    for _ in range(4):
        m = max(16.0, (math.log(1.0 / _COEFF_RTOL) + gamma * math.log(m + 1.0)) / -math.log(x))
        m += gamma * x / (1.0 - x)
    return int(min(math.ceil(m) + 1, _SERIES_MAX))


def derivative_coeffs(g: Symbol) -> Optional[np.ndarray]:
    """Taylor coefficients of g' (entry n multiplies z^n), or None for the loglog symbol.

    An identically zero derivative gives an empty array. Kernel powers are cut
    where the coefficients drop below 1e-17 of the largest one.
    """
    if g.kind is SymbolKind.LOGLOG:
        return None
    if g.kind is SymbolKind.MONOMIAL:
        d = np.zeros(g.j, dtype=complex)
        d[g.j - 1] = g.j
        return d
    if g.kind is SymbolKind.LACUNARY:
        d = np.zeros(g.lacunary_exponents[-1], dtype=complex)
        for a_k, n_k in zip(g.lacunary_coeffs, g.lacunary_exponents):
            d[n_k - 1] += a_k * n_k
        return d
    if g.kind is SymbolKind.KERNEL_POWER:
        x = abs(g.a)
        if x == 0.0:
            return np.zeros(0, dtype=complex)
        m = np.arange(_kernel_power_length(x, g.gamma), dtype=float)
        ac = np.conj(g.a)
        log_mag = (
            special.gammaln(m + g.gamma + 1.0) - special.gammaln(g.gamma + 1.0)
            - special.gammaln(m + 1.0) + m * math.log(x)
        )
        keep = log_mag >= log_mag.max() + math.log(_COEFF_RTOL)
        last = int(np.flatnonzero(keep)[-1]) + 1
        phase = np.exp(1j * m[:last] * np.angle(ac))
        return g.gamma * ac * np.exp(log_mag[:last]) * phase
    coeffs = np.asarray(g.taylor_coeffs, dtype=complex)
    d = coeffs[1:] * np.arange(1, coeffs.size)
    nz = np.flatnonzero(d)
    return d[: nz[-1] + 1] if nz.size else np.zeros(0, dtype=complex)


def _single_term(d: Optional[np.ndarray]) -> Optional[Tuple[float, int]]:
    """(|c|, e) when g'(z) = c z^e."""
    if d is None:
        return None
    nz = np.flatnonzero(d)
    if nz.size != 1:
        return None
    return float(abs(d[nz[0]])), int(nz[0])


def _focus_points(g: Symbol, r_max: float) -> Tuple[complex, ...]:
    if g.kind is SymbolKind.KERNEL_POWER and abs(g.a) > 0.0:
        return (g.a,)
    if g.kind is SymbolKind.LOGLOG:
        return (min(r_max, _LOGLOG_FOCUS),)
    return ()


def _kernel_power_mean(g: Symbol, p: float) -> Callable[[np.ndarray], np.ndarray]:
    """r ↦ mean of |g'(r e^{iθ})|^p over the circle, for g = (1 - āz)^{-γ}."""
    x = abs(g.a)
    lam = 0.5 * p * (g.gamma + 1.0)
    scale = (g.gamma * x) ** p

    def mean(r: np.ndarray) -> np.ndarray:
        return scale * special.hyp2f1(lam, lam, 1.0, (x * np.asarray(r)) ** 2)

    return mean


# -------------------- single-integral functionals --------------------


def _weighted_derivative(
    g: Symbol,
    p: float,
    weight: Callable[[np.ndarray], np.ndarray],
    exponent: float,
    spec: GridSpec,
    executor: Optional[Executor],
) -> Tuple[QuadratureValue, float]:
    """∫|g'|^p W(|z|) dA over |z| <= r_max, and the clip remainder beyond it."""
    d = derivative_coeffs(g)
    if d is not None and d.size == 0:
        return QuadratureValue(0.0, 0.0, spec.r_max), 0.0
    term = _single_term(d)
    edge: float
    if term is not None:
        c, e = term

        def radial(r: np.ndarray) -> np.ndarray:
            return c**p * np.asarray(r) ** (e * p) * weight(r)

        q = integrate_radial(radial, spec)
        edge = float(radial(np.array([spec.r_max]))[0]) if spec.clipped else 0.0
    elif g.kind is SymbolKind.KERNEL_POWER:
        mean = _kernel_power_mean(g, p)

        def radial(r: np.ndarray) -> np.ndarray:
            return mean(r) * weight(r)

        q = integrate_radial(radial, spec)
        edge = float(radial(np.array([spec.r_max]))[0]) if spec.clipped else 0.0
    else:
        focused = spec.with_focus(*_focus_points(g, spec.r_max))

        def fn(z: np.ndarray) -> np.ndarray:
            return np.abs(g.derivative(z)) ** p * weight(np.abs(z))

        q = integrate_disk(fn, focused, executor)
        edge = ring_mean(fn, spec.r_max, focused) if spec.clipped else 0.0
    return q, clip_remainder(edge, spec.r_max, exponent)


def _derivative_functional(
    g: Symbol,
    p: float,
    functional: Functional,
    weight: Callable[[np.ndarray], np.ndarray],
    exponent: float,
    grid: Optional[GridSpec],
    oracle: Optional[float],
    include_constant: bool,
    detect_divergence: bool,
    executor: Optional[Executor],
    params: Dict[str, Any],
) -> NormResult:
    spec = grid or GridSpec()
    params = {"p": p, **params, "grid": spec.to_dict()}
    constant = abs(g.value_at_zero()) ** p if include_constant else 0.0
    if g.is_constant:
        logger.warning("constant symbol: %s seminorm is 0", functional.value)
        return NormResult(constant, functional, spec.r_max, oracle=constant,
                          status="constant", params=params)
    q, clip = _weighted_derivative(g, p, weight, exponent, spec, executor)
    diverging, growth = False, None
    if detect_divergence:
        sweep = [
            _weighted_derivative(g, p, weight, exponent, spec.with_clip(r), executor)[0].value
            for r in DIVERGENCE_SWEEP
        ]
        diverging, growth = sweep_trend(sweep)
        params["sweep"] = {"r_max": list(DIVERGENCE_SWEEP), "values": sweep}
        if diverging:
            logger.warning("%s of %s grows along the clip sweep (last step %+.3g)",
                           functional.value, g.label, growth)
    if oracle is not None:
        oracle += constant
    return NormResult(
        value=max(q.value, 0.0) + constant,
        functional=functional,
        r_max=spec.r_max,
        error=q.error,
        oracle=oracle,
        clip_remainder=clip,
        diverging=diverging,
        growth=growth,
        status="diverging" if diverging else "ok",
        params=params,
    )


def _bp_oracle(g: Symbol, p: float) -> Optional[float]:
    d = derivative_coeffs(g)
    term = _single_term(d)
    if term is not None:
        c, e = term
        return c**p * math.exp(special.betaln(e * p / 2.0 + 1.0, p - 1.0))
    if g.kind is SymbolKind.KERNEL_POWER:
        x = abs(g.a)
        lam = 0.5 * p * (g.gamma + 1.0)
        return (g.gamma * x) ** p * float(special.hyp2f1(lam, lam, p, x * x)) / (p - 1.0)
    if p == 2.0 and d is not None and d.size:
        n = np.arange(d.size)
        # ∫|Σ d_n z^n|² dA = Σ |d_n|² / (n+1)
        return float(np.sum(np.abs(d) ** 2 / (n + 1.0)))
    return None


def bp_norm(
    g: Symbol,
    p: float,
    grid: Optional[GridSpec] = None,
    include_constant: bool = False,
    detect_divergence: bool = False,
    executor: Optional[Executor] = None,
) -> NormResult:
    """‖g‖^p in the Besov space B_p (seminorm unless ``include_constant``)."""
    require(p > 1.0, "p", f"B_p needs p > 1, got {p}")

    def weight(r: np.ndarray) -> np.ndarray:
        return (1.0 - np.asarray(r) ** 2) ** (p - 2.0)

    return _derivative_functional(
        g, p, Functional.BP, weight, p - 2.0, grid, _bp_oracle(g, p),
        include_constant, detect_divergence, executor, {},
    )


def bplog_norm(
    g: Symbol,
    p: float,
    gamma: float,
    grid: Optional[GridSpec] = None,
    include_constant: bool = False,
    detect_divergence: bool = False,
    executor: Optional[Executor] = None,
) -> NormResult:
    """‖g‖^p in B_{p,log^γ}."""
    require(p > 1.0, "p", f"B_p,log needs p > 1, got {p}")
    require(gamma > 0.0, "gamma", f"log power must be positive, got {gamma}")

    def weight(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r)
        return np.log(np.e / (1.0 - r)) ** gamma * (1.0 - r * r) ** (p - 2.0)

    return _derivative_functional(
        g, p, Functional.BPLOG, weight, p - 2.0, grid, None,
        include_constant, detect_divergence, executor, {"gamma": gamma},
    )


def _dl_oracle(g: Symbol) -> Optional[float]:
    d = derivative_coeffs(g)
    if d is None or (g.kind is SymbolKind.TAYLOR and g.truncation is not None):
        return None
    if d.size == 0:
        return 0.0
    n = np.arange(d.size, dtype=float)
    harmonic = special.digamma(n + 2.0) + np.euler_gamma
    return float(np.sum(np.abs(d) ** 2 * (1.0 + harmonic) / (n + 1.0)))


def dl_norm(
    g: Symbol,
    grid: Optional[GridSpec] = None,
    include_constant: bool = False,
    detect_divergence: bool = False,
    executor: Optional[Executor] = None,
) -> NormResult:
    """∫|g'|² log(e/(1-|z|²)) dA; equals ‖T_g‖²_{S_2} on D_0 in the integral norm."""

    def weight(r: np.ndarray) -> np.ndarray:
        return np.log(np.e / (1.0 - np.asarray(r) ** 2))

    return _derivative_functional(
        g, 2.0, Functional.DL, weight, 0.0, grid, _dl_oracle(g),
        include_constant, detect_divergence, executor, {},
    )


# -------------------- nested X^p_α --------------------


OuterShape = Callable[[float, np.ndarray], np.ndarray]


def _xpa_outer(p: float, alpha: float) -> OuterShape:
    def shape(rho: float, inner: np.ndarray) -> np.ndarray:
        s = 1.0 - rho * rho
        return (s**alpha * np.maximum(inner, 0.0)) ** (0.5 * p) * s ** (p - 2.0)

    return shape


def _xpa_log_outer(p: float) -> OuterShape:
    def shape(rho: float, inner: np.ndarray) -> np.ndarray:
        s = 1.0 - rho * rho
        return (
            np.maximum(inner, 0.0) ** (0.5 * p)
            * math.log(math.e / (1.0 - rho)) ** (0.25 * p)
            * (p - 1.0) * s ** (p - 2.0)
        )

    return shape


def _series_length(rho: float, alpha: float) -> int:
    if rho == 0.0:
        return 1
    k = 1.0 / -math.log(rho)
    for _ in range(4):
        k = (math.log(1.0 / _SERIES_TOL) + max(alpha, 0.0) * math.log(k + 1.0)) / -math.log(rho)
    return int(math.ceil(k)) + 2


def _binomial_weights(rho: float, alpha: float, K: int) -> np.ndarray:
    """C_m ρ^m with C_m = (1+α)_m / m!, the coefficients of (1 - ρz)^{-(1+α)}."""
    m = np.arange(K, dtype=float)
    log_c = special.gammaln(m + 1.0 + alpha) - special.gammaln(1.0 + alpha) - special.gammaln(m + 1.0)
    if rho > 0.0:
        log_c = log_c + m * math.log(rho)
    else:
        log_c[1:] = -np.inf
    return np.exp(log_c)


@dataclass(frozen=True)
class _SeriesInner:
    """I_α(ρe^{iθ}) from the Taylor coefficients d of g'.

    g'(z)(1 - w̄z)^{-(1+α)} has coefficients e_k = Σ_n d_n e^{inθ} c_{k-n}
    (up to a unimodular factor), so I_α = Σ_k |e_k|² ‖z^k‖²_{A²_α}.
    """

    d: np.ndarray
    alpha: float

    def __call__(self, rho: float, theta: np.ndarray) -> np.ndarray:
        K = _series_length(rho, self.alpha)
        if K > _SERIES_MAX:
            raise NumericalError(
                f"series for the inner integral needs {K} terms at |w| = {rho:.17g}",
                terms=K, rho=rho,
            )
        c = _binomial_weights(rho, self.alpha, K)
        D = self.d.size
        mu2 = np.exp(log_monomial_norms_sq(SpaceParams.bergman(self.alpha), np.arange(D + K - 1)))
        term = _single_term(self.d)
        if term is not None:
            mag, e = term
            value = mag**2 * float(np.sum(c * c * mu2[e : e + K]))
            return np.full(theta.size, value)
        n = np.arange(D)
        if D <= _GRAM_MAX:
            # Gram matrix G[n, n'] = Σ_k μ_k² c_{k-n} c_{k-n'}
            shifted = np.zeros((D, D + K - 1))
            for i in range(D):
                shifted[i, i : i + K] = c
            gram = (shifted * mu2) @ shifted.T
            v = self.d[None, :] * np.exp(1j * np.outer(theta, n))
            return np.real(np.sum((v @ gram) * np.conj(v), axis=1))
        out = np.empty(theta.size)
        step = max(1, _FFT_CELLS // (D + K))
        for i in range(0, theta.size, step):
            th = theta[i : i + step]
            v = self.d[None, :] * np.exp(1j * np.outer(th, n))
            e = fftconvolve(v, c[None, :], axes=1)
            out[i : i + step] = (np.abs(e) ** 2) @ mu2
        return out


def _inner_spec(spec: GridSpec) -> GridSpec:
    bits = math.log2(1.0 / (1.0 - spec.r_max)) + 12.0 if spec.clipped else spec.depth * spec.level_step
    depth = min(spec.depth, max(4, math.ceil(bits / spec.level_step)))
    return GridSpec(
        r_max=1.0,
        level_step=spec.level_step,
        radial_order=spec.radial_order,
        angular_base=spec.angular_base,
        angular_max=spec.angular_max,
        angular_order=spec.angular_order,
        depth=depth,
    )


@dataclass(frozen=True)
class _NestedInner:
    """I_α(ρe^{iθ}) by quadrature; z = e^{iθ}u turns every ring into one inner grid."""

    g: Symbol
    alpha: float
    spec: GridSpec

    def grid_size(self, rho: float) -> int:
        return build_grid(self.spec.with_focus(rho)).size

    def __call__(self, rho: float, theta: np.ndarray) -> np.ndarray:
        grid = build_grid(self.spec.with_focus(rho))
        u = grid.nodes
        a = self.alpha
        kern = grid.weights * (a + 1.0) * (1.0 - np.abs(u) ** 2) ** a / np.abs(1.0 - rho * u) ** (2.0 + 2.0 * a)
        out = np.empty(theta.size)
        step = max(1, _FFT_CELLS // max(u.size, 1))
        for i in range(0, theta.size, step):
            z = np.exp(1j * theta[i : i + step])[:, None] * u[None, :]
            out[i : i + step] = (np.abs(self.g.derivative(z)) ** 2) @ kern
        return out


@dataclass(frozen=True)
class _OuterValue:
    value: float
    edge: float
    cost: int
    rings: int
    last_radius: float
    partial: bool


def _outer_integral(
    inner: Callable[[float, np.ndarray], np.ndarray],
    shape: OuterShape,
    spec: GridSpec,
    radial: bool,
    executor: Optional[Executor],
    cost_of: Optional[Callable[[float], int]] = None,
    budget: Optional[int] = None,
) -> _OuterValue:
    grid = build_grid(spec)
    rings = ring_slices(grid)
    allowed = len(rings)
    spent = 0
    if cost_of is not None and budget is not None:
        for i, (rho, sl) in enumerate(rings):
            cost = (1 if radial else sl.stop - sl.start) * cost_of(rho)
            if spent + cost > budget:
                allowed = i
                break
            spent += cost

    def ring(item: Tuple[float, slice]) -> Tuple[float, float]:
        rho, sl = item
        w = grid.weights[sl]
        if radial:
            values = shape(rho, inner(rho, np.zeros(1)))
            return float(values[0] * np.sum(w)), float(values[0])
        theta = np.angle(grid.nodes[sl])
        values = shape(rho, inner(rho, theta))
        if not np.all(np.isfinite(values)):
            raise NumericalError(f"non-finite outer integrand at |w| = {rho:.17g}", rho=rho)
        total = float(np.sum(values * w))
        return total, total / float(np.sum(w))

    mapper = executor.map if executor is not None else map
    parts = list(mapper(ring, rings[:allowed]))
    value = math.fsum(part[0] for part in parts)
    edge = parts[-1][1] if parts else 0.0
    last = rings[allowed - 1][0] if allowed else 0.0
    return _OuterValue(value, edge, spent, allowed, last, allowed < len(rings))


def _nested_xp(
    g: Symbol,
    d: Optional[np.ndarray],
    shape: OuterShape,
    inner_alpha: float,
    exponent: float,
    spec: GridSpec,
    method: str,
    budget: Optional[int],
    executor: Optional[Executor],
) -> Tuple[float, float, float, Optional[float], str, Dict[str, Any]]:
    """(value, error, clip, oracle, status, extra) of the outer integral, constant term excluded."""
    focused = spec.with_focus(*_focus_points(g, spec.r_max))
    radial = _single_term(d) is not None
    extra: Dict[str, Any] = {}
    oracle: Optional[float] = None
    status = "ok"

    def series(s: GridSpec) -> _OuterValue:
        return _outer_integral(_SeriesInner(d, inner_alpha), shape, s, radial, executor)

    if method in ("series", "both") and d is not None:
        fine = series(focused)
        coarse = series(focused.coarsened())
        series_value = fine.value
        series_error = abs(fine.value - coarse.value)
        series_clip = clip_remainder(fine.edge, spec.r_max, exponent)
        if method == "series":
            return series_value, series_error, series_clip, None, status, extra
        oracle = series_value + series_clip
        extra["oracle_error"] = series_error

    nested = _NestedInner(g, inner_alpha, _inner_spec(spec))
    fine = _outer_integral(nested, shape, focused, False, executor, nested.grid_size, budget)
    coarse_nested = _NestedInner(g, inner_alpha, _inner_spec(spec).coarsened())
    coarse = _outer_integral(coarse_nested, shape, focused.coarsened(), False, executor,
                             coarse_nested.grid_size, budget)
    error = abs(fine.value - coarse.value)
    extra["nodes"] = fine.cost
    if fine.partial:
        status = "partial"
        missing = clip_remainder(fine.edge, fine.last_radius, exponent)
        error += missing
        logger.warning(
            "nested quadrature budget of %d evaluations reached at |w| = %.6g; "
            "partial result widened by %.3g", budget, fine.last_radius, missing,
        )
    clip = clip_remainder(fine.edge, spec.r_max, exponent) if not fine.partial else 0.0
    return fine.value, error, clip, oracle, status, extra


def _xp_functional(
    g: Symbol,
    p: float,
    functional: Functional,
    shape: OuterShape,
    inner_alpha: float,
    exponent: float,
    grid: Optional[GridSpec],
    method: str,
    budget: Optional[int],
    executor: Optional[Executor],
    detect_divergence: bool,
    params: Dict[str, Any],
) -> NormResult:
    require(method in ("series", "nested", "both"), "method",
            f"expected series, nested or both, got {method!r}")
    spec = grid or GridSpec()
    params = {"p": p, **params, "method": method, "grid": spec.to_dict()}
    constant = abs(g.value_at_zero()) ** p
    if g.is_constant:
        logger.warning("constant symbol: %s reduces to |g(0)|^p", functional.value)
        return NormResult(constant, functional, spec.r_max, oracle=constant,
                          status="constant", params=params)
    d = derivative_coeffs(g)
    if d is not None and d.size == 0:
        return NormResult(constant, functional, spec.r_max, oracle=constant,
                          status="constant", params=params)
    if method == "series" and d is None:
        raise ParameterError("method", f"no coefficient series for {g.label}; use nested quadrature")
    value, error, clip, oracle, status, extra = _nested_xp(
        g, d, shape, inner_alpha, exponent, spec, method, budget, executor
    )
    params.update(extra)
    diverging, growth = False, None
    if detect_divergence:
        sweep = [
            _nested_xp(g, d, shape, inner_alpha, exponent, spec.with_clip(r),
                       "series" if d is not None else "nested", budget, executor)[0]
            for r in DIVERGENCE_SWEEP
        ]
        diverging, growth = sweep_trend(sweep)
        params["sweep"] = {"r_max": list(DIVERGENCE_SWEEP), "values": sweep}
        if diverging:
            status = "diverging"
    if oracle is not None:
        oracle += constant
    return NormResult(
        value=max(value, 0.0) + constant,
        functional=functional,
        r_max=spec.r_max,
        error=error,
        oracle=oracle,
        clip_remainder=clip,
        diverging=diverging,
        growth=growth,
        status=status,
        params=params,
    )


def xpa_norm(
    g: Symbol,
    p: float,
    alpha: float,
    grid: Optional[GridSpec] = None,
    method: str = "both",
    budget: Optional[int] = NESTED_BUDGET,
    executor: Optional[Executor] = None,
    detect_divergence: bool = False,
) -> NormResult:
    """‖g‖^p in X^p_α.

    ``method="series"`` expands the inner integral in Taylor coefficients (one
    radial convolution per outer ring); ``"nested"`` integrates it on a full-disk
    grid; ``"both"`` reports the nested value with the series value as oracle.
    Nested runs stop after ``budget`` node evaluations and return a partial
    result whose error includes an estimate of the skipped rings.
    """
    require(p > 1.0, "p", f"X^p_alpha needs p > 1, got {p}")
    require(alpha >= 0.0, "alpha", f"must be >= 0, got {alpha}")
    return _xp_functional(
        g, p, Functional.XPA, _xpa_outer(p, alpha), alpha, p - 2.0,
        grid, method, budget, executor, detect_divergence, {"alpha": alpha},
    )


def xpa_log_norm(
    g: Symbol,
    p: float,
    grid: Optional[GridSpec] = None,
    method: str = "both",
    budget: Optional[int] = NESTED_BUDGET,
    executor: Optional[Executor] = None,
    detect_divergence: bool = False,
) -> NormResult:
    """‖g‖^p in X^p_{0,log^{p/4}}, 2 < p <= 4."""
    require(2.0 < p <= 4.0, "p", f"X^p_0,log needs 2 < p <= 4, got {p}")
    return _xp_functional(
        g, p, Functional.XPA_LOG, _xpa_log_outer(p), 0.0, p - 2.0,
        grid, method, budget, executor, detect_divergence, {"alpha": 0.0, "gamma": p / 4.0},
    )


def xpa_shifted_norm(
    g: Symbol,
    p: float,
    alpha: float,
    eps: float,
    grid: Optional[GridSpec] = None,
    method: str = "series",
    budget: Optional[int] = NESTED_BUDGET,
    executor: Optional[Executor] = None,
) -> NormResult:
    """‖g‖^p in X^p_{α-ε}, the sufficient condition used when p(1-α) >= 4."""
    require(0.0 < eps < alpha, "eps", f"need 0 < eps < alpha, got eps={eps}, alpha={alpha}")
    shifted = alpha - eps
    require(p > 1.0, "p", f"X^p_alpha needs p > 1, got {p}")
    return _xp_functional(
        g, p, Functional.XPA_SHIFTED, _xpa_outer(p, shifted), shifted, p - 2.0,
        grid, method, budget, executor, False, {"alpha": alpha, "eps": eps},
    )


# -------------------- X^p_α(μ) --------------------


def ict_oracle(c: float, t: float, z: complex) -> float:
    """I_{c,t}(z) = ∫(1-|w|²)^t / |1-w̄z|^{2+t+c} dA(w) = ₂F₁(λ, λ; t+2; |z|²)/(t+1), λ = (2+t+c)/2."""
    require(t > -1.0, "t", f"must be > -1, got {t}")
    x = abs(complex(z))
    require(x < 1.0, "z", f"must lie in the open unit disk, got {z}")
    lam = 0.5 * (2.0 + t + c)
    return float(special.hyp2f1(lam, lam, t + 2.0, x * x)) / (t + 1.0)


def _atom_sum(points: np.ndarray, masses: np.ndarray, alpha: float) -> Callable[[np.ndarray], np.ndarray]:
    power = 2.0 + 2.0 * alpha
    block = 256

    def s(w: np.ndarray) -> np.ndarray:
        out = np.zeros(w.shape)
        wc = np.conj(w)[:, None]
        for i in range(0, points.size, block):
            z = points[None, i : i + block]
            out += np.sum(masses[i : i + block] / np.abs(1.0 - wc * z) ** power, axis=1)
        return out

    return s


def xpa_measure(
    mu: MeasureRep,
    p: float,
    alpha: float,
    grid: Optional[GridSpec] = None,
    executor: Optional[Executor] = None,
) -> NormResult:
    """X^p_α(μ) = ∫((1-|w|²)^α Σ_i m_i / |1-w̄z_i|^{2+2α})^{p/2} (1-|w|²)^{p-2} dA(w).

    Densities are first discretized to atoms on the quadrature grid; a single
    atom has the closed form m^{p/2} I_{c,t}(a) with c = αp/2, t = αp/2 + p - 2.
    """
    require(p > 0.0, "p", f"must be positive, got {p}")
    require(alpha >= 0.0, "alpha", f"must be >= 0, got {alpha}")
    spec = grid or GridSpec()
    params = {"p": p, "alpha": alpha, "measure": mu.label, "grid": spec.to_dict()}
    exponent = 0.5 * alpha * p + p - 2.0
    points, masses = mu.to_atoms(spec)
    keep = masses > 0.0
    points, masses = points[keep], masses[keep]
    if points.size == 0:
        return NormResult(0.0, Functional.XPA_MEASURE, spec.r_max, oracle=0.0, params=params)
    if exponent <= -1.0:
        raise ParameterError("p", f"outer weight (1-|w|²)^{exponent:g} is not integrable")
    oracle = None
    if points.size == 1:
        oracle = masses[0] ** (0.5 * p) * ict_oracle(0.5 * alpha * p, exponent, points[0])
    order = np.argsort(-np.abs(points))[:_MAX_FOCUS_ATOMS]
    focused = spec.with_focus(*points[order])
    inner = _atom_sum(points, masses, alpha)

    def fn(w: np.ndarray) -> np.ndarray:
        s = 1.0 - np.abs(w) ** 2
        return (s**alpha * inner(w)) ** (0.5 * p) * s ** (p - 2.0)

    q = integrate_disk(fn, focused, executor)
    clip = clip_remainder(ring_mean(fn, spec.r_max, focused), spec.r_max, exponent) if spec.clipped else 0.0
    return NormResult(
        value=max(q.value, 0.0),
        functional=Functional.XPA_MEASURE,
        r_max=spec.r_max,
        error=q.error,
        oracle=oracle,
        clip_remainder=clip,
        params=params,
    )


# -------------------- integral estimates --------------------


@dataclass(frozen=True)
class IctReport:
    """I_{c,t}(z) on a sweep of real z, divided by its asserted growth."""

    c: float
    t: float
    radii: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    errors: np.ndarray = field(repr=False)
    oracle: np.ndarray = field(repr=False)
    ratios: np.ndarray = field(repr=False)

    @property
    def window(self) -> Tuple[float, float]:
        return float(self.ratios.min()), float(self.ratios.max())

    @property
    def max_oracle_deviation(self) -> float:
        return float(np.max(np.abs(self.values - self.oracle) / self.oracle))

    def to_dict(self) -> Dict[str, Any]:
        lo, hi = self.window
        return {
            "c": self.c,
            "t": self.t,
            "r": self.radii.tolist(),
            "value": self.values.tolist(),
            "err": self.errors.tolist(),
            "oracle": self.oracle.tolist(),
            "ratio": self.ratios.tolist(),
            "window": [lo, hi],
            "max_oracle_deviation": self.max_oracle_deviation,
        }


ICT_RADII = (0.0, 0.25, 0.5, 0.75, 0.9, 0.95, 0.98, 0.99)


def _ict_comparison(c: float, r: float) -> float:
    s = 1.0 - r * r
    # the c = 0 comparison is log(e/(1-|z|²)) so it stays positive at z = 0
    return s**-c if c > 0.0 else math.log(math.e / s)


def validate_ict(
    c: float,
    t: float,
    radii: Sequence[float] = ICT_RADII,
    grid: Optional[GridSpec] = None,
    executor: Optional[Executor] = None,
) -> IctReport:
    """Quadrature of I_{c,t}(z) over a real sweep of |z| against its growth function."""
    require(c >= 0.0, "c", f"must be >= 0, got {c}")
    require(t > -1.0, "t", f"must be > -1, got {t}")
    radii = np.asarray(radii, dtype=float)
    require(bool(np.all((radii >= 0.0) & (radii < 1.0))), "radii", "sweep must lie in [0, 1)")
    spec = (grid or GridSpec()).with_clip(1.0)
    power = 2.0 + t + c
    values, errors, oracle, ratios = [], [], [], []
    for r in radii:

        def fn(w: np.ndarray, z: float = float(r)) -> np.ndarray:
            return (1.0 - np.abs(w) ** 2) ** t / np.abs(1.0 - np.conj(w) * z) ** power

        q = integrate_disk(fn, spec.with_focus(r), executor)
        values.append(q.value)
        errors.append(q.error)
        oracle.append(ict_oracle(c, t, r))
        ratios.append(q.value / _ict_comparison(c, r))
    report = IctReport(c, t, radii, np.array(values), np.array(errors), np.array(oracle), np.array(ratios))
    logger.debug("Ict c=%g t=%g window %s", c, t, report.window)
    return report


@dataclass(frozen=True)
class Li2Report:
    s: float
    r: float
    t: float
    points: List[Tuple[complex, complex]]
    lhs: np.ndarray = field(repr=False)
    errors: np.ndarray = field(repr=False)
    rhs: np.ndarray = field(repr=False)

    @property
    def ratios(self) -> np.ndarray:
        return self.lhs / self.rhs

    @property
    def max_ratio(self) -> float:
        return float(self.ratios.max())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s": self.s,
            "r": self.r,
            "t": self.t,
            "points": [[[a.real, a.imag], [z.real, z.imag]] for a, z in self.points],
            "lhs": self.lhs.tolist(),
            "err": self.errors.tolist(),
            "rhs": self.rhs.tolist(),
            "ratio": self.ratios.tolist(),
            "max_ratio": self.max_ratio,
        }


def li2_points(count: int = 12, top: float = 0.95) -> List[Tuple[complex, complex]]:
    """Diagonal sweep a = z in [0, top] plus a few off-diagonal pairs."""
    diag = [(complex(x), complex(x)) for x in np.linspace(0.0, top, count)]
    off = [(0.5 + 0j, 0.9 + 0j), (0.9 + 0j, 0.5 + 0j), (0.9j, 0.9 + 0j), (-0.8 + 0j, 0.8 + 0j)]
    return diag + off


def validate_li2(
    s: float,
    r: float,
    t: float,
    points: Optional[Sequence[Tuple[complex, complex]]] = None,
    grid: Optional[GridSpec] = None,
    executor: Optional[Executor] = None,
) -> Li2Report:
    """∫(1-|w|²)^s / (|1-w̄z|^r |1-w̄a|^t) dA(w) against (1-|z|²)^{2+s-r} / |1-āz|^t."""
    require(s > -1.0, "s", f"must be > -1, got {s}")
    require(r > 0.0 and t > 0.0, "r,t", f"must be positive, got r={r}, t={t}")
    require(r + t - s > 2.0, "r,t", f"need r + t - s > 2, got {r + t - s:g}")
    require(t < s + 2.0 < r, "t", f"need t < s + 2 < r, got t={t}, s+2={s + 2.0}, r={r}")
    pairs = [(complex(a), complex(z)) for a, z in (points if points is not None else li2_points())]
    for a, z in pairs:
        require(abs(a) < 1.0 and abs(z) < 1.0, "points", f"({a}, {z}) not in the disk")
    spec = (grid or GridSpec()).with_clip(1.0)
    lhs, errors, rhs = [], [], []
    for a, z in pairs:

        def fn(w: np.ndarray, a: complex = a, z: complex = z) -> np.ndarray:
            wc = np.conj(w)
            return (1.0 - np.abs(w) ** 2) ** s / (np.abs(1.0 - wc * z) ** r * np.abs(1.0 - wc * a) ** t)

        q = integrate_disk(fn, spec.with_focus(a, z), executor)
        lhs.append(q.value)
        errors.append(q.error)
        rhs.append((1.0 - abs(z) ** 2) ** (2.0 + s - r) / abs(1.0 - np.conj(a) * z) ** t)
    return Li2Report(s, r, t, pairs, np.array(lhs), np.array(errors), np.array(rhs))


# -------------------- kernel-power table --------------------


@dataclass(frozen=True)
class GaRow:
    a: float
    bp: NormResult
    xp0: NormResult
    bplog: NormResult
    xplog: Optional[NormResult]

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"a": self.a}
        for name in ("bp", "xp0", "bplog", "xplog"):
            res = getattr(self, name)
            out[name] = None if res is None else res.estimate
            out[f"{name}_err"] = None if res is None else res.error + res.clip_remainder
            out[f"{name}_oracle"] = None if res is None else res.oracle
        return out


def ga_norm_suite(
    gamma: float,
    p: float,
    a_values: Sequence[float],
    grid: Optional[GridSpec] = None,
    method: str = "series",
    executor: Optional[Executor] = None,
) -> List[GaRow]:
    """B_p, X^p_0, B_{p,log^{p/2}} and (for 2 < p <= 4) X^p_{0,log^{p/4}} of (1 - az)^{-γ}."""
    require(gamma > 0.0 and p > 1.0, "gamma,p", f"need gamma > 0 and p > 1, got {gamma}, {p}")
    spec = grid or GridSpec()
    rows: List[GaRow] = []
    for a in a_values:
        require(0.0 <= a < 1.0, "a", f"sweep points must lie in [0, 1), got {a}")
        g = Symbol.kernel_power(a, gamma)
        # the radial-weight functionals reduce to 1-D integrals and take the whole disk
        full = spec.with_clip(1.0)
        bp = bp_norm(g, p, full)
        bplog = bplog_norm(g, p, p / 2.0, full)
        xp0 = xpa_norm(g, p, 0.0, spec, method=method, executor=executor)
        xplog = xpa_log_norm(g, p, spec, method=method, executor=executor) if 2.0 < p <= 4.0 else None
        rows.append(GaRow(float(a), bp, xp0, bplog, xplog))
        logger.debug("g_a row a=%.17g done", a)
    return rows


# -------------------- lacunary symbols --------------------


@dataclass(frozen=True)
class LacunaryCriterion:
    exponents: Tuple[int, ...]
    partial_sums: np.ndarray = field(repr=False)

    @property
    def total(self) -> float:
        return float(self.partial_sums[-1])

    def to_dict(self) -> Dict[str, Any]:
        return {"exponents": list(self.exponents), "partial_sums": self.partial_sums.tolist(),
                "total": self.total}


def lacunary_trace_criterion(g: Symbol) -> LacunaryCriterion:
    """Partial sums of Σ n_k |a_k|, the trace-class statistic of M_{g''} on D."""
    require(g.kind is SymbolKind.LACUNARY, "g", f"expected a lacunary symbol, got {g.kind.value}")
    n = np.asarray(g.lacunary_exponents, dtype=float)
    a = np.abs(np.asarray(g.lacunary_coeffs, dtype=float))
    return LacunaryCriterion(g.lacunary_exponents, np.cumsum(n * a))
