"""Singular values, Schatten norms and kernel integral functionals.

A :class:`Spectrum` stores the singular values of a truncated operator in
nonincreasing order, together with truncation certificates per Schatten
exponent. Schatten sums are exactly rounded (``math.fsum``) over the sorted
values, so sums with p < 1 do not lose the small values.

Example:
    >>> s = singular_values(np.diag([3.0, 4.0]))
    >>> s.values.tolist(), s.schatten_sum(1.0), s.schatten_sum(2.0)
    ([4.0, 3.0], 7.0, 25.0)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import fft as sfft
from scipy import linalg, sparse

from ..core.errors import NumericalError, ParameterError, require
from .operators import (
    OperatorMatrix,
    OperatorSpec,
    TruncationReport,
    operator_from_spec,
    power_tail_sum,
    truncation_report,
)
from .quadrature import GridSpec, integrate_radial
from .spaces import (
    InnerProductMode,
    KernelEval,
    KernelKind,
    SpaceKind,
    SpaceParams,
    kernel_norm,
    log_monomial_norms_sq,
    monomial_norms,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SchattenOrder:
    """A Schatten exponent; p >= 1 gives a norm, 0 < p < 1 a quasi-norm."""

    p: float

    def __post_init__(self) -> None:
        if not (isinstance(self.p, (int, float)) and math.isfinite(self.p) and self.p > 0):
            raise ParameterError("p", f"Schatten exponent must be positive, got {self.p}")
        object.__setattr__(self, "p", float(self.p))

    @property
    def banach(self) -> bool:
        return self.p >= 1.0


def _order(p: Union[float, SchattenOrder]) -> SchattenOrder:
    return p if isinstance(p, SchattenOrder) else SchattenOrder(p)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Nonincreasing singular values with per-p truncation certificates."""

    values: np.ndarray = field(repr=False)
    source: Optional[OperatorSpec] = None
    tails: Dict[float, TruncationReport] = field(default_factory=dict, repr=False)
    tail_fn: Optional[Callable[[float], TruncationReport]] = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        require(bool(np.all(vals >= 0.0)), "values", "singular values are nonnegative")
        require(bool(np.all(np.diff(vals) <= 0.0)), "values", "singular values must be sorted")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def top(self) -> float:
        return float(self.values[0]) if self.values.size else 0.0

    def schatten_sum(self, p: Union[float, SchattenOrder]) -> float:
        p = _order(p).p
        return math.fsum(self.values**p)

    def schatten_sums(self, orders: Iterable[float]) -> Dict[float, float]:
        return {float(p): self.schatten_sum(p) for p in orders}

    def partial_sums(self, p: float) -> np.ndarray:
        """Running Σ_{i<=n} λ_i^p over the sorted values."""
        return np.cumsum(self.values ** _order(p).p)

    def tail(self, p: Union[float, SchattenOrder]) -> TruncationReport:
        p = _order(p).p
        if p in self.tails:
            return self.tails[p]
        if self.tail_fn is not None:
            return self.tail_fn(p)
        return TruncationReport(p, 0.0, True, "none")

    @property
    def tail_certificate(self) -> float:
        return max((t.bound for t in self.tails.values()), default=0.0)


# -------------------- SVD --------------------


def _permutation_values(entries: Union[np.ndarray, sparse.spmatrix]) -> Optional[np.ndarray]:
    """Moduli of the nonzeros when each row and column has at most one of them."""
    if sparse.issparse(entries):
        coo = sparse.coo_matrix(entries)
        keep = coo.data != 0
        rows, cols, data = coo.row[keep], coo.col[keep], coo.data[keep]
    else:
        rows, cols = np.nonzero(entries)
        data = entries[rows, cols]
    if np.unique(rows).size != rows.size or np.unique(cols).size != cols.size:
        return None
    return np.abs(data)


def singular_values(m: Union[OperatorMatrix, np.ndarray], orders: Sequence[float] = ()) -> Spectrum:
    """Singular values of a truncated matrix, sorted, zeros dropped.

    Raises:
        NumericalError: on non-finite entries or when both LAPACK drivers fail.
    """
    entries = m.entries if isinstance(m, OperatorMatrix) else m
    data = entries.data if sparse.issparse(entries) else np.asarray(entries)
    if not np.all(np.isfinite(data)):
        raise NumericalError("matrix has non-finite entries")
    values = _permutation_values(entries if sparse.issparse(entries) else np.asarray(entries))
    if values is None:
        dense = entries.toarray() if sparse.issparse(entries) else np.asarray(entries)
        try:
            values = linalg.svd(dense, compute_uv=False, check_finite=False, lapack_driver="gesdd")
        except linalg.LinAlgError:
            logger.warning("gesdd failed on a %s matrix, retrying with gesvd", dense.shape)
            try:
                values = linalg.svd(dense, compute_uv=False, check_finite=False,
                                    lapack_driver="gesvd")
            except linalg.LinAlgError as exc:
                raise NumericalError(f"SVD did not converge: {exc}") from exc
    values = np.sort(np.asarray(values, dtype=float))[::-1]
    values = values[values > 0.0]
    if not isinstance(m, OperatorMatrix):
        return Spectrum(values)
    tails = {float(p): truncation_report(m, float(p)) for p in orders}
    return Spectrum(values, source=m.spec, tails=tails,
                    tail_fn=lambda p: truncation_report(m, p), label=m.spec.label)


@dataclass(frozen=True)
class SchattenNorm:
    p: float
    value: float
    lower: float
    upper: float
    partial_sum: float
    tail: float
    heuristic: bool = False


def schatten_norm(s: Spectrum, p: Union[float, SchattenOrder]) -> SchattenNorm:
    """(Σ λ_n^p)^{1/p} enclosed in [value, (Σ + tail)^{1/p}]."""
    order = _order(p)
    total = s.schatten_sum(order)
    report = s.tail(order.p)
    value = total ** (1.0 / order.p)
    upper = (total + report.bound) ** (1.0 / order.p)
    return SchattenNorm(order.p, value, value, upper, total, report.bound, report.heuristic)


# -------------------- Closed forms --------------------


def _closed_spectrum(log_lambda: Callable[[np.ndarray], np.ndarray], start: int, N: int,
                     label: str) -> Spectrum:
    n = np.arange(start, N + 1)
    values = np.sort(np.exp(log_lambda(n)))[::-1]

    def tail(p: float) -> TruncationReport:
        term = lambda k: np.exp(p * log_lambda(k))  # noqa: E731
        total, rem = power_tail_sum(term, N + 1, max(1 << 20, 4 * N))
        return TruncationReport(p, total, False, "closed form", rem)

    return Spectrum(values, tail_fn=tail, label=label)


def monomial_spectrum_closed_form(j: int, alpha: float, N: int) -> Spectrum:
    """λ_n = j (n+1)^{(1-α)/2} / (n (n-j+1)^{(1-α)/2}) for n = j..N (T_{z^j} on D_α)."""
    require(int(j) == j and j >= 1, "j", f"must be a positive integer, got {j}")
    require(alpha >= 0.0, "alpha", f"must be >= 0, got {alpha}")
    require(N >= j, "N", f"must be >= j={j}, got {N}")
    h = 0.5 * (1.0 - alpha)

    def log_lambda(n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        return math.log(j) + h * (np.log1p(n) - np.log(n - j + 1.0)) - np.log(n)

    return _closed_spectrum(log_lambda, int(j), int(N), f"T_z^{j} on D_{alpha:g}")


def multiplication_monomial_spectrum(j: int, N: int) -> Spectrum:
    """Singular numbers 1/(c_n √(n-j+1)) of M_{z^j}: D -> A²_2, c_n² = (n+1)(n+2)(n+3)/6."""
    require(int(j) == j and j >= 1, "j", f"must be a positive integer, got {j}")
    require(N >= j, "N", f"must be >= j={j}, got {N}")

    def log_lambda(n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        log_c2 = np.log1p(n) + np.log(n + 2.0) + np.log(n + 3.0) - math.log(6.0)
        return -0.5 * (log_c2 + np.log(n - j + 1.0))

    return _closed_spectrum(log_lambda, int(j), int(N), f"M_z^{j}: D -> A2_2")


# -------------------- Kernel integral functionals --------------------


class ProbeKind(str, Enum):
    BERGMAN_NORMALIZED = "bergman_normalized"
    J_NORMALIZED = "j_normalized"


@dataclass(frozen=True)
class BerezinValue:
    value: float
    error: float
    clip_remainder: float
    r_max: float
    p: float
    probe: ProbeKind


def _probe_profile(space: SpaceParams, N: int, probe: ProbeKind) -> Tuple[np.ndarray, np.ndarray]:
    """c_n(z) = a_n conj(z)^{e_n}: coefficients of the unnormalized probe in the domain basis."""
    n = np.arange(N + 1)
    norms = monomial_norms(space, N)
    if probe is ProbeKind.BERGMAN_NORMALIZED:
        return 1.0 / norms, n
    a = n / norms
    return a, np.maximum(n - 1, 0)


def _probe_norm(space: SpaceParams, probe: ProbeKind) -> Callable[[np.ndarray], np.ndarray]:
    s_exp = -(2.0 + space.alpha) / 2.0
    if probe is ProbeKind.BERGMAN_NORMALIZED or space.inner_product_mode is InnerProductMode.INTEGRAL:
        return lambda r: (1.0 - r * r) ** s_exp
    kernel = KernelEval(KernelKind.DERIVATIVE_J, space.alpha, space.inner_product_mode)
    return lambda r: np.array([kernel_norm(kernel, float(x)) for x in np.atleast_1d(r)])


def _gram_diagonals(m: OperatorMatrix) -> Dict[int, np.ndarray]:
    """Nonzero subdiagonals G[k+d, k], d >= 0, of G = M^H M."""
    if m.is_sparse:
        G = (m.entries.conj().T @ m.entries).tocsr()
        coo = G.tocoo()
        offsets = np.unique(coo.row - coo.col)
        return {int(d): np.asarray(G.diagonal(-int(d))) for d in offsets if d >= 0}
    M = m.dense()
    G = M.conj().T @ M
    out = {}
    for d in range(G.shape[0]):
        diag = np.diagonal(G, -d).copy()
        if np.any(diag != 0):
            out[d] = diag
    return out


def _ring_means(m: OperatorMatrix, probe: ProbeKind, p: float) -> Callable[[np.ndarray], np.ndarray]:
    """r -> mean over the circle |z| = r of ‖M c(z)‖^p for the unnormalized probe c."""
    N = m.spec.N
    a, e = _probe_profile(m.spec.domain, N, probe)
    diags = _gram_diagonals(m)
    terms = []
    for d, g in diags.items():
        k = np.arange(g.size)
        w = a[k + d] * a[k] * g
        keep = w != 0
        if np.any(keep):
            terms.append((d, w[keep], (e[k + d] + e[k])[keep].astype(float)))
    top = max((d for d, _, _ in terms), default=0)
    n_angles = max(64, 4 * (1 << int(math.ceil(math.log2(top + 1)))) if top else 64)

    def means(r: np.ndarray) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if not terms:
            return np.zeros(r.size)
        log_r = np.log(r)
        h = np.zeros((r.size, top + 1), dtype=complex)
        for d, w, E in terms:
            h[:, d] = np.exp(np.outer(log_r, E)) @ w
        if p == 2.0:
            return np.maximum(h[:, 0].real, 0.0)
        arr = np.zeros((r.size, n_angles), dtype=complex)
        arr[:, : top + 1] += h
        if top:
            arr[:, n_angles - top :] += np.conj(h[:, top:0:-1])
        arr[:, 0] = h[:, 0].real
        values = np.maximum((sfft.ifft(arr, axis=1) * n_angles).real, 0.0)
        return np.mean(values ** (p / 2.0), axis=1)

    return means


def berezin_functional(
    op: Union[OperatorMatrix, OperatorSpec],
    p: float,
    probe: ProbeKind = ProbeKind.J_NORMALIZED,
    grid: Optional[GridSpec] = None,
) -> BerezinValue:
    """∫ ‖T k_z‖^p dλ(z) with k_z the normalized probe and dλ = dA/(1-|z|²)².

    J probes act on D_α, Bergman probes on A²_α. The probe is truncated to the
    matrix dimension, so the value is the functional of the truncated operator.
    """
    order = _order(p)
    probe = ProbeKind(probe)
    m = op if isinstance(op, OperatorMatrix) else operator_from_spec(op, grid)
    space = m.spec.domain
    if probe is ProbeKind.J_NORMALIZED:
        require(space.kind is SpaceKind.DIRICHLET, "probe", "J probes need a Dirichlet domain")
    else:
        require(space.kind is SpaceKind.BERGMAN, "probe", "Bergman probes need a Bergman domain")
    grid = grid or GridSpec()
    require(grid.clipped, "grid", "the functional is evaluated on a clipped disk (r_max < 1)")
    if m.is_zero:
        return BerezinValue(0.0, 0.0, 0.0, grid.r_max, order.p, probe)
    means = _ring_means(m, probe, order.p)
    norm = _probe_norm(space, probe)

    def integrand(r: np.ndarray) -> np.ndarray:
        return means(r) / (norm(r) ** order.p * (1.0 - r * r) ** 2)

    result = integrate_radial(integrand, grid)
    q = order.p * (2.0 + space.alpha) / 2.0 - 2.0
    s_max = grid.r_max**2
    edge = float(integrand(np.array([grid.r_max]))[0])
    clip = edge * (1.0 - s_max) / (q + 1.0) if q > -1.0 else math.inf
    logger.debug("berezin %s p=%g: %.12g ± %.3g (+clip %.3g)", probe.value, order.p,
                 result.value, result.error, clip)
    return BerezinValue(result.value, result.error, clip, grid.r_max, order.p, probe)


def berezin_p2_exact(m: OperatorMatrix) -> Optional[float]:
    """Exact p = 2 value for the truncated matrix where the probe integrals are explicit.

    Bergman probes give ‖M‖_F²/(1+α); J probes in Integral mode give
    (‖M‖_F² - ‖M e_0‖²)/(1+α). Returns None in Coefficient mode.
    """
    space = m.spec.domain
    fro = m.frobenius_sq()
    if space.kind is SpaceKind.BERGMAN:
        return fro / (1.0 + space.alpha)
    if space.inner_product_mode is not InnerProductMode.INTEGRAL:
        return None
    col0 = m.dense()[:, 0]
    return (fro - float(np.sum(np.abs(col0) ** 2))) / (1.0 + space.alpha)


@dataclass(frozen=True)
class SandwichCheck:
    p: float
    probe: ProbeKind
    functional: BerezinValue
    schatten_pp: float
    operator_norm: float
    inequality: str
    lhs: float
    rhs: float
    tolerance: float
    holds: bool

    def to_dict(self) -> Dict[str, object]:
        return {
            "p": self.p, "probe": self.probe.value, "functional": self.functional.value,
            "schatten_pp": self.schatten_pp, "operator_norm": self.operator_norm,
            "inequality": self.inequality, "lhs": self.lhs, "rhs": self.rhs,
            "tolerance": self.tolerance, "holds": self.holds,
        }


def berezin_sandwich(m: OperatorMatrix, p: float, grid: Optional[GridSpec] = None) -> SandwichCheck:
    """Evaluate the two-sided kernel-functional bounds for the matrix's probe type.

    For p >= 2: ∫‖T k_z‖^p dλ <= ‖T‖_p^p / (1+α).
    For p <= 2: ‖T‖_p^p <= [‖T‖^p] + (1+α) ∫‖T k_z‖^p dλ, the operator-norm term
    appearing for J probes only. At p = 2 both directions are checked.
    """
    order = _order(p)
    probe = ProbeKind.BERGMAN_NORMALIZED if m.spec.domain.kind is SpaceKind.BERGMAN \
        else ProbeKind.J_NORMALIZED
    value = berezin_functional(m, order.p, probe, grid)
    spectrum = singular_values(m)
    spp = spectrum.schatten_sum(order.p)
    opn = spectrum.top
    a1 = 1.0 + m.spec.domain.alpha
    tol = value.error + value.clip_remainder + 1e-9 * max(spp, 1.0)
    checks = []
    if order.p >= 2.0:
        checks.append(("upper", value.value, spp / a1, a1 * tol))
    if order.p <= 2.0:
        extra = opn**order.p if probe is ProbeKind.J_NORMALIZED else 0.0
        checks.append(("lower", spp, extra + a1 * (value.value + value.clip_remainder), a1 * tol))
    name = "+".join(c[0] for c in checks)
    holds = all(lhs <= rhs + t for _, lhs, rhs, t in checks)
    lhs, rhs, t = checks[-1][1], checks[-1][2], checks[-1][3]
    if not holds:
        logger.warning("kernel functional bound %s fails for %s at p=%g", name, m.spec.label, order.p)
    return SandwichCheck(order.p, probe, value, spp, opn, name, lhs, rhs, t, holds)


# -------------------- Frame lower bound --------------------


@dataclass(frozen=True)
class FrameReport:
    alpha: float
    p: float
    radii: np.ndarray = field(repr=False)
    ratios: Dict[int, np.ndarray] = field(repr=False)
    min_ratio: float
    nondecreasing: bool
    truncation_limited: np.ndarray = field(repr=False)

    def to_dict(self) -> Dict[str, object]:
        top = max(self.ratios)
        return {
            "alpha": self.alpha, "p": self.p, "min_ratio": self.min_ratio,
            "nondecreasing": self.nondecreasing,
            "radii": self.radii.tolist(), "ratios": self.ratios[top].tolist(),
            "truncation_limited": self.radii[self.truncation_limited].tolist(),
        }


def frame_partial_sums(alpha: float, p: float, N: int, radii: np.ndarray,
                       mode: InnerProductMode = InnerProductMode.COEFFICIENT) -> np.ndarray:
    """Σ_{n<=N} |e_n(z)|^p |e_n'(z)|^{2-p} (1-|z|²)^{2+α-p} for 0 < p < 2.

    The sum only depends on |z|; the n = 0 term vanishes and so does the whole
    sum at z = 0, where every term has a zero factor.
    """
    space = SpaceParams.dirichlet(alpha, mode)
    s = np.atleast_1d(np.asarray(radii, dtype=float))
    n = np.arange(1, N + 1, dtype=float)
    log_nu2 = log_monomial_norms_sq(space, n)
    out = np.zeros(s.size)
    pos = s > 0
    if np.any(pos):
        log_s = np.log(s[pos])[:, None]
        log_terms = (p * n * log_s + (2.0 - p) * (np.log(n) + (n - 1.0) * log_s)) - log_nu2
        out[pos] = np.sum(np.exp(log_terms), axis=1)
    return out * (1.0 - s * s) ** (2.0 + alpha - p)


def frame_lower_bound_check(alpha: float, p: float, N: int, radii: Optional[np.ndarray] = None,
                            mode: InnerProductMode = InnerProductMode.COEFFICIENT,
                            rel_change: float = 1e-3) -> FrameReport:
    """Partial-sum ratios of the frame lower bound on a radial grid.

    Radii where doubling N still changes the ratio by more than ``rel_change``
    are truncation limited and excluded from ``min_ratio``.
    """
    require(alpha >= 0.0, "alpha", f"must be >= 0, got {alpha}")
    require(1.0 <= p < 2.0, "p", f"must lie in [1, 2), got {p}")
    require(int(N) == N and N >= 4, "N", f"must be an integer >= 4, got {N}")
    radii = np.linspace(0.05, 0.9, 18) if radii is None else np.asarray(radii, dtype=float)
    levels = (int(N) // 4, int(N) // 2, int(N))
    ratios = {k: frame_partial_sums(alpha, p, k, radii, mode) for k in levels}
    nondecreasing = bool(all(np.all(ratios[b] >= ratios[a] * (1 - 1e-12))
                             for a, b in zip(levels, levels[1:])))
    last, prev = ratios[levels[2]], ratios[levels[1]]
    with np.errstate(divide="ignore", invalid="ignore"):
        change = np.where(last > 0, (last - prev) / last, 0.0)
    limited = change > rel_change
    settled = last[~limited]
    min_ratio = float(np.min(settled)) if settled.size else math.nan
    if np.any(limited):
        logger.info("frame check: %d radii truncation limited at N=%d", int(np.sum(limited)), N)
    return FrameReport(alpha, p, radii, ratios, min_ratio, nondecreasing, limited)
