"""Truncated matrices of integration, multiplication and Toeplitz operators.

Rows index the codomain orthonormal basis τ_n, columns the domain basis σ_k,
both for degrees 0..N. All integration and multiplication operators here are
lower triangular: the image of σ_k only involves degrees >= k. Their nonzero
entries lie on diagonals k + d for the nonzero symbol coefficients, so each one
is described by a :class:`BandModel` that can also evaluate the entries the
truncation drops. That is where the truncation certificates come from.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import sparse

from ..core.errors import NumericalError, ParameterError, require
from .hyperbolic import MeasureRep
from .quadrature import GridSpec
from .spaces import (
    InnerProductMode,
    SpaceKind,
    SpaceParams,
    Symbol,
    diagonal_kernel_tail,
    log_monomial_norms_sq,
    orthonormal_basis,
    symbol_coeffs,
)

logger = logging.getLogger(__name__)

BANDED_MAX_COEFFS = 32

Entries = Union[np.ndarray, sparse.csr_matrix]


class OperatorKind(str, Enum):
    INTEGRATION_TG = "integration_tg"
    MULTIPLICATION_GPRIME = "multiplication_gprime"
    MULTIPLICATION_GSECOND = "multiplication_gsecond"
    MULTIPLICATION_MONOMIAL = "multiplication_monomial"
    TOEPLITZ_QMU = "toeplitz_qmu"
    MULTIPLICATION_BERGMAN = "multiplication_bergman"


@dataclass(frozen=True)
class OperatorSpec:
    """What an assembled matrix represents."""

    kind: OperatorKind
    symbol: Union[Symbol, MeasureRep]
    domain: SpaceParams
    codomain: SpaceParams
    N: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", OperatorKind(self.kind))
        require(int(self.N) == self.N and self.N >= 1, "N",
                f"truncation must be an integer >= 1, got {self.N}")
        d, c = self.domain, self.codomain
        kind = self.kind
        if kind is OperatorKind.MULTIPLICATION_BERGMAN:
            require(d.kind is SpaceKind.BERGMAN and c.kind is SpaceKind.BERGMAN, "domain",
                    "Bergman multiplication acts between weighted Bergman spaces")
            require(c.alpha > d.alpha, "gamma",
                    f"codomain weight must exceed the domain weight ({c.alpha} <= {d.alpha})")
            return
        require(d.kind is SpaceKind.DIRICHLET, "domain", f"{kind.value} acts on a Dirichlet space")
        if kind in (OperatorKind.INTEGRATION_TG, OperatorKind.TOEPLITZ_QMU):
            require(c == d, "codomain", f"{kind.value} maps D_α to itself")
            if kind is OperatorKind.TOEPLITZ_QMU:
                require(d.alpha > 0.0, "alpha", "Q_μ is only defined for α > 0")
                require(isinstance(self.symbol, MeasureRep), "symbol", "Q_μ needs a measure")
            return
        require(isinstance(self.symbol, Symbol), "symbol", f"{kind.value} needs an analytic symbol")
        expected = {
            OperatorKind.MULTIPLICATION_GPRIME: d.alpha,
            OperatorKind.MULTIPLICATION_GSECOND: 2.0 + d.alpha,
            OperatorKind.MULTIPLICATION_MONOMIAL: 2.0,
        }[kind]
        require(c.kind is SpaceKind.BERGMAN and c.alpha == expected, "codomain",
                f"{kind.value} maps into A2_{expected:g}, got {c.label}")
        if kind is OperatorKind.MULTIPLICATION_MONOMIAL:
            require(d.alpha == 0.0, "domain", "M_{z^j} is assembled on the Dirichlet space D")

    @property
    def label(self) -> str:
        symbol = self.symbol.label
        return f"{self.kind.value}({symbol}): {self.domain.label} -> {self.codomain.label}, N={self.N}"


# -------------------- Band model --------------------


@dataclass(frozen=True, eq=False)
class BandModel:
    """entry(k + d, k) = c_d · (μ_{k+d} / ν_k) · (1/(k+d) if integrating).

    ``offsets``/``coeffs`` list the nonzero diagonals. ``complete`` is False when
    the symbol has infinitely many coefficients and only those up to N are known.
    """

    offsets: np.ndarray = field(repr=False)
    coeffs: np.ndarray = field(repr=False)
    domain: SpaceParams
    codomain: SpaceParams
    integrating: bool = False
    complete: bool = True

    @property
    def support(self) -> int:
        return int(self.offsets.size)

    def weights(self, k: np.ndarray, d: int) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        n = k + d
        log_w = 0.5 * (log_monomial_norms_sq(self.codomain, n) - log_monomial_norms_sq(self.domain, k))
        if self.integrating:
            log_w = log_w - np.log(n)
        return np.exp(log_w)

    def row_norms_sq(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64)
        out = np.zeros(rows.size)
        for d, c in zip(self.offsets, self.coeffs):
            k = rows - d
            ok = k >= 0
            if np.any(ok):
                out[ok] += abs(c) ** 2 * self.weights(k[ok], int(d)) ** 2
        return out


@dataclass(frozen=True)
class TruncationReport:
    p: float
    bound: float
    heuristic: bool
    method: str
    extrapolated: float = 0.0


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A truncated operator matrix plus what is known about the rest."""

    entries: Entries = field(repr=False)
    spec: OperatorSpec
    bandwidth: Optional[int]
    tail_certificate: float
    certificate_heuristic: bool = False
    flags: Tuple[str, ...] = ()
    quadrature_error: float = 0.0
    band: Optional[BandModel] = field(default=None, repr=False)
    trace_total: Optional[float] = None
    trace_tail: Optional[float] = None

    def __post_init__(self) -> None:
        data = self.entries.data if sparse.issparse(self.entries) else self.entries
        if not np.all(np.isfinite(data)):
            raise NumericalError("assembled matrix has non-finite entries", spec=self.spec.label)
        require(self.tail_certificate >= 0.0, "tail_certificate", "must be nonnegative")

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    @property
    def is_sparse(self) -> bool:
        return sparse.issparse(self.entries)

    @property
    def is_zero(self) -> bool:
        return self.nnz == 0

    @property
    def nnz(self) -> int:
        if self.is_sparse:
            return int(np.count_nonzero(self.entries.data))
        return int(np.count_nonzero(self.entries))

    def dense(self) -> np.ndarray:
        if self.is_sparse:
            return self.entries.toarray()
        return np.asarray(self.entries)

    def frobenius_sq(self) -> float:
        data = self.entries.data if self.is_sparse else self.entries
        return float(np.sum(np.abs(data) ** 2))

    def column_images(self, vectors: np.ndarray) -> np.ndarray:
        """M @ v for each column of ``vectors``."""
        return self.entries @ vectors

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        a, b = self.spec, other.spec
        require(a.kind == b.kind and a.domain == b.domain and a.codomain == b.codomain
                and a.N == b.N, "other", "matrices of different operators cannot be added")
        require(isinstance(a.symbol, Symbol) and isinstance(b.symbol, Symbol), "symbol",
                "only symbol-driven operators can be added")
        size = max(_coefficient_extent(a.symbol, a.N), _coefficient_extent(b.symbol, b.N))
        ca = symbol_coeffs(a.symbol, size).coeffs
        cb = symbol_coeffs(b.symbol, size).coeffs
        finite = a.symbol.degree is not None and b.symbol.degree is not None
        symbol = Symbol.taylor(ca + cb, truncation=None if finite else size)
        entries = self.entries + other.entries
        if not sparse.issparse(entries):
            entries = np.asarray(entries)
        else:
            entries = entries.tocsr()
        # ‖x + y‖² <= (‖x‖ + ‖y‖)² on the dropped part
        tail = (math.sqrt(self.tail_certificate) + math.sqrt(other.tail_certificate)) ** 2
        return OperatorMatrix(
            entries=entries,
            spec=replace(a, symbol=symbol),
            bandwidth=_max_opt(self.bandwidth, other.bandwidth),
            tail_certificate=tail,
            certificate_heuristic=self.certificate_heuristic or other.certificate_heuristic,
            flags=tuple(dict.fromkeys(self.flags + other.flags)),
        )


def _max_opt(x: Optional[int], y: Optional[int]) -> Optional[int]:
    if x is None or y is None:
        return None
    return max(x, y)


def _coefficient_extent(g: Symbol, N: int) -> int:
    degree = g.degree
    return N if degree is None else max(N, degree)


# -------------------- Tail sums --------------------


def power_tail_sum(term: Callable[[np.ndarray], np.ndarray], start: int, cutoff: int,
                   chunk: int = 1 << 16) -> Tuple[float, float]:
    """Σ_{n>=start} term(n): explicit up to ``cutoff``, then an integral-comparison remainder.

    The remainder assumes term(n) ~ C n^{-s} past the cutoff, with s read off
    term(cutoff/2) / term(cutoff). Returns (total, remainder).
    """
    if cutoff < start:
        cutoff = start
    total = 0.0
    for lo in range(start, cutoff + 1, chunk):
        n = np.arange(lo, min(lo + chunk, cutoff + 1))
        total += float(np.sum(term(n)))
    t_end = float(term(np.array([cutoff]))[0])
    if t_end == 0.0:
        return total, 0.0
    t_half = float(term(np.array([max(cutoff // 2, 1)]))[0])
    s = math.log2(t_half / t_end) if t_half > 0 else 0.0
    if s <= 1.0001:
        return math.inf, math.inf
    remainder = t_end * cutoff / (s - 1.0)
    return total + remainder, remainder


def _cutoff(N: int, support: int) -> int:
    return max(1 << 20, 4 * N) if support <= BANDED_MAX_COEFFS else max(1 << 16, 4 * N)


# -------------------- Banded assembly --------------------


def _band_entries(model: BandModel, N: int) -> Tuple[Entries, Optional[int]]:
    k_all = np.arange(N + 1)
    rows, cols, vals = [], [], []
    for d, c in zip(model.offsets, model.coeffs):
        d = int(d)
        if d > N:
            continue
        k = k_all[: N + 1 - d]
        rows.append(k + d)
        cols.append(k)
        vals.append(c * model.weights(k, d))
    shape = (N + 1, N + 1)
    if not vals:
        return sparse.csr_matrix(shape, dtype=complex), 0
    rows_a = np.concatenate(rows)
    cols_a = np.concatenate(cols)
    vals_a = np.concatenate(vals).astype(complex)
    band = int(max(int(d) for d in model.offsets if d <= N))
    if model.support <= BANDED_MAX_COEFFS:
        return sparse.csr_matrix((vals_a, (rows_a, cols_a)), shape=shape), band
    dense = np.zeros(shape, dtype=complex)
    dense[rows_a, cols_a] = vals_a
    return dense, band


def _frobenius_tail(model: BandModel, N: int, entries: Entries) -> Tuple[float, bool]:
    if model.support == 0:
        return 0.0, False
    if model.complete:
        total, _ = power_tail_sum(model.row_norms_sq, N + 1, _cutoff(N, model.support))
        return total, False
    return _extrapolated_row_tail(entries, N, 2.0), True


def _row_norms(entries: Entries) -> np.ndarray:
    if sparse.issparse(entries):
        return np.sqrt(np.asarray(abs(entries).power(2).sum(axis=1)).ravel())
    return np.linalg.norm(entries, axis=1)


def _extrapolated_row_tail(entries: Entries, N: int, p: float) -> float:
    # rows <= N are complete; continue their last-octave power law past N
    t = _row_norms(entries) ** p
    t_end, t_half = float(t[N]), float(t[max(N // 2, 1)])
    if t_end == 0.0:
        return 0.0
    s = math.log2(t_half / t_end) if t_half > 0 else 0.0
    if s <= 1.0001:
        return math.inf
    return t_end * N / (s - 1.0)


def _symbol_band(g: Symbol, N: int, shift: int, domain: SpaceParams, codomain: SpaceParams,
                 integrating: bool) -> BandModel:
    """Diagonals of the operator whose symbol coefficient on offset d is f(d) · b_{d+shift}."""
    degree = g.degree
    complete = degree is not None
    M = max(N + shift, degree) if complete else N + shift
    b = symbol_coeffs(g, M).coeffs
    j = np.arange(b.size)
    if shift == 0:
        scaled = j * b                                  # T_g: offset j carries j b_j
        offsets = j
    elif shift == 1:
        scaled = (j[1:]) * b[1:]                        # (i+1) b_{i+1}
        offsets = j[:-1]
    else:
        scaled = (j[2:]) * (j[2:] - 1) * b[2:]          # (i+2)(i+1) b_{i+2}
        offsets = j[:-2]
    nz = np.nonzero(scaled)[0]
    return BandModel(
        offsets=offsets[nz],
        coeffs=scaled[nz].astype(complex),
        domain=domain,
        codomain=codomain,
        integrating=integrating,
        complete=complete,
    )


def _banded_operator(spec: OperatorSpec, model: BandModel) -> OperatorMatrix:
    entries, band = _band_entries(model, spec.N)
    tail, heuristic = _frobenius_tail(model, spec.N, entries)
    flags: Tuple[str, ...] = ()
    if model.support == 0:
        flags = ("constant symbol",) if spec.kind is OperatorKind.INTEGRATION_TG else ("zero symbol",)
        logger.warning("%s: %s gives the zero operator", spec.kind.value, flags[0])
    if heuristic:
        flags += ("certificate heuristic",)
    m = OperatorMatrix(
        entries=entries,
        spec=spec,
        bandwidth=band,
        tail_certificate=tail,
        certificate_heuristic=heuristic,
        flags=flags,
        band=model,
    )
    logger.debug("assembled %s: nnz=%d tail=%.3g", spec.label, m.nnz, tail)
    return m


def assemble_tg(g: Symbol, alpha: float, N: int,
                mode: InnerProductMode = InnerProductMode.COEFFICIENT) -> OperatorMatrix:
    """Matrix of T_g f = ∫_0^z f g' on D_α.

    Entry (k+j, k) is j b_j/(k+j) · ν_{k+j}/ν_k, strictly lower triangular.
    """
    space = SpaceParams.dirichlet(alpha, mode)
    spec = OperatorSpec(OperatorKind.INTEGRATION_TG, g, space, space, N)
    model = _symbol_band(g, N, 0, space, space, integrating=True)
    keep = model.offsets >= 1
    model = replace(model, offsets=model.offsets[keep], coeffs=model.coeffs[keep])
    return _banded_operator(spec, model)


def assemble_mgprime(g: Symbol, alpha: float, N: int,
                     mode: InnerProductMode = InnerProductMode.COEFFICIENT) -> OperatorMatrix:
    """Matrix of M_{g'}: D_α -> A²_α."""
    domain = SpaceParams.dirichlet(alpha, mode)
    codomain = SpaceParams.bergman(alpha)
    spec = OperatorSpec(OperatorKind.MULTIPLICATION_GPRIME, g, domain, codomain, N)
    return _banded_operator(spec, _symbol_band(g, N, 1, domain, codomain, integrating=False))


def assemble_mgsecond(g: Symbol, alpha: float, N: int,
                      mode: InnerProductMode = InnerProductMode.COEFFICIENT) -> OperatorMatrix:
    """Matrix of M_{g''}: D_α -> A²_{2+α}."""
    domain = SpaceParams.dirichlet(alpha, mode)
    codomain = SpaceParams.bergman(2.0 + alpha)
    spec = OperatorSpec(OperatorKind.MULTIPLICATION_GSECOND, g, domain, codomain, N)
    return _banded_operator(spec, _symbol_band(g, N, 2, domain, codomain, integrating=False))


def assemble_monomial_multiplication(j: int, N: int) -> OperatorMatrix:
    """Matrix of M_{z^j}: D -> A²_2, a single subdiagonal with entries 1/(c_n √(k+1))."""
    domain = SpaceParams.dirichlet(0.0)
    codomain = SpaceParams.bergman(2.0)
    g = Symbol.monomial(j)
    spec = OperatorSpec(OperatorKind.MULTIPLICATION_MONOMIAL, g, domain, codomain, N)
    model = BandModel(np.array([g.j]), np.array([1.0 + 0j]), domain, codomain)
    return _banded_operator(spec, model)


def assemble_bergman_multiplication(h: Symbol, beta: float, gamma: float, N: int) -> OperatorMatrix:
    """Matrix of M_h: A²_β -> A²_γ for γ > β (compact, often Schatten)."""
    domain = SpaceParams.bergman(beta)
    codomain = SpaceParams.bergman(gamma)
    spec = OperatorSpec(OperatorKind.MULTIPLICATION_BERGMAN, h, domain, codomain, N)
    degree = h.degree
    complete = degree is not None
    b = symbol_coeffs(h, max(N, degree) if complete else N).coeffs
    nz = np.nonzero(b)[0]
    model = BandModel(nz, b[nz].astype(complex), domain, codomain, complete=complete)
    return _banded_operator(spec, model)


# -------------------- Toeplitz --------------------


def _toeplitz_entries(space: SpaceParams, N: int, points: np.ndarray, weights: np.ndarray) -> np.ndarray:
    V = orthonormal_basis(space, N).values(points)
    Q = (V.conj().T * weights[None, :]) @ V
    return 0.5 * (Q + Q.conj().T)


def assemble_toeplitz(mu: MeasureRep, alpha: float, N: int, grid: Optional[GridSpec] = None,
                      mode: InnerProductMode = InnerProductMode.COEFFICIENT) -> OperatorMatrix:
    """Matrix of Q_μ on D_α (α > 0), the Gram matrix of the basis in L²(μ)."""
    space = SpaceParams.dirichlet(alpha, mode)
    spec = OperatorSpec(OperatorKind.TOEPLITZ_QMU, mu, space, space, N)
    grid = grid or GridSpec()
    points, weights = mu.to_atoms(grid)
    Q = _toeplitz_entries(space, N, points, weights)
    qerr = 0.0
    if not mu.is_atomic:
        fine_points, fine_weights = mu.to_atoms(grid.refined())
        qerr = float(np.linalg.norm(_toeplitz_entries(space, N, fine_points, fine_weights) - Q))
    radii_sq = np.abs(points) ** 2
    tails = np.array([diagonal_kernel_tail(space, float(s), N + 1) for s in radii_sq])
    totals = np.array([diagonal_kernel_tail(space, float(s), 0) for s in radii_sq])
    trace_tail = float(np.sum(weights * tails))
    trace_total = float(np.sum(weights * totals))
    flags: Tuple[str, ...] = () if mu.is_atomic else ("quadrature",)
    if mu.total_mass == 0.0:
        flags += ("zero measure",)
    return OperatorMatrix(
        entries=Q,
        spec=spec,
        bandwidth=None,
        # |Q_nk|² <= Q_nn Q_kk for a Gram matrix
        tail_certificate=2.0 * trace_tail * trace_total,
        flags=flags,
        quadrature_error=qerr,
        trace_total=trace_total,
        trace_tail=trace_tail,
    )


# -------------------- Certificates --------------------


def truncation_report(m: OperatorMatrix, p: float) -> TruncationReport:
    """Bound on Σ λ^p(ideal operator) − Σ λ^p(truncated matrix)."""
    require(p > 0, "p", f"Schatten exponent must be positive, got {p}")
    if m.spec.kind is OperatorKind.TOEPLITZ_QMU:
        return _toeplitz_report(m, p)
    model = m.band
    if model is None or model.support == 0:
        return TruncationReport(p, 0.0, False, "zero")
    N = m.spec.N
    if not model.complete:
        bound = _extrapolated_row_tail(m.entries, N, p)
        if bound > 0:
            logger.warning("truncation certificate for %s is heuristic", m.spec.symbol.label)
        return TruncationReport(p, bound, True, "row power-law extrapolation", bound)
    if p == 2.0:
        total, rem = power_tail_sum(model.row_norms_sq, N + 1, _cutoff(N, model.support))
        return TruncationReport(p, total, False, "frobenius", rem)
    term = lambda n: model.row_norms_sq(n) ** (p / 2.0)  # noqa: E731
    total, rem = power_tail_sum(term, N + 1, _cutoff(N, model.support))
    single = model.support == 1
    if not single:
        logger.warning("row-norm certificate for p=%g on a multi-diagonal matrix is heuristic", p)
    return TruncationReport(p, total, not single, "dropped diagonal" if single else "dropped rows", rem)


def _toeplitz_report(m: OperatorMatrix, p: float) -> TruncationReport:
    tail, total = m.trace_tail or 0.0, m.trace_total or 0.0
    if tail == 0.0:
        return TruncationReport(p, 0.0, False, "zero")
    if p == 1.0:
        return TruncationReport(p, tail, False, "trace")
    if p > 1.0:
        # interlacing plus convexity of x^p with ‖Q‖ <= trace
        return TruncationReport(p, p * total ** (p - 1.0) * tail, False, "trace interlacing")
    return TruncationReport(p, tail**p, True, "trace power")


def operator_from_spec(spec: OperatorSpec, grid: Optional[GridSpec] = None) -> OperatorMatrix:
    """Assemble the matrix described by ``spec``."""
    kind, d, c, N = spec.kind, spec.domain, spec.codomain, spec.N
    if kind is OperatorKind.INTEGRATION_TG:
        return assemble_tg(spec.symbol, d.alpha, N, d.inner_product_mode)
    if kind is OperatorKind.MULTIPLICATION_GPRIME:
        return assemble_mgprime(spec.symbol, d.alpha, N, d.inner_product_mode)
    if kind is OperatorKind.MULTIPLICATION_GSECOND:
        return assemble_mgsecond(spec.symbol, d.alpha, N, d.inner_product_mode)
    if kind is OperatorKind.MULTIPLICATION_MONOMIAL:
        return assemble_monomial_multiplication(spec.symbol.j, N)
    if kind is OperatorKind.MULTIPLICATION_BERGMAN:
        return assemble_bergman_multiplication(spec.symbol, d.alpha, c.alpha, N)
    if kind is OperatorKind.TOEPLITZ_QMU:
        return assemble_toeplitz(spec.symbol, d.alpha, N, grid, d.inner_product_mode)
    raise ParameterError("kind", f"unknown operator kind {kind!r}")
