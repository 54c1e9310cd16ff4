"""Function spaces, orthonormal monomial bases, symbols and reproducing kernels.

Every object here is an immutable value. The Dirichlet-type space D_α comes in
two equivalent Hilbert norms:

* ``COEFFICIENT``: ⟨f, g⟩ = Σ (k+1)^{1-α} a_k conj(b_k)
* ``INTEGRAL``:    ⟨f, g⟩ = f(0) conj(g(0)) + ∫ f' conj(g') dA_α

with dA the normalized area measure and dA_α = (α+1)(1-|z|²)^α dA. Weighted
Bergman spaces A²_β carry the norm ∫|f|² dA_β. In all three cases the monomials
are orthogonal, so a basis is fully described by the monomial norms ν_n = ‖z^n‖.

Example:
    >>> space = SpaceParams.dirichlet(0.0, InnerProductMode.INTEGRAL)
    >>> float(orthonormal_basis(space, 8).normalization[4])
    0.5
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

from ..core.errors import ConvergenceError, ParameterError, TruncationError, require

logger = logging.getLogger(__name__)

ArrayLike = Union[complex, float, np.ndarray, Sequence[complex]]


class InnerProductMode(str, Enum):
    INTEGRAL = "integral"
    COEFFICIENT = "coefficient"


class SpaceKind(str, Enum):
    DIRICHLET = "dirichlet"
    BERGMAN = "bergman"


@dataclass(frozen=True)
class SpaceParams:
    """A Dirichlet-type space D_α or a weighted Bergman space A²_α."""

    alpha: float
    inner_product_mode: InnerProductMode = InnerProductMode.COEFFICIENT
    kind: SpaceKind = SpaceKind.DIRICHLET

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "inner_product_mode", InnerProductMode(self.inner_product_mode))
        object.__setattr__(self, "kind", SpaceKind(self.kind))
        require(math.isfinite(self.alpha), "alpha", "must be finite")
        if self.kind is SpaceKind.DIRICHLET:
            require(self.alpha >= 0.0, "alpha", f"Dirichlet weight must be >= 0, got {self.alpha}")
        else:
            require(self.alpha > -1.0, "alpha", f"Bergman weight must be > -1, got {self.alpha}")

    @classmethod
    def dirichlet(
        cls, alpha: float, mode: InnerProductMode = InnerProductMode.COEFFICIENT
    ) -> "SpaceParams":
        return cls(alpha, mode, SpaceKind.DIRICHLET)

    @classmethod
    def bergman(cls, alpha: float) -> "SpaceParams":
        # The Bergman norm has a single form; the mode field is only carried along.
        return cls(alpha, InnerProductMode.INTEGRAL, SpaceKind.BERGMAN)

    @property
    def label(self) -> str:
        if self.kind is SpaceKind.BERGMAN:
            return f"A2_{self.alpha:g}"
        return f"D_{self.alpha:g}[{self.inner_product_mode.value}]"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "inner_product_mode": self.inner_product_mode.value,
            "kind": self.kind.value,
        }


# -------------------- Monomial norms --------------------


def log_monomial_norms_sq(space: SpaceParams, n: np.ndarray) -> np.ndarray:
    """log ‖z^n‖² for integer array ``n`` (vectorized, no overflow)."""
    n = np.asarray(n, dtype=float)
    a = space.alpha
    if space.kind is SpaceKind.BERGMAN:
        # ∫|z|^{2n} dA_a = (a+1) B(n+1, a+1)
        return math.log(a + 1.0) + special.betaln(n + 1.0, a + 1.0)
    if space.inner_product_mode is InnerProductMode.COEFFICIENT:
        return (1.0 - a) * np.log1p(n)
    out = np.zeros_like(n)
    pos = n > 0
    # ‖z^n‖² = ∫|n z^{n-1}|² dA_a = n² (a+1) B(n, a+1)
    out[pos] = 2.0 * np.log(n[pos]) + math.log(a + 1.0) + special.betaln(n[pos], a + 1.0)
    return out


@lru_cache(maxsize=256)
def monomial_norms(space: SpaceParams, N: int) -> np.ndarray:
    """ν_0..ν_N as a read-only array."""
    nu = np.exp(0.5 * log_monomial_norms_sq(space, np.arange(N + 1)))
    nu.setflags(write=False)
    return nu


def inner_product(space: SpaceParams, a: ArrayLike, b: ArrayLike) -> complex:
    """Inner product of two functions given by monomial coefficients."""
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    size = max(a.size, b.size)
    a = np.pad(a, (0, size - a.size))
    b = np.pad(b, (0, size - b.size))
    weights = np.exp(log_monomial_norms_sq(space, np.arange(size)))
    return complex(np.sum(weights * a * np.conj(b)))


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """e_n = z^n / ν_n for n = 0..N."""

    space: SpaceParams
    N: int
    norms: np.ndarray = field(repr=False)

    @property
    def normalization(self) -> np.ndarray:
        return 1.0 / self.norms

    @property
    def dimension(self) -> int:
        return self.N + 1

    def values(self, z: ArrayLike) -> np.ndarray:
        """e_n(z); shape ``(len(z), N+1)``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        powers = np.power(z[:, None], np.arange(self.N + 1)[None, :])
        return powers * self.normalization[None, :]

    def derivatives(self, z: ArrayLike) -> np.ndarray:
        """e_n'(z); shape ``(len(z), N+1)``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        n = np.arange(self.N + 1)
        out = np.zeros((z.size, self.N + 1), dtype=complex)
        out[:, 1:] = n[None, 1:] * np.power(z[:, None], n[None, 1:] - 1)
        return out * self.normalization[None, :]

    def gram(self) -> np.ndarray:
        """Gram matrix of the basis in the space's own inner product."""
        weights = self.norms**2
        coeffs = np.diag(self.normalization)
        return (coeffs * weights[None, :]) @ coeffs.conj().T


def orthonormal_basis(space: SpaceParams, N: int) -> OrthonormalBasis:
    """Orthonormal monomial basis of ``space`` truncated to degrees 0..N."""
    require(int(N) == N and N >= 1, "N", f"truncation must be an integer >= 1, got {N}")
    return OrthonormalBasis(space=space, N=int(N), norms=monomial_norms(space, int(N)))


# -------------------- Symbols --------------------


class SymbolKind(str, Enum):
    TAYLOR = "taylor"
    MONOMIAL = "monomial"
    KERNEL_POWER = "kernel_power"
    LOGLOG = "loglog"
    LACUNARY = "lacunary"


@dataclass(frozen=True)
class Symbol:
    """An analytic symbol g on the disk.

    Use the named constructors; the raw fields are only meaningful for the
    matching ``kind``. A Taylor symbol with ``truncation=None`` is a polynomial
    (coefficients past the last one are exactly zero); with an integer
    truncation M it is a series known only to degree M.
    """

    kind: SymbolKind
    taylor_coeffs: Tuple[complex, ...] = ()
    j: int = 0
    a: complex = 0j
    gamma: float = 0.0
    lacunary_coeffs: Tuple[float, ...] = ()
    lacunary_exponents: Tuple[int, ...] = ()
    lacunary_ratio: float = 0.0
    truncation: Optional[int] = None

    # ---- constructors ----

    @classmethod
    def taylor(cls, coeffs: Iterable[complex], truncation: Optional[int] = None) -> "Symbol":
        values = tuple(complex(c) for c in coeffs)
        require(len(values) > 0, "coeffs", "at least one coefficient is required")
        require(all(np.isfinite([c.real for c in values] + [c.imag for c in values])),
                "coeffs", "coefficients must be finite")
        if truncation is not None:
            require(truncation >= len(values) - 1, "truncation",
                    "must cover the supplied coefficients")
        return cls(SymbolKind.TAYLOR, taylor_coeffs=values, truncation=truncation)

    @classmethod
    def constant(cls, value: complex) -> "Symbol":
        return cls.taylor((value,))

    @classmethod
    def monomial(cls, j: int) -> "Symbol":
        require(int(j) == j and j >= 1, "j", f"monomial degree must be a positive integer, got {j}")
        return cls(SymbolKind.MONOMIAL, j=int(j))

    @classmethod
    def kernel_power(cls, a: complex, gamma: float) -> "Symbol":
        a = complex(a)
        require(abs(a) < 1.0, "a", f"must lie in the open unit disk, got {a}")
        require(gamma > 0.0, "gamma", f"must be positive, got {gamma}")
        return cls(SymbolKind.KERNEL_POWER, a=a, gamma=float(gamma))

    @classmethod
    def loglog(cls) -> "Symbol":
        return cls(SymbolKind.LOGLOG)

    @classmethod
    def lacunary(
        cls,
        coeffs: Sequence[float],
        exponents: Sequence[int],
        ratio: Optional[float] = None,
    ) -> "Symbol":
        coeffs = tuple(float(c) for c in coeffs)
        exponents = tuple(int(n) for n in exponents)
        require(len(coeffs) == len(exponents) and len(coeffs) > 0, "exponents",
                "need one exponent per coefficient")
        require(exponents[0] >= 1, "exponents", "exponents must be positive")
        ratios = [b / a for a, b in zip(exponents, exponents[1:])]
        observed = min(ratios) if ratios else math.inf
        c = observed if ratio is None else float(ratio)
        require(c > 1.0 and observed >= c, "exponents",
                f"lacunary ratio n_(k+1)/n_k must be >= c > 1 (observed {observed:g})")
        return cls(
            SymbolKind.LACUNARY,
            lacunary_coeffs=coeffs,
            lacunary_exponents=exponents,
            lacunary_ratio=c if math.isfinite(c) else 2.0,
        )

    # ---- properties ----

    @property
    def degree(self) -> Optional[int]:
        """Degree of the exact polynomial, or None for infinite series."""
        if self.kind is SymbolKind.MONOMIAL:
            return self.j
        if self.kind is SymbolKind.LACUNARY:
            return self.lacunary_exponents[-1]
        if self.kind is SymbolKind.TAYLOR and self.truncation is None:
            nz = [k for k, c in enumerate(self.taylor_coeffs) if c != 0]
            return nz[-1] if nz else 0
        return None

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    @property
    def label(self) -> str:
        if self.kind is SymbolKind.MONOMIAL:
            return f"z^{self.j}"
        if self.kind is SymbolKind.KERNEL_POWER:
            return f"(1-conj({_fmt_complex(self.a)})z)^-{self.gamma:g}"
        if self.kind is SymbolKind.LOGLOG:
            return "loglog(e/(1-z))"
        if self.kind is SymbolKind.LACUNARY:
            return "lacunary[" + ",".join(str(n) for n in self.lacunary_exponents) + "]"
        if self.is_constant:
            return f"const:{_fmt_complex(self.taylor_coeffs[0])}"
        return f"taylor[{len(self.taylor_coeffs) - 1}]"

    def value_at_zero(self) -> complex:
        if self.kind is SymbolKind.TAYLOR:
            return self.taylor_coeffs[0]
        if self.kind is SymbolKind.KERNEL_POWER:
            return 1.0 + 0j
        return 0j

    def derivative(self, z: ArrayLike) -> np.ndarray:
        """g'(z), vectorized over points of the open disk."""
        z = np.asarray(z, dtype=complex)
        if self.kind is SymbolKind.MONOMIAL:
            return self.j * z ** (self.j - 1)
        if self.kind is SymbolKind.KERNEL_POWER:
            ac = np.conj(self.a)
            return self.gamma * ac * (1.0 - ac * z) ** (-self.gamma - 1.0)
        if self.kind is SymbolKind.LOGLOG:
            one_minus = 1.0 - z
            return 1.0 / (one_minus * (1.0 - np.log(one_minus)))
        if self.kind is SymbolKind.LACUNARY:
            out = np.zeros_like(z)
            for a_k, n_k in zip(self.lacunary_coeffs, self.lacunary_exponents):
                out = out + a_k * n_k * z ** (n_k - 1)
            return out
        coeffs = np.asarray(self.taylor_coeffs, dtype=complex)
        if coeffs.size == 1:
            return np.zeros_like(z)
        dcoeffs = coeffs[1:] * np.arange(1, coeffs.size)
        return np.polynomial.polynomial.polyval(z, dcoeffs)

    # ---- serialization ----

    def to_dict(self) -> Dict[str, Any]:
        params: Dict[str, Any] = {}
        coeffs: Optional[List[List[float]]] = None
        if self.kind is SymbolKind.MONOMIAL:
            params = {"j": self.j}
        elif self.kind is SymbolKind.KERNEL_POWER:
            params = {"a": [self.a.real, self.a.imag], "gamma": self.gamma}
        elif self.kind is SymbolKind.LACUNARY:
            params = {
                "coeffs": list(self.lacunary_coeffs),
                "exponents": list(self.lacunary_exponents),
                "ratio": self.lacunary_ratio,
            }
        elif self.kind is SymbolKind.TAYLOR:
            coeffs = [[c.real, c.imag] for c in self.taylor_coeffs]
        return {
            "kind": self.kind.value,
            "params": params,
            "coeffs": coeffs,
            "truncation": self.truncation,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Symbol":
        try:
            kind = SymbolKind(data["kind"])
        except (KeyError, ValueError) as exc:
            raise ParameterError("kind", f"unknown symbol kind in {data!r}") from exc
        params = data.get("params") or {}
        if kind is SymbolKind.MONOMIAL:
            return cls.monomial(params["j"])
        if kind is SymbolKind.KERNEL_POWER:
            re, im = params["a"]
            return cls.kernel_power(complex(re, im), params["gamma"])
        if kind is SymbolKind.LOGLOG:
            return cls.loglog()
        if kind is SymbolKind.LACUNARY:
            return cls.lacunary(params["coeffs"], params["exponents"], params.get("ratio"))
        coeffs = [complex(re, im) for re, im in data.get("coeffs") or []]
        return cls.taylor(coeffs, truncation=data.get("truncation"))

    @classmethod
    def parse(cls, text: str) -> "Symbol":
        """Parse the compact command-line form.

        ``monomial:3``, ``const:1``, ``kernelpow:0.9,1``, ``loglog``,
        ``taylor:1,0,2`` and ``lacunary:1,0.5@2,4`` (coefficients @ exponents).
        """
        name, _, rest = text.strip().partition(":")
        name = name.lower()
        try:
            if name == "monomial":
                return cls.monomial(int(rest))
            if name in ("const", "constant"):
                return cls.constant(complex(rest or "0"))
            if name in ("kernelpow", "kernel_power"):
                a_text, gamma_text = rest.split(",")
                return cls.kernel_power(complex(a_text), float(gamma_text))
            if name == "loglog":
                return cls.loglog()
            if name == "taylor":
                return cls.taylor(complex(tok) for tok in rest.split(","))
            if name == "lacunary":
                coeff_text, exp_text = rest.split("@")
                return cls.lacunary(
                    [float(tok) for tok in coeff_text.split(",")],
                    [int(tok) for tok in exp_text.split(",")],
                )
        except ParameterError:
            raise
        except (ValueError, TypeError) as exc:
            raise ParameterError("symbol", f"cannot parse {text!r}: {exc}") from exc
        raise ParameterError("symbol", f"unknown symbol family {name!r}")


def _fmt_complex(c: complex) -> str:
    return f"{c.real:g}" if c.imag == 0 else f"{c.real:g}{c.imag:+g}j"


@dataclass(frozen=True, eq=False)
class SymbolCoefficients:
    """Taylor coefficients b_0..b_M with a bound on sup_{|z|<=radius} |g - partial sum|."""

    coeffs: np.ndarray = field(repr=False)
    tail_bound: float
    radius: float
    dropped: Tuple[Tuple[int, float], ...] = ()

    @property
    def M(self) -> int:
        return self.coeffs.size - 1


@lru_cache(maxsize=32)
def _loglog_coeffs(M: int) -> np.ndarray:
    # g = log(1 + L), L = log(1/(1-z)); g' = L' / (1 + L) solved by series division.
    h = np.zeros(M + 1)
    h[0] = 1.0
    h[1:] = 1.0 / np.arange(1, M + 1)
    u = np.zeros(M + 1)
    for n in range(M + 1):
        u[n] = 1.0 - np.dot(h[1 : n + 1], u[n - 1 :: -1][:n]) if n else 1.0
    g = np.zeros(M + 1)
    g[1:] = u[:M] / np.arange(1, M + 1)
    g.setflags(write=False)
    return g


def symbol_coeffs(g: Symbol, M: int, radius: float = 0.9) -> SymbolCoefficients:
    """Taylor coefficients of ``g`` to degree ``M`` with a certified tail bound on |z| <= radius."""
    require(int(M) == M and M >= 0, "M", f"must be a nonnegative integer, got {M}")
    require(0.0 <= radius < 1.0, "radius", "must lie in [0, 1)")
    M = int(M)
    coeffs = np.zeros(M + 1, dtype=complex)
    tail = 0.0
    dropped: List[Tuple[int, float]] = []

    if g.kind is SymbolKind.MONOMIAL:
        if g.j <= M:
            coeffs[g.j] = 1.0
        else:
            dropped.append((g.j, 1.0))
            tail = radius**g.j
    elif g.kind is SymbolKind.TAYLOR:
        given = np.asarray(g.taylor_coeffs, dtype=complex)
        if g.truncation is not None and M > g.truncation:
            raise TruncationError(
                "M", f"symbol is known to degree {g.truncation}, requested {M}",
                known=g.truncation,
            )
        keep = min(M + 1, given.size)
        coeffs[:keep] = given[:keep]
        rest = given[keep:]
        if rest.size:
            tail = float(np.sum(np.abs(rest) * radius ** np.arange(keep, given.size)))
    elif g.kind is SymbolKind.LACUNARY:
        for a_k, n_k in zip(g.lacunary_coeffs, g.lacunary_exponents):
            if n_k <= M:
                coeffs[n_k] += a_k
            else:
                dropped.append((n_k, a_k))
                tail += abs(a_k) * radius**n_k
        if dropped:
            logger.warning(
                "lacunary symbol: %d term(s) beyond degree %d dropped", len(dropped), M
            )
    elif g.kind is SymbolKind.KERNEL_POWER:
        ac = np.conj(g.a)
        n = np.arange(M + 1)
        # binomial series (1 - x)^{-γ} = Σ (γ)_n / n! x^n
        log_binom = special.gammaln(n + g.gamma) - special.gammaln(g.gamma) - special.gammaln(n + 1)
        coeffs = np.exp(log_binom) * ac**n
        x = abs(g.a) * radius
        if x > 0:
            ratio = max(1.0, (g.gamma + M + 1) / (M + 2)) * x
            if ratio < 1.0:
                next_term = math.exp(
                    special.gammaln(M + 1 + g.gamma) - special.gammaln(g.gamma)
                    - special.gammaln(M + 2)
                ) * x ** (M + 1)
                tail = next_term / (1.0 - ratio)
            else:
                tail = math.inf
    elif g.kind is SymbolKind.LOGLOG:
        coeffs = _loglog_coeffs(M).astype(complex)
        tail = _loglog_tail_bound(M, radius)
    return SymbolCoefficients(coeffs=coeffs, tail_bound=float(tail), radius=radius,
                              dropped=tuple(dropped))


def _loglog_tail_bound(M: int, radius: float) -> float:
    # Cauchy estimate on |z| = rho with radius < rho < 1; |log w| <= |log|w|| + π.
    if radius == 0.0:
        return 0.0
    rho = 0.5 * (1.0 + radius)
    upper = 1.0 + math.log(1.0 / (1.0 - rho)) + 0.5 * math.pi
    lower = 1.0 - math.log(1.0 + rho)
    sup_g = max(math.log(upper), -math.log(lower)) + math.pi
    q = radius / rho
    return sup_g * q ** (M + 1) / (1.0 - q)


# -------------------- Reproducing kernels --------------------


class KernelKind(str, Enum):
    DIRICHLET_K = "dirichlet_k"
    BERGMAN_B = "bergman_b"
    DERIVATIVE_J = "derivative_j"


@dataclass(frozen=True)
class KernelEval:
    """Reproducing kernel K^α_z (D_α), B^α_z (A²_α) or the derivative kernel J^α_z (D_α).

    The closed forms of the literature are Integral-mode identities, which is
    why Integral is the default here while matrix assembly defaults to
    Coefficient mode.
    """

    kind: KernelKind
    alpha: float = 0.0
    inner_product_mode: InnerProductMode = InnerProductMode.INTEGRAL

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", KernelKind(self.kind))
        object.__setattr__(self, "inner_product_mode", InnerProductMode(self.inner_product_mode))
        # validates alpha
        _ = self.space

    @property
    def space(self) -> SpaceParams:
        if self.kind is KernelKind.BERGMAN_B:
            return SpaceParams.bergman(self.alpha)
        return SpaceParams.dirichlet(self.alpha, self.inner_product_mode)

    @property
    def integral(self) -> bool:
        return self.inner_product_mode is InnerProductMode.INTEGRAL


def _check_point(name: str, z: complex) -> complex:
    z = complex(z)
    if not (abs(z) < 1.0 and math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ParameterError(name, f"point must lie in the open unit disk, got {z}")
    return z


def _series_sum(
    log_coeff: Callable[[np.ndarray], np.ndarray],
    ratio_bound: Callable[[int], float],
    x: complex,
    tol: float,
    max_terms: int,
    chunk: int = 2048,
) -> Tuple[complex, float]:
    """Σ_{n>=0} c_n x^n for positive c_n = exp(log_coeff(n)), stopped on a geometric tail bound."""
    ax = abs(x)
    if ax == 0.0:
        return complex(np.exp(log_coeff(np.zeros(1)))[0]), 0.0
    total = 0j
    log_ax = math.log(ax)
    start = 0
    while start < max_terms:
        n = np.arange(start, min(start + chunk, max_terms))
        lc = log_coeff(n)
        total += complex(np.sum(np.exp(lc + n * log_ax) * np.exp(1j * n * np.angle(x))))
        start = int(n[-1]) + 1
        q = ax * ratio_bound(start)
        if q < 1.0:
            next_term = math.exp(float(log_coeff(np.array([start]))[0]) + start * log_ax)
            bound = next_term / (1.0 - q)
            if bound <= tol:
                return total, bound
    raise ConvergenceError(
        f"kernel series did not reach tol={tol:g} within {max_terms} terms",
        x=x, tol=tol, max_terms=max_terms,
    )


def _kernel_log_coeffs(kernel: KernelEval, squared_derivative: bool = False):
    space = kernel.space
    if kernel.kind is KernelKind.DIRICHLET_K:
        return lambda n: -log_monomial_norms_sq(space, n)
    if squared_derivative:
        # Σ |e_n'(z)|² = Σ_m (m+1)² |z|^{2m} / ν_{m+1}²
        return lambda n: 2.0 * np.log(n + 1.0) - log_monomial_norms_sq(space, n + 1)
    # J_z(w) = w Σ_m (m+1) (z̄w)^m / ν_{m+1}²
    return lambda n: np.log(n + 1.0) - log_monomial_norms_sq(space, n + 1)


def _kernel_ratio_bound(kernel: KernelEval, extra_power: int = 0):
    a = kernel.alpha
    integral = kernel.integral

    def bound(M: int) -> float:
        if kernel.kind is KernelKind.DIRICHLET_K:
            base = 1.0 + a / (M + 1) if integral else (1.0 + 1.0 / (M + 1)) ** max(a - 1.0, 0.0)
            return base
        growth = (1.0 + 1.0 / (M + 1)) ** extra_power
        if integral:
            return growth * (1.0 + a / (M + 2)) * (M + 2) / (M + 1)
        return growth * (1.0 + 1.0 / (M + 1)) * (1.0 + 1.0 / (M + 2)) ** max(a - 1.0, 0.0)

    return bound


def kernel_value(
    kernel: KernelEval,
    z: complex,
    w: complex,
    tol: float = 1e-12,
    max_terms: int = 2_000_000,
) -> complex:
    """Evaluate the kernel at ``z`` on the point ``w``."""
    z = _check_point("z", z)
    w = _check_point("w", w)
    require(tol > 0, "tol", "must be positive")
    x = np.conj(z) * w
    a = kernel.alpha
    if kernel.kind is KernelKind.BERGMAN_B:
        return complex((1.0 - x) ** (-(2.0 + a)))
    if kernel.kind is KernelKind.DIRICHLET_K:
        if kernel.integral and a == 0.0:
            return complex(1.0 - np.log(1.0 - x))
        value, _ = _series_sum(_kernel_log_coeffs(kernel), _kernel_ratio_bound(kernel),
                               complex(x), tol, max_terms)
        return value
    if kernel.integral:
        if z == 0:
            return w
        return complex(np.expm1(-(1.0 + a) * np.log1p(-x)) / ((1.0 + a) * np.conj(z)))
    value, _ = _series_sum(_kernel_log_coeffs(kernel), _kernel_ratio_bound(kernel),
                           complex(x), tol / max(abs(w), 1e-300), max_terms)
    return w * value


def kernel_norm(kernel: KernelEval, z: complex, tol: float = 1e-12) -> float:
    """Norm of the kernel at ``z`` in its space."""
    z = _check_point("z", z)
    s = abs(z) ** 2
    a = kernel.alpha
    if kernel.kind is KernelKind.BERGMAN_B or (
        kernel.kind is KernelKind.DERIVATIVE_J and kernel.integral
    ):
        return float((1.0 - s) ** (-(2.0 + a) / 2.0))
    if kernel.kind is KernelKind.DIRICHLET_K:
        return math.sqrt(kernel_value(kernel, z, z, tol=tol).real)
    value, _ = _series_sum(
        _kernel_log_coeffs(kernel, squared_derivative=True),
        _kernel_ratio_bound(kernel, extra_power=1),
        complex(s),
        tol,
        2_000_000,
    )
    return math.sqrt(value.real)


def kernel_coefficients(kernel: KernelEval, z: complex, N: int) -> np.ndarray:
    """Monomial coefficients 0..N of the kernel function at ``z``."""
    z = _check_point("z", z)
    n = np.arange(N + 1)
    zc = np.conj(z)
    if kernel.kind is KernelKind.BERGMAN_B:
        lam = 2.0 + kernel.alpha
        log_c = special.gammaln(n + lam) - special.gammaln(lam) - special.gammaln(n + 1)
        return np.exp(log_c) * zc**n
    inv = np.exp(-log_monomial_norms_sq(kernel.space, n))
    if kernel.kind is KernelKind.DIRICHLET_K:
        return inv * zc**n
    out = np.zeros(N + 1, dtype=complex)
    out[1:] = n[1:] * zc ** (n[1:] - 1) * inv[1:]
    return out


def diagonal_kernel_tail(space: SpaceParams, s: float, start: int, tol: float = 1e-15) -> float:
    """Σ_{n>=start} s^n / ν_n², the part of K_z(z) carried by degrees >= start (s = |z|²)."""
    require(0.0 <= s < 1.0, "s", "must lie in [0, 1)")
    if s == 0.0:
        return 1.0 if start == 0 else 0.0
    kernel = KernelEval(KernelKind.DIRICHLET_K, space.alpha, space.inner_product_mode)
    base = _kernel_ratio_bound(kernel)
    head = math.exp(start * math.log(s))
    if head == 0.0:
        return 0.0
    value, _ = _series_sum(
        lambda m: -log_monomial_norms_sq(space, m + start),
        lambda M: base(M + start),
        complex(s),
        tol / head,
        50_000_000,
    )
    return head * value.real
