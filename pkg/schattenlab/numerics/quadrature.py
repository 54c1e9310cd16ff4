"""Boundary-graded quadrature on the unit disk.

The radial direction is split into panels [1 - 2^{-k h}, 1 - 2^{-(k+1) h}],
each carrying a Gauss-Legendre rule, so the panels shrink geometrically toward
the circle. Rings use a uniform trapezoid rule in the angle unless the grid is
focused on one or more points, in which case the angle is split into panels
that shrink geometrically toward each focus angle down to the scale 1 - r|a|.

All weights refer to the normalized area measure dA = r dr dθ / π, so the
weights of a grid clipped at r_max sum to r_max².
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import Executor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_legendre

from ..core.errors import ParameterError, require

logger = logging.getLogger(__name__)

DEFAULT_CLIP = 1.0 - 2.0**-12
CLIP_SWEEP = (1.0 - 2.0**-8, 1.0 - 2.0**-12, 1.0 - 2.0**-16)
# log(1/(1 - r)) doubles per step, so log-log growth shows up as constant increments
DIVERGENCE_SWEEP = (1.0 - 2.0**-4, 1.0 - 2.0**-8, 1.0 - 2.0**-16, 1.0 - 2.0**-32)

_CHUNK = 1 << 16


@dataclass(frozen=True)
class GridSpec:
    """Parameters of a disk quadrature grid."""

    r_max: float = DEFAULT_CLIP
    level_step: float = 0.5
    radial_order: int = 8
    angular_base: int = 32
    angular_max: int = 1024
    angular_order: int = 8
    depth: int = 64
    focus: Tuple[complex, ...] = ()

    def __post_init__(self) -> None:
        require(0.0 < self.r_max <= 1.0, "r_max", f"clip radius must lie in (0, 1], got {self.r_max}")
        require(self.level_step > 0.0, "level_step", "must be positive")
        require(self.radial_order >= 1 and self.angular_order >= 1, "order", "must be >= 1")
        require(self.angular_base >= 4, "angular_base", "must be >= 4")
        object.__setattr__(self, "focus", tuple(complex(f) for f in self.focus))
        for f in self.focus:
            require(abs(f) < 1.0, "focus", f"focus point must lie in the disk, got {f}")

    @property
    def clipped(self) -> bool:
        return self.r_max < 1.0

    def refined(self) -> "GridSpec":
        """Halve the grading step and double the angular resolution."""
        return replace(
            self,
            level_step=self.level_step / 2.0,
            angular_base=self.angular_base * 2,
            angular_max=self.angular_max * 2,
            depth=self.depth * 2,
        )

    def coarsened(self) -> "GridSpec":
        """The grid one refinement level below this one."""
        return replace(
            self,
            level_step=self.level_step * 2.0,
            angular_base=max(4, self.angular_base // 2),
            angular_max=max(4, self.angular_max // 2),
            depth=max(1, self.depth // 2),
        )

    def with_clip(self, r_max: float) -> "GridSpec":
        return replace(self, r_max=r_max)

    def with_focus(self, *points: complex) -> "GridSpec":
        kept = tuple(complex(p) for p in points if abs(p) > 0.0)
        return replace(self, focus=kept)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["focus"] = [[f.real, f.imag] for f in self.focus]
        return out


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    spec: GridSpec
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    radius: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @property
    def area(self) -> float:
        return float(np.sum(self.weights))

    def integrate(self, fn: Callable[[np.ndarray], np.ndarray],
                  executor: Optional[Executor] = None) -> float:
        """Σ w_i f(z_i) with a fixed chunking, so the result never depends on ``executor``."""
        chunks = [slice(i, min(i + _CHUNK, self.size)) for i in range(0, self.size, _CHUNK)]

        def run(sl: slice) -> np.ndarray:
            return np.asarray(fn(self.nodes[sl]), dtype=float)

        mapper = executor.map if executor is not None else map
        values = np.concatenate(list(mapper(run, chunks))) if chunks else np.zeros(0)
        if not np.all(np.isfinite(values)):
            raise ParameterError("integrand", "non-finite integrand values on the grid")
        return float(np.sum(values * self.weights))


def radial_breakpoints(spec: GridSpec) -> np.ndarray:
    h = spec.level_step
    if spec.clipped:
        levels = max(1, math.ceil(math.log2(1.0 / (1.0 - spec.r_max)) / h))
    else:
        levels = spec.depth
    k = np.arange(levels)
    breaks = np.empty(levels + 1)
    breaks[:levels] = 1.0 - 2.0 ** (-k * h)
    breaks[levels] = spec.r_max
    return breaks


def _gauss_panels(breaks: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    x, w = roots_legendre(order)
    lo, hi = breaks[:-1], breaks[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    panel = np.repeat(np.arange(lo.size), order)
    return nodes, weights, panel


@lru_cache(maxsize=64)
def radial_rule(spec: GridSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes r_i and weights such that Σ w_i f(r_i) ≈ ∫_0^{r_max} f(r) 2r dr."""
    r, w, _ = _gauss_panels(radial_breakpoints(spec), spec.radial_order)
    weights = 2.0 * r * w
    r.setflags(write=False)
    weights.setflags(write=False)
    return r, weights


def _angular_rule(r: float, panel: int, spec: GridSpec) -> Tuple[np.ndarray, np.ndarray]:
    breaks: List[float] = []
    h = spec.level_step
    for f in spec.focus:
        delta = max(0.25 * (1.0 - r * abs(f)), 1e-15)
        levels = math.ceil(math.log2(math.pi / delta) / h)
        if levels < 2:
            continue
        theta = math.atan2(f.imag, f.real)
        offsets = math.pi * 2.0 ** (-np.arange(1, levels + 1) * h)
        breaks.extend((theta + offsets).tolist())
        breaks.extend((theta - offsets).tolist())
        breaks.append(theta)
    if not breaks:
        m = min(spec.angular_max, spec.angular_base * 2 ** math.ceil(panel * h))
        theta = 2.0 * math.pi * (np.arange(m) + 0.5) / m
        return theta, np.full(m, 2.0 * math.pi / m)
    start = breaks[0] - math.pi
    wrapped = np.sort(np.mod(np.asarray(breaks) - start, 2.0 * math.pi))
    wrapped = np.concatenate(([0.0], wrapped, [2.0 * math.pi]))
    wrapped = wrapped[np.concatenate(([True], np.diff(wrapped) > 1e-14))]
    nodes, weights, _ = _gauss_panels(wrapped, spec.angular_order)
    return nodes + start, weights


@lru_cache(maxsize=32)
def build_grid(spec: GridSpec) -> QuadratureGrid:
    """Tensor (ring by ring) quadrature grid for ``spec``."""
    r_nodes, r_weights, panels = _gauss_panels(radial_breakpoints(spec), spec.radial_order)
    node_parts: List[np.ndarray] = []
    weight_parts: List[np.ndarray] = []
    radius_parts: List[np.ndarray] = []
    for r, wr, panel in zip(r_nodes, r_weights, panels):
        theta, wt = _angular_rule(float(r), int(panel), spec)
        node_parts.append(r * np.exp(1j * theta))
        weight_parts.append(wr * r * wt / math.pi)
        radius_parts.append(np.full(theta.size, r))
    grid = QuadratureGrid(
        spec=spec,
        nodes=np.concatenate(node_parts),
        weights=np.concatenate(weight_parts),
        radius=np.concatenate(radius_parts),
    )
    for arr in (grid.nodes, grid.weights, grid.radius):
        arr.setflags(write=False)
    logger.debug("built disk grid: %d nodes, r_max=%.17g", grid.size, spec.r_max)
    return grid


@dataclass(frozen=True)
class QuadratureValue:
    value: float
    error: float
    r_max: float
    nodes: int = 0


def integrate_disk(
    fn: Callable[[np.ndarray], np.ndarray],
    spec: GridSpec,
    executor: Optional[Executor] = None,
) -> QuadratureValue:
    """Integrate over |z| <= r_max; the error is the change under one refinement."""
    coarse = build_grid(spec).integrate(fn, executor)
    fine_grid = build_grid(spec.refined())
    fine = fine_grid.integrate(fn, executor)
    return QuadratureValue(fine, abs(fine - coarse), spec.r_max, fine_grid.size)


def integrate_radial(fn: Callable[[np.ndarray], np.ndarray], spec: GridSpec) -> QuadratureValue:
    """∫_{|z|<=r_max} F(|z|) dA for a radial integrand given as F(r)."""

    def run(s: GridSpec) -> float:
        r, w = radial_rule(s)
        values = np.asarray(fn(r), dtype=float)
        if not np.all(np.isfinite(values)):
            raise ParameterError("integrand", "non-finite radial integrand values")
        return float(np.sum(values * w))

    coarse = run(spec)
    fine = run(spec.refined())
    return QuadratureValue(fine, abs(fine - coarse), spec.r_max, radial_rule(spec.refined())[0].size)


def sweep_trend(values: Sequence[float], threshold: float = 0.10, steps: int = 3) -> Tuple[bool, float]:
    """Decide divergence from values on an increasing clip sweep.

    Divergent when the relative growth is at least ``threshold`` for ``steps``
    consecutive steps. Returns (diverging, last relative growth).
    """
    vals = np.asarray(values, dtype=float)
    if vals.size < 2:
        return False, 0.0
    growth = np.diff(vals) / np.maximum(np.abs(vals[:-1]), np.finfo(float).tiny)
    run = 0
    longest = 0
    for g in growth:
        run = run + 1 if g >= threshold else 0
        longest = max(longest, run)
    return longest >= steps, float(growth[-1])


def ring_slices(grid: QuadratureGrid) -> List[Tuple[float, slice]]:
    """(radius, node slice) for every ring; nodes of a ring are stored contiguously."""
    if grid.size == 0:
        return []
    cuts = np.flatnonzero(np.diff(grid.radius)) + 1
    starts = np.concatenate(([0], cuts))
    stops = np.concatenate((cuts, [grid.size]))
    return [(float(grid.radius[a]), slice(int(a), int(b))) for a, b in zip(starts, stops)]


def ring_mean(fn: Callable[[np.ndarray], np.ndarray], r: float, spec: GridSpec) -> float:
    """Mean of ``fn`` over the circle |z| = r with the grid's angular rule at that radius."""
    panel = int(math.floor(math.log2(1.0 / (1.0 - r)) / spec.level_step)) if r < 1.0 else 0
    theta, wt = _angular_rule(r, panel, spec)
    values = np.asarray(fn(r * np.exp(1j * theta)), dtype=float)
    return float(np.sum(values * wt) / (2.0 * math.pi))


def clip_remainder(edge_mean: float, r_max: float, exponent: float) -> float:
    """∫_{|z|>r_max} F dA for F ≈ edge_mean · ((1-|z|²)/(1-r_max²))^exponent."""
    if edge_mean == 0.0 or r_max >= 1.0:
        return 0.0
    if exponent <= -1.0:
        return math.inf
    return edge_mean * (1.0 - r_max * r_max) / (exponent + 1.0)
