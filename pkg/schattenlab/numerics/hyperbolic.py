"""Hyperbolic geometry of the disk: Möbius maps, the Bergman metric, r-lattices and measures.

The Bergman metric is β(z, w) = ½ log((1+ρ)/(1-ρ)) = artanh ρ with
ρ = |z - w| / |1 - w̄z| the pseudo-hyperbolic distance. Hyperbolic disks
D(a, r) = {z : β(a, z) < r} are Euclidean disks, which makes membership a
closed-form test.

Lattices are built ring by ring: ring k sits at hyperbolic radius k·r/2 and
carries as many equally spaced points as fit at mutual distance r/2. Every point
of the disk is then within r/4 (radially) + r/2 (along the ring) of the lattice,
and the rings themselves are r/2 apart.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid

from ..core.errors import LatticeVerificationError, ParameterError, require
from .quadrature import GridSpec, build_grid

logger = logging.getLogger(__name__)

_SEPARATION_SLACK = 1e-12


# -------------------- Metric --------------------


def _as_disk_points(name: str, z: Any) -> np.ndarray:
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)) or np.any(np.abs(arr) >= 1.0):
        raise ParameterError(name, "points must lie in the open unit disk")
    return arr


def mobius_map(a: complex, z: Any) -> np.ndarray:
    """φ_a(z) = (a - z) / (1 - āz), the involution swapping a and 0."""
    a = complex(_as_disk_points("a", a))
    z = _as_disk_points("z", z)
    return (a - z) / (1.0 - np.conj(a) * z)


def mobius(a: complex) -> Callable[[Any], np.ndarray]:
    """Curried form: ``mobius(a)(z)``."""
    _as_disk_points("a", a)
    return partial(mobius_map, complex(a))


def pseudo_hyperbolic(z: Any, w: Any) -> np.ndarray:
    z = _as_disk_points("z", z)
    w = _as_disk_points("w", w)
    return np.abs(z - w) / np.abs(1.0 - np.conj(w) * z)


def bergman_metric(z: Any, w: Any) -> Union[float, np.ndarray]:
    """β(z, w); scalar in, scalar out."""
    rho = np.minimum(pseudo_hyperbolic(z, w), 1.0 - 1e-17)
    out = np.arctanh(rho)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class HyperbolicDisk:
    """D(center, r) described as a Euclidean disk."""

    center: complex
    r: float

    @property
    def euclidean(self) -> Tuple[complex, float]:
        rho = math.tanh(self.r)
        a = self.center
        s = abs(a) ** 2
        denom = 1.0 - rho**2 * s
        return a * (1.0 - rho**2) / denom, rho * (1.0 - s) / denom

    def contains(self, z: Any) -> np.ndarray:
        return pseudo_hyperbolic(z, self.center) < math.tanh(self.r)


# -------------------- Lattices --------------------


def _ring_count(t: float, rho: float) -> int:
    # angular step at which two points of the ring |z| = t are pseudo-distance rho apart
    cos_sep = (2.0 * t * t - rho * rho * (1.0 + t**4)) / (2.0 * t * t * (1.0 - rho * rho))
    if cos_sep <= -1.0:
        return 2
    sep = math.acos(min(cos_sep, 1.0))
    return max(2, int(math.floor(2.0 * math.pi / sep)))


def _count_threshold(s: np.ndarray, t: float, P: float) -> np.ndarray:
    """cos(θ_z - θ_a) must exceed this for |a| = t to be within pseudo-distance √P of |z| = s."""
    st = s * t
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (s * s + t * t - P * (1.0 + st * st)) / (2.0 * st * (1.0 - P))
    return np.where(st > 0, c, np.where(s * s + t * t < P, -np.inf, np.inf))


@dataclass(frozen=True)
class LatticeReport:
    covered: bool
    min_separation: float
    multiplicity: Dict[float, int]
    probes: int
    witness: Optional[complex] = None

    @property
    def ok(self) -> bool:
        return self.covered and self.min_separation >= 0.0 and self.witness is None


@dataclass(frozen=True, eq=False)
class Lattice:
    """Points a_k with the disks D(a_k, r).

    Ring lattices keep their ring structure (``ring_radii``, ``ring_counts``,
    ``ring_offsets``) so that neighbor searches only touch a few rings; lattices
    from :meth:`from_points` fall back to brute force.
    """

    r: float
    r_max: float
    points: np.ndarray = field(repr=False)
    ring_radii: Optional[np.ndarray] = field(default=None, repr=False)
    ring_counts: Optional[np.ndarray] = field(default=None, repr=False)
    ring_offsets: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def from_points(cls, points: Sequence[complex], r: float, r_max: float = 0.0) -> "Lattice":
        pts = _as_disk_points("points", np.atleast_1d(points))
        require(r > 0, "r", "must be positive")
        reach = float(np.max(np.abs(pts))) if pts.size else 0.0
        return cls(r=float(r), r_max=max(r_max, reach), points=pts)

    @property
    def size(self) -> int:
        return int(self.points.size)

    @property
    def ring_structured(self) -> bool:
        return self.ring_radii is not None

    def disks(self) -> List[HyperbolicDisk]:
        return [HyperbolicDisk(complex(a), self.r) for a in self.points]

    def _ring_starts(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum(self.ring_counts)[:-1]))

    def _ring_window(self, k: int, z: np.ndarray, R: float) -> Tuple[np.ndarray, np.ndarray]:
        """Index range [lo, hi] (unwrapped) of ring-k points within β < R of each z."""
        t = float(self.ring_radii[k])
        n = int(self.ring_counts[k])
        s = np.abs(z)
        c = _count_threshold(s, t, math.tanh(R) ** 2)
        width = np.arccos(np.clip(c, -1.0, 1.0))
        full = c <= -1.0
        empty = c > 1.0
        theta = np.angle(z) - self.ring_offsets[k]
        step = 2.0 * math.pi / n
        lo = np.ceil((theta - width) / step - 1e-12).astype(np.int64)
        hi = np.floor((theta + width) / step + 1e-12).astype(np.int64)
        hi = np.where(full, lo + n - 1, hi)
        hi = np.where(empty, lo - 1, np.minimum(hi, lo + n - 1))
        return lo, hi

    def _candidate_rings(self, s: float, R: float) -> range:
        depth = math.atanh(min(s, 1.0 - 1e-16))
        half = self.r / 2.0
        k_lo = max(0, int(math.floor((depth - R) / half)) - 1)
        k_hi = min(self.ring_radii.size - 1, int(math.ceil((depth + R) / half)) + 1)
        return range(k_lo, k_hi + 1)

    def neighbors(self, z: complex, R: Optional[float] = None) -> np.ndarray:
        """Indices k with β(a_k, z) < R (R defaults to r)."""
        R = self.r if R is None else R
        z = complex(_as_disk_points("z", z))
        if not self.ring_structured:
            return np.nonzero(pseudo_hyperbolic(self.points, z) < math.tanh(R))[0]
        found: List[np.ndarray] = []
        starts = self._ring_starts()
        for k in self._candidate_rings(abs(z), R):
            lo, hi = self._ring_window(k, np.array([z]), R)
            if hi[0] >= lo[0]:
                m = np.arange(lo[0], hi[0] + 1) % int(self.ring_counts[k])
                found.append(starts[k] + m)
        if not found:
            return np.zeros(0, dtype=np.int64)
        idx = np.unique(np.concatenate(found))
        # the cosine window is exact, the recheck only trims rounding at the rim
        return idx[pseudo_hyperbolic(self.points[idx], z) < math.tanh(R) + 1e-12]

    def counts(self, z: np.ndarray, R: float) -> np.ndarray:
        """Number of lattice points within β < R of each probe point."""
        z = _as_disk_points("z", np.atleast_1d(z))
        if not self.ring_structured:
            out = np.zeros(z.size, dtype=np.int64)
            thr = math.tanh(R)
            for i in range(0, z.size, 2048):
                block = z[i : i + 2048]
                out[i : i + 2048] = np.sum(
                    pseudo_hyperbolic(block[:, None], self.points[None, :]) < thr, axis=1
                )
            return out
        out = np.zeros(z.size, dtype=np.int64)
        depth = np.arctanh(np.minimum(np.abs(z), 1.0 - 1e-16))
        half = self.r / 2.0
        for k in range(self.ring_radii.size):
            near = np.abs(depth - k * half) < R + half
            if not np.any(near):
                continue
            lo, hi = self._ring_window(k, z[near], R)
            out[near] += np.maximum(hi - lo + 1, 0)
        return out

    def multiplicity(self, probes: np.ndarray, R: float) -> int:
        """Largest number of disks D(a_k, R) sharing a probe point."""
        return int(np.max(self.counts(probes, R))) if np.size(probes) else 0

    def min_separation(self) -> Tuple[float, Optional[complex]]:
        """Smallest pairwise β and one of the points realizing it."""
        if self.size < 2:
            return math.inf, None
        if not self.ring_structured:
            best, witness = math.inf, None
            for i in range(self.size - 1):
                d = np.arctanh(np.minimum(pseudo_hyperbolic(self.points[i + 1 :], self.points[i]),
                                          1.0 - 1e-17))
                j = int(np.argmin(d))
                if d[j] < best:
                    best, witness = float(d[j]), complex(self.points[i])
            return best, witness
        best, witness = math.inf, None
        starts = self._ring_starts()
        for k in range(1, self.ring_radii.size):
            ring = self.points[starts[k] : starts[k] + self.ring_counts[k]]
            if ring.size > 1:
                d = bergman_metric(ring[0], ring[1])
                if d < best:
                    best, witness = d, complex(ring[0])
            # the angularly nearest points of the previous ring
            n_prev = int(self.ring_counts[k - 1])
            prev = self.points[starts[k - 1] : starts[k - 1] + n_prev]
            step = 2.0 * math.pi / n_prev
            m = np.round((np.angle(ring) - self.ring_offsets[k - 1]) / step).astype(np.int64)
            for shift in (-1, 0, 1):
                d = np.arctanh(np.minimum(pseudo_hyperbolic(ring, prev[(m + shift) % n_prev]),
                                          1.0 - 1e-17))
                i = int(np.argmin(d))
                if d[i] < best:
                    best, witness = float(d[i]), complex(ring[i])
        return best, witness

    def verify(self, probes: Optional[np.ndarray] = None,
               radii: Sequence[float] = ()) -> LatticeReport:
        """Check covering, separation and multiplicity on a probe set.

        Raises:
            LatticeVerificationError: with the first uncovered probe or the closest pair.
        """
        probes = probe_points(self.r, self.r_max) if probes is None else np.asarray(probes, dtype=complex)
        hits = self.counts(probes, self.r)
        holes = np.nonzero(hits == 0)[0]
        sep, sep_witness = self.min_separation()
        mult = {float(R): self.multiplicity(probes, R) for R in (radii or (self.r, 2.0 * self.r))}
        if holes.size:
            witness = complex(probes[holes[0]])
            raise LatticeVerificationError(
                f"covering hole at {witness:.6g}", witness=witness, holes=int(holes.size)
            )
        if sep < self.r / 2.0 - _SEPARATION_SLACK:
            raise LatticeVerificationError(
                f"separation {sep:.6g} < r/2 = {self.r / 2:.6g}", witness=sep_witness, separation=sep
            )
        logger.info("lattice r=%g: %d points, %d probes, min β=%.4g, multiplicity %s",
                    self.r, self.size, probes.size, sep, mult)
        return LatticeReport(True, sep, mult, int(probes.size))


def _ring_lattice(r: float, r_max: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    rho = math.tanh(r / 2.0)
    radii = [0.0]
    counts = [1]
    offsets = [0.0]
    pts = [np.zeros(1, dtype=complex)]
    k = 1
    depth_max = math.atanh(r_max)
    while True:
        t = math.tanh(k * r / 2.0)
        if t >= 1.0:
            break
        n = _ring_count(t, rho)
        offset = math.pi / n if k % 2 else 0.0
        radii.append(t)
        counts.append(n)
        offsets.append(offset)
        pts.append(t * np.exp(1j * (offset + 2.0 * math.pi * np.arange(n) / n)))
        if k * r / 2.0 >= depth_max + r / 2.0:
            break
        k += 1
    return np.concatenate(pts), np.array(radii), np.array(counts), np.array(offsets)


def build_lattice(r: float, r_max: float, verify: bool = True,
                  probes: Optional[np.ndarray] = None) -> Lattice:
    """Ring lattice covering |z| <= r_max with disks of hyperbolic radius r."""
    require(0.0 < r <= 2.0, "r", f"must lie in (0, 2], got {r}")
    require(0.0 < r_max < 1.0, "r_max", f"must lie in (0, 1), got {r_max}")
    points, radii, counts, offsets = _ring_lattice(r, r_max)
    lat = Lattice(r=float(r), r_max=float(r_max), points=points, ring_radii=radii,
                  ring_counts=counts, ring_offsets=offsets)
    logger.debug("ring lattice r=%g r_max=%.6g: %d rings, %d points", r, r_max, radii.size, lat.size)
    if verify:
        lat.verify(probes)
    return lat


def probe_points(r: float, r_max: float, density: int = 4) -> np.ndarray:
    """Boundary-graded probes: rings every r/(2·density) in β, angular spacing to match."""
    step = r / (2.0 * density)
    rho = math.tanh(step)
    out = [np.zeros(1, dtype=complex)]
    depth = step
    depth_max = math.atanh(r_max)
    while depth <= depth_max + 1e-12:
        t = math.tanh(depth)
        n = _ring_count(t, rho)
        out.append(t * np.exp(1j * (2.0 * math.pi * (np.arange(n) + 0.25) / n)))
        depth += step
    return np.concatenate(out)


def ring_growth(lattice: Lattice) -> Dict[str, float]:
    """Point count against 1/(1 - r_max); the exponent is measured, not assumed."""
    scale = 1.0 / (1.0 - lattice.r_max)
    return {"points": float(lattice.size), "scale": scale,
            "exponent": math.log(lattice.size) / math.log(scale) if scale > 1 else 0.0}


# -------------------- Measures --------------------


class MeasureKind(str, Enum):
    ATOMIC = "atomic"
    RADIAL_DENSITY = "radial_density"
    GRID_DENSITY = "grid_density"


@dataclass(frozen=True, eq=False)
class MeasureRep:
    """A finite positive measure on the disk.

    Densities are taken against the normalized area measure dA.
    """

    kind: MeasureKind
    atoms: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex), repr=False)
    masses: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    radii: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    density: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    grid_spec: Optional[GridSpec] = None
    grid_values: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    @classmethod
    def atomic(cls, points: Sequence[complex], weights: Sequence[float]) -> "MeasureRep":
        pts = np.atleast_1d(np.asarray(points, dtype=complex))
        w = np.atleast_1d(np.asarray(weights, dtype=float))
        require(pts.shape == w.shape, "weights", "need one weight per atom")
        if np.any(np.abs(pts) >= 1.0) or not np.all(np.isfinite(pts)):
            raise ParameterError("atoms", "atom on or outside the unit circle")
        require(bool(np.all(w >= 0.0)) and bool(np.all(np.isfinite(w))), "weights",
                "atom weights must be finite and nonnegative")
        return cls(MeasureKind.ATOMIC, atoms=pts, masses=w)

    @classmethod
    def zero(cls) -> "MeasureRep":
        return cls.atomic([], [])

    @classmethod
    def dirac(cls, a: complex, mass: float = 1.0) -> "MeasureRep":
        return cls.atomic([a], [mass])

    @classmethod
    def radial(cls, radii: Sequence[float], density: Sequence[float]) -> "MeasureRep":
        r = np.asarray(radii, dtype=float)
        rho = np.asarray(density, dtype=float)
        require(r.ndim == 1 and r.size >= 2 and r.shape == rho.shape, "density",
                "need at least two (radius, density) samples")
        require(bool(np.all(np.diff(r) > 0)) and r[0] >= 0.0 and r[-1] < 1.0, "radii",
                "radii must increase within [0, 1)")
        require(bool(np.all(rho >= 0.0)) and bool(np.all(np.isfinite(rho))), "density",
                "density samples must be finite and nonnegative")
        return cls(MeasureKind.RADIAL_DENSITY, radii=r, density=rho)

    @classmethod
    def on_grid(cls, spec: GridSpec, values: Sequence[float]) -> "MeasureRep":
        v = np.asarray(values, dtype=float)
        require(v.size == build_grid(spec).size, "values", "need one density value per grid node")
        require(bool(np.all(v >= 0.0)) and bool(np.all(np.isfinite(v))), "values",
                "density values must be finite and nonnegative")
        return cls(MeasureKind.GRID_DENSITY, grid_spec=spec, grid_values=v)

    @property
    def is_atomic(self) -> bool:
        return self.kind is MeasureKind.ATOMIC

    @property
    def total_mass(self) -> float:
        if self.kind is MeasureKind.ATOMIC:
            return float(np.sum(self.masses))
        if self.kind is MeasureKind.RADIAL_DENSITY:
            return float(trapezoid(2.0 * self.radii * self.density, self.radii))
        return float(np.sum(self.grid_values * build_grid(self.grid_spec).weights))

    @property
    def label(self) -> str:
        if self.is_atomic:
            return f"atomic[{self.atoms.size}]"
        return self.kind.value

    def scaled(self, c: float) -> "MeasureRep":
        require(c >= 0.0, "c", "measures scale by nonnegative factors")
        if self.kind is MeasureKind.ATOMIC:
            return MeasureRep.atomic(self.atoms, c * self.masses)
        if self.kind is MeasureKind.RADIAL_DENSITY:
            return MeasureRep.radial(self.radii, c * self.density)
        return MeasureRep.on_grid(self.grid_spec, c * self.grid_values)

    def to_atoms(self, spec: Optional[GridSpec] = None) -> Tuple[np.ndarray, np.ndarray]:
        """(points, weights) with Σ weights f(points) ≈ ∫ f dμ; exact for atomic measures."""
        if self.kind is MeasureKind.ATOMIC:
            return self.atoms, self.masses
        if self.kind is MeasureKind.GRID_DENSITY:
            grid = build_grid(self.grid_spec)
            return grid.nodes, grid.weights * self.grid_values
        spec = spec or GridSpec()
        grid = build_grid(spec.with_clip(min(spec.r_max, float(self.radii[-1]))))
        rho = np.interp(grid.radius, self.radii, self.density, left=self.density[0], right=0.0)
        keep = rho > 0
        return grid.nodes[keep], (grid.weights * rho)[keep]

    def to_dict(self) -> Dict[str, Any]:
        if self.kind is MeasureKind.ATOMIC:
            return {"atoms": [[z.real, z.imag, w] for z, w in zip(self.atoms, self.masses)]}
        if self.kind is MeasureKind.RADIAL_DENSITY:
            return {"radial": {"r": self.radii.tolist(), "density": self.density.tolist()}}
        return {"grid": {"spec": self.grid_spec.to_dict(), "values": self.grid_values.tolist()}}


def measure_from_json(source: Union[str, Path, Dict[str, Any]]) -> MeasureRep:
    """Read ``{"atoms": [[re, im, w], ...]}`` or ``{"radial": {"r": [...], "density": [...]}}``."""
    if isinstance(source, dict):
        data = source
    else:
        text = str(source)
        path = Path(text)
        try:
            data = json.loads(path.read_text(encoding="utf-8") if path.exists() else text)
        except json.JSONDecodeError as exc:
            raise ParameterError("measure", f"invalid JSON: {exc}") from exc
    if "atoms" in data:
        rows = data["atoms"]
        if not rows:
            return MeasureRep.zero()
        arr = np.asarray(rows, dtype=float)
        require(arr.ndim == 2 and arr.shape[1] == 3, "atoms", "each atom is [re, im, weight]")
        return MeasureRep.atomic(arr[:, 0] + 1j * arr[:, 1], arr[:, 2])
    if "radial" in data:
        return MeasureRep.radial(data["radial"]["r"], data["radial"]["density"])
    raise ParameterError("measure", "expected an 'atoms' list or 'radial' samples")


# -------------------- Luecking sums --------------------


def disk_masses(mu: MeasureRep, lattice: Lattice, grid: Optional[GridSpec] = None) -> np.ndarray:
    """μ(D(a_j, r)) for every lattice point; node membership for densities."""
    points, weights = mu.to_atoms(grid)
    masses = np.zeros(lattice.size)
    for z, w in zip(points, weights):
        if w == 0.0:
            continue
        idx = lattice.neighbors(complex(z))
        masses[idx] += w
    return masses


def luecking_sum(mu: MeasureRep, lattice: Lattice, alpha: float, p: float,
                 grid: Optional[GridSpec] = None) -> float:
    """Σ_j (μ(D_j) / (1 - |a_j|)^α)^p."""
    require(p > 0, "p", f"must be positive, got {p}")
    require(alpha >= 0, "alpha", f"must be >= 0, got {alpha}")
    masses = disk_masses(mu, lattice, grid)
    hit = masses > 0
    if not np.any(hit):
        return 0.0
    terms = (masses[hit] / (1.0 - np.abs(lattice.points[hit])) ** alpha) ** p
    return float(np.sum(np.sort(terms)))
