import cmath
import math

import numpy as np
import pytest

from schattenlab.core.errors import LatticeVerificationError, ParameterError
from schattenlab.numerics.hyperbolic import (
    HyperbolicDisk,
    Lattice,
    MeasureRep,
    bergman_metric,
    build_lattice,
    luecking_sum,
    measure_from_json,
    mobius,
    mobius_map,
    probe_points,
    pseudo_hyperbolic,
)


class TestMetric:
    def test_distance_from_origin(self):
        assert bergman_metric(0.0, 0.6) == pytest.approx(math.log(2.0))

    def test_mobius_invariance(self):
        rng = np.random.default_rng(7)
        z = 0.9 * rng.random(20) * np.exp(2j * np.pi * rng.random(20))
        w = 0.9 * rng.random(20) * np.exp(2j * np.pi * rng.random(20))
        phi = mobius(0.3 - 0.4j)
        np.testing.assert_allclose(pseudo_hyperbolic(phi(z), phi(w)), pseudo_hyperbolic(z, w), atol=1e-10)

    def test_mobius_swaps_a_and_origin(self):
        a = 0.5 + 0.2j
        phi = mobius(a)
        assert abs(phi(a)) < 1e-15
        assert complex(phi(0.0)) == pytest.approx(a)
        assert complex(phi(phi(0.1 - 0.3j))) == pytest.approx(0.1 - 0.3j)

    def test_points_outside_disk_rejected(self):
        with pytest.raises(ParameterError):
            mobius_map(0.5, 1.0)

    def test_disk_boundary(self):
        disk = HyperbolicDisk(0.5 + 0j, 0.7)
        c, R = disk.euclidean
        for theta in np.linspace(0.0, 2.0 * math.pi, 9):
            assert bergman_metric(c + R * cmath.exp(1j * theta), 0.5) == pytest.approx(0.7, abs=1e-9)
        assert disk.contains(0.5)


class TestLattice:
    def test_ring_lattice_verifies(self):
        lat = build_lattice(1.0, 0.9)
        assert lat.points[0] == 0
        assert lat.ring_structured
        report = lat.verify()
        assert report.ok
        assert report.min_separation >= 0.5 - 1e-9

    def test_ring_separation_matches_brute_force(self):
        lat = build_lattice(1.0, 0.9)
        brute = Lattice.from_points(lat.points, r=1.0)
        assert lat.min_separation()[0] == pytest.approx(brute.min_separation()[0], rel=1e-9)

    def test_neighbors_agree_with_brute_force(self):
        lat = build_lattice(0.8, 0.9)
        brute = Lattice.from_points(lat.points, r=0.8)
        for z in (0.0, 0.45 + 0.3j, -0.85j):
            assert sorted(lat.neighbors(z)) == sorted(brute.neighbors(z))

    def test_probes_start_at_origin(self):
        assert probe_points(1.0, 0.5)[0] == 0

    def test_covering_hole(self):
        with pytest.raises(LatticeVerificationError) as info:
            Lattice.from_points([0j], r=0.5, r_max=0.9).verify()
        assert info.value.witness is not None

    def test_separation_violation(self):
        with pytest.raises(LatticeVerificationError, match="separation"):
            Lattice.from_points([0j, 0.01 + 0j], r=2.0, r_max=0.01).verify()

    def test_rejects_bad_radius(self):
        with pytest.raises(ParameterError):
            build_lattice(0.0, 0.9)


class TestMeasures:
    def test_atomic_validation(self):
        with pytest.raises(ParameterError):
            MeasureRep.atomic([1.0], [1.0])
        with pytest.raises(ParameterError):
            MeasureRep.atomic([0.5], [-1.0])

    def test_radial_total_mass(self):
        mu = MeasureRep.radial([0.0, 0.5, 0.9], [1.0, 1.0, 1.0])
        assert mu.total_mass == pytest.approx(0.81)
        assert not mu.is_atomic

    def test_scaled(self):
        assert MeasureRep.dirac(0.2, 2.0).scaled(3.0).total_mass == pytest.approx(6.0)

    def test_from_json(self):
        mu = measure_from_json({"atoms": [[0.5, 0.0, 1.0]]})
        assert mu.is_atomic
        assert mu.total_mass == pytest.approx(1.0)
        assert measure_from_json('{"atoms": []}').total_mass == 0.0

    def test_from_json_rejects_unknown_layout(self):
        with pytest.raises(ParameterError):
            measure_from_json({"points": []})
        with pytest.raises(ParameterError):
            measure_from_json("{not json")


class TestLueckingSum:
    @pytest.fixture
    def lattice(self):
        return Lattice.from_points([0j, 0.9 + 0j, -0.9 + 0j], r=0.5)

    def test_dirac_at_origin(self, lattice):
        assert luecking_sum(MeasureRep.dirac(0.0), lattice, 0.5, 1.0) == pytest.approx(1.0)
        assert luecking_sum(MeasureRep.dirac(0.0, 2.0), lattice, 0.5, 2.0) == pytest.approx(4.0)

    def test_weight_near_boundary(self, lattice):
        value = luecking_sum(MeasureRep.dirac(0.9), lattice, 0.5, 1.0)
        assert value == pytest.approx(1.0 / math.sqrt(0.1))

    def test_zero_measure(self, lattice):
        assert luecking_sum(MeasureRep.zero(), lattice, 0.5, 1.0) == 0.0
