import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from schattenlab.core.errors import ParameterError
from schattenlab.numerics.quadrature import (
    DEFAULT_CLIP,
    DIVERGENCE_SWEEP,
    GridSpec,
    build_grid,
    clip_remainder,
    integrate_disk,
    integrate_radial,
    ring_mean,
    ring_slices,
    sweep_trend,
)


class TestGridSpec:
    def test_defaults(self):
        spec = GridSpec()
        assert spec.r_max == DEFAULT_CLIP == 1.0 - 2.0**-12
        assert spec.clipped
        assert not GridSpec(r_max=1.0).clipped

    def test_refine_then_coarsen(self):
        spec = GridSpec()
        assert spec.refined().coarsened() == spec
        assert spec.refined().level_step == 0.25

    def test_rejects_bad_parameters(self):
        with pytest.raises(ParameterError):
            GridSpec(r_max=1.5)
        with pytest.raises(ParameterError):
            GridSpec(r_max=0.0)
        with pytest.raises(ParameterError):
            GridSpec(focus=(1.0,))
        with pytest.raises(ParameterError):
            GridSpec(level_step=0.0)

    def test_with_focus_drops_origin(self):
        assert GridSpec().with_focus(0.0, 0.5j).focus == (0.5j,)

    def test_divergence_sweep_increasing(self):
        assert list(DIVERGENCE_SWEEP) == sorted(DIVERGENCE_SWEEP)
        assert DIVERGENCE_SWEEP[-1] < 1.0


class TestIntegration:
    @pytest.mark.parametrize("r_max", [0.5, 0.9, 1.0 - 2.0**-12, 1.0])
    def test_weights_sum_to_area(self, r_max):
        assert build_grid(GridSpec(r_max=r_max)).area == pytest.approx(r_max**2, rel=1e-13)

    def test_radial_moment(self, full_disk):
        res = integrate_disk(lambda z: np.abs(z) ** 2, full_disk)
        assert res.value == pytest.approx(0.5, rel=1e-12)
        assert res.r_max == 1.0
        assert res.nodes > 0

    def test_angular_moment(self, full_disk):
        res = integrate_disk(lambda z: z.real**2, full_disk)
        assert res.value == pytest.approx(0.25, rel=1e-12)

    def test_focused_grid(self):
        spec = GridSpec(r_max=0.9, focus=(0.5 + 0.5j,))
        res = integrate_disk(lambda z: np.abs(z) ** 2, spec)
        assert res.value == pytest.approx(0.9**4 / 2.0, rel=1e-12)

    def test_radial_rule(self, full_disk):
        res = integrate_radial(lambda r: r**2, full_disk)
        assert res.value == pytest.approx(0.5, rel=1e-13)

    def test_executor_does_not_change_result(self):
        grid = build_grid(GridSpec())
        fn = lambda z: 1.0 / np.abs(1.0 - 0.7 * z) ** 2  # noqa: E731
        serial = grid.integrate(fn)
        with ThreadPoolExecutor(max_workers=4) as pool:
            assert grid.integrate(fn, pool) == serial

    def test_non_finite_integrand(self):
        grid = build_grid(GridSpec(r_max=0.5))
        with pytest.raises(ParameterError):
            grid.integrate(lambda z: np.full(z.shape, np.nan))

    def test_ring_slices_cover_grid(self):
        grid = build_grid(GridSpec(r_max=0.9))
        rings = ring_slices(grid)
        assert sum(sl.stop - sl.start for _, sl in rings) == grid.size
        radii = [r for r, _ in rings]
        assert radii == sorted(radii)

    def test_ring_mean(self):
        assert ring_mean(lambda z: z.real**2, 0.5, GridSpec()) == pytest.approx(0.125, rel=1e-12)


class TestSweepTrend:
    def test_doubling_diverges(self):
        assert sweep_trend([1.0, 2.0, 4.0, 8.0]) == (True, 1.0)

    def test_slow_growth_converges(self):
        diverging, growth = sweep_trend([1.0, 1.01, 1.02, 1.03])
        assert not diverging
        assert growth == pytest.approx(0.01 / 1.02)

    def test_growth_must_be_consecutive(self):
        assert not sweep_trend([1.0, 2.0, 2.0, 4.0, 8.0])[0]

    def test_single_value(self):
        assert sweep_trend([3.0]) == (False, 0.0)


class TestClipRemainder:
    def test_model(self):
        assert clip_remainder(2.0, 0.5, 0.0) == pytest.approx(1.5)
        assert clip_remainder(1.0, 0.5, 1.0) == pytest.approx(0.375)

    def test_degenerate_cases(self):
        assert clip_remainder(1.0, 0.5, -1.0) == math.inf
        assert clip_remainder(1.0, 1.0, 0.0) == 0.0
        assert clip_remainder(0.0, 0.5, -2.0) == 0.0
