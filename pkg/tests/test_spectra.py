import math

import numpy as np
import pytest

from schattenlab.core.errors import ParameterError
from schattenlab.numerics.operators import assemble_tg
from schattenlab.numerics.quadrature import GridSpec
from schattenlab.numerics.spaces import InnerProductMode, Symbol
from schattenlab.numerics.spectra import (
    ProbeKind,
    SchattenOrder,
    Spectrum,
    berezin_functional,
    berezin_p2_exact,
    berezin_sandwich,
    frame_lower_bound_check,
    frame_partial_sums,
    monomial_spectrum_closed_form,
    schatten_norm,
    singular_values,
)


class TestSpectrum:
    def test_diagonal_matrix(self):
        s = singular_values(np.diag([3.0, 4.0]))
        np.testing.assert_allclose(s.values, [4.0, 3.0])
        assert s.top == pytest.approx(4.0)
        assert s.schatten_sum(1.0) == pytest.approx(7.0)
        assert s.schatten_sum(2.0) == pytest.approx(25.0)
        assert len(s) == 2

    def test_partial_sums_are_cumulative(self):
        s = Spectrum(np.array([3.0, 2.0, 1.0]))
        np.testing.assert_allclose(s.partial_sums(2.0), [9.0, 13.0, 14.0])

    def test_unsorted_values_rejected(self):
        with pytest.raises(ParameterError):
            Spectrum(np.array([1.0, 2.0]))

    @pytest.mark.parametrize("p", [0.0, -1.0])
    def test_order_must_be_positive(self, p):
        with pytest.raises(ParameterError):
            SchattenOrder(p)

    def test_top_of_tz(self):
        assert singular_values(assemble_tg(Symbol.monomial(1), 0.0, 3)).top == pytest.approx(math.sqrt(2.0))

    def test_norm_enclosure(self):
        m = assemble_tg(Symbol.monomial(2), 0.5, 64)
        res = schatten_norm(singular_values(m, orders=[2.0]), 2.0)
        assert res.lower <= res.upper
        assert res.partial_sum ** 0.5 == pytest.approx(res.value)
        assert not res.heuristic


class TestClosedForm:
    @pytest.mark.parametrize("j", [1, 3, 7])
    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
    def test_svd_matches_closed_form(self, j, alpha):
        N = 64
        svd = singular_values(assemble_tg(Symbol.monomial(j), alpha, N)).values
        closed = monomial_spectrum_closed_form(j, alpha, N).values
        assert svd.size == closed.size
        np.testing.assert_allclose(svd, closed, rtol=1e-10, atol=1e-12)

    def test_closed_form_tail_shrinks(self):
        s = monomial_spectrum_closed_form(2, 0.5, 256)
        assert s.tail(3.0).bound < monomial_spectrum_closed_form(2, 0.5, 64).tail(3.0).bound


class TestBerezin:
    def test_p2_matches_exact_value(self):
        m = assemble_tg(Symbol.monomial(1), 0.0, 32, InnerProductMode.INTEGRAL)
        exact = berezin_p2_exact(m)
        assert exact == pytest.approx(0.96875)
        value = berezin_functional(m, 2.0, ProbeKind.J_NORMALIZED, GridSpec())
        assert value.value + value.clip_remainder == pytest.approx(exact, rel=1e-4)

    def test_exact_value_needs_integral_mode(self):
        assert berezin_p2_exact(assemble_tg(Symbol.monomial(1), 0.0, 8)) is None

    def test_requires_clipped_grid(self, full_disk):
        m = assemble_tg(Symbol.monomial(1), 0.0, 8)
        with pytest.raises(ParameterError):
            berezin_functional(m, 2.0, grid=full_disk)

    def test_wrong_probe_for_domain(self):
        m = assemble_tg(Symbol.monomial(1), 0.0, 8)
        with pytest.raises(ParameterError):
            berezin_functional(m, 2.0, ProbeKind.BERGMAN_NORMALIZED)

    def test_sandwich_holds_at_p2(self):
        m = assemble_tg(Symbol.monomial(1), 0.0, 32, InnerProductMode.INTEGRAL)
        check = berezin_sandwich(m, 2.0)
        assert check.holds
        assert check.inequality == "upper+lower"


class TestFrame:
    def test_sum_vanishes_at_origin(self):
        assert frame_partial_sums(0.5, 1.5, 16, np.array([0.0]))[0] == 0.0

    def test_partial_sums_nondecreasing(self):
        report = frame_lower_bound_check(0.0, 1.0, 64)
        assert report.nondecreasing
        assert report.min_ratio > 0.0

    def test_rejects_p2(self):
        with pytest.raises(ParameterError):
            frame_lower_bound_check(0.0, 2.0, 64)
