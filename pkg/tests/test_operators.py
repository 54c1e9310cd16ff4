import math

import numpy as np
import pytest

from schattenlab.core.errors import ParameterError, TruncationError
from schattenlab.numerics.hyperbolic import MeasureRep
from schattenlab.numerics.operators import (
    OperatorKind,
    assemble_bergman_multiplication,
    assemble_mgprime,
    assemble_mgsecond,
    assemble_monomial_multiplication,
    assemble_tg,
    assemble_toeplitz,
    operator_from_spec,
    power_tail_sum,
    truncation_report,
)
from schattenlab.numerics.spaces import InnerProductMode, Symbol
from schattenlab.numerics.spectra import multiplication_monomial_spectrum, singular_values


class TestIntegrationOperator:
    def test_entries_of_tz(self):
        m = assemble_tg(Symbol.monomial(1), 0.0, 4)
        assert m.dense()[1, 0].real == pytest.approx(math.sqrt(2.0))
        assert m.shape == (5, 5)
        assert m.spec.kind is OperatorKind.INTEGRATION_TG

    def test_entries_of_tz2(self):
        assert assemble_tg(Symbol.monomial(2), 0.0, 4).dense()[2, 0].real == pytest.approx(math.sqrt(3.0))

    def test_strictly_lower_triangular(self):
        dense = assemble_tg(Symbol.taylor([1.0, 0.5, 0.25, 0.125]), 0.3, 16).dense()
        np.testing.assert_array_equal(np.triu(dense), 0)

    def test_linear_in_the_symbol(self):
        N, alpha = 24, 0.5
        total = assemble_tg(Symbol.monomial(1), alpha, N) + assemble_tg(Symbol.monomial(2), alpha, N)
        joint = assemble_tg(Symbol.taylor([0.0, 1.0, 1.0]), alpha, N)
        np.testing.assert_allclose(total.dense(), joint.dense(), atol=1e-14)

    def test_constant_symbol_gives_zero(self):
        m = assemble_tg(Symbol.constant(5.0), 0.5, 8)
        assert m.is_zero
        assert "constant symbol" in m.flags
        assert m.tail_certificate == 0.0
        assert truncation_report(m, 2.0).bound == 0.0

    def test_truncated_symbol_beyond_degree(self):
        with pytest.raises(TruncationError):
            assemble_tg(Symbol.taylor([0.0, 1.0, 2.0], truncation=4), 0.0, 8)

    def test_frobenius_plus_tail_independent_of_n(self):
        g = Symbol.monomial(3)
        totals = [assemble_tg(g, 0.5, N).frobenius_sq() + assemble_tg(g, 0.5, N).tail_certificate
                  for N in (64, 256)]
        assert totals[0] == pytest.approx(totals[1], rel=1e-9)

    def test_hilbert_schmidt_norm_of_tz(self):
        m = assemble_tg(Symbol.monomial(1), 0.0, 128, InnerProductMode.INTEGRAL)
        assert m.frobenius_sq() + m.tail_certificate == pytest.approx(2.0, rel=1e-9)

    def test_tail_certificate_matches_report(self):
        m = assemble_tg(Symbol.taylor([0.0, 1.0, 0.5]), 0.25, 64)
        report = truncation_report(m, 2.0)
        assert report.bound == pytest.approx(m.tail_certificate)
        assert not report.heuristic
        assert report.method == "frobenius"

    def test_infinite_symbol_certificate_is_heuristic(self):
        m = assemble_tg(Symbol.kernel_power(0.5, 1.0), 0.0, 64)
        assert m.certificate_heuristic
        assert "certificate heuristic" in m.flags

    def test_rebuild_from_spec(self):
        m = assemble_tg(Symbol.monomial(2), 0.5, 16, InnerProductMode.INTEGRAL)
        np.testing.assert_allclose(operator_from_spec(m.spec).dense(), m.dense())

    def test_invalid_truncation(self):
        with pytest.raises(ParameterError):
            assemble_tg(Symbol.monomial(1), 0.0, 0)


class TestMultiplicationOperators:
    def test_mgprime_of_z(self):
        # g' = 1, so M_{g'} is the inclusion D -> A²_0
        m = assemble_mgprime(Symbol.monomial(1), 0.0, 4)
        np.testing.assert_allclose(np.diag(m.dense()).real, 1.0 / np.arange(1, 6), rtol=1e-12)

    def test_mgsecond_of_z2(self):
        assert assemble_mgsecond(Symbol.monomial(2), 0.0, 4).dense()[0, 0].real == pytest.approx(2.0)

    def test_monomial_multiplication_entry(self):
        m = assemble_monomial_multiplication(2, 6)
        assert m.dense()[2, 0].real == pytest.approx(1.0 / math.sqrt(10.0))

    def test_monomial_multiplication_spectrum(self):
        svd = singular_values(assemble_monomial_multiplication(3, 20)).values
        exact = multiplication_monomial_spectrum(3, 20).values
        np.testing.assert_allclose(svd, exact, rtol=1e-12)

    def test_bergman_multiplication_needs_larger_codomain_weight(self):
        with pytest.raises(ParameterError):
            assemble_bergman_multiplication(Symbol.monomial(1), 1.0, 0.5, 8)
        m = assemble_bergman_multiplication(Symbol.monomial(1), 0.0, 1.0, 8)
        assert m.nnz == 8


class TestToeplitz:
    def test_point_mass_at_origin(self):
        m = assemble_toeplitz(MeasureRep.dirac(0.0), 0.5, 6)
        expected = np.zeros((7, 7))
        expected[0, 0] = 1.0
        np.testing.assert_allclose(m.dense(), expected, atol=1e-15)
        assert m.tail_certificate == 0.0
        assert m.trace_total == pytest.approx(1.0)

    def test_hermitian(self):
        mu = MeasureRep.atomic([0.5, -0.3j, 0.2 + 0.7j], [1.0, 0.5, 0.25])
        dense = assemble_toeplitz(mu, 1.0, 12).dense()
        np.testing.assert_allclose(dense, dense.conj().T, atol=1e-14)
        assert np.all(np.linalg.eigvalsh(dense) > -1e-12)

    def test_alpha_must_be_positive(self):
        with pytest.raises(ParameterError):
            assemble_toeplitz(MeasureRep.dirac(0.0), 0.0, 6)

    def test_trace_report(self):
        mu = MeasureRep.dirac(0.5)
        m = assemble_toeplitz(mu, 0.5, 8)
        report = truncation_report(m, 1.0)
        assert report.method == "trace"
        assert m.trace_total == pytest.approx(np.trace(m.dense()).real + report.bound, rel=1e-10)


def test_power_tail_sum_of_inverse_squares():
    total, remainder = power_tail_sum(lambda n: 1.0 / n.astype(float) ** 2, 1, 1 << 16)
    assert total == pytest.approx(math.pi**2 / 6.0, rel=1e-9)
    assert 0.0 < remainder < 1e-4
