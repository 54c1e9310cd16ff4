import math

import numpy as np
import pytest

from schattenlab.core.errors import ParameterError, TruncationError
from schattenlab.numerics.spaces import (
    InnerProductMode,
    KernelEval,
    KernelKind,
    SpaceParams,
    Symbol,
    SymbolKind,
    inner_product,
    kernel_coefficients,
    kernel_norm,
    kernel_value,
    monomial_norms,
    orthonormal_basis,
    symbol_coeffs,
)


class TestMonomialNorms:
    def test_integral_dirichlet_norm_of_z4(self):
        basis = orthonormal_basis(SpaceParams.dirichlet(0.0, InnerProductMode.INTEGRAL), 8)
        assert basis.normalization[4] == pytest.approx(0.5)
        assert basis.normalization[0] == pytest.approx(1.0)

    def test_coefficient_mode(self):
        nu = monomial_norms(SpaceParams.dirichlet(0.5), 3)
        assert nu[3] == pytest.approx(math.sqrt(2.0))

    def test_bergman_unweighted(self):
        nu = monomial_norms(SpaceParams.bergman(0.0), 5)
        n = np.arange(6)
        np.testing.assert_allclose(nu**2, 1.0 / (n + 1.0), rtol=1e-13)

    def test_gram_is_identity(self):
        for space in (SpaceParams.dirichlet(0.3), SpaceParams.dirichlet(1.5, InnerProductMode.INTEGRAL),
                      SpaceParams.bergman(0.5)):
            gram = orthonormal_basis(space, 16).gram()
            np.testing.assert_allclose(gram, np.eye(17), atol=1e-12)

    def test_invalid_weights(self):
        with pytest.raises(ParameterError):
            SpaceParams.dirichlet(-0.1)
        with pytest.raises(ParameterError):
            SpaceParams.bergman(-1.0)
        with pytest.raises(ParameterError):
            orthonormal_basis(SpaceParams.dirichlet(0.0), 0)


class TestKernels:
    def test_reproducing_property(self):
        space = SpaceParams.dirichlet(0.5)
        kernel = KernelEval(KernelKind.DIRICHLET_K, 0.5, InnerProductMode.COEFFICIENT)
        z = 0.3 - 0.4j
        f = np.array([1.0, 2.0, -1.0j])
        value = inner_product(space, f, kernel_coefficients(kernel, z, 200))
        assert value == pytest.approx(f[0] + f[1] * z + f[2] * z**2, rel=1e-12)

    def test_series_against_geometric_sum(self):
        # ν_n = 1 for α = 1 in coefficient mode
        kernel = KernelEval(KernelKind.DIRICHLET_K, 1.0, InnerProductMode.COEFFICIENT)
        z, w = 0.3, 0.5 + 0.2j
        assert kernel_value(kernel, z, w) == pytest.approx(1.0 / (1.0 - np.conj(z) * w), rel=1e-10)

    def test_dirichlet_closed_form(self):
        kernel = KernelEval(KernelKind.DIRICHLET_K, 0.0)
        z = 0.6j
        assert kernel_norm(kernel, z) ** 2 == pytest.approx(1.0 + math.log(1.0 / (1.0 - 0.36)), rel=1e-12)

    def test_bergman_norm(self):
        kernel = KernelEval(KernelKind.BERGMAN_B, 0.5)
        z = 0.7
        assert kernel_norm(kernel, z) ** 2 == pytest.approx(kernel_value(kernel, z, z).real, rel=1e-12)
        assert kernel_norm(kernel, z) == pytest.approx((1.0 - 0.49) ** -1.25, rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 2.0])
    def test_derivative_kernel_matches_coefficients(self, alpha):
        kernel = KernelEval(KernelKind.DERIVATIVE_J, alpha)
        z, w = 0.4 + 0.2j, -0.3 + 0.35j
        coeffs = kernel_coefficients(kernel, z, 200)
        series = complex(np.sum(coeffs * w ** np.arange(201)))
        assert kernel_value(kernel, z, w) == pytest.approx(series, rel=1e-10)

    def test_point_outside_disk(self):
        kernel = KernelEval(KernelKind.DIRICHLET_K, 0.0)
        with pytest.raises(ParameterError):
            kernel_value(kernel, 1.2, 0.0)
        with pytest.raises(ParameterError):
            kernel_norm(kernel, 1.0)


class TestSymbols:
    def test_loglog_coefficients(self):
        coeffs = symbol_coeffs(Symbol.loglog(), 3).coeffs
        np.testing.assert_allclose(coeffs.real, [0.0, 1.0, 0.0, 1.0 / 6.0], atol=1e-15)

    def test_kernel_power_coefficients(self):
        coeffs = symbol_coeffs(Symbol.kernel_power(0.5, 1.0), 10).coeffs
        np.testing.assert_allclose(coeffs, 0.5 ** np.arange(11), rtol=1e-12)

    def test_monomial_coefficients(self):
        res = symbol_coeffs(Symbol.monomial(3), 5)
        np.testing.assert_array_equal(res.coeffs, [0, 0, 0, 1, 0, 0])
        assert res.tail_bound == 0.0

    def test_truncated_taylor(self):
        g = Symbol.taylor([1.0, 2.0, 3.0], truncation=4)
        assert g.degree is None
        assert symbol_coeffs(g, 4).coeffs[2] == 3.0
        with pytest.raises(TruncationError):
            symbol_coeffs(g, 6)
        with pytest.raises(ParameterError):
            Symbol.taylor([1.0, 2.0, 3.0], truncation=1)

    def test_constant(self):
        g = Symbol.constant(3.0)
        assert g.is_constant
        assert g.value_at_zero() == 3.0
        assert Symbol.kernel_power(0.5, 2.0).value_at_zero() == 1.0

    @pytest.mark.parametrize(
        "text, kind",
        [
            ("monomial:3", SymbolKind.MONOMIAL),
            ("const:1", SymbolKind.TAYLOR),
            ("kernelpow:0.9,1", SymbolKind.KERNEL_POWER),
            ("loglog", SymbolKind.LOGLOG),
            ("taylor:1,0,2", SymbolKind.TAYLOR),
            ("lacunary:1,0.5@2,4", SymbolKind.LACUNARY),
        ],
    )
    def test_parse(self, text, kind):
        assert Symbol.parse(text).kind is kind

    def test_parse_values(self):
        assert Symbol.parse("monomial:3").j == 3
        g = Symbol.parse("kernelpow:0.9,1")
        assert g.a == 0.9 and g.gamma == 1.0
        assert Symbol.parse("lacunary:1,0.5@2,4").lacunary_exponents == (2, 4)
        assert Symbol.parse("taylor:1,0,2").degree == 2

    @pytest.mark.parametrize("text", ["bogus:1", "monomial:x", "monomial:0", "kernelpow:1.5,1", "lacunary:1@"])
    def test_parse_rejects(self, text):
        with pytest.raises(ParameterError):
            Symbol.parse(text)

    def test_lacunary_ratio(self):
        with pytest.raises(ParameterError):
            Symbol.lacunary([1.0, 1.0], [2, 3], ratio=2.0)
        g = Symbol.lacunary([1.0, 0.5], [2, 4])
        assert g.degree == 4

    def test_dict_round_trip(self):
        for g in (Symbol.kernel_power(0.5 - 0.25j, 1.5), Symbol.lacunary([1.0, 0.5], [2, 4]),
                  Symbol.taylor([1.0, 2.0j], truncation=3)):
            assert Symbol.from_dict(g.to_dict()) == g

    def test_derivative_of_polynomial(self):
        g = Symbol.taylor([1.0, 2.0, 3.0])
        z = np.array([0.1, 0.5j])
        np.testing.assert_allclose(g.derivative(z), 2.0 + 6.0 * z)
