import numpy as np
import pytest

from schattenlab.core.errors import ParameterError
from schattenlab.numerics.asymptotics import Regime, fit_power_log, regime_report

POWERS = 2.0 ** np.arange(2, 13)


class TestPowerFit:
    def test_pure_power(self):
        fit = fit_power_log(POWERS, 3.0 * POWERS**0.5)
        assert fit.exponent == pytest.approx(0.5, abs=1e-9)
        assert fit.log_power == pytest.approx(0.0, abs=1e-9)
        assert fit.r2 == pytest.approx(1.0)
        assert fit.window == pytest.approx((1.0, 1.0))

    def test_power_with_log_factor(self):
        fit = fit_power_log(POWERS, POWERS**0.5 * np.log(POWERS) ** 0.5)
        assert fit.exponent == pytest.approx(0.5, abs=1e-6)
        assert fit.log_power == pytest.approx(0.5, abs=1e-6)

    def test_forced_exponent(self):
        fit = fit_power_log(POWERS, POWERS**0.5 * np.log(POWERS) ** 0.5, forced_exponent=0.5)
        assert fit.forced
        assert fit.exponent == 0.5
        assert fit.log_power == pytest.approx(0.5, abs=1e-9)

    def test_decay_model(self):
        x = 1.0 - 2.0 ** -np.arange(3, 15)
        fit = fit_power_log(x, 1.0 / (1.0 - x), model="decay", fit_log=False)
        assert fit.model == "decay"
        assert fit.exponent == pytest.approx(1.0, abs=1e-9)

    def test_to_dict(self):
        data = fit_power_log(POWERS, POWERS).to_dict()
        assert data["model"] == "power"
        assert data["range"] == [4.0, 4096.0]


class TestFitInputs:
    def test_too_few_samples(self):
        with pytest.raises(ParameterError):
            fit_power_log(POWERS[:5], POWERS[:5])

    def test_nonpositive_values(self):
        y = POWERS.copy()
        y[3] = 0.0
        with pytest.raises(ParameterError):
            fit_power_log(POWERS, y)

    def test_decay_needs_unit_interval(self):
        with pytest.raises(ParameterError):
            fit_power_log(POWERS, POWERS, model="decay")

    def test_short_span(self):
        x = np.arange(2.0, 8.0)
        with pytest.raises(ParameterError):
            fit_power_log(x, x)

    def test_unknown_model(self):
        with pytest.raises(ParameterError):
            fit_power_log(POWERS, POWERS, model="exp")


class TestRegimes:
    @pytest.mark.parametrize(
        "alpha,p,regime,exponent",
        [
            (0.5, 2.0, Regime.BESOV, 0.5),
            (0.0, 1.0, Regime.CONSTANTS_ONLY, None),
            (0.0, 2.0, Regime.LOG_BOUNDARY, 0.5),
            (0.0, 3.0, Regime.XPA, 0.5),
            (0.5, 0.8, Regime.CONSTANTS_ONLY, None),
            (0.25, 1.0, Regime.CONSTANTS_ONLY, None),
            (1.5, 0.5, Regime.CONSTANTS_ONLY, None),
            (0.0, 1.5, Regime.BESOV, 1.0 / 1.5),
            (1.0, 3.0, Regime.BESOV, 1.0 / 3.0),
            (2.0, 1.5, Regime.BESOV, 1.0 / 1.5),
            (0.0, 4.0, Regime.OPEN, 0.5),
            (0.5, 6.0, Regime.XPA, 0.25),
        ],
    )
    def test_regime_table(self, alpha, p, regime, exponent):
        report = regime_report(alpha, p)
        assert report.regime is regime
        assert report.expected_exponent() == (None if exponent is None else pytest.approx(exponent))

    @pytest.mark.parametrize("alpha,p", [(0.5, 0.8), (0.0, 0.5), (1.0, 1.0), (3.0, 0.9)])
    def test_trace_class_and_below_force_constants(self, alpha, p):
        report = regime_report(alpha, p)
        assert report.characterization == "T_g in S_p iff g is constant"
        assert report.monomial_growth == "none"

    @pytest.mark.parametrize("alpha,p", [(0.5, 1.5), (0.5, 3.0), (0.5, 4.0), (1.0, 2.0), (2.0, 5.0)])
    def test_weighted_cells_are_characterized(self, alpha, p):
        report = regime_report(alpha, p)
        assert report.characterized
        assert "iff" in report.characterization

    def test_dirichlet_between_one_and_two_lists_conditions(self):
        report = regime_report(0.0, 1.5)
        assert not report.characterized
        assert "iff" not in report.characterization
        assert report.characterization.startswith("necessary: g in B_p")
        assert "B_p,log^(p/2)" in report.characterization

    def test_dirichlet_hilbert_schmidt_is_exact(self):
        report = regime_report(0.0, 2.0)
        assert report.characterized
        assert report.characterization == "T_g in S_2 iff g in DL"

    @pytest.mark.parametrize("p", [2.5, 3.0, 4.0])
    def test_dirichlet_above_two_has_sufficient_log_condition(self, p):
        report = regime_report(0.0, p)
        assert not report.characterized
        assert "necessary: g in X^p_0" in report.characterization
        assert "sufficient: g in X^p_0,log^(p/4)" in report.characterization
        assert report.to_dict()["characterized"] is False

    def test_dirichlet_beyond_four_is_open(self):
        report = regime_report(0.0, 5.0)
        assert report.exploratory
        assert "no sufficient condition" in report.characterization

    def test_boundary_flag(self):
        assert regime_report(0.0, 2.0).boundary
        assert not regime_report(0.5, 2.0).boundary

    def test_open_regime_is_exploratory(self):
        report = regime_report(0.1, 5.0)
        assert report.regime is Regime.OPEN
        assert report.exploratory
        assert report.to_dict()["p(1-alpha)"] == pytest.approx(4.5)

    def test_rejects_negative_alpha(self):
        with pytest.raises(ParameterError):
            regime_report(-0.1, 2.0)
