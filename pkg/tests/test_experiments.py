import pytest

from schattenlab.core.config import ConfigManager, set_config
from schattenlab.core.errors import ParameterError
from schattenlab.core.suite_system import SuiteContext
from schattenlab.experiments.spectrum import (
    NORM_ROW_COLUMNS,
    OperatorChoice,
    assemble,
    closed_form_spectrum,
    parse_orders,
    run_spectrum,
)
from schattenlab.experiments.sweeps import (
    frontier,
    frontier_cells,
    kernel_power_levels,
    monomial_degrees,
    monomial_sweep,
)
from schattenlab.experiments.validation import (
    failure_records,
    first_failure,
    run_suites,
    suite_names,
    summarize,
)
from schattenlab.numerics.hyperbolic import MeasureRep
from schattenlab.numerics.quadrature import GridSpec
from schattenlab.numerics.spaces import Symbol


class TestSpectrumRun:
    def test_monomial_matches_closed_form(self, coarse_grid):
        run = run_spectrum(Symbol.monomial(3), 0.5, 128, [1.5, 2.0], grid=coarse_grid)
        rows = run.norm_rows()
        assert [row["p"] for row in rows] == [1.5, 2.0]
        assert set(rows[0]) == set(NORM_ROW_COLUMNS)
        assert all(row["closed_form_dev"] < 1e-10 for row in rows)
        assert run.summary()["N"] == 128
        assert run.warnings == []

    def test_comparisons_listed(self, coarse_grid):
        run = run_spectrum(Symbol.monomial(2), 0.0, 64, [2.0], grid=coarse_grid)
        functionals = [row["functional"] for row in run.comparison_rows()]
        assert len(functionals) == 2
        assert all(row["ratio"] > 0 for row in run.comparison_rows())

    def test_constant_symbol_warns(self):
        run = run_spectrum(Symbol.constant(2.0), 0.0, 16, [2.0], compare=False)
        assert "constant symbol" in run.warnings
        assert len(run.spectrum) == 0
        assert run.norms[0].value == 0.0

    def test_toeplitz_needs_measure(self):
        with pytest.raises(ParameterError):
            assemble(OperatorChoice.TOEPLITZ, Symbol.monomial(1), 1.0, 8)

    def test_bergman_needs_gamma(self):
        with pytest.raises(ParameterError):
            assemble("bergman", Symbol.monomial(1), 0.0, 8)

    def test_toeplitz_run(self):
        run = run_spectrum(MeasureRep.dirac(0.0), 1.0, 8, [1.0], operator="toeplitz")
        assert run.spectrum.top == pytest.approx(1.0)
        assert run.functionals == []

    def test_closed_form_for_multiplication(self):
        m = assemble("mzj", Symbol.monomial(2), 0.0, 16)
        assert closed_form_spectrum(m) is not None
        assert closed_form_spectrum(assemble("mgprime", Symbol.monomial(2), 0.0, 16)) is None

    @pytest.mark.parametrize("text,orders", [("1.5,2", [1.5, 2.0]), ("3", [3.0]), ([1, 2], [1.0, 2.0])])
    def test_parse_orders(self, text, orders):
        assert parse_orders(text) == orders

    @pytest.mark.parametrize("text", ["", "two", "1,x"])
    def test_parse_orders_rejects(self, text):
        with pytest.raises(ParameterError):
            parse_orders(text)


class TestSweeps:
    def test_parameter_ladders(self):
        assert monomial_degrees(2, 4) == [4, 8, 16]
        assert kernel_power_levels(3, 4) == [0.875, 0.9375]
        with pytest.raises(ParameterError):
            monomial_degrees(5, 4)

    @pytest.mark.parametrize("alpha,p,exponent", [(0.0, 1.5, 1.0 / 1.5), (0.0, 3.0, 0.5)])
    def test_monomial_growth(self, alpha, p, exponent):
        result = monomial_sweep(alpha, p, monomial_degrees(2, 12), padding=256, with_functional=False)
        assert result.fits["schatten"].exponent == pytest.approx(exponent, abs=0.05)
        assert len(result.rows) == 11
        assert result.rows[0]["xpa"] is None

    def test_boundary_gets_forced_fit(self):
        result = monomial_sweep(0.0, 2.0, monomial_degrees(2, 12), padding=256, with_functional=False)
        assert result.regime.boundary
        assert result.fits["schatten_forced"].forced

    def test_monomial_sweep_rejects_small_p(self):
        with pytest.raises(ParameterError):
            monomial_sweep(0.0, 1.0, [4, 8])

    def test_frontier_cells(self):
        assert frontier_cells([0.0, 0.1], [4.0, 5.0]) == [(0.0, 4.0), (0.0, 5.0), (0.1, 5.0)]

    def test_frontier_needs_open_cells(self):
        with pytest.raises(ParameterError):
            frontier([0.5], [2.0], [4, 8])


class TestValidation:
    def test_unknown_suite_rejected_before_running(self):
        with pytest.raises(ParameterError):
            run_suites(["spectra", "nope"], SuiteContext(grid=GridSpec()))

    def test_suite_names(self):
        fast = suite_names(include_slow=False)
        assert "spectra" in fast
        assert "toeplitz" not in fast
        assert "inclusions" not in fast
        assert set(fast) < set(suite_names())

    def test_fast_suites_pass(self):
        done = []
        results = run_suites(
            ["spectra", "frame", "lattice", "hs-identity"],
            SuiteContext(grid=GridSpec(), quick=True),
            on_done=lambda res: done.append(res.suite),
        )
        assert done == ["spectra", "frame", "lattice", "hs-identity"]
        assert failure_records(results) == []
        assert first_failure(results) is None
        assert all(row["passed"] for row in summarize(results))

    def test_suites_read_the_global_config(self):
        set_config(ConfigManager({"lattice.r": 0.6}))
        results = run_suites(["lattice"], SuiteContext(grid=GridSpec(), quick=True))
        names = [check.name for check in results["lattice"].checks]
        assert "r=0.6 first point is 0" in names
        assert "r=1.2 first point is 0" in names
        assert not any(name.startswith("r=2.4") for name in names)
