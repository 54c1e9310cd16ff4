import pytest
from rich.console import Console

from schattenlab.core.errors import ParameterError, PropertyFailure
from schattenlab.core.suite_system import SuiteContext, SuiteRegistry, SuiteResult
from schattenlab.numerics.quadrature import GridSpec


@pytest.fixture
def registry():
    registry = SuiteRegistry()

    @registry.suite("passing", description="always holds", category="demo", aliases=["ok"])
    def passing(ctx):
        result = SuiteResult("passing")
        result.check("trivial", True, value=ctx.param("value", 1))
        return result

    @registry.suite("failing", description="never holds", category="demo", slow=True)
    def failing(ctx):
        result = SuiteResult("failing")
        result.check("first", True)
        result.check("second", False, "2 > 1", lhs=2, rhs=1)
        return result

    return registry


def test_alias_runs_main_suite(registry):
    result = registry.run("ok", SuiteContext(grid=GridSpec()))
    assert result.suite == "passing"
    assert result.passed


def test_list_excludes_aliases(registry):
    assert registry.names() == ["passing", "failing"]
    assert [info.name for info in registry.list_suites("demo")] == ["passing", "failing"]
    assert registry.get("failing").slow


def test_unknown_suite(registry):
    with pytest.raises(ParameterError):
        registry.run("missing", SuiteContext(grid=GridSpec()))


def test_failures_and_records(registry):
    result = registry.run("failing", SuiteContext(grid=GridSpec()))
    assert not result.passed
    assert [c.name for c in result.failures] == ["second"]
    with pytest.raises(PropertyFailure) as info:
        result.raise_for_failure()
    assert info.value.record["record"] == {"lhs": 2, "rhs": 1}
    data = result.to_dict()
    assert data["passed"] is False
    assert len(data["checks"]) == 2


def test_context_params():
    ctx = SuiteContext(grid=GridSpec(), params={"c": 1.0, "t": None})
    assert ctx.param("c") == 1.0
    assert ctx.param("t", 0.0) == 0.0
    assert ctx.param("missing", 3) == 3


def test_show_list(registry):
    console = Console(record=True, width=100)
    registry.show_list(console)
    text = console.export_text()
    assert "passing" in text
    assert "slow" in text
