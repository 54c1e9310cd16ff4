"""
Validation suite registry: named property checks that the ``validate`` command runs.
"""

from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from rich.console import Console
from rich.table import Table

from .errors import ParameterError, PropertyFailure


@dataclass
class Check:
    """One assertion inside a suite, with its machine-readable record."""

    name: str
    passed: bool
    detail: str = ""
    record: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "record": self.record}


@dataclass
class SuiteResult:
    suite: str
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str, passed: bool, detail: str = "", **record: Any) -> Check:
        item = Check(name, bool(passed), detail, record)
        self.checks.append(item)
        return item

    def raise_for_failure(self) -> None:
        if not self.passed:
            first = self.failures[0]
            raise PropertyFailure(self.suite, f"{first.name}: {first.detail}", first.to_dict())

    def to_dict(self) -> Dict[str, Any]:
        return {"suite": self.suite, "passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


@dataclass
class SuiteContext:
    """What a suite may use: the grid, an optional executor, the config and its own flags."""

    grid: Any
    executor: Optional[Executor] = None
    config: Any = None
    quick: bool = False
    params: Dict[str, Any] = field(default_factory=dict)

    def param(self, name: str, default: Any = None) -> Any:
        value = self.params.get(name)
        return default if value is None else value


@dataclass
class SuiteInfo:
    """Suite information"""

    name: str
    handler: Callable[[SuiteContext], SuiteResult]
    description: str
    category: str = "General"
    aliases: List[str] = field(default_factory=list)
    slow: bool = False


class SuiteRegistry:
    """
    Suite Registry - named validation suites

    Example:
        >>> registry = SuiteRegistry()
        >>>
        >>> @registry.suite("ict", description="Ict integral estimate", category="norms")
        >>> def ict_suite(ctx):
        >>>     result = SuiteResult("ict")
        >>>     result.check("I(0) = 1/(t+1)", True)
        >>>     return result
        >>>
        >>> registry.run("ict", SuiteContext(grid=GridSpec()))
    """

    def __init__(self):
        self.suites: Dict[str, SuiteInfo] = {}
        self.categories: Dict[str, List[str]] = {}

    def suite(
        self,
        name: str,
        description: str = "",
        category: str = "General",
        aliases: Optional[List[str]] = None,
        slow: bool = False,
    ):
        """
        Decorator: register a suite
        """
        def decorator(func: Callable[[SuiteContext], SuiteResult]):
            self.register(SuiteInfo(name, func, description, category, list(aliases or []), slow))
            return func
        return decorator

    def register(self, info: SuiteInfo) -> None:
        self.suites[info.name] = info
        for alias in info.aliases:
            self.suites[alias] = info
        names = self.categories.setdefault(info.category, [])
        if info.name not in names:
            names.append(info.name)

    def get(self, name: str) -> Optional[SuiteInfo]:
        return self.suites.get(name)

    def exists(self, name: str) -> bool:
        return name in self.suites

    def run(self, name: str, ctx: SuiteContext) -> SuiteResult:
        info = self.get(name)
        if not info:
            raise ParameterError("suite", f"unknown suite {name!r}; see 'validate --list'")
        result = info.handler(ctx)
        result.suite = info.name
        return result

    def list_suites(self, category: Optional[str] = None) -> List[SuiteInfo]:
        """Main suites in registration order (aliases excluded)."""
        if category:
            return [self.suites[name] for name in self.categories.get(category, [])]
        seen = set()
        result = []
        for info in self.suites.values():
            if info.name not in seen:
                seen.add(info.name)
                result.append(info)
        return result

    def names(self) -> List[str]:
        return [info.name for info in self.list_suites()]

    def show_list(
        self,
        console: Console,
        table_factory: Optional[Callable[[str], Table]] = None,
    ) -> None:
        """Render the registered suites, one table per category."""
        for category in sorted(self.categories):
            title = f"📚 {category} suites"
            table = table_factory(title) if table_factory else Table(title=title, header_style="bold cyan")
            table.add_column("Suite", style="bold yellow", width=16)
            table.add_column("Description", style="white")
            table.add_column("Aliases", style="dim", width=14)
            table.add_column("Cost", style="dim", width=6)
            for info in self.list_suites(category):
                table.add_row(
                    info.name,
                    info.description,
                    ", ".join(info.aliases) if info.aliases else "-",
                    "slow" if info.slow else "fast",
                )
            console.print()
            console.print(table)


# Global registry the experiments.validation module fills
default_registry = SuiteRegistry()
