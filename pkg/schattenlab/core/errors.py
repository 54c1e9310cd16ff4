"""Exception hierarchy shared by the library and the command line.

Every error carries the process exit code the CLI reports for it, so the
front end never has to guess: 1 for a failed property check, 2 for bad
input, 3 for a numerical failure.
"""

from typing import Any, Dict, Optional


class SchattenLabError(Exception):
    """Base class for all errors raised by schattenlab."""

    exit_code: int = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


class ParameterError(SchattenLabError, ValueError):
    """Invalid input: parameter out of range, point outside the disk, bad symbol spec."""

    exit_code = 2

    def __init__(self, parameter: str, message: str, **details: Any):
        super().__init__(f"{parameter}: {message}", parameter=parameter, **details)
        self.parameter = parameter


class TruncationError(ParameterError):
    """A symbol known only up to some degree was requested beyond it."""


class NumericalError(SchattenLabError, ArithmeticError):
    """Non-finite data, a failed factorization, or an unreachable tolerance."""

    exit_code = 3


class ConvergenceError(NumericalError):
    """A series or quadrature did not reach its tolerance within budget."""


class LatticeVerificationError(NumericalError):
    """Post-hoc lattice verification found a covering hole or a separation violation."""

    def __init__(self, message: str, witness: Optional[complex] = None, **details: Any):
        super().__init__(message, witness=witness, **details)
        self.witness = witness


class PropertyFailure(SchattenLabError):
    """A validation suite assertion failed."""

    exit_code = 1

    def __init__(self, suite: str, message: str, record: Optional[Dict[str, Any]] = None):
        super().__init__(f"[{suite}] {message}", suite=suite, record=record or {})
        self.suite = suite
        self.record = record or {}


def _jsonable(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return repr(value)


def require(condition: bool, parameter: str, message: str, **details: Any) -> None:
    """Raise :class:`ParameterError` unless ``condition`` holds."""
    if not condition:
        raise ParameterError(parameter, message, **details)
