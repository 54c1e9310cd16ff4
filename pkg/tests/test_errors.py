import pytest

from schattenlab.core.errors import (
    ConvergenceError,
    LatticeVerificationError,
    NumericalError,
    ParameterError,
    PropertyFailure,
    SchattenLabError,
    TruncationError,
    require,
)


def test_exit_codes():
    assert ParameterError("p", "bad").exit_code == 2
    assert TruncationError("M", "too large").exit_code == 2
    assert NumericalError("nan").exit_code == 3
    assert ConvergenceError("slow").exit_code == 3
    assert PropertyFailure("frame", "ratio dropped").exit_code == 1


def test_parameter_error_message():
    err = ParameterError("alpha", "must be >= 0")
    assert str(err) == "alpha: must be >= 0"
    assert err.parameter == "alpha"
    assert isinstance(err, ValueError)


def test_to_dict_is_json_ready():
    err = LatticeVerificationError("covering hole", witness=0.5 + 0.25j, holes=3)
    data = err.to_dict()
    assert data["error"] == "LatticeVerificationError"
    assert data["exit_code"] == 3
    assert data["details"]["witness"] == [0.5, 0.25]
    assert data["details"]["holes"] == 3


def test_property_failure_record():
    err = PropertyFailure("ict", "ratio outside window", {"c": 1.0})
    assert err.suite == "ict"
    assert err.record == {"c": 1.0}
    assert str(err).startswith("[ict]")
    assert isinstance(err, SchattenLabError)


def test_require():
    require(True, "x", "unused")
    with pytest.raises(ParameterError, match="x: broken"):
        require(False, "x", "broken")
