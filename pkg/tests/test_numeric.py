import numpy as np
import pytest

from backend.errors import EngineError
from backend.numeric import (
    NumericResult,
    bump,
    bump_gradient,
    bump_hessian,
    numeric_delta_check,
    numeric_verdict,
)


def test_bump_support():
    w = np.array([[0.0, 0.5, 1.0, 2.0], [0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]])
    values = bump(w)
    assert values[0] == pytest.approx(np.exp(-1.0))
    assert values[1] == pytest.approx(np.exp(-1.0 / 0.75))
    assert values[2] == 0.0
    assert values[3] == 0.0


def test_bump_gradient_matches_finite_differences():
    w = np.array([[0.3], [-0.2], [0.1]])
    h = 1e-6
    for i in range(3):
        step = np.zeros((3, 1))
        step[i, 0] = h
        numeric = (bump(w + step) - bump(w - step)) / (2 * h)
        assert bump_gradient(w)[i, 0] == pytest.approx(numeric[0], rel=1e-5)


def test_bump_hessian_is_symmetric_and_matches_gradient():
    w = np.array([[0.3], [-0.2], [0.1]])
    hessian = bump_hessian(w)[:, :, 0]
    assert np.allclose(hessian, hessian.T)
    h = 1e-6
    step = np.zeros((3, 1))
    step[0, 0] = h
    numeric = (bump_gradient(w + step) - bump_gradient(w - step))[:, 0] / (2 * h)
    assert np.allclose(hessian[:, 0], numeric, rtol=1e-4)


def test_zero_amplitude_has_no_error():
    result = numeric_delta_check(3, 0, 2, resolution=8, amplitude=0.0)
    assert result.error == 0.0
    assert len(result.point_errors) == 3


def test_error_does_not_depend_on_amplitude():
    one = numeric_delta_check(3, 0, 1, resolution=8)
    two = numeric_delta_check(3, 0, 1, resolution=8, amplitude=2.0)
    assert two.error == pytest.approx(one.error)
    assert two.flipped_error == pytest.approx(one.flipped_error)


def test_printed_order_one_constant_has_the_opposite_sign():
    derived = numeric_delta_check(3, 1, 1, resolution=8)
    printed = numeric_delta_check(3, 1, 1, resolution=8, derived=False)
    assert derived.normalization == "derived"
    assert printed.normalization == "printed"
    assert printed.error == pytest.approx(derived.flipped_error)
    assert printed.flipped_error == pytest.approx(derived.error)
    assert printed.ratio == pytest.approx(-derived.ratio)


def _ladder(*errors: float, flipped: float = 0.5, normalization: str = "derived") -> list[NumericResult]:
    return [
        NumericResult(1, 8 * 2**i, error, 1.0, flipped, [error] * 3, normalization)
        for i, error in enumerate(errors)
    ]


def test_verdict_passes_on_decreasing_signed_error():
    result = numeric_verdict(_ladder(0.2, 0.01), tolerance=0.05)
    assert result.passed
    assert result.details["monotone"] is True
    assert result.details["normalization"] == "derived"
    assert result.details["resolutions"] == "8,16"


def test_verdict_rejects_sign_flipped_constant():
    # measured = -expected: the opposite sign reproduces, the signed error is 2
    result = numeric_verdict(_ladder(2.0, 2.0, flipped=0.001, normalization="printed"), tolerance=0.05)
    assert not result.passed
    assert result.details["normalization"] == "printed"
    assert result.residual == "2.000e+00"


def test_verdict_rejects_non_monotone_errors():
    result = numeric_verdict(_ladder(0.01, 0.03), tolerance=0.05)
    assert not result.passed
    assert result.details["monotone"] is False


def test_verdict_treats_converged_errors_as_monotone():
    result = numeric_verdict(_ladder(1e-12, 2e-12), tolerance=0.05)
    assert result.passed


def test_verdict_orders_the_ladder_by_resolution():
    ladder = _ladder(0.2, 0.01)
    result = numeric_verdict(list(reversed(ladder)), tolerance=0.05)
    assert result.passed
    assert result.details["errors"] == "2.000e-01,1.000e-02"


def test_unsupported_order():
    with pytest.raises(EngineError):
        numeric_delta_check(3, 0, 3, resolution=8)


@pytest.mark.slow
@pytest.mark.parametrize("order", [1, 2])
@pytest.mark.parametrize("k", [0, 1])
def test_delta_normalization_converges(k, order):
    result = numeric_delta_check(3, k, order, resolution=64)
    assert result.error <= 0.05
    assert result.ratio == pytest.approx(1.0, abs=0.05)


@pytest.mark.slow
@pytest.mark.parametrize("order", [1, 2])
def test_delta_normalization_error_decreases(order):
    ladder = [numeric_delta_check(3, 1, order, resolution) for resolution in (32, 64)]
    result = numeric_verdict(ladder, tolerance=0.05)
    assert result.passed, result.details
    assert result.details["monotone"] is True
