"""Tests for exact 1D total-variation denoising."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bregman_rates.regularisers import TotalVariation1D
from bregman_rates.tv1d import tv_denoise, tv_dual_variable, tv_value


def test_tv_value():
    assert tv_value([0.0, 1.0, 1.0, 0.0]) == 2.0
    assert tv_value([5.0]) == 0.0


@pytest.mark.parametrize(
    "y, lam, expected",
    [
        ([0.0, 3.0], 1.0, [1.0, 2.0]),
        ([0.0, 1.0], 1.0, [0.5, 0.5]),
        ([1.0, 5.0, 2.0, 8.0], 100.0, [4.0, 4.0, 4.0, 4.0]),
        ([2.0, 2.0, 2.0], 0.7, [2.0, 2.0, 2.0]),
        ([4.2], 3.0, [4.2]),
    ],
)
def test_tv_denoise_examples(y, lam, expected):
    assert_allclose(tv_denoise(y, lam), expected, atol=1e-12)


def test_tv_denoise_zero_weight_is_identity(rng):
    y = rng.standard_normal(7)
    assert_allclose(tv_denoise(y, 0.0), y)


def test_tv_denoise_step():
    """Test that a wide step keeps its jump, shrunk by 2 lam / half-width."""
    y = np.r_[np.zeros(5), 3.0 * np.ones(5)]
    assert_allclose(tv_denoise(y, 5.0), np.r_[np.ones(5), 2.0 * np.ones(5)], atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 10, 57])
def test_tv_denoise_optimality(rng, n):
    """Test that (y - x) / lam is a subgradient of TV at x."""
    tv = TotalVariation1D()
    for _ in range(20):
        y = rng.standard_normal(n).cumsum()
        lam = float(rng.uniform(0.05, 3.0))
        x = tv_denoise(y, lam)
        assert tv.is_subgradient(x, (y - x) / lam)
        assert np.sum(x) == pytest.approx(np.sum(y))


def test_tv_dual_variable():
    z, balance = tv_dual_variable([-1.0, 0.0, 1.0])
    assert_allclose(z, [1.0, 1.0])
    assert balance == 0.0

    _, balance = tv_dual_variable([1.0, 1.0])
    assert balance == 2.0


def _difference_adjoint(z):
    """D^T z for the forward difference (Dx)_i = x_{i+1} - x_i."""
    return np.concatenate(([0.0], z)) - np.concatenate((z, [0.0]))


def _dual_projected_gradient(y, lam, iterations=4000):
    """Reference minimiser y - D^T z, z solving the box-constrained dual."""
    z = np.zeros(y.size - 1)
    for _ in range(iterations):
        z = np.clip(z + 0.25 * np.diff(y - _difference_adjoint(z)), -lam, lam)
    return y - _difference_adjoint(z)


def _tv_objective(x, y, lam):
    return 0.5 * float(np.sum((x - y) ** 2)) + lam * tv_value(x)


def test_tv_denoise_matches_dual_reference(rng):
    for _ in range(40):
        n = int(rng.integers(2, 16))
        y = rng.standard_normal(n).cumsum()
        lam = float(rng.uniform(0.1, 2.0))
        x = tv_denoise(y, lam)
        reference = _dual_projected_gradient(y, lam)
        assert _tv_objective(x, y, lam) <= _tv_objective(reference, y, lam) + 1e-10
        assert_allclose(x, reference, atol=1e-7)


def test_tv_denoise_flattens_a_small_bump():
    """Test a small bump flattening into the mean."""
    y = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
    assert_allclose(tv_denoise(y, 0.5), [0.2] * 5, atol=1e-12)
