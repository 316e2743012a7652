"""Tests for regularisation functionals and Bregman distances."""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import TypeAdapter, ValidationError

from bregman_rates.errors import (
    DimensionError,
    NotSingleValued,
    OutOfDomain,
    SubgradientMismatch,
    Unsupported,
)
from bregman_rates.regularisers import (
    Huber,
    PowerSum,
    PowerSumHigh,
    Quadratic,
    RegulariserSpec,
    TotalVariation1D,
    bregman,
    sym_bregman,
)
from bregman_rates.sources import step_truth

SINGLE_VALUED = [
    Quadratic(),
    PowerSum(p=1.5, weight=1.0),
    PowerSum(p=1.2),
    PowerSumHigh(p=3.0, weight=0.5),
    PowerSumHigh(p=4.0),
    Huber(),
    Huber(threshold=0.3),
]


def test_values():
    assert Quadratic().value([3.0, 4.0]) == pytest.approx(12.5)
    assert Huber().value([0.5, 2.0]) == pytest.approx(1.625)
    assert TotalVariation1D().value([0.0, 1.0, 1.0, 0.0]) == pytest.approx(2.0)
    assert PowerSum(p=1.5, weight=1.0).value([4.0]) == pytest.approx(8.0 / 1.5)


def test_power_law_default_weight_is_one_over_n():
    spec = PowerSumHigh(p=4.0)
    assert spec.value([1.0, 1.0]) == pytest.approx(0.5 / 4.0 * 2.0)


def test_prox_examples():
    assert_allclose(Quadratic().prox([2.0], 1.0), [1.0])
    assert_allclose(Huber().prox([3.0], 1.0), [2.0])
    assert_allclose(Huber().prox([0.5], 1.0), [0.25])
    w = PowerSum(p=1.5, weight=1.0).prox([1.0], 1.0)
    assert_allclose(w, [(3.0 - np.sqrt(5.0)) / 2.0], atol=1e-10)


def test_subgradient_examples():
    assert_allclose(Quadratic().subgradient([1.0, -2.0]), [1.0, -2.0])
    assert_allclose(PowerSum(p=1.5, weight=1.0).subgradient([0.25]), [0.5])
    assert_allclose(Huber().subgradient([0.5, 7.0]), [0.5, 1.0])


def test_tv_subgradient_not_single_valued():
    with pytest.raises(NotSingleValued):
        TotalVariation1D().subgradient([0.0, 1.0])


def test_invert_subgradient_examples():
    assert_allclose(Quadratic().invert_subgradient([2.0]), [2.0])
    assert_allclose(PowerSum(p=1.5, weight=1.0).invert_subgradient([0.5]), [0.25])
    u = Huber().invert_subgradient([0.3, 1.0])
    assert_allclose(u, [0.3, 1.0])
    assert_allclose(Huber().subgradient(u), [0.3, 1.0])


def test_invert_subgradient_errors():
    with pytest.raises(OutOfDomain):
        Huber().invert_subgradient([0.2, -1.5])
    with pytest.raises(Unsupported, match="TV source synthesis"):
        TotalVariation1D().invert_subgradient([0.0, 0.0])


@pytest.mark.parametrize("spec", SINGLE_VALUED, ids=repr)
def test_invert_subgradient_round_trip(spec, rng):
    bound = spec.threshold if isinstance(spec, Huber) else 2.0
    xi = rng.uniform(-bound, bound, 6)
    u = spec.invert_subgradient(xi)
    assert_allclose(spec.subgradient(u), xi, atol=1e-10)


@pytest.mark.parametrize(
    "spec, expected",
    [
        (Quadratic(), (2.0, 2.0)),
        (PowerSum(p=1.5), (2.0, 3.0)),
        (PowerSumHigh(p=4.0), (4.0, 2.0)),
        (TotalVariation1D(), (None, None)),
        (Huber(), (None, 2.0)),
    ],
)
def test_convexity_profile(spec, expected):
    profile = spec.convexity_profile()
    assert (profile.p_convex, profile.q_coconvex) == expected


@pytest.mark.parametrize(
    "payload",
    [
        {"kind": "powersum", "p": 2.5},
        {"kind": "powersum", "p": 1.0},
        {"kind": "powerhigh", "p": 1.5},
        {"kind": "powersum", "p": 1.5, "weight": 0.0},
        {"kind": "huber", "threshold": -1.0},
        {"kind": "quadratic", "extra": 1},
        {"kind": "l1"},
    ],
)
def test_invalid_specs_rejected(payload):
    with pytest.raises(ValidationError):
        TypeAdapter(RegulariserSpec).validate_python(payload)


def test_spec_from_payload():
    payload = {"kind": "huber", "threshold": 0.5}
    spec = TypeAdapter(RegulariserSpec).validate_python(payload)
    assert spec == Huber(threshold=0.5)


def test_bregman_examples():
    assert bregman(Quadratic(), [3.0], [1.0], [1.0]) == pytest.approx(2.0)
    assert bregman(Huber(), [5.0], [2.0], [1.0]) == pytest.approx(0.0, abs=1e-14)
    u = np.array([0.3, -1.2])
    for spec in SINGLE_VALUED:
        assert bregman(spec, u, u, spec.subgradient(u)) == pytest.approx(0.0, abs=1e-14)


def test_bregman_checks_subgradient():
    with pytest.raises(SubgradientMismatch):
        bregman(Quadratic(), [3.0], [1.0], [2.0])
    assert bregman(Quadratic(), [3.0], [1.0], [2.0], check=False) == pytest.approx(0.0)


def test_bregman_dimension_mismatch():
    with pytest.raises(DimensionError):
        bregman(Quadratic(), [1.0, 2.0], [1.0], [1.0])
    with pytest.raises(DimensionError):
        sym_bregman([1.0], [1.0, 2.0], [0.0], [0.0])


@pytest.mark.parametrize("spec", SINGLE_VALUED, ids=repr)
def test_bregman_nonnegative(spec, rng):
    for _ in range(50):
        u, w = rng.normal(0.0, 2.0, 5), rng.normal(0.0, 2.0, 5)
        assert bregman(spec, w, u, spec.subgradient(u)) >= -1e-10


def test_sym_bregman_examples(rng):
    assert sym_bregman([1.0], [1.0], [3.0], [0.0]) == 0.0
    value = sym_bregman([1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0])
    assert value == pytest.approx(2.0)

    spec = Huber()
    for _ in range(20):
        u, w = rng.normal(0.0, 2.0, 4), rng.normal(0.0, 2.0, 4)
        xi, xi_w = spec.subgradient(u), spec.subgradient(w)
        both = bregman(spec, w, u, xi) + bregman(spec, u, w, xi_w)
        assert sym_bregman(xi, xi_w, u, w) == pytest.approx(both, abs=1e-10)


@pytest.mark.parametrize("spec", SINGLE_VALUED, ids=repr)
def test_prox_optimality(spec, rng):
    """Test that (u - prox(u)) / tau is the subgradient at prox(u)."""
    for _ in range(50):
        u = rng.normal(0.0, 3.0, 5)
        tau = float(10.0 ** rng.uniform(-1.0, 1.0))
        w = spec.prox(u, tau)
        assert_allclose(spec.subgradient(w), (u - w) / tau, atol=1e-8)


def test_tv_prox_variational_inequality(rng):
    tv = TotalVariation1D()
    for _ in range(20):
        u = rng.standard_normal(12).cumsum()
        tau = float(rng.uniform(0.1, 2.0))
        w = tv.prox(u, tau)
        g = (u - w) / tau
        for _ in range(10):
            z = w + rng.standard_normal(12)
            assert tv.value(w) + g @ (z - w) <= tv.value(z) + 1e-8


def test_huber_coconvexity(rng):
    """Test <xi1 - xi2, u1 - u2> >= ||xi1 - xi2||^2 for Huber."""
    spec = Huber(threshold=0.7)
    for _ in range(200):
        u1, u2 = rng.normal(0.0, 1.5, 3), rng.normal(0.0, 1.5, 3)
        d = spec.subgradient(u1) - spec.subgradient(u2)
        assert d @ (u1 - u2) >= d @ d - 1e-12


def test_power_sum_local_two_convexity():
    """Test that D(w, u) / |w - u|^2 stays bounded away from zero on [-1, 1]."""
    spec = PowerSum(p=1.5, weight=1.0)
    grid = np.linspace(-1.0, 1.0, 81)
    ratios = [
        bregman(spec, [w], [u], spec.subgradient([u])) / (w - u) ** 2
        for u in grid
        for w in grid
        if w != u
    ]
    assert min(ratios) > 0.1


def test_tv_witness_zero_bregman_distance():
    """Test D(2u, u) = 0 for a step, so TV is not p-convex for any p."""
    tv = TotalVariation1D()
    u = step_truth(10)
    w = tv.prox(3.0 * u, 5.0)
    xi = (3.0 * u - w) / 5.0
    assert tv.is_subgradient(u, xi)
    assert bregman(tv, 2.0 * u, u, xi) == pytest.approx(0.0, abs=1e-10)
    assert np.linalg.norm(2.0 * u - u) > 0


def test_tv_is_subgradient_rejects():
    tv = TotalVariation1D()
    u = step_truth(4)
    assert not tv.is_subgradient(u, [1.0, 0.0, 0.0, 0.0])
    assert not tv.is_subgradient(u, [2.0, 0.0, -2.0, 0.0])
    assert not tv.is_subgradient(u, [-1.0, 0.0, 0.0, 1.0][::-1])


def test_specs_are_frozen():
    spec = Huber()
    with pytest.raises(ValidationError):
        spec.threshold = 2.0


@pytest.mark.parametrize("spec", SINGLE_VALUED, ids=repr)
def test_prox_accepts_one_tau_per_coordinate(spec, rng):
    u = rng.normal(0.0, 3.0, 6)
    tau = 10.0 ** rng.uniform(-2.0, 1.0, 6)
    w = spec.prox(u, tau)
    for i in range(6):
        assert w[i] == pytest.approx(spec.prox(u, float(tau[i]))[i], abs=1e-10)


def test_tv_prox_rejects_coordinate_steps():
    with pytest.raises(Unsupported):
        TotalVariation1D().prox(np.ones(4), np.full(4, 0.5))


def test_power_prox_is_accurate_for_small_steps():
    """Test the stationarity residual of the power prox near machine precision."""
    spec = PowerSum(p=1.5, weight=1.0)
    u = np.array([1e-3, 0.3, -2.0, 5.0])
    for tau in (1e-6, 1e-4, 1e-2):
        w = spec.prox(u, tau)
        residual = w - u + tau * spec.subgradient(w)
        assert np.max(np.abs(residual)) <= 1e-13 * (1.0 + np.max(np.abs(u)))
