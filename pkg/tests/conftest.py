"""Shared fixtures for the bregman_rates tests."""

from pathlib import Path

import numpy as np
import pytest

from bregman_rates.config import Settings
from bregman_rates.linalg import factorize
from bregman_rates.logging import setup_logging

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"


@pytest.fixture
def rng():
    """Seeded generator; every test draws from the same stream."""
    return np.random.default_rng(12345)


@pytest.fixture
def identity2():
    return factorize(np.eye(2))


@pytest.fixture
def diag41():
    """diag(4, 1)."""
    return factorize(np.diag([4.0, 1.0]))


@pytest.fixture
def config_dir():
    return CONFIG_DIR


@pytest.fixture
def experiment():
    """Factory for small, fast experiment dictionaries."""

    def make(**overrides):
        data = {
            "operator": {"kind": "diagonal_decay", "n": 20, "a": 1.0},
            "regulariser": {"kind": "quadratic"},
            "nu": 0.5,
            "regime": {"kind": "pconvex", "p": 2.0},
            "delta_max": 1e-2,
            "delta_min": 1e-4,
            "delta_count": 6,
            "seed": 3,
        }
        data.update(overrides)
        return data

    return make


@pytest.fixture(autouse=True, scope="session")
def quiet_logging():
    """Route structlog through stdlib logging at WARNING for the test run."""
    setup_logging(Settings(log_level="WARNING", log_format="console"))
