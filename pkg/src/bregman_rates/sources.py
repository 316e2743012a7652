"""Problem instances satisfying a source condition, test operators and noisy data."""

from dataclasses import dataclass
from typing import Annotated, List, Literal, Optional, Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field

from .errors import DimensionError, InvalidExponent, InvalidNoise, InvalidOperator
from .linalg import (
    SpectralOperator,
    Vector,
    apply,
    as_vector,
    factorize,
    fractional_gram_apply,
)
from .regularisers import Regulariser

# Operator presets


class _Preset(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    def matrix(self) -> np.ndarray:
        raise NotImplementedError


class DiagonalDecay(_Preset):
    """diag(k^-a), k = 1..n."""

    kind: Literal["diagonal_decay"] = "diagonal_decay"
    n: int = Field(..., description="Dimension")
    a: float = Field(1.0, description="Decay exponent of the singular values")

    def matrix(self) -> np.ndarray:
        if self.n < 2 or not self.a > 0.0:
            raise InvalidOperator(
                f"diagonal_decay needs n >= 2 and a > 0, got n={self.n}, a={self.a}"
            )
        return np.diag(np.arange(1, self.n + 1, dtype=np.float64) ** -self.a)


class Integration(_Preset):
    """Lower-triangular cumulative sum scaled by 1/n."""

    kind: Literal["integration"] = "integration"
    n: int

    def matrix(self) -> np.ndarray:
        if self.n < 2:
            raise InvalidOperator(f"integration needs n >= 2, got n={self.n}")
        return np.tril(np.ones((self.n, self.n))) / self.n


class RandomGaussian(_Preset):
    """Seeded i.i.d. normal entries scaled by 1/sqrt(m)."""

    kind: Literal["random_gaussian"] = "random_gaussian"
    m: int
    n: int
    seed: int = 0

    def matrix(self) -> np.ndarray:
        if self.m < 1 or self.n < 2:
            raise InvalidOperator(
                f"random_gaussian needs m >= 1 and n >= 2, got {self.m}x{self.n}"
            )
        rng = np.random.default_rng(self.seed)
        return rng.standard_normal((self.m, self.n)) / np.sqrt(self.m)


class Identity(_Preset):
    kind: Literal["identity"] = "identity"
    n: int

    def matrix(self) -> np.ndarray:
        if self.n < 1:
            raise InvalidOperator(f"identity needs n >= 1, got n={self.n}")
        return np.eye(self.n)


class Diagonal(_Preset):
    kind: Literal["diagonal"] = "diagonal"
    values: List[float]

    def matrix(self) -> np.ndarray:
        if not self.values:
            raise InvalidOperator("diagonal needs at least one value")
        return np.diag(np.asarray(self.values, dtype=np.float64))


OperatorPreset = Annotated[
    Union[DiagonalDecay, Integration, RandomGaussian, Identity, Diagonal],
    Field(discriminator="kind"),
]


def preset_operator(preset: _Preset) -> SpectralOperator:
    """Build and factorize a preset test operator."""
    return factorize(preset.matrix())


def diagonal_decay(n: int, a: float = 1.0) -> SpectralOperator:
    return preset_operator(DiagonalDecay(n=n, a=a))


def integration(n: int) -> SpectralOperator:
    return preset_operator(Integration(n=n))


def random_gaussian(m: int, n: int, seed: int = 0) -> SpectralOperator:
    return preset_operator(RandomGaussian(m=m, n=n, seed=seed))


# Source elements


def alternating_omega(n: int, norm: float = 1.0) -> Vector:
    """Coordinates (-1)^(k+1) k^(-1/2), rescaled to the requested norm."""
    k = np.arange(1, n + 1, dtype=np.float64)
    omega = np.where(k % 2 == 1, 1.0, -1.0) / np.sqrt(k)
    return norm * omega / np.linalg.norm(omega)


def random_omega(n: int, seed: int, norm: float = 1.0) -> Vector:
    omega = np.random.default_rng(seed).standard_normal(n)
    return norm * omega / np.linalg.norm(omega)


def step_truth(n: int) -> Vector:
    """Unit step: zeros on the first half, ones on the second."""
    u = np.zeros(n)
    u[n // 2 :] = 1.0
    return u


@dataclass(frozen=True)
class SourceInstance:
    """Consistent bundle realising xi = (F*F)^nu omega in dR(u)."""

    nu: float
    omega_dagger: Vector
    xi_dagger: Vector
    u_dagger: Vector
    v_dagger: Vector
    omega_norm: float


@dataclass(frozen=True)
class ObservedTruth:
    """A directly chosen truth without a certified source exponent."""

    u_dagger: Vector
    v_dagger: Vector
    xi_dagger: Optional[Vector] = None


def synthesize(
    op: SpectralOperator, spec: Regulariser, nu: float, omega_dagger: ArrayLike
) -> SourceInstance:
    """Build u, v and xi from omega so that the source condition holds exactly.

    Raises:
        InvalidExponent: If nu is outside (0, 1].
        Unsupported: For total variation.
        OutOfDomain: For Huber when some |xi_i| exceeds the threshold.
    """
    if not 0.0 < nu <= 1.0:
        raise InvalidExponent(f"nu={nu} outside (0, 1]")
    omega = as_vector(omega_dagger, "omega_dagger")
    if omega.size != op.shape[1]:
        raise DimensionError(
            f"omega has length {omega.size}, operator has {op.shape[1]} columns"
        )

    xi = fractional_gram_apply(op, nu, omega)
    u = spec.invert_subgradient(xi)
    return SourceInstance(
        nu=nu,
        omega_dagger=omega,
        xi_dagger=xi,
        u_dagger=u,
        v_dagger=apply(op, u),
        omega_norm=float(np.linalg.norm(omega)),
    )


def observe(
    op: SpectralOperator, spec: Regulariser, u_dagger: ArrayLike
) -> ObservedTruth:
    """Wrap a chosen truth; xi is its subgradient where that is single-valued."""
    u = as_vector(u_dagger, "u_dagger")
    xi = spec.subgradient(u) if spec.single_valued else None
    return ObservedTruth(u_dagger=u, v_dagger=apply(op, u), xi_dagger=xi)


# Noise


@dataclass(frozen=True)
class NoisyData:
    """Observed data with ||v_delta - v_dagger|| = delta."""

    v_delta: Vector
    delta: float
    seed: int


def point_seed(seed: int, index: int) -> int:
    """Seed for grid point ``index`` derived from the sweep seed."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _check_delta(delta: float) -> None:
    if not delta > 0.0:
        raise InvalidNoise(f"noise level must be positive, got {delta}")


def add_noise(v_dagger: ArrayLike, delta: float, seed: int) -> NoisyData:
    """Perturb along a seeded Gaussian direction scaled to norm exactly delta."""
    _check_delta(delta)
    v = as_vector(v_dagger, "v_dagger")
    direction = np.random.default_rng(seed).standard_normal(v.size)
    direction /= np.linalg.norm(direction)
    return NoisyData(v_delta=v + delta * direction, delta=delta, seed=seed)


def add_worst_case_noise(
    op: SpectralOperator, v_dagger: ArrayLike, delta: float, alpha: float, seed: int
) -> NoisyData:
    """Perturb along the left singular vector most amplified at this alpha.

    The direction maximises sigma_k / (sigma_k^2 + alpha), the noise gain of
    quadratic Tikhonov filtering; only its sign is drawn from the seed.
    """
    _check_delta(delta)
    v = as_vector(v_dagger, "v_dagger")
    k = int(np.argmax(op.sigma / (op.sigma**2 + alpha)))
    sign = 1.0 if np.random.default_rng(seed).standard_normal() >= 0.0 else -1.0
    return NoisyData(v_delta=v + sign * delta * op.left[:, k], delta=delta, seed=seed)
