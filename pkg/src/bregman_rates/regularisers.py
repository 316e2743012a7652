"""Convex regularisation functionals with proximal maps and subgradients.

Each variant is a frozen pydantic model so it can be embedded directly in run
configurations (``{"kind": "huber", "threshold": 0.5}``). Vectors are plain
float64 numpy arrays; every method is a pure function of its arguments.
"""

from typing import Annotated, ClassVar, Literal, Optional, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field

from .errors import (
    DimensionError,
    NotSingleValued,
    OutOfDomain,
    SubgradientMismatch,
    Unsupported,
)
from .linalg import Vector
from .models import ConvexityProfile
from .tv1d import tv_denoise, tv_dual_variable, tv_value

# Stationarity residual tolerance for the scalar power-law prox
PROX_TOLERANCE = 1e-12

# Newton steps kept inside the bracket once PROX_TOLERANCE is met
POLISH_STEPS = 2

Step = Union[float, NDArray[np.float64]]


def _vec(u: ArrayLike) -> Vector:
    return np.asarray(u, dtype=np.float64)


class Regulariser(BaseModel):
    """Common interface of the regularisation functionals R."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    single_valued: ClassVar[bool] = True
    # R(u) = sum_i r(u_i), so prox accepts one tau per coordinate
    separable: ClassVar[bool] = True

    def value(self, u: ArrayLike) -> float:
        raise NotImplementedError

    def prox(self, u: ArrayLike, tau: Step) -> Vector:
        """argmin_w 1/2 ||w - u||^2 + tau * R(w).

        ``tau`` may be an array for separable regularisers; coordinate i then
        uses tau_i.
        """
        raise NotImplementedError

    def subgradient(self, u: ArrayLike) -> Vector:
        raise NotImplementedError

    def invert_subgradient(self, xi: ArrayLike) -> Vector:
        """Select some u with xi in dR(u)."""
        raise NotImplementedError

    def convexity_profile(self) -> ConvexityProfile:
        raise NotImplementedError

    def is_subgradient(self, u: ArrayLike, xi: ArrayLike, tol: float = 1e-8) -> bool:
        """Check xi in dR(u) up to a relative tolerance."""
        xi = _vec(xi)
        gap = np.max(np.abs(xi - self.subgradient(u)), initial=0.0)
        return bool(gap <= tol * (1.0 + np.max(np.abs(xi), initial=0.0)))


class Quadratic(Regulariser):
    """R(u) = 1/2 ||u||^2."""

    kind: Literal["quadratic"] = "quadratic"

    def value(self, u: ArrayLike) -> float:
        u = _vec(u)
        return 0.5 * float(u @ u)

    def prox(self, u: ArrayLike, tau: Step) -> Vector:
        return _vec(u) / (1.0 + np.asarray(tau, dtype=np.float64))

    def subgradient(self, u: ArrayLike) -> Vector:
        return _vec(u).copy()

    def invert_subgradient(self, xi: ArrayLike) -> Vector:
        return _vec(xi).copy()

    def convexity_profile(self) -> ConvexityProfile:
        return ConvexityProfile(p_convex=2.0, q_coconvex=2.0)


def _power_shrink(
    a: NDArray[np.float64], c: Step, p: float, max_iter: int = 200
) -> NDArray[np.float64]:
    """Nonnegative root t of t + c * t^(p-1) = a, elementwise for a >= 0.

    Safeguarded Newton: the left-hand side is increasing in t, so every
    evaluation tightens a bracket [lo, hi] and Newton steps that leave the
    bracket are replaced by bisection. Once every residual is below
    PROX_TOLERANCE, POLISH_STEPS further Newton steps are taken wherever they
    stay strictly inside the bracket.
    """
    c = np.broadcast_to(np.asarray(c, dtype=np.float64), a.shape)
    t = a / (1.0 + c)
    lo = np.zeros_like(a)
    hi = a.copy()
    scale = 1.0 + a
    polish = POLISH_STEPS
    for _ in range(max_iter):
        g = t + c * t ** (p - 1.0) - a
        active = np.abs(g) > PROX_TOLERANCE * scale
        lo = np.where(g < 0.0, t, lo)
        hi = np.where(g > 0.0, t, hi)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            newton = t - g / (1.0 + c * (p - 1.0) * t ** (p - 2.0))
        inside = np.isfinite(newton) & (newton > lo) & (newton < hi)
        if not np.any(active):
            if polish == 0:
                break
            polish -= 1
            t = np.where(inside, newton, t)
            continue
        step = np.where(inside, newton, 0.5 * (lo + hi))
        t = np.where(active, step, t)
    return t


class _PowerLaw(Regulariser):
    """R(u) = (h/p) sum |u_i|^p, with h = 1/n when no weight is given."""

    p: float
    weight: Optional[float] = Field(
        None, gt=0.0, description="Quadrature weight h; None means 1/n"
    )

    def _h(self, n: int) -> float:
        return self.weight if self.weight is not None else 1.0 / n

    def value(self, u: ArrayLike) -> float:
        u = _vec(u)
        return self._h(u.size) / self.p * float(np.sum(np.abs(u) ** self.p))

    def prox(self, u: ArrayLike, tau: Step) -> Vector:
        u = _vec(u)
        c = np.asarray(tau, dtype=np.float64) * self._h(u.size)
        t = _power_shrink(np.abs(u), c, self.p)
        return np.sign(u) * t

    def subgradient(self, u: ArrayLike) -> Vector:
        u = _vec(u)
        return self._h(u.size) * np.sign(u) * np.abs(u) ** (self.p - 1.0)

    def invert_subgradient(self, xi: ArrayLike) -> Vector:
        xi = _vec(xi)
        h = self._h(xi.size)
        return np.sign(xi) * (np.abs(xi) / h) ** (1.0 / (self.p - 1.0))


class PowerSum(_PowerLaw):
    """l^p-type term with 1 < p < 2: locally 2-convex, p/(p-1)-coconvex."""

    kind: Literal["powersum"] = "powersum"
    p: float = Field(..., gt=1.0, lt=2.0)

    def convexity_profile(self) -> ConvexityProfile:
        return ConvexityProfile(p_convex=2.0, q_coconvex=self.p / (self.p - 1.0))


class PowerSumHigh(_PowerLaw):
    """L^p-type term with p > 2: p-convex, 2-coconvex."""

    kind: Literal["powerhigh"] = "powerhigh"
    p: float = Field(..., gt=2.0)

    def convexity_profile(self) -> ConvexityProfile:
        return ConvexityProfile(p_convex=self.p, q_coconvex=2.0)


class TotalVariation1D(Regulariser):
    """R(u) = sum |u_{i+1} - u_i| on a 1D grid."""

    kind: Literal["tv"] = "tv"

    single_valued: ClassVar[bool] = False
    separable: ClassVar[bool] = False

    def value(self, u: ArrayLike) -> float:
        return tv_value(u)

    def prox(self, u: ArrayLike, tau: Step) -> Vector:
        if np.ndim(tau) != 0:
            raise Unsupported("the total-variation prox takes a scalar tau")
        return tv_denoise(u, float(tau))

    def subgradient(self, u: ArrayLike) -> Vector:
        raise NotSingleValued("total variation has a set-valued subdifferential")

    def invert_subgradient(self, xi: ArrayLike) -> Vector:
        raise Unsupported(
            "TV source synthesis is not available: the inverse subgradient "
            "of total variation is set-valued"
        )

    def convexity_profile(self) -> ConvexityProfile:
        return ConvexityProfile(p_convex=None, q_coconvex=None)

    def is_subgradient(self, u: ArrayLike, xi: ArrayLike, tol: float = 1e-8) -> bool:
        """xi = D^T z with |z| <= 1 and z = sign(Du) wherever u jumps."""
        u = _vec(u)
        z, balance = tv_dual_variable(xi)
        if balance > tol or np.any(np.abs(z) > 1.0 + tol):
            return False
        jumps = np.diff(u)
        on_jump = np.abs(jumps) > 1e-12 * (1.0 + np.max(np.abs(u), initial=0.0))
        return bool(np.all(np.abs(z[on_jump] - np.sign(jumps[on_jump])) <= tol))


class Huber(Regulariser):
    """R(u) = sum phi(u_i), quadratic for |t| <= threshold and linear beyond."""

    kind: Literal["huber"] = "huber"
    threshold: float = Field(1.0, gt=0.0, description="Breakpoint gamma")

    def value(self, u: ArrayLike) -> float:
        a = np.abs(_vec(u))
        g = self.threshold
        return float(np.sum(np.where(a <= g, 0.5 * a * a, g * a - 0.5 * g * g)))

    def prox(self, u: ArrayLike, tau: Step) -> Vector:
        u = _vec(u)
        tau = np.asarray(tau, dtype=np.float64)
        g = self.threshold
        return np.where(
            np.abs(u) <= g * (1.0 + tau), u / (1.0 + tau), u - tau * g * np.sign(u)
        )

    def subgradient(self, u: ArrayLike) -> Vector:
        return np.clip(_vec(u), -self.threshold, self.threshold)

    def invert_subgradient(self, xi: ArrayLike) -> Vector:
        """Minimal-norm preimage; |xi_i| = gamma maps to u_i = xi_i."""
        xi = _vec(xi)
        g = self.threshold
        if np.any(np.abs(xi) > g * (1.0 + 1e-12)):
            worst = float(np.max(np.abs(xi)))
            raise OutOfDomain(
                f"|xi|={worst:.6g} exceeds the Huber threshold {g}; rescale omega"
            )
        return np.clip(xi, -g, g)

    def convexity_profile(self) -> ConvexityProfile:
        return ConvexityProfile(p_convex=None, q_coconvex=2.0)


RegulariserSpec = Annotated[
    Union[Quadratic, PowerSum, PowerSumHigh, TotalVariation1D, Huber],
    Field(discriminator="kind"),
]


def _same_length(*vectors: Vector) -> None:
    sizes = {v.shape for v in vectors}
    if len(sizes) != 1 or any(v.ndim != 1 for v in vectors):
        raise DimensionError(f"vector shapes differ: {sorted(sizes)}")


def bregman(
    spec: Regulariser,
    u_tilde: ArrayLike,
    u: ArrayLike,
    xi: ArrayLike,
    check: bool = True,
) -> float:
    """Bregman distance D_xi(u_tilde, u) = R(u_tilde) - R(u) - <xi, u_tilde - u>.

    When ``check`` is set and the subdifferential is single-valued, xi is
    verified to be the subgradient at u.
    """
    u_tilde, u, xi = _vec(u_tilde), _vec(u), _vec(xi)
    _same_length(u_tilde, u, xi)
    if check and spec.single_valued and not spec.is_subgradient(u, xi):
        raise SubgradientMismatch("xi is not the subgradient of R at u")
    return spec.value(u_tilde) - spec.value(u) - float(xi @ (u_tilde - u))


def sym_bregman(
    xi: ArrayLike, xi_tilde: ArrayLike, u: ArrayLike, u_tilde: ArrayLike
) -> float:
    """Symmetric Bregman distance <xi - xi_tilde, u - u_tilde>."""
    xi, xi_tilde, u, u_tilde = _vec(xi), _vec(xi_tilde), _vec(u), _vec(u_tilde)
    _same_length(xi, xi_tilde, u, u_tilde)
    return float((xi - xi_tilde) @ (u - u_tilde))
