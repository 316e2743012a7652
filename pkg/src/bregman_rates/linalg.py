"""Dense operators, singular-value factorization and spectral calculus."""

from dataclasses import dataclass
from typing import Any, Tuple

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionError, InvalidExponent, InvalidOperator

Vector = NDArray[np.float64]

# Singular values below RANK_CUTOFF * sigma_max belong to the kernel.
RANK_CUTOFF = 1e-12


def as_vector(values: ArrayLike, name: str = "vector") -> Vector:
    """Coerce input to a finite, non-empty float64 vector."""
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim == 0:
        vec = vec.reshape(1)
    if vec.ndim != 1 or vec.size == 0:
        raise DimensionError(f"{name} must be a non-empty 1-D array, got {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise DimensionError(f"{name} has non-finite coordinates")
    return vec


def _frozen(array: NDArray[Any]) -> NDArray[Any]:
    array = np.array(array, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SpectralOperator:
    """A dense linear map F together with its thin singular-value factorization.

    ``matrix = left @ diag(sigma) @ right.T`` with ``sigma`` strictly positive
    and sorted in descending order. Only directions above the rank cutoff are
    kept, so ``left`` is m x r and ``right`` is n x r.
    """

    matrix: NDArray[np.float64]
    left: NDArray[np.float64]
    sigma: NDArray[np.float64]
    right: NDArray[np.float64]

    @property
    def shape(self) -> Tuple[int, int]:
        """(m, n): data dimension by unknown dimension."""
        m, n = self.matrix.shape
        return m, n

    @property
    def rank(self) -> int:
        return int(self.sigma.size)

    @property
    def lipschitz(self) -> float:
        """Lipschitz constant sigma_max^2 of the data-fit gradient."""
        return float(self.sigma[0] ** 2)


def factorize(matrix: ArrayLike) -> SpectralOperator:
    """Factorize a dense m x n matrix.

    Raises:
        InvalidOperator: If the matrix is not two-dimensional, has non-finite
            entries, or has no singular value above the rank cutoff.
    """
    mat = np.asarray(matrix, dtype=np.float64)
    if mat.ndim == 1:
        mat = mat.reshape(1, -1)
    if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 1:
        raise InvalidOperator(f"operator must be a non-empty 2-D array: {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise InvalidOperator("operator has non-finite entries")

    left, sigma, right_t = scipy.linalg.svd(mat, full_matrices=False)
    if sigma.size == 0 or sigma[0] <= 0.0:
        raise InvalidOperator("operator has no nonzero singular values")

    keep = sigma > RANK_CUTOFF * sigma[0]
    return SpectralOperator(
        matrix=_frozen(mat),
        left=_frozen(left[:, keep]),
        sigma=_frozen(sigma[keep]),
        right=_frozen(right_t[keep].T),
    )


def _check_length(vec: Vector, expected: int, name: str) -> None:
    if vec.shape != (expected,):
        raise DimensionError(f"{name} has shape {vec.shape}, expected ({expected},)")


def apply(op: SpectralOperator, u: ArrayLike) -> Vector:
    """Compute F u."""
    vec = np.asarray(u, dtype=np.float64)
    _check_length(vec, op.shape[1], "u")
    return op.matrix @ vec


def apply_adjoint(op: SpectralOperator, v: ArrayLike) -> Vector:
    """Compute F* v (the transpose action)."""
    vec = np.asarray(v, dtype=np.float64)
    _check_length(vec, op.shape[0], "v")
    return op.matrix.T @ vec


def fractional_gram_apply(op: SpectralOperator, nu: float, w: ArrayLike) -> Vector:
    """Apply (F*F)^nu spectrally: sum_k sigma_k^(2 nu) <v_k, w> v_k.

    For nu = 0 this is the orthogonal projection onto the range of F*; for
    nu > 0 kernel components of ``w`` are annihilated.

    Raises:
        InvalidExponent: If nu is outside [0, 1].
        DimensionError: If ``w`` does not have length n.
    """
    if not 0.0 <= nu <= 1.0:
        raise InvalidExponent(f"nu={nu} outside [0, 1]")
    vec = np.asarray(w, dtype=np.float64)
    _check_length(vec, op.shape[1], "w")
    return op.right @ (op.sigma ** (2.0 * nu) * (op.right.T @ vec))


def gram_power_factor(op: SpectralOperator, mu: float, w: ArrayLike) -> Vector:
    """Apply (FF*)^mu spectrally on the data side, for mu in [0, 1/2]."""
    if not 0.0 <= mu <= 0.5:
        raise InvalidExponent(f"mu={mu} outside [0, 1/2]")
    vec = np.asarray(w, dtype=np.float64)
    _check_length(vec, op.shape[0], "w")
    return op.left @ (op.sigma ** (2.0 * mu) * (op.left.T @ vec))


def operator_norm(op: SpectralOperator) -> float:
    """Return sigma_max."""
    return float(op.sigma[0])


def adjoint_preimage(op: SpectralOperator, xi: ArrayLike) -> Vector:
    """Minimal-norm w with F* w = xi (exact when xi lies in range(F*))."""
    vec = np.asarray(xi, dtype=np.float64)
    _check_length(vec, op.shape[1], "xi")
    return op.left @ ((op.right.T @ vec) / op.sigma)
