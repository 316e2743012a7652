"""Exact one-dimensional total-variation denoising and its dual certificate."""

from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike

from .linalg import Vector


def tv_value(u: ArrayLike) -> float:
    """Discrete total variation sum_i |u_{i+1} - u_i|."""
    return float(np.sum(np.abs(np.diff(np.asarray(u, dtype=np.float64)))))


def tv_denoise(y: ArrayLike, lam: float) -> Vector:
    """Solve argmin_x 1/2 ||x - y||^2 + lam * TV(x) exactly.

    Taut-string method: x is the slope of the shortest path from (0, 0) to
    (n, sum(y)) that stays within lam of the cumulative sums of y at every
    interior node. The path is built one segment at a time. Seen from the
    current node, the slopes reaching node k inside the tube form an
    interval; the running intersection of these intervals empties at the
    first node the segment cannot reach, and the segment then ends at the
    node that last tightened the violated side.
    """
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    x = np.empty_like(y)
    if n == 0:
        return x
    if lam <= 0.0:
        x[:] = y
        return x

    cum = np.concatenate(([0.0], np.cumsum(y)))
    lower = cum - lam
    upper = cum + lam
    lower[n] = upper[n] = cum[n]

    start, height = 0, 0.0
    while start < n:
        span = np.arange(1, n - start + 1, dtype=np.float64)
        low = (lower[start + 1 :] - height) / span
        high = (upper[start + 1 :] - height) / span
        floor = np.maximum.accumulate(low)
        ceiling = np.minimum.accumulate(high)
        empty = np.flatnonzero(floor > ceiling)
        if empty.size == 0:
            x[start:] = low[-1]
            break

        j = int(empty[0])
        if high[j] < floor[j - 1]:
            k = int(np.argmax(low[:j]))
            end = start + k + 1
            x[start:end] = low[k]
            height = lower[end]
        else:
            k = int(np.argmin(high[:j]))
            end = start + k + 1
            x[start:end] = high[k]
            height = upper[end]
        start = end
    return x


def tv_dual_variable(xi: ArrayLike) -> Tuple[Vector, float]:
    """Recover z with xi = D^T z, D the forward-difference matrix.

    Returns:
        ``(z, balance)`` where ``z`` has length n - 1 and ``balance`` is
        |sum(xi)|, the amount by which xi fails to lie in range(D^T).
    """
    xi = np.asarray(xi, dtype=np.float64)
    cumulative = np.cumsum(xi)
    return -cumulative[:-1], float(abs(cumulative[-1]))
