"""Parameter-choice exponents and predicted convergence rates per regime.

Under the rule alpha = c * delta^theta the three regimes predict

    basic    theta = 2 - 2 nu
             rate  = 2 nu
    pconvex  theta = (2p - 2 - 2p nu + 4 nu) / (p - 1 + 2 nu)
             rate  = 2 nu p / (p - 1 + 2 nu)
    qco      theta = (2 + 2 nu q - 4 nu) / (1 + 2 nu q - 2 nu)
             rate  = 2 nu q / (1 + 2 nu q - 2 nu)

The pconvex denominator balances delta^2 / alpha against the alpha-term of
the p-convex error bound, so theta + rate = 2 in every regime.
"""

import math
from typing import Union

from .errors import InadmissibleNu, InvalidAlpha, InvalidExponent, InvalidNoise
from .models import BasicRegime, ExponentPair, PConvexRegime, QCoconvexRegime

RegimeModel = Union[BasicRegime, PConvexRegime, QCoconvexRegime]

PCONVEX_DENOMINATOR_NOTE = (
    "pconvex alpha exponent uses the balancing denominator p - 1 + 2 nu "
    "(not p - 1 + nu)"
)


def admissible_range(regime: RegimeModel) -> tuple[float, float, bool]:
    """Return (low, high, low_inclusive) for nu in the given regime."""
    if isinstance(regime, QCoconvexRegime):
        return 0.5, 1.0, True
    return 0.0, 0.5, False


def check_admissible(regime: RegimeModel, nu: float) -> None:
    """Raise InadmissibleNu unless nu lies in the regime's range."""
    low, high, low_inclusive = admissible_range(regime)
    above_low = nu >= low if low_inclusive else nu > low
    if not (math.isfinite(nu) and above_low and nu <= high):
        bracket = "[" if low_inclusive else "("
        raise InadmissibleNu(
            f"inadmissible nu={nu} for regime {regime.kind}: "
            f"expected nu in {bracket}{low}, {high}]"
        )


def is_convergent_choice(theta: float) -> bool:
    """True iff alpha = c delta^theta sends both alpha and delta^2/alpha to zero."""
    return 0.0 < theta < 2.0


def theoretical_exponents(regime: RegimeModel, nu: float) -> ExponentPair:
    """Parameter-choice exponent theta and predicted rate for (regime, nu).

    Raises:
        InadmissibleNu: If nu is outside the regime's range, or the regime
            parameters yield a non-convergent parameter choice
            (qco with q = 1 at nu = 1).
    """
    check_admissible(regime, nu)

    if isinstance(regime, BasicRegime):
        theta, rate, measure = 2.0 - 2.0 * nu, 2.0 * nu, "bregman"
    elif isinstance(regime, PConvexRegime):
        p = regime.p
        denominator = p - 1.0 + 2.0 * nu
        theta = (2.0 * p - 2.0 - 2.0 * p * nu + 4.0 * nu) / denominator
        rate = 2.0 * nu * p / denominator
        measure = "bregman"
    else:
        q = regime.q
        denominator = 1.0 + 2.0 * nu * q - 2.0 * nu
        theta = (2.0 + 2.0 * nu * q - 4.0 * nu) / denominator
        rate = 2.0 * nu * q / denominator
        measure = "sym_bregman"

    if not is_convergent_choice(theta):
        raise InadmissibleNu(
            f"inadmissible nu={nu} for regime {regime.kind}: "
            f"parameter exponent theta={theta:.6g} is not in (0, 2)"
        )
    return ExponentPair(theta_alpha=theta, rate=rate, measure=measure)


def norm_rate_from(pair: ExponentPair, p_convex: float) -> float:
    """Norm rate implied by p-convexity: the (sym-)Bregman rate divided by p."""
    if not p_convex >= 1.0:
        raise InvalidExponent(f"p_convex must be >= 1, got {p_convex}")
    return pair.rate / p_convex


def bound_profile(regime: RegimeModel, nu: float, delta: float, alpha: float) -> float:
    """Constant-free shape of the regime's error bound at (delta, alpha).

    With alpha = delta^theta each profile decays like delta^rate, which makes
    it a useful reference curve next to measured errors.
    """
    check_admissible(regime, nu)
    if not delta > 0.0:
        raise InvalidNoise(f"delta must be positive, got {delta}")
    if not alpha > 0.0:
        raise InvalidAlpha(f"alpha must be positive, got {alpha}")

    data_term = delta * delta / alpha
    if isinstance(regime, BasicRegime):
        return data_term + delta ** (2.0 * nu) + alpha ** (nu / (1.0 - nu))
    if isinstance(regime, PConvexRegime):
        p = regime.p
        return data_term + alpha ** (nu * p / (p - 1.0 - p * nu + 2.0 * nu))
    q = regime.q
    return data_term + alpha ** (q * nu / (1.0 + nu * q - 2.0 * nu))


def regime_label(regime: RegimeModel) -> str:
    """Short human-readable regime name, e.g. ``pconvex(p=2)``."""
    if isinstance(regime, PConvexRegime):
        return f"pconvex(p={regime.p:g})"
    if isinstance(regime, QCoconvexRegime):
        return f"qco(q={regime.q:g})"
    return "basic"
