"""Pydantic models for regimes, exponents and machine-readable reports."""

from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

Measure = Literal["bregman", "sym_bregman", "norm", "residual"]
MEASURES: tuple[Measure, ...] = ("bregman", "sym_bregman", "norm", "residual")


# Convexity classification


class ConvexityProfile(BaseModel):
    """Local p-convexity and q-coconvexity exponents of a regulariser."""

    model_config = ConfigDict(frozen=True)

    p_convex: Optional[float] = Field(
        None, ge=1.0, description="p with C||u' - u||^p <= D_xi(u', u), if any"
    )
    q_coconvex: Optional[float] = Field(
        None, ge=1.0, description="q with C||xi1 - xi2||^q <= D^sym, if any"
    )


# Regimes


class BasicRegime(BaseModel):
    """Rates from the plain source condition, 0 < nu <= 1/2."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["basic"] = "basic"


class PConvexRegime(BaseModel):
    """Rates for locally p-convex regularisers, 0 < nu <= 1/2."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["pconvex"] = "pconvex"
    p: float = Field(..., ge=1.0, description="Convexity exponent")


class QCoconvexRegime(BaseModel):
    """Higher-order rates for locally q-coconvex regularisers, 1/2 <= nu <= 1."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["qco"] = "qco"
    q: float = Field(..., ge=1.0, description="Coconvexity exponent")


Regime = Annotated[
    Union[BasicRegime, PConvexRegime, QCoconvexRegime], Field(discriminator="kind")
]


class ExponentPair(BaseModel):
    """Parameter-choice exponent and rate: alpha ~ delta^theta, error ~ delta^rate."""

    model_config = ConfigDict(frozen=True)

    theta_alpha: float = Field(..., gt=0.0, lt=2.0, description="alpha ~ delta^theta")
    rate: float = Field(..., gt=0.0, le=2.0, description="error ~ delta^rate")
    measure: Literal["bregman", "sym_bregman"] = Field(
        ..., description="Error measure the rate refers to"
    )


# Sweep reports


class FitResult(BaseModel):
    """Ordinary least squares fit of log(error) against log(delta)."""

    slope: float
    intercept: float
    r_squared: float = Field(..., ge=0.0, le=1.0)
    points: int = Field(..., ge=2, description="Number of points used")


class Verdict(BaseModel):
    """Comparison of a fitted slope against its predicted rate."""

    measure: Measure
    target_rate: float
    slope: Optional[float] = None
    deviation: Optional[float] = Field(None, description="slope - target_rate")
    tolerance: float
    two_sided: bool
    status: Literal["pass", "fail", "insufficient", "observational"]


class RatePoint(BaseModel):
    """One grid point of a noise-level sweep."""

    index: int
    delta: float
    alpha: float
    iterations: int
    converged: bool
    errors: Dict[str, Optional[float]] = Field(default_factory=dict)
    bound_profile: Optional[float] = None
    minimizer_inequality_ok: Optional[bool] = None
    value_bound_ok: Optional[bool] = None
    oracle_alpha: Optional[float] = None
    oracle_norm: Optional[float] = None

    @property
    def excluded(self) -> bool:
        """Points that hit the iteration limit are left out of slope fits."""
        return not self.converged


class RateReport(BaseModel):
    """Outcome of a sweep: per-point errors, fitted slopes and verdicts."""

    config: Dict[str, Any] = Field(default_factory=dict)
    points: List[RatePoint]
    fitted: Dict[str, Optional[FitResult]] = Field(default_factory=dict)
    theory: ExponentPair
    norm_rate: Optional[float] = None
    verdicts: List[Verdict] = Field(default_factory=list)
    observational: bool = False
    notes: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.status in ("pass", "observational") for v in self.verdicts)


# Single solves and verification suites


class SolveReport(BaseModel):
    """JSON payload written by the solve command."""

    u: List[float]
    omega: List[float]
    xi: List[float]
    kkt_residual: float
    objective: float
    iterations: int
    converged: bool


class SuiteResult(BaseModel):
    """Pass/fail counts of one property suite."""

    name: str
    passed: int
    total: int
    worst: float = Field(0.0, description="Largest observed violation margin")
    details: List[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.total
