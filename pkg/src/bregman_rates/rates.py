"""Noise-level sweeps, error measurement and log-log slope fitting."""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from .config import DEFAULT_TOLERANCE, ExperimentConfig
from .errors import FitError, NonPositiveError
from .exponents import (
    PCONVEX_DENOMINATOR_NOTE,
    bound_profile,
    norm_rate_from,
    regime_label,
    theoretical_exponents,
)
from .linalg import SpectralOperator, Vector, apply
from .logging import sweep_logger
from .models import (
    MEASURES,
    ExponentPair,
    FitResult,
    PConvexRegime,
    RatePoint,
    RateReport,
    Verdict,
)
from .regularisers import Quadratic, Regulariser, bregman, sym_bregman
from .solver import SolveOptions, SolveResult, direct_result, solve
from .sources import (
    ObservedTruth,
    SourceInstance,
    add_noise,
    add_worst_case_noise,
    alternating_omega,
    observe,
    point_seed,
    preset_operator,
    random_omega,
    step_truth,
    synthesize,
)

CSV_COLUMNS = (
    "delta",
    "alpha",
    "iterations",
    "bregman",
    "sym_bregman",
    "norm_err",
    "residual",
)

# Slack for the minimizer inequality and the value bound
BOUND_SLACK = 1e-9

# alpha * 10^(j/4), j = -8..8
ORACLE_FACTORS = 10.0 ** (np.arange(-8, 9) / 4.0)

Truth = Union[SourceInstance, ObservedTruth]


def delta_grid(delta_max: float, delta_min: float, count: int) -> Vector:
    """Log-spaced, strictly decreasing noise levels."""
    return np.geomspace(delta_max, delta_min, count)


def fit_slope(
    points: Sequence[Tuple[float, float]], window: Optional[Tuple[int, int]] = None
) -> FitResult:
    """Least-squares fit of log(error) against log(delta).

    Args:
        points: ``(delta, error)`` pairs.
        window: Optional ``[start, stop)`` slice of ``points`` to fit.

    Raises:
        FitError: Fewer than three points in the window, or all deltas equal.
        NonPositiveError: A delta or error in the window is not positive.
    """
    selected = list(points[slice(*window)] if window is not None else points)
    if len(selected) < 3:
        raise FitError(f"slope fit needs at least 3 points, got {len(selected)}")

    deltas = np.array([p[0] for p in selected], dtype=np.float64)
    errors = np.array([p[1] for p in selected], dtype=np.float64)
    bad = ~(np.isfinite(errors) & (errors > 0.0) & (deltas > 0.0))
    if np.any(bad):
        raise NonPositiveError(
            f"log-log fit needs positive values, got errors {errors[bad].tolist()}"
        )

    log_delta = np.log(deltas)
    if np.ptp(log_delta) == 0.0:
        raise FitError("slope fit needs at least two distinct noise levels")

    fit = stats.linregress(log_delta, np.log(errors))
    return FitResult(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=min(1.0, float(fit.rvalue) ** 2),
        points=len(selected),
    )


def build_truth(op: SpectralOperator, config: ExperimentConfig) -> Truth:
    """Synthesized source instance, or the chosen truth of an observational run."""
    n = op.shape[1]
    if config.synthesize:
        if config.omega == "random":
            omega = random_omega(n, config.seed, config.omega_norm)
        else:
            omega = alternating_omega(n, config.omega_norm)
        return synthesize(op, config.regulariser, config.nu, omega)
    u = np.asarray(config.u_dagger) if config.u_dagger is not None else step_truth(n)
    return observe(op, config.regulariser, u)


def _use_direct(config: ExperimentConfig) -> bool:
    if config.solver == "direct":
        return True
    return config.solver == "auto" and isinstance(config.regulariser, Quadratic)


def _solve_point(
    op: SpectralOperator, v: Vector, alpha: float, config: ExperimentConfig
) -> SolveResult:
    if _use_direct(config):
        return direct_result(op, v, alpha)
    opts = SolveOptions(**config.solve_options.model_dump())
    return solve(op, v, alpha, config.regulariser, opts)


@dataclass(frozen=True)
class _Sweep:
    """Everything a grid point needs; shared read-only across workers."""

    config: ExperimentConfig
    op: SpectralOperator
    truth: Truth
    theory: ExponentPair
    grid: Vector

    @property
    def spec(self) -> Regulariser:
        return self.config.regulariser

    def noisy_data(self, index: int, delta: float, alpha: float) -> Vector:
        seed = point_seed(self.config.seed, index)
        if self.config.noise_model == "worst_case":
            data = add_worst_case_noise(
                self.op, self.truth.v_dagger, delta, alpha, seed
            )
        else:
            data = add_noise(self.truth.v_dagger, delta, seed)
        return data.v_delta

    def errors(
        self, result: SolveResult, v_delta: Vector
    ) -> Dict[str, Optional[float]]:
        u_dagger, xi_dagger = self.truth.u_dagger, self.truth.xi_dagger
        values: Dict[str, Optional[float]] = dict.fromkeys(MEASURES)
        wanted = set(self.config.measures)
        if xi_dagger is not None:
            if "bregman" in wanted:
                values["bregman"] = bregman(
                    self.spec, result.u, u_dagger, xi_dagger, check=False
                )
            if "sym_bregman" in wanted:
                values["sym_bregman"] = sym_bregman(
                    result.xi, xi_dagger, result.u, u_dagger
                )
        if "norm" in wanted:
            values["norm"] = float(np.linalg.norm(result.u - u_dagger))
        if "residual" in wanted:
            residual = apply(self.op, result.u) - v_delta
            values["residual"] = float(np.linalg.norm(residual))
        return values

    def oracle(self, v_delta: Vector, alpha: float) -> Tuple[float, float]:
        """Scan alpha * 10^(j/4) and return the alpha with the smallest norm error."""
        best_alpha, best_norm = alpha, math.inf
        for factor in ORACLE_FACTORS:
            trial = alpha * float(factor)
            u = _solve_point(self.op, v_delta, trial, self.config).u
            err = float(np.linalg.norm(u - self.truth.u_dagger))
            if err < best_norm:
                best_alpha, best_norm = trial, err
        return best_alpha, best_norm

    def run_point(self, index: int) -> RatePoint:
        config = self.config
        delta = float(self.grid[index])
        alpha = config.alpha_constant * delta**self.theory.theta_alpha
        v_delta = self.noisy_data(index, delta, alpha)
        result = _solve_point(self.op, v_delta, alpha, config)

        r_dagger = self.spec.value(self.truth.u_dagger)
        r_alpha = self.spec.value(result.u)
        tikhonov_bound = 0.5 * delta**2 + alpha * r_dagger
        minimizer_ok = result.objective <= tikhonov_bound + BOUND_SLACK
        value_ok = r_alpha <= delta**2 / (2.0 * alpha) + r_dagger + BOUND_SLACK

        oracle_alpha = oracle_norm = None
        if config.oracle_alpha:
            oracle_alpha, oracle_norm = self.oracle(v_delta, alpha)

        point = RatePoint(
            index=index,
            delta=delta,
            alpha=alpha,
            iterations=result.iterations,
            converged=result.converged,
            errors=self.errors(result, v_delta),
            bound_profile=bound_profile(config.regime, config.nu, delta, alpha),
            minimizer_inequality_ok=bool(minimizer_ok),
            value_bound_ok=bool(value_ok),
            oracle_alpha=oracle_alpha,
            oracle_norm=oracle_norm,
        )
        sweep_logger.log_point(point)
        if point.excluded:
            sweep_logger.log_point_excluded(index, delta, "iteration limit")
        return point


def _fit_measure(
    points: Sequence[RatePoint], measure: str, window: Tuple[int, int]
) -> Optional[FitResult]:
    usable: List[Tuple[float, float]] = []
    for point in points[slice(*window)]:
        value = point.errors.get(measure)
        if point.excluded or value is None:
            continue
        if not value > 0.0:
            sweep_logger.log_point_excluded(
                point.index, point.delta, f"{measure} not positive"
            )
            continue
        usable.append((point.delta, value))
    if len(usable) < 3:
        return None
    fit = fit_slope(usable)
    sweep_logger.log_fit(measure, fit.slope, fit.r_squared, fit.points)
    return fit


def _verdict(
    measure: str,
    target: float,
    fit: Optional[FitResult],
    tolerance: float,
    two_sided: bool,
    observational: bool,
) -> Verdict:
    slope = fit.slope if fit is not None else None
    deviation = slope - target if slope is not None else None
    if observational:
        status = "observational"
    elif deviation is None:
        status = "insufficient"
    elif two_sided:
        status = "pass" if abs(deviation) <= tolerance else "fail"
    else:
        status = "pass" if deviation >= -tolerance else "fail"
    return Verdict(
        measure=measure,  # type: ignore[arg-type]
        target_rate=target,
        slope=slope,
        deviation=deviation,
        tolerance=tolerance,
        two_sided=two_sided,
        status=status,  # type: ignore[arg-type]
    )


def run_sweep(
    config: ExperimentConfig,
    jobs: int = 1,
    tolerances: Optional[Mapping[str, float]] = None,
) -> RateReport:
    """Sweep the noise grid, solve at alpha = c delta^theta and fit error slopes.

    Grid points are independent and run on ``jobs`` threads; all randomness
    comes from ``(config.seed, index)`` so the report does not depend on
    ``jobs``.

    Raises:
        InadmissibleNu: If nu does not fit the regime.
        Unsupported: For source synthesis with total variation.
        OutOfDomain: For Huber sources exceeding the threshold.
    """
    tolerances = dict(tolerances or {})
    op = preset_operator(config.operator)
    theory = theoretical_exponents(config.regime, config.nu)
    truth = build_truth(op, config)
    grid = delta_grid(config.delta_max, config.delta_min, config.delta_count)
    sweep = _Sweep(config=config, op=op, truth=truth, theory=theory, grid=grid)

    sweep_logger.log_sweep_start(
        config.regulariser.kind, regime_label(config.regime), config.nu, grid.size, jobs
    )

    indices = range(grid.size)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(sweep.run_point, indices))
    else:
        points = [sweep.run_point(i) for i in indices]

    window = config.window
    fitted = {m: _fit_measure(points, m, window) for m in config.measures}

    observational = not config.synthesize or truth.xi_dagger is None
    two_sided = isinstance(config.regulariser, Quadratic)
    p_convex = config.regulariser.convexity_profile().p_convex
    norm_rate = norm_rate_from(theory, p_convex) if p_convex is not None else None

    targets: Dict[str, float] = {}
    if theory.measure in config.measures:
        targets[theory.measure] = theory.rate
    if norm_rate is not None and "norm" in config.measures:
        targets["norm"] = norm_rate

    verdicts = []
    for measure, target in targets.items():
        verdict = _verdict(
            measure,
            target,
            fitted.get(measure),
            tolerances.get(measure, DEFAULT_TOLERANCE),
            two_sided,
            observational,
        )
        sweep_logger.log_verdict(verdict)
        verdicts.append(verdict)

    notes = [
        f"kkt_tolerance={config.solve_options.kkt_tolerance:g}"
        + (" (direct solver)" if _use_direct(config) else ""),
        f"noise_model={config.noise_model}",
    ]
    if isinstance(config.regime, PConvexRegime):
        notes.append(PCONVEX_DENOMINATOR_NOTE)
    if observational:
        notes.append("observational: no certified source exponent for this truth")
    excluded = [p.index for p in points if p.excluded]
    if excluded:
        notes.append(f"iteration limit at grid points {excluded}; excluded from fits")

    return RateReport(
        config=config.model_dump(mode="json"),
        points=points,
        fitted=fitted,
        theory=theory,
        norm_rate=norm_rate,
        verdicts=verdicts,
        observational=observational,
        notes=notes,
    )


def _cell(value: Optional[float]) -> str:
    return "" if value is None else format(value, ".17g")


def write_csv(report: RateReport, path: Path) -> None:
    """Per-point CSV, full double precision, missing measures left empty."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for p in report.points:
            w.writerow([
                _cell(p.delta),
                _cell(p.alpha),
                str(p.iterations),
                _cell(p.errors.get("bregman")),
                _cell(p.errors.get("sym_bregman")),
                _cell(p.errors.get("norm")),
                _cell(p.errors.get("residual")),
            ])


def write_report(report: RateReport, path: Path) -> None:
    """Dump the report as JSON."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
