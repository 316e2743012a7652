"""Structured logging configuration for bregman-rates."""

import logging
import sys
from typing import TYPE_CHECKING, Any, Dict, Optional, Tuple

import structlog
from rich.console import Console
from rich.logging import RichHandler

from .config import Settings, get_settings

if TYPE_CHECKING:
    from .models import RatePoint, SuiteResult, Verdict
    from .solver import SolveResult


def setup_logging(settings: Optional[Settings] = None) -> None:
    """Configure structured logging; everything goes to stderr."""
    settings = settings or get_settings()

    structlog.configure(
        processors=[
            structlog.stdlib.add_log_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            (
                structlog.processors.JSONRenderer()
                if settings.log_format == "json"
                else structlog.dev.ConsoleRenderer(colors=True)
            ),
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    # stdout is reserved for tables and JSON output
    if settings.log_format == "console":
        handler: logging.Handler = RichHandler(
            console=Console(stderr=True), rich_tracebacks=True
        )
    else:
        handler = logging.StreamHandler(sys.stderr)
    logging.basicConfig(
        format="%(message)s",
        level=getattr(logging, settings.log_level.upper()),
        handlers=[handler],
        force=True,
    )


def get_logger(name: str) -> structlog.BoundLogger:
    """Get a structured logger instance."""
    return structlog.get_logger(name)


class SolveLogger:
    """Logger for individual Tikhonov solves."""

    def __init__(self):
        self.logger = get_logger("bregman_rates.solver")

    def log_solve_start(self, shape: Tuple[int, int], alpha: float, kind: str) -> None:
        self.logger.debug(
            "Solve started", shape=list(shape), alpha=alpha, regulariser=kind
        )

    def log_solve_complete(self, result: "SolveResult") -> None:
        """Log the outcome; a missed residual target is a warning."""
        fields: Dict[str, Any] = {
            "iterations": result.iterations,
            "kkt_residual": result.kkt_residual,
            "target": result.target,
            "restarts": result.restarts,
            "objective": result.objective,
            "elapsed_ms": result.elapsed_ms,
        }
        if result.converged:
            self.logger.debug("Solve converged", **fields)
        else:
            self.logger.warning("Iteration limit reached", **fields)


class SweepLogger:
    """Logger for noise-level sweeps and slope fits."""

    def __init__(self):
        self.logger = get_logger("bregman_rates.rates")

    def log_sweep_start(
        self, regulariser: str, regime: str, nu: float, points: int, jobs: int
    ) -> None:
        self.logger.info(
            "Sweep started",
            regulariser=regulariser,
            regime=regime,
            nu=nu,
            points=points,
            jobs=jobs,
        )

    def log_point(self, point: "RatePoint") -> None:
        self.logger.debug(
            "Sweep point done",
            index=point.index,
            delta=point.delta,
            alpha=point.alpha,
            iterations=point.iterations,
            **{k: v for k, v in point.errors.items()},
        )

    def log_point_excluded(self, index: int, delta: float, reason: str) -> None:
        self.logger.warning(
            "Point excluded from fit", index=index, delta=delta, reason=reason
        )

    def log_fit(
        self, measure: str, slope: float, r_squared: float, points: int
    ) -> None:
        self.logger.info(
            "Slope fitted",
            measure=measure,
            slope=slope,
            r_squared=r_squared,
            points=points,
        )

    def log_verdict(self, verdict: "Verdict") -> None:
        log = self.logger.warning if verdict.status == "fail" else self.logger.info
        log(
            "Rate verdict",
            measure=verdict.measure,
            status=verdict.status,
            target_rate=verdict.target_rate,
            slope=verdict.slope,
            tolerance=verdict.tolerance,
        )


class VerifyLogger:
    """Logger for property suites."""

    def __init__(self):
        self.logger = get_logger("bregman_rates.verification")

    def log_suite(self, result: "SuiteResult", elapsed_ms: int) -> None:
        fields = dict(
            suite=result.name,
            passed=result.passed,
            total=result.total,
            worst=result.worst,
            elapsed_ms=elapsed_ms,
        )
        if result.ok:
            self.logger.info("Suite passed", **fields)
        else:
            self.logger.error("Suite failed", details=result.details[:5], **fields)


# Global logger instances
solve_logger = SolveLogger()
sweep_logger = SweepLogger()
verify_logger = VerifyLogger()
