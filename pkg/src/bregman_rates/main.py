"""Command-line entry point for bregman-rates.

Exit codes: 0 success, 1 a scientific failure (slope verdict, failed
property suite, iteration limit), 2 a usage or input error.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Union

import yaml
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from . import __version__
from .config import ConfigManager, Settings
from .errors import BregmanRatesError, IterationLimit
from .exponents import norm_rate_from, regime_label, theoretical_exponents
from .logging import get_logger, setup_logging
from .models import BasicRegime, PConvexRegime, QCoconvexRegime, SolveReport
from .rates import run_sweep, write_csv, write_report
from .regularisers import (
    Huber,
    PowerSum,
    PowerSumHigh,
    Quadratic,
    Regulariser,
    TotalVariation1D,
)
from .solver import SolveOptions, SolveResult, direct_result, solve
from .sources import (
    Diagonal,
    DiagonalDecay,
    Identity,
    Integration,
    RandomGaussian,
    preset_operator,
)
from .verification import run_suites

logger = get_logger("bregman_rates.main")

USAGE_ERROR = 2
SCIENTIFIC_FAILURE = 1


class UsageError(Exception):
    """Raised for malformed command-line values."""

    pass


def _console() -> Console:
    return Console(file=sys.stdout, soft_wrap=True)


def _fail(message: str) -> int:
    Console(file=sys.stderr, soft_wrap=True).print(f"error: {message}", markup=False)
    return USAGE_ERROR


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.6g}"


# Flag parsing helpers


def parse_operator(
    text: str,
) -> Union[Identity, Diagonal, DiagonalDecay, Integration, RandomGaussian]:
    """Operator preset from ``identity:N``, ``diag:a,b,...``, ``decay:N:A``,
    ``integration:N`` or ``gaussian:M:N:SEED``."""
    kind, _, rest = text.partition(":")
    parts = rest.split(":") if rest else []
    try:
        if kind == "identity" and len(parts) == 1:
            return Identity(n=int(parts[0]))
        if kind == "diag" and len(parts) == 1:
            return Diagonal(values=[float(x) for x in parts[0].split(",")])
        if kind == "decay" and len(parts) in (1, 2):
            a = float(parts[1]) if len(parts) == 2 else 1.0
            return DiagonalDecay(n=int(parts[0]), a=a)
        if kind == "integration" and len(parts) == 1:
            return Integration(n=int(parts[0]))
        if kind == "gaussian" and len(parts) == 3:
            return RandomGaussian(m=int(parts[0]), n=int(parts[1]), seed=int(parts[2]))
    except ValueError as exc:
        raise UsageError(f"bad operator {text!r}: {exc}") from exc
    raise UsageError(f"unknown operator {text!r}")


def parse_regulariser(text: str) -> Regulariser:
    """Regulariser from ``quadratic``, ``huber[:G]``, ``powersum:P[:H]``,
    ``powerhigh:P[:H]`` or ``tv``."""
    kind, *parts = text.split(":")
    try:
        values = [float(x) for x in parts]
        if kind == "quadratic" and not values:
            return Quadratic()
        if kind == "tv" and not values:
            return TotalVariation1D()
        if kind == "huber" and len(values) <= 1:
            return Huber(threshold=values[0]) if values else Huber()
        if kind in ("powersum", "powerhigh") and len(values) in (1, 2):
            cls = PowerSum if kind == "powersum" else PowerSumHigh
            weight = values[1] if len(values) == 2 else None
            return cls(p=values[0], weight=weight)
    except ValueError as exc:
        raise UsageError(f"bad regulariser {text!r}: {exc}") from exc
    raise UsageError(f"unknown regulariser {text!r}")


def _read_data(args: argparse.Namespace) -> List[float]:
    if args.data is not None:
        with open(args.data, "r") as f:
            data = json.load(f)
        if not isinstance(data, list):
            raise UsageError(f"{args.data} must contain a JSON list of numbers")
        return [float(x) for x in data]
    if args.v is not None:
        return [float(x) for x in args.v.split(",")]
    raise UsageError("one of --data or --v is required")


# Subcommands


def cmd_exponents(args: argparse.Namespace, settings: Settings) -> int:
    """Print theta, rate, measure and the derived norm rate."""
    try:
        if args.regime == "basic":
            regime = BasicRegime()
        elif args.regime == "pconvex":
            if args.p is None:
                raise UsageError("--regime pconvex requires --p")
            regime = PConvexRegime(p=args.p)
        else:
            if args.q is None:
                raise UsageError("--regime qco requires --q")
            regime = QCoconvexRegime(q=args.q)
        pair = theoretical_exponents(regime, args.nu)
        norm_rate = norm_rate_from(pair, args.p) if args.p is not None else None
    except (UsageError, ValidationError, BregmanRatesError) as exc:
        return _fail(str(exc))

    table = Table(title="Parameter choice and predicted rate")
    for column in ("regime", "nu", "theta", "rate", "measure", "norm rate"):
        table.add_column(column)
    table.add_row(
        regime_label(regime),
        _fmt(args.nu),
        _fmt(pair.theta_alpha),
        _fmt(pair.rate),
        pair.measure,
        _fmt(norm_rate),
    )
    _console().print(table)
    return 0


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    """Run a sweep from a config file; write CSV and JSON report."""
    if args.seed is not None:
        settings = settings.model_copy(update={"seed": args.seed})
    manager = ConfigManager(settings)

    if args.list:
        table = Table(title=f"Run configs in {settings.config_dir}")
        table.add_column("config")
        for name in manager.list_run_configs():
            table.add_row(name)
        _console().print(table)
        return 0
    if args.config is None:
        return _fail("sweep needs --config (or --list)")

    try:
        config = manager.load_run_config(Path(args.config))
    except (OSError, ValueError, yaml.YAMLError) as exc:
        return _fail(str(exc))

    try:
        report = run_sweep(
            config, jobs=args.jobs or settings.jobs, tolerances=config.tolerances
        )
    except IterationLimit as exc:
        Console(file=sys.stderr).print(f"IterationLimit: {exc}", markup=False)
        return SCIENTIFIC_FAILURE
    except BregmanRatesError as exc:
        return _fail(f"{type(exc).__name__}: {exc}")

    out_dir = Path(args.out) if args.out else (config.out_dir or settings.out_dir)
    write_csv(report, out_dir / config.csv_name)
    write_report(report, out_dir / config.report_name)
    logger.info("Sweep written", out_dir=str(out_dir), passed=report.passed)

    title = f"Rate verdicts ({regime_label(config.regime)}, nu={config.nu:g})"
    table = Table(title=title)
    for column in ("measure", "target", "slope", "deviation", "r^2", "status"):
        table.add_column(column)
    for verdict in report.verdicts:
        fit = report.fitted.get(verdict.measure)
        table.add_row(
            verdict.measure,
            _fmt(verdict.target_rate),
            _fmt(verdict.slope),
            _fmt(verdict.deviation),
            _fmt(fit.r_squared if fit else None),
            verdict.status,
        )
    console = _console()
    console.print(table)
    for note in report.notes:
        console.print(f"note: {note}", markup=False)
    return 0 if report.passed else SCIENTIFIC_FAILURE


def cmd_solve(args: argparse.Namespace, settings: Settings) -> int:
    """Solve one Tikhonov problem and write u, omega, xi and diagnostics as JSON."""
    try:
        op = preset_operator(parse_operator(args.operator))
        spec = parse_regulariser(args.regulariser)
        data = _read_data(args)
        opts = SolveOptions(
            max_iterations=args.max_iterations, kkt_tolerance=args.kkt_tolerance
        )
        result: SolveResult
        if isinstance(spec, Quadratic) and not args.iterative:
            result = direct_result(op, data, args.alpha)
        else:
            result = solve(op, data, args.alpha, spec, opts)
    except (UsageError, ValidationError, ValueError, OSError, BregmanRatesError) as exc:
        return _fail(f"{type(exc).__name__}: {exc}")

    payload = SolveReport(
        u=result.u.tolist(),
        omega=result.omega.tolist(),
        xi=result.xi.tolist(),
        kkt_residual=result.kkt_residual,
        objective=result.objective,
        iterations=result.iterations,
        converged=result.converged,
    ).model_dump_json(indent=2)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload)

    try:
        result.raise_for_status()
    except IterationLimit as exc:
        Console(file=sys.stderr).print(f"IterationLimit: {exc}", markup=False)
        return SCIENTIFIC_FAILURE
    return 0


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    """Run property suites and print pass/fail counts."""
    try:
        results = run_suites(args.suite, seed=args.seed)
    except KeyError as exc:
        return _fail(str(exc.args[0]))

    table = Table(title="Property suites")
    for column in ("suite", "passed", "total", "worst", "status"):
        table.add_column(column)
    for result in results:
        table.add_row(
            result.name,
            str(result.passed),
            str(result.total),
            f"{result.worst:.3e}",
            "ok" if result.ok else "FAIL",
        )
    console = _console()
    console.print(table)
    for result in results:
        for detail in result.details:
            console.print(f"{result.name}: {detail}", markup=False)
    return 0 if all(r.ok for r in results) else SCIENTIFIC_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bregman-rates",
        description="Convex Tikhonov regularisation and convergence-rate experiments",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_exp = sub.add_parser("exponents", help="Print parameter-choice exponent and rate")
    p_exp.add_argument("--regime", choices=["basic", "pconvex", "qco"], required=True)
    p_exp.add_argument("--nu", type=float, required=True)
    p_exp.add_argument("--p", type=float, help="Convexity exponent")
    p_exp.add_argument("--q", type=float, help="Coconvexity exponent")
    p_exp.set_defaults(handler=cmd_exponents)

    p_sweep = sub.add_parser("sweep", help="Run a noise-level sweep from a config file")
    p_sweep.add_argument(
        "--config", help="Run config (JSON or YAML); bare names resolve in config_dir"
    )
    p_sweep.add_argument(
        "--list", action="store_true", help="List the run configs in config_dir"
    )
    p_sweep.add_argument("--out", help="Output directory")
    p_sweep.add_argument("--seed", type=int, help="Override the config seed")
    p_sweep.add_argument("--jobs", type=int, help="Worker threads")
    p_sweep.set_defaults(handler=cmd_sweep)

    p_solve = sub.add_parser("solve", help="Solve a single Tikhonov problem")
    p_solve.add_argument(
        "--operator", required=True, help="e.g. identity:3, diag:1,2, decay:50:1"
    )
    p_solve.add_argument(
        "--regulariser", required=True, help="e.g. quadratic, huber:1, tv"
    )
    p_solve.add_argument("--alpha", type=float, required=True)
    p_solve.add_argument("--data", help="JSON file holding the data vector")
    p_solve.add_argument("--v", help="Comma-separated data vector")
    p_solve.add_argument("--out", help="Output JSON file (default: stdout)")
    p_solve.add_argument("--max-iterations", type=int, default=20000)
    p_solve.add_argument("--kkt-tolerance", type=float, default=1e-9)
    p_solve.add_argument(
        "--iterative",
        action="store_true",
        help="Use the iterative solver for quadratic too",
    )
    p_solve.set_defaults(handler=cmd_solve)

    p_verify = sub.add_parser("verify", help="Run property suites")
    p_verify.add_argument(
        "suite", help="interpolation, prox, kkt, coconvexity, tv-witness or all"
    )
    p_verify.add_argument("--seed", type=int, help="Seed for the random cases")
    p_verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the command-line interface."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR

    settings = Settings()
    setup_logging(settings)
    logger.debug("Starting bregman-rates", version=__version__, command=args.command)
    return args.handler(args, settings)


if __name__ == "__main__":
    sys.exit(main())
