"""Seeded property suites run by ``bregman-rates verify``.

Each suite draws its cases from a fixed seed, checks one family of
inequalities or oracle equivalences and returns a SuiteResult with
pass/fail counts and the worst violation margin seen.
"""

import time
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.optimize import brentq

from .linalg import apply, factorize, fractional_gram_apply
from .logging import verify_logger
from .models import SuiteResult
from .regularisers import (
    Huber,
    PowerSum,
    PowerSumHigh,
    Quadratic,
    Regulariser,
    TotalVariation1D,
    bregman,
)
from .solver import SolveOptions, direct_quadratic_solve, solve
from .sources import random_gaussian, step_truth
from .tv1d import tv_denoise

DEFAULT_SEED = 20240611

INTERPOLATION_SLACK = 1e-9
PROX_ORACLE_TOLERANCE = 1e-8
ORACLE_SOLVE_TOLERANCE = 1e-6
WITNESS_TOLERANCE = 1e-10


class _Tally:
    """Accumulates pass/fail counts for one suite."""

    def __init__(self, name: str):
        self.name = name
        self.passed = 0
        self.total = 0
        self.worst = 0.0
        self.details: List[str] = []

    def record(self, ok: bool, margin: float, detail: str) -> None:
        self.total += 1
        self.worst = max(self.worst, margin)
        if ok:
            self.passed += 1
        elif len(self.details) < 20:
            self.details.append(detail)

    def result(self) -> SuiteResult:
        return SuiteResult(
            name=self.name,
            passed=self.passed,
            total=self.total,
            worst=self.worst,
            details=self.details,
        )


def interpolation_suite(cases: int = 1000, seed: int = DEFAULT_SEED) -> SuiteResult:
    """||(F*F)^nu u|| <= ||Fu||^(2nu) ||u||^(1-2nu) and its inner-product form."""
    rng = np.random.default_rng(seed)
    tally = _Tally("interpolation")
    for case in range(cases):
        m, n = (int(k) for k in rng.integers(1, 21, size=2))
        op = factorize(rng.standard_normal((m, n)))
        u = rng.standard_normal(n)
        omega = rng.standard_normal(n)
        nu = float(rng.uniform(0.0, 0.5))

        fu = float(np.linalg.norm(apply(op, u)))
        un = float(np.linalg.norm(u))
        bound = fu ** (2.0 * nu) * un ** (1.0 - 2.0 * nu)
        lhs = float(np.linalg.norm(fractional_gram_apply(op, nu, u)))
        xi = fractional_gram_apply(op, nu, omega)
        lhs_inner = float(xi @ u)
        bound_inner = float(np.linalg.norm(omega)) * bound

        limit = 1.0 + INTERPOLATION_SLACK
        ok = lhs <= bound * limit and lhs_inner <= bound_inner * limit
        margin = 0.0
        if bound > 0:
            margin = max(lhs / bound - 1.0, lhs_inner / bound_inner - 1.0)
        tally.record(ok, max(margin, 0.0), f"case {case}: {m}x{n}, nu={nu:.4f}")
    return tally.result()


def _scalar_derivative(spec: Regulariser, w: float) -> float:
    return float(spec.subgradient(np.array([w]))[0])


def _random_scalar_spec(rng: np.random.Generator, case: int) -> Regulariser:
    kind = case % 4
    if kind == 0:
        return Quadratic()
    if kind == 1:
        return PowerSum(p=float(rng.uniform(1.05, 1.95)), weight=1.0)
    if kind == 2:
        return PowerSumHigh(p=float(rng.uniform(2.05, 4.0)), weight=1.0)
    return Huber(threshold=float(rng.uniform(0.2, 2.0)))


def prox_suite(
    cases: int = 1000, tv_cases: int = 50, seed: int = DEFAULT_SEED
) -> SuiteResult:
    """Scalar prox against a bracketing root-finder, TV prox by its optimality."""
    rng = np.random.default_rng(seed)
    tally = _Tally("prox")

    for case in range(cases):
        spec = _random_scalar_spec(rng, case)
        u = float(rng.normal(0.0, 3.0))
        tau = float(10.0 ** rng.uniform(-2.0, 2.0))
        width = abs(u) + 1.0
        oracle = brentq(
            lambda w: w - u + tau * _scalar_derivative(spec, w),
            -width,
            width,
            xtol=1e-15,
            rtol=4.0 * np.finfo(float).eps,
        )
        got = float(spec.prox(np.array([u]), tau)[0])
        gap = abs(got - oracle)
        tally.record(
            gap <= PROX_ORACLE_TOLERANCE,
            gap,
            f"case {case}: {spec!r}, u={u:.6g}, tau={tau:.3g}, gap={gap:.3e}",
        )

    tv = TotalVariation1D()
    for case in range(tv_cases):
        n = int(rng.integers(2, 31))
        u = rng.normal(0.0, 1.0, n).cumsum()
        tau = float(rng.uniform(0.05, 5.0))
        w = tv.prox(u, tau)
        g = (u - w) / tau
        worst = 0.0
        for _ in range(10):
            z = w + rng.normal(0.0, 1.0, n)
            lhs = tv.value(w) + float(g @ (z - w))
            worst = max(worst, lhs - tv.value(z))
        ok = worst <= 1e-8 and tv.is_subgradient(w, g)
        tally.record(ok, max(worst, 0.0), f"tv case {case}: n={n}, tau={tau:.3g}")
    return tally.result()


def kkt_suite(
    cases: int = 20, oracle_cases: int = 100, seed: int = DEFAULT_SEED
) -> SuiteResult:
    """Dual certificate consistency, then iterative against direct quadratic solves."""
    rng = np.random.default_rng(seed)
    tally = _Tally("kkt")
    opts = SolveOptions()
    specs: List[Regulariser] = [
        PowerSum(p=1.5, weight=1.0),
        PowerSumHigh(p=3.0, weight=1.0),
        Huber(threshold=0.5),
        TotalVariation1D(),
    ]

    for spec in specs:
        for case in range(cases):
            op = random_gaussian(12, 8, seed=int(rng.integers(2**31)))
            v = rng.standard_normal(12)
            alpha = float(10.0 ** rng.uniform(-1.3, 0.0))
            result = solve(op, v, alpha, spec, opts)
            xi_norm = float(np.linalg.norm(result.xi))
            if spec.single_valued:
                gap = float(np.linalg.norm(result.xi - spec.subgradient(result.u)))
                bound = 10.0 * opts.kkt_tolerance * (1.0 + xi_norm)
            else:
                gap, bound = result.kkt_residual, result.target * (1.0 + 1e-6)
            ok = result.converged and gap <= bound
            tally.record(
                ok,
                gap / bound if bound > 0 else 0.0,
                f"{spec.kind} case {case}: alpha={alpha:.3g}, gap={gap:.3e}, "
                f"iterations={result.iterations}",
            )

    for case in range(oracle_cases):
        op = random_gaussian(10, 10, seed=int(rng.integers(2**31)))
        v = rng.standard_normal(10)
        alpha = float(10.0 ** rng.uniform(-2.0, 0.0))
        iterative = solve(op, v, alpha, Quadratic(), opts)
        gap = float(np.linalg.norm(iterative.u - direct_quadratic_solve(op, v, alpha)))
        tally.record(
            iterative.converged and gap <= ORACLE_SOLVE_TOLERANCE,
            gap,
            f"quadratic oracle case {case}: alpha={alpha:.3g}, gap={gap:.3e}",
        )
    return tally.result()


def coconvexity_suite(cases: int = 1000, seed: int = DEFAULT_SEED) -> SuiteResult:
    """Huber: <xi1 - xi2, u1 - u2> >= ||xi1 - xi2||^2 with constant 1."""
    rng = np.random.default_rng(seed)
    tally = _Tally("coconvexity")
    for case in range(cases):
        spec = Huber(threshold=float(rng.uniform(0.2, 2.0)))
        n = int(rng.integers(1, 11))
        scale = 2.0 * spec.threshold
        u1, u2 = rng.normal(0.0, scale, n), rng.normal(0.0, scale, n)
        d_xi = spec.subgradient(u1) - spec.subgradient(u2)
        sym = float(d_xi @ (u1 - u2))
        floor = float(d_xi @ d_xi)
        violation = floor - sym
        tally.record(
            violation <= 1e-12 * (1.0 + floor),
            max(violation, 0.0),
            f"case {case}: n={n}, gamma={spec.threshold:.3g}, "
            f"violation={violation:.3e}",
        )
    return tally.result()


def tv_witness_suite(sizes: tuple[int, ...] = (2, 4, 10, 50)) -> SuiteResult:
    """D_xi(2u, u) = 0 for a unit step although 2u != u.

    xi comes from the prox optimality map: denoising the step 3u with
    tau = n/2 gives levels (1, 2), and (3u - w)/tau lies in dTV(w) = dTV(u).
    """
    tv = TotalVariation1D()
    tally = _Tally("tv-witness")
    for n in sizes:
        u = step_truth(n)
        tau = n / 2.0
        w = tv_denoise(3.0 * u, tau)
        xi = (3.0 * u - w) / tau
        distance = bregman(tv, 2.0 * u, u, xi, check=False)
        ok = tv.is_subgradient(u, xi) and abs(distance) <= WITNESS_TOLERANCE
        tally.record(
            ok,
            abs(distance),
            f"n={n}: D(2u, u)={distance:.3e}, ||2u - u||={np.linalg.norm(u):.3g}",
        )
    return tally.result()


SUITES: Dict[str, Callable[[], SuiteResult]] = {
    "interpolation": interpolation_suite,
    "prox": prox_suite,
    "kkt": kkt_suite,
    "coconvexity": coconvexity_suite,
    "tv-witness": tv_witness_suite,
}


def run_suites(name: str, seed: Optional[int] = None) -> List[SuiteResult]:
    """Run one named suite, or every suite for ``"all"``.

    Raises:
        KeyError: For an unknown suite name.
    """
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        choices = ", ".join([*SUITES, "all"])
        raise KeyError(f"unknown suite {name!r}; choose from {choices}")

    results = []
    for suite in names:
        start = time.time()
        runner = SUITES[suite]
        if seed is None or suite == "tv-witness":
            result = runner()
        else:
            result = runner(seed=seed)  # type: ignore[call-arg]
        verify_logger.log_suite(result, int((time.time() - start) * 1000))
        results.append(result)
    return results
