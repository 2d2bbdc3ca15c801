"""Randomised checks of the seeker against the analytic optimum.

Each random scenario draws a grid and limits, picks the 1-D reduction the
analytic solver says is active (the current circle when the power limit is
slack, otherwise the power boundary) and runs the open-loop seeker on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .analytic import Stage, solve
from .errors import OdvsError
from .grid import GridParams, Limits
from .reduction import Bounds1D, iq_bounds, phi_bounds, phi_star, v_on_circle, v_on_power_boundary
from .seeker import StepSchedule, run_seek

RANGES = {
    "vg": (0.05, 0.9),
    "z": (0.05, 0.3),
    "r_over_x": (0.5, 5.0),
    "p_max": (0.0, 1.2),
    "i_max": (1.0, 2.0),
}
N_ITERS = 600
CHECK_FROM = 500
TOL_FRAC = 0.01

# (label, lambda as a fraction of the interval width, exponent)
SCHEDULES = (
    ("harmonic", 0.3, 1.0),
    ("sqrt", 0.05, 0.5),
    ("summable", 0.3, 2.0),
)


@dataclass(frozen=True)
class SeekProblem:
    """A 1-D maximisation derived from one grid/limits draw."""

    grid: GridParams
    limits: Limits
    stage: Stage
    variable: str  # "phi" or "iq"
    bounds: Bounds1D
    x_star: float
    oracle: Callable[[float], float] = field(repr=False, compare=False)


def make_problem(grid: GridParams, limits: Limits) -> SeekProblem:
    """Build the reduced problem; raises :class:`OdvsError` or ``ValueError`` if ill-posed."""
    sol = solve(grid, limits)
    i, p, kap = limits.i_max, limits.p_max, limits.kappa
    if sol.stage is Stage.S1:
        b = phi_bounds(grid, i, p, kap)
        return SeekProblem(grid, limits, sol.stage, "phi", b, phi_star(grid), lambda x: v_on_circle(grid, i, x))
    b = iq_bounds(grid, i, p, kap)
    return SeekProblem(
        grid, limits, sol.stage, "iq", b, sol.optimum.iq, lambda x: v_on_power_boundary(grid, p, kap, x)
    )


def random_problem(rng: np.random.Generator, max_tries: int = 1000) -> SeekProblem:
    """Rejection-sample a well-posed problem from :data:`RANGES`."""
    for _ in range(max_tries):
        d = {k: rng.uniform(*v) for k, v in RANGES.items()}
        z, rx = d["z"], d["r_over_x"]
        x = z / math.sqrt(1.0 + rx * rx)
        grid = GridParams(d["vg"], rx * x, x)
        try:
            prob = make_problem(grid, Limits(d["i_max"], d["p_max"]))
            if prob.bounds.width <= 1e-6 or prob.x_star not in prob.bounds:
                continue
            prob.oracle(prob.bounds.lo), prob.oracle(prob.bounds.hi)
        except (OdvsError, ValueError):
            continue
        return prob
    raise RuntimeError("could not draw a well-posed scenario")


@dataclass(frozen=True)
class ScheduleResult:
    label: str
    p: float
    passed: int
    failed: int
    worst_error: float  # max over scenarios of the tail error / range
    errors: np.ndarray = field(repr=False)  # (n, N_ITERS + 1), normalised


@dataclass(frozen=True)
class ConvergenceReport:
    n_scenarios: int
    seed: int
    results: tuple[ScheduleResult, ...]
    stages: dict

    def by_label(self, label: str) -> ScheduleResult:
        return next(r for r in self.results if r.label == label)

    def lines(self) -> list[str]:
        out = [f"scenarios={self.n_scenarios} seed={self.seed} stages={self.stages}"]
        for r in self.results:
            out.append(
                f"{r.label:9s} p={r.p:<4g} pass={r.passed:4d} fail={r.failed:4d} worst_tail_error={r.worst_error:.4g}"
            )
        return out


def seek_errors(prob: SeekProblem, lam_frac: float, p: float, x0: float, d0: int, n_iters: int = N_ITERS) -> np.ndarray:
    """Normalised distance ``|x_k - x*| / range`` along an open-loop run."""
    w = prob.bounds.width
    traj = run_seek(prob.oracle, x0, d0, StepSchedule(lam_frac * w, p), prob.bounds, n_iters)
    return np.abs(traj - prob.x_star) / w


def run_convergence_suite(n_scenarios: int, seed: int = 0, n_iters: int = N_ITERS, check_from: Optional[int] = None) -> ConvergenceReport:
    if n_scenarios < 1:
        raise ValueError("n_scenarios must be >= 1")
    check_from = CHECK_FROM if check_from is None else check_from
    if not 0 <= check_from <= n_iters:
        raise ValueError("check_from must lie in [0, n_iters]")
    rng = np.random.default_rng(seed)
    problems, starts = [], []
    for _ in range(n_scenarios):
        prob = random_problem(rng)
        problems.append(prob)
        starts.append((rng.uniform(prob.bounds.lo, prob.bounds.hi), int(rng.choice((-1, 1)))))

    results = []
    for label, lam_frac, p in SCHEDULES:
        errs = np.array([seek_errors(pr, lam_frac, p, x0, d0, n_iters) for pr, (x0, d0) in zip(problems, starts)])
        tail = errs[:, check_from:].max(axis=1)
        ok = int((tail <= TOL_FRAC).sum())
        results.append(ScheduleResult(label, p, ok, n_scenarios - ok, float(tail.max()), errs))

    stages: dict = {}
    for pr in problems:
        stages[pr.stage.value] = stages.get(pr.stage.value, 0) + 1
    return ConvergenceReport(n_scenarios, seed, tuple(results), dict(sorted(stages.items())))


def sign_changes(values: np.ndarray, eps: float = 1e-12) -> int:
    """Number of sign changes in the forward differences, ignoring flats below ``eps``."""
    d = np.diff(np.asarray(values, dtype=float))
    s = np.sign(d[np.abs(d) > eps])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def sample_reduction(prob: SeekProblem, step: Optional[float] = None) -> tuple[np.ndarray, np.ndarray]:
    """Sample the reduced voltage over its bounds (0.05 deg or 1e-3 pu by default)."""
    step = step or (0.05 if prob.variable == "phi" else 1e-3)
    xs = np.append(np.arange(prob.bounds.lo, prob.bounds.hi, step), prob.bounds.hi)
    return xs, np.array([prob.oracle(x) for x in xs])
