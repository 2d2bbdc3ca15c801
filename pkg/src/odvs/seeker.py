"""Projected perturb-and-observe search for the maximiser of a 1-D function.

The iterate moves by a diminishing step ``lam / k**p`` in the current
direction, then projects onto ``[lo, hi]``; the direction flips whenever the
latest observation is worse than the previous one. With ``0 < p <= 1`` the
steps vanish but do not sum to a finite value, and the iterate converges to
the maximiser of any unimodal objective (or stays on the boundary when the
objective is monotone).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .reduction import Bounds1D


@dataclass(frozen=True)
class StepSchedule:
    lam: float
    p: float = 1.0

    def __post_init__(self):
        if not (self.lam > 0.0 and self.p > 0.0):
            raise ValueError("lam and p must be positive")

    @property
    def non_summable(self) -> bool:
        """True when the schedule satisfies the convergence condition."""
        return self.p <= 1.0


@dataclass(frozen=True)
class SeekerState:
    """Search iterate.

    ``v_prev`` is ``None`` until the first observation has been taken; that
    first observation only primes the comparison and does not move ``x``.
    """

    x: float
    d: int = -1
    k: int = 1
    v_prev: Optional[float] = None

    def __post_init__(self):
        if self.d not in (1, -1):
            raise ValueError(f"direction must be +1 or -1, got {self.d}")
        if self.k < 1:
            raise ValueError("iteration index starts at 1")


def stepsize(schedule: StepSchedule, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    return schedule.lam / k**schedule.p


def sgn(u: float) -> int:
    return 1 if u >= 0.0 else -1


def direction_update(v_now: float, v_prev: float, d: int) -> int:
    return sgn(v_now - v_prev) * sgn(d)


def po_step(state: SeekerState, v_now: float, schedule: StepSchedule, bounds: Bounds1D) -> SeekerState:
    """One perturb-and-observe update from the observation at ``state.x``."""
    if state.v_prev is None:
        return dataclasses.replace(state, v_prev=v_now)
    d = direction_update(v_now, state.v_prev, state.d)
    x = bounds.clamp(state.x + stepsize(schedule, state.k) * d)
    return SeekerState(x=x, d=d, k=state.k + 1, v_prev=v_now)


def run_seek(
    voltage_oracle: Callable[[float], float],
    x0: float,
    d0: int,
    schedule: StepSchedule,
    bounds: Bounds1D,
    n_iters: int,
) -> np.ndarray:
    """Open-loop search; returns ``[x0, x1, ..., x_n]``.

    One warm-up observation at ``x0`` precedes the ``n_iters`` moves.
    """
    state = SeekerState(x=bounds.clamp(x0), d=d0)
    state = po_step(state, voltage_oracle(state.x), schedule, bounds)
    traj = np.empty(n_iters + 1)
    traj[0] = state.x
    for n in range(1, n_iters + 1):
        state = po_step(state, voltage_oracle(state.x), schedule, bounds)
        traj[n] = state.x
    return traj
