"""Model-based solution of the optimal voltage support problem.

With the grid equivalent known, the optimum moves through three stages as
the available power shrinks:

* ``S1`` - maximum current on the line ``r*iq + x*id = 0``,
* ``S2`` - intersection of the current circle and the power boundary,
* ``S3`` - power boundary on the line ``r*iq + x*id = -vg*x/z``.

:func:`brute_force_oracle` is an independent exhaustive scan used to check
:func:`solve`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import Infeasible, NoRoot
from .grid import CurrentPair, GridParams, Limits, poc_voltage, poc_voltage_clamped


class Stage(str, enum.Enum):
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"


@dataclass(frozen=True)
class OdvsSolution:
    stage: Stage
    optimum: CurrentPair
    v_star: float


@dataclass(frozen=True)
class Thresholds:
    pb: float
    ib: float


def stage_s1(grid: GridParams, i_max: float) -> CurrentPair:
    return CurrentPair(grid.r / grid.z * i_max, -grid.x / grid.z * i_max)


def stage_s2(grid: GridParams, i_max: float, p_max: float, kappa: float = 1.0) -> CurrentPair:
    """Point of the current circle where the power constraint binds.

    Bisection on the arc angle between ``max(-90 deg, lower sync edge)`` and
    ``atan2(-x, r)``.

    Raises
    ------
    NoRoot
        If the power residual does not change sign on that arc.
    """
    phi_hi = math.atan2(-grid.x, grid.r)
    ratio = min(1.0, grid.vg / (grid.z * i_max))
    phi_lo = max(-math.pi / 2, phi_hi - math.asin(ratio))

    # clamped voltage: the arc stays inside the synchronisation window, where
    # the radicand can only go negative by rounding
    def gp(phi):
        i = CurrentPair(i_max * math.cos(phi), i_max * math.sin(phi))
        return kappa * poc_voltage_clamped(grid, i) * i.id - p_max

    f_lo, f_hi = gp(phi_lo), gp(phi_hi)
    if abs(f_hi) <= 1e-12:
        phi = phi_hi
    elif abs(f_lo) <= 1e-12:
        phi = phi_lo
    elif f_lo < 0.0 < f_hi:
        phi = optimize.bisect(gp, phi_lo, phi_hi, xtol=1e-14)
    else:
        raise NoRoot(
            f"power residual has no sign change on the admissible arc "
            f"(gp(lo)={f_lo:.3g}, gp(hi)={f_hi:.3g})"
        )
    return CurrentPair(i_max * math.cos(phi), i_max * math.sin(phi))


def stage_s3(grid: GridParams, p_max: float, kappa: float = 1.0) -> CurrentPair:
    if grid.r <= 0.0:
        raise ValueError("stage S3 requires a resistive grid (r > 0)")
    r, x, z, vg = grid.r, grid.x, grid.z, grid.vg
    s = math.sqrt(vg**2 + 4.0 * r * p_max / kappa)
    return CurrentPair(-(vg - s) / (2.0 * z), -x / (2.0 * r * z) * (vg + s))


def thresholds(grid: GridParams, i_max: float, p_max: float, kappa: float = 1.0) -> Thresholds:
    """Power threshold ``pb`` (power drawn at S1) and current threshold ``ib``.

    ``p_max >= pb`` selects S1; otherwise ``i_max >= ib`` selects S3.
    """
    r, z = grid.r, grid.z
    pb = kappa * (r / z * grid.vg * i_max + r * i_max**2)
    ib = stage_s3(grid, p_max, kappa).magnitude
    return Thresholds(pb=pb, ib=ib)


def solve(grid: GridParams, limits: Limits) -> OdvsSolution:
    th = thresholds(grid, limits.i_max, limits.p_max, limits.kappa)
    if limits.p_max >= th.pb:
        stage, opt = Stage.S1, stage_s1(grid, limits.i_max)
    elif limits.i_max >= th.ib:
        stage, opt = Stage.S3, stage_s3(grid, limits.p_max, limits.kappa)
    else:
        stage, opt = Stage.S2, stage_s2(grid, limits.i_max, limits.p_max, limits.kappa)
    return OdvsSolution(stage, opt, poc_voltage(grid, opt))


def brute_force_oracle(grid: GridParams, limits: Limits, resolution: float = 1e-3) -> OdvsSolution:
    """Exhaustive scan of ``[0, i_max] x [-i_max, 0]`` keeping feasible points.

    The stage label is inferred from which constraints are active at the
    best grid point, so it is only indicative near stage boundaries.
    """
    if not resolution > 0.0:
        raise ValueError("resolution must be positive")
    i_max, kappa = limits.i_max, limits.kappa
    n = int(math.floor(i_max / resolution + 1e-9)) + 1
    ax = np.arange(n) * resolution
    id_ = ax[np.newaxis, :]
    iq = -ax[:, np.newaxis]

    s = grid.r * iq + grid.x * id_
    rad = grid.vg**2 - s * s
    v = np.sqrt(np.maximum(rad, 0.0)) + (grid.r * id_ - grid.x * iq)
    ok = (rad >= 0.0) & (id_**2 + iq**2 <= i_max**2) & (kappa * v * id_ <= limits.p_max)
    if not ok.any():
        raise Infeasible("no feasible grid point")
    v = np.where(ok, v, -np.inf)
    row, col = np.unravel_index(int(np.argmax(v)), v.shape)
    best = CurrentPair(float(ax[col]), float(-ax[row]))
    v_best = float(v[row, col])

    band = 3.0 * resolution
    on_circle = i_max - best.magnitude <= band
    on_power = limits.p_max - kappa * v_best * best.id <= band * max(1.0, v_best + i_max)
    if on_circle and on_power:
        stage = Stage.S2
    elif on_circle:
        stage = Stage.S1
    else:
        stage = Stage.S3
    return OdvsSolution(stage, best, v_best)
