"""One-dimensional views of the voltage-support problem.

On the current circle the PoC voltage is a function of the power factor
angle (degrees); on the power boundary it is a function of the reactive
current alone, with the active current given implicitly by :func:`psi`.
Both are unimodal over the intervals returned by :func:`phi_bounds` and
:func:`iq_bounds`, which is what makes a scalar perturb-and-observe search
sufficient.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import EmptyInterval, NoRoot
from .grid import CurrentPair, GridParams, poc_voltage, poc_voltage_clamped

log = logging.getLogger(__name__)

PHI_SCAN_DEG = 0.1
IQ_SCAN_PU = 1e-3


@dataclass(frozen=True)
class Bounds1D:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty bounds [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def clamp(self, x: float) -> float:
        return min(max(x, self.lo), self.hi)

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi


def phi_star(grid: GridParams) -> float:
    return math.degrees(math.atan2(-grid.x, grid.r))


def v_on_circle(grid: GridParams, i_max: float, phi: float) -> float:
    return poc_voltage(grid, CurrentPair.from_polar(i_max, phi))


def _gp_on_circle(grid, i_max, p_max, kappa, phi):
    i = CurrentPair.from_polar(i_max, phi)
    return kappa * poc_voltage_clamped(grid, i) * i.id - p_max


def phi_bounds(grid: GridParams, i_max: float, p_max: float, kappa: float = 1.0) -> Bounds1D:
    """Angle interval (degrees) over which the search on the circle runs.

    Starts from the synchronisation window ``phi* +/- asin(vg/(z*i_max))``
    clipped to ``[-90, 0]``, then keeps the longest prefix from the lower
    edge on which the power constraint holds.
    """
    if grid.vg <= 0.0:
        raise EmptyInterval("no synchronisable angle when vg = 0")
    centre = phi_star(grid)
    half = math.degrees(math.asin(min(1.0, grid.vg / (grid.z * i_max))))
    lo, hi = max(-90.0, centre - half), min(0.0, centre + half)
    if lo > hi:
        raise EmptyInterval(f"synchronisation window misses the fourth quadrant: [{lo}, {hi}]")

    def gp(phi):
        return _gp_on_circle(grid, i_max, p_max, kappa, phi)

    if gp(lo) > 0.0:
        raise EmptyInterval("power limit violated at the lower edge of the window")
    grid_pts = np.append(np.arange(lo, hi, PHI_SCAN_DEG), hi)
    prev = lo
    for phi in grid_pts[1:]:
        if gp(phi) > 0.0:
            return Bounds1D(lo, optimize.brentq(gp, prev, phi, xtol=1e-12))
        prev = phi
    return Bounds1D(lo, hi)


def _power_fn(grid, p_max, kappa, iq):
    def f(id_):
        return kappa * poc_voltage_clamped(grid, CurrentPair(id_, iq)) * id_ - p_max

    return f


def psi(grid: GridParams, p_max: float, kappa: float, iq: float) -> float:
    """Active current placing ``(id, iq)`` on the power boundary.

    Returns the smallest non-negative root of ``kappa*V*id = p_max`` among
    synchronisable ``id`` (the high-voltage branch).

    Raises
    ------
    NoRoot
        If no synchronisable ``id`` reaches ``p_max`` from below.
    """
    r, x, vg = grid.r, grid.x, grid.vg
    if x > 0.0:
        id_lo = max(0.0, (-vg - r * iq) / x)
        id_hi = (vg - r * iq) / x
    else:
        if abs(r * iq) > vg:
            raise NoRoot(f"iq = {iq} is not synchronisable on a resistive grid")
        id_lo, id_hi = 0.0, math.inf
    if r > 0.0:
        # V >= r*id, so the root is below sqrt(p/(kappa*r))
        id_hi = min(id_hi, math.sqrt(p_max / (kappa * r)) * (1.0 + 1e-9) + 1e-12)
    if id_lo > id_hi:
        raise NoRoot(f"iq = {iq} admits no synchronisable active current")

    f = _power_fn(grid, p_max, kappa, iq)
    f_lo = f(id_lo)
    if f_lo == 0.0:
        return id_lo
    if f_lo > 0.0:
        raise NoRoot(f"power already exceeds p_max at the smallest synchronisable id ({id_lo:.6g})")
    pts = np.linspace(id_lo, id_hi, 513)
    s = r * iq + x * pts
    vals = kappa * (np.sqrt(np.maximum(vg * vg - s * s, 0.0)) + r * pts - x * iq) * pts - p_max
    hit = np.flatnonzero(vals[1:] >= 0.0)
    if hit.size == 0:
        raise NoRoot(f"p_max = {p_max} unreachable at iq = {iq}")
    k = hit[0]
    return optimize.brentq(f, pts[k], pts[k + 1], xtol=1e-14, rtol=1e-15)


def v_on_power_boundary(grid: GridParams, p_max: float, kappa: float, iq: float) -> float:
    return poc_voltage(grid, CurrentPair(psi(grid, p_max, kappa, iq), iq))


def iq_upper_bound(grid: GridParams, p_max: float, kappa: float = 1.0) -> float:
    """Reactive current where the power boundary crosses ``r*iq + x*id = 0``."""
    z2 = grid.z**2
    return grid.x / (2.0 * z2) * (grid.vg - math.sqrt(grid.vg**2 + 4.0 * z2 * p_max / (kappa * grid.r)))


def iq_lower_closed_form(grid: GridParams, i_max: float, p_max: float, kappa: float = 1.0) -> tuple[str, float]:
    """Closed-form lower bound, routed by the current-vs-sync condition.

    Returns ``("current", iq)`` when the current limit is expected to bind
    first, else ``("sync", iq)``. Kept as a cross-check of the numeric walk in
    :func:`iq_bounds`.
    """
    r, x, z, vg = grid.r, grid.x, grid.z, grid.vg
    root = math.sqrt(vg**2 + 4.0 * z**2 * r * p_max / (kappa * x**2)) if x > 0.0 else math.inf
    lhs = i_max**2
    rhs = (r**2 + z**2) / (2 * r**2 * z**2) * vg**2 + p_max / (kappa * r) + x**2 * vg / (2 * r**2 * z**2) * root
    if lhs >= rhs:

        def g(iq):
            i = CurrentPair(math.sqrt(max(i_max**2 - iq**2, 0.0)), iq)
            return kappa * poc_voltage_clamped(grid, i) * i.id - p_max

        # power on the circle rises from 0 at iq=-i_max; take the first crossing
        pts = np.linspace(-i_max, 0.0, 2001)
        vals = [g(q) for q in pts]
        for a, b, fa, fb in zip(pts[:-1], pts[1:], vals[:-1], vals[1:]):
            if fa <= 0.0 <= fb:
                return "current", optimize.brentq(g, a, b, xtol=1e-13)
        return "current", math.nan
    return "sync", -(r**2 + z**2) / (2 * r * z**2) * vg - x**2 / (2 * r * z**2) * root


def iq_bounds(grid: GridParams, i_max: float, p_max: float, kappa: float = 1.0) -> Bounds1D:
    """Reactive-current interval (pu) for the search on the power boundary.

    ``hi`` is the closed-form crossing with ``r*iq + x*id = 0``. ``lo`` is the
    first point, walking down the power boundary from ``hi``, where either the
    current limit or the synchronisation limit is hit.
    """
    if grid.r <= 0.0:
        raise ValueError("iq_bounds requires r > 0")
    hi = iq_upper_bound(grid, p_max, kappa)

    def ok(iq):
        try:
            id_ = psi(grid, p_max, kappa, iq)
        except NoRoot:
            return False
        return id_**2 + iq**2 <= i_max**2

    if not ok(hi):
        raise EmptyInterval("the power boundary has no feasible segment in the fourth quadrant")

    prev = hi
    iq = hi - IQ_SCAN_PU
    while ok(iq):
        prev = iq
        iq -= IQ_SCAN_PU
    a, b = iq, prev  # a infeasible, b feasible
    while b - a > 1e-12:
        m = 0.5 * (a + b)
        if ok(m):
            b = m
        else:
            a = m
    lo = b

    route, closed = iq_lower_closed_form(grid, i_max, p_max, kappa)
    log.debug("iq lower bound: numeric %.6f, closed form (%s) %.6f", lo, route, closed)
    return Bounds1D(lo, hi)
