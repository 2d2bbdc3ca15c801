"""Per-unit algebra of an inverter connected to a Thevenin-equivalent grid.

All quantities are positive-sequence magnitudes in per-unit on the inverter
base. The active current ``id`` is aligned with the PoC voltage and ``iq`` is
the quadrature (reactive) current, negative when supporting the voltage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import SyncInfeasible

FEASIBILITY_TOL = 1e-9
KAPPA_VALUES = (1.0, 1.5)


@dataclass(frozen=True)
class GridParams:
    """Thevenin equivalent ``vg`` behind ``r + jx`` seen from the PoC."""

    vg: float
    r: float
    x: float

    def __post_init__(self):
        if not (self.vg >= 0.0 and self.r >= 0.0 and self.x >= 0.0):
            raise ValueError(f"grid parameters must be non-negative: {self}")
        if self.z <= 0.0:
            raise ValueError("grid impedance must be non-zero")

    @property
    def z(self) -> float:
        return math.hypot(self.r, self.x)

    @classmethod
    def from_scr(cls, vg: float, scr: float, r_over_x: float) -> "GridParams":
        """Build the equivalent from a short-circuit ratio (``z = 1/scr``)."""
        if scr <= 0.0 or r_over_x < 0.0:
            raise ValueError("scr must be positive and r_over_x non-negative")
        z = 1.0 / scr
        x = z / math.sqrt(1.0 + r_over_x**2)
        return cls(vg=vg, r=r_over_x * x, x=x)

    def with_vg(self, vg: float) -> "GridParams":
        return GridParams(vg=vg, r=self.r, x=self.x)


@dataclass(frozen=True)
class CurrentPair:
    id: float
    iq: float

    @property
    def magnitude(self) -> float:
        return math.hypot(self.id, self.iq)

    @property
    def phi_deg(self) -> float:
        """Power factor angle ``atan2(iq, id)`` in degrees."""
        return math.degrees(math.atan2(self.iq, self.id))

    @classmethod
    def from_polar(cls, magnitude: float, phi_deg: float) -> "CurrentPair":
        phi = math.radians(phi_deg)
        return cls(magnitude * math.cos(phi), magnitude * math.sin(phi))


@dataclass(frozen=True)
class Limits:
    """Inverter capability.

    ``kappa`` is the power convention factor: 1 for per-unit power
    (``P = V*Id``), 3/2 for peak-phase SI quantities.
    """

    i_max: float
    p_max: float
    kappa: float = 1.0

    def __post_init__(self):
        if not self.i_max > 0.0:
            raise ValueError("i_max must be positive")
        if not self.p_max >= 0.0:
            raise ValueError("p_max must be non-negative")
        if self.kappa not in KAPPA_VALUES:
            raise ValueError(f"kappa must be one of {KAPPA_VALUES}, got {self.kappa}")

    def with_p_max(self, p_max: float) -> "Limits":
        return Limits(self.i_max, p_max, self.kappa)


class Residuals(NamedTuple):
    gc: float
    gp: float
    gs: float


def sync_residual(grid: GridParams, i: CurrentPair) -> float:
    """Synchronisation-stability residual ``|r*iq + x*id| - vg``."""
    return abs(grid.r * i.iq + grid.x * i.id) - grid.vg


def poc_voltage(grid: GridParams, i: CurrentPair) -> float:
    """PoC voltage magnitude for the injected current.

    Raises
    ------
    SyncInfeasible
        If the quadrature drop exceeds the grid voltage.
    """
    s = grid.r * i.iq + grid.x * i.id
    if abs(s) > grid.vg:
        raise SyncInfeasible(f"|r*iq + x*id| = {abs(s):.6g} exceeds vg = {grid.vg:.6g}")
    return math.sqrt(grid.vg * grid.vg - s * s) + grid.r * i.id - grid.x * i.iq


def poc_voltage_clamped(grid: GridParams, i: CurrentPair) -> float:
    """PoC voltage with the radicand clamped at zero.

    Used where the caller tolerates (or deliberately models) operation at or
    beyond the synchronisation limit.
    """
    s = grid.r * i.iq + grid.x * i.id
    return math.sqrt(max(grid.vg * grid.vg - s * s, 0.0)) + grid.r * i.id - grid.x * i.iq


def active_power(grid: GridParams, i: CurrentPair, kappa: float = 1.0) -> float:
    return kappa * poc_voltage(grid, i) * i.id


def constraint_residuals(grid: GridParams, limits: Limits, i: CurrentPair) -> Residuals:
    """Current, power and synchronisation residuals; ``<= 0`` means satisfied.

    ``gp`` is ``+inf`` when the PoC voltage does not exist.
    """
    gc = i.id**2 + i.iq**2 - limits.i_max**2
    try:
        gp = active_power(grid, i, limits.kappa) - limits.p_max
    except SyncInfeasible:
        gp = math.inf
    return Residuals(gc, gp, sync_residual(grid, i))


def is_feasible(grid: GridParams, limits: Limits, i: CurrentPair, tol: float = FEASIBILITY_TOL) -> bool:
    return all(g <= tol for g in constraint_residuals(grid, limits, i))
