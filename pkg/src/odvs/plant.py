"""Quasi-static single-stage PV inverter behind a Thevenin grid.

The ac side is algebraic (positive-sequence phasors). The dynamic states are
the dc-link voltage (capacitor energy balance), its filtered measurement and
a PLL-frequency surrogate that drifts away from nominal while the applied
current violates the synchronisation limit.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .grid import CurrentPair, GridParams, Limits, poc_voltage_clamped, sync_residual

VDC_FLOOR = 1e-3


@dataclass(frozen=True)
class PvCurve:
    """Parametric P-V curve: linear below the MPP, parabolic to open circuit."""

    p_stc: float = 1.0
    v_mpp: float = 1.0
    v_oc: float = 1.19

    def __post_init__(self):
        if not (0.0 < self.v_mpp < self.v_oc and self.p_stc > 0.0):
            raise ValueError(f"invalid PV curve {self}")

    def p_mpp(self, irradiance: float) -> float:
        return self.p_stc * irradiance / 1000.0


@dataclass(frozen=True)
class PlantConfig:
    tau_dc: float = 0.05  # dc capacitor inertia, s
    tau_f: float = 0.010  # dc measurement filter, s
    tau_pll: float = 0.020  # PLL frequency relaxation, s
    k_los: float = 50.0  # Hz/s per unit of normalised sync violation
    f_n: float = 60.0
    curve: PvCurve = PvCurve()


@dataclass(frozen=True)
class PlantState:
    grid: GridParams
    vdc: float
    vdc_filt: float
    f_pll: float
    irradiance: float
    t: float = 0.0


@dataclass(frozen=True)
class Measurements:
    v_poc: float
    vdc: float
    vdc_filt: float
    f_pll: float
    p_ac: float
    p_pv: float
    sync_ok: bool


def pv_power(curve: PvCurve, vdc: float, irradiance: float) -> float:
    if vdc < 0.0:
        raise ValueError("dc voltage must be non-negative")
    p_mpp = curve.p_mpp(irradiance)
    if vdc <= curve.v_mpp:
        return p_mpp * vdc / curve.v_mpp
    if vdc < curve.v_oc:
        return p_mpp * (1.0 - ((vdc - curve.v_mpp) / (curve.v_oc - curve.v_mpp)) ** 2)
    return 0.0


def pv_voltage_for_power(curve: PvCurve, p: float, irradiance: float) -> float:
    """dc voltage above the MPP at which the array delivers ``p``."""
    p_mpp = curve.p_mpp(irradiance)
    if not 0.0 <= p <= p_mpp:
        raise ValueError(f"power {p} outside [0, {p_mpp}]")
    return curve.v_mpp + (curve.v_oc - curve.v_mpp) * math.sqrt(1.0 - p / p_mpp)


def measure(state: PlantState, command: CurrentPair, limits: Limits, config: PlantConfig = PlantConfig()) -> Measurements:
    """Algebraic ac-side quantities for ``command`` at the current state."""
    sync_ok = sync_residual(state.grid, command) <= 0.0
    v_poc = poc_voltage_clamped(state.grid, command)
    # no power transfer is credited while out of step
    p_ac = limits.kappa * v_poc * command.id if sync_ok else 0.0
    p_pv = pv_power(config.curve, state.vdc, state.irradiance)
    return Measurements(v_poc, state.vdc, state.vdc_filt, state.f_pll, p_ac, p_pv, sync_ok)


def plant_step(
    state: PlantState,
    command: CurrentPair,
    limits: Limits,
    dt: float,
    config: PlantConfig = PlantConfig(),
) -> tuple[PlantState, Measurements]:
    """Advance the plant by ``dt`` with ``command`` applied.

    Returns the new state and the measurements of this step; the dynamic
    fields of the measurements (``vdc``, ``vdc_filt``, ``f_pll``) are taken
    after the update.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    m = measure(state, command, limits, config)

    vdc2 = state.vdc**2 + dt / config.tau_dc * (m.p_pv - m.p_ac)
    vdc = math.sqrt(max(vdc2, VDC_FLOOR**2))
    vdc_filt = vdc + (state.vdc_filt - vdc) * math.exp(-dt / config.tau_f)
    if m.sync_ok:
        f_pll = config.f_n + (state.f_pll - config.f_n) * math.exp(-dt / config.tau_pll)
    else:
        gs = sync_residual(state.grid, command)
        f_pll = state.f_pll + dt * config.k_los * gs / state.grid.z

    new = dataclasses.replace(state, vdc=vdc, vdc_filt=vdc_filt, f_pll=f_pll, t=state.t + dt)
    return new, dataclasses.replace(m, vdc=vdc, vdc_filt=vdc_filt, f_pll=f_pll)


def apply_dip(state: PlantState, new_grid: GridParams) -> PlantState:
    return dataclasses.replace(state, grid=new_grid)
