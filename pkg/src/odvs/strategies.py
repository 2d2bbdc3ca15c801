"""Voltage-support controllers run during a dip.

* :func:`model_free_step` - perturb-and-observe search on the power factor
  angle (mode ``OSA``) and, once the dc link sags, on the reactive current
  (mode ``OSB``), with a freeze on PLL frequency excursions.
* :func:`model_based_step` - the analytic optimum, given the true grid.
* :func:`droop_step` - piece-wise linear reactive current vs. PoC voltage.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field

from .analytic import solve
from .grid import CurrentPair, GridParams, Limits
from .plant import Measurements
from .reduction import Bounds1D
from .seeker import SeekerState, StepSchedule, po_step


class Mode(str, enum.Enum):
    OSA = "OSA"
    OSB = "OSB"


@dataclass(frozen=True)
class PiGains:
    kp: float = 30.0
    ki: float = 3000.0


@dataclass(frozen=True)
class ModelFreeParams:
    rho: float = 0.95
    delta_f: float = 0.3
    f_n: float = 60.0
    x0_a: float = -45.0
    d0_a: int = -1
    x0_b: float = -0.75
    d0_b: int = -1
    schedule_a: StepSchedule = StepSchedule(15.0, 1.0)
    schedule_b: StepSchedule = StepSchedule(0.2, 1.0)
    frozen_phi: float = -45.0
    frozen_iq_frac: float = 0.25
    freezing_enabled: bool = True
    unfreeze_samples: int = 2
    gains: PiGains = PiGains()


@dataclass(frozen=True)
class ControllerState:
    mode: Mode
    frozen: bool
    seeker: SeekerState
    pi_integrator: float
    vdc_ref: float
    params: ModelFreeParams = field(default_factory=ModelFreeParams)
    calm_samples: int = 0
    n_switches: int = 0
    last_command: CurrentPair = CurrentPair(0.0, 0.0)


def initial_controller(vdc_ref: float, last_command: CurrentPair, params: ModelFreeParams = ModelFreeParams()) -> ControllerState:
    """Controller state at the instant support is triggered."""
    return ControllerState(
        mode=Mode.OSA,
        frozen=False,
        seeker=SeekerState(x=params.x0_a, d=params.d0_a),
        pi_integrator=last_command.id,
        vdc_ref=vdc_ref,
        params=params,
        last_command=last_command,
    )


def dc_voltage_pi(
    integrator: float,
    vdc_ref: float,
    vdc: float,
    dt: float,
    gains: PiGains,
    id_cap: float,
) -> tuple[float, float]:
    """PI on the dc voltage error returning ``(integrator, id)``.

    A dc voltage below reference lowers the active current. Both the
    integrator and the output are clamped to ``[0, id_cap]``.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    err = vdc - vdc_ref
    integrator = min(max(integrator + gains.ki * err * dt, 0.0), id_cap)
    out = min(max(gains.kp * err + integrator, 0.0), id_cap)
    return integrator, out


def _frozen_x(mode: Mode, params: ModelFreeParams, limits: Limits) -> float:
    return params.frozen_phi if mode is Mode.OSA else -params.frozen_iq_frac * limits.i_max


def _bounds(mode: Mode, limits: Limits) -> Bounds1D:
    # the true search interval depends on the unknown grid; only the
    # physical box is enforced
    return Bounds1D(-90.0, 0.0) if mode is Mode.OSA else Bounds1D(-limits.i_max, 0.0)


def model_free_step(
    ctrl: ControllerState,
    meas: Measurements,
    limits: Limits,
    dt: float,
    os_tick: bool,
) -> tuple[ControllerState, CurrentPair]:
    """One controller sample.

    Freezing and the mode switch are evaluated every sample; the seeker only
    advances on ``os_tick``. While frozen the seeker is parked at the frozen
    output and re-primes its comparison after unfreezing.
    """
    p = ctrl.params
    mode, frozen, seeker = ctrl.mode, ctrl.frozen, ctrl.seeker
    calm, n_switches = ctrl.calm_samples, ctrl.n_switches

    if p.freezing_enabled:
        if abs(meas.f_pll - p.f_n) >= p.delta_f:
            frozen, calm = True, 0
        elif frozen:
            calm += 1
            if calm >= p.unfreeze_samples:
                frozen, calm = False, 0
    if frozen and not ctrl.frozen:
        seeker = SeekerState(x=_frozen_x(mode, p, limits), d=seeker.d, k=seeker.k)

    integrator = ctrl.pi_integrator
    if mode is Mode.OSA and meas.vdc_filt <= p.rho * ctrl.vdc_ref:
        mode, n_switches = Mode.OSB, n_switches + 1
        x0 = _frozen_x(mode, p, limits) if frozen else p.x0_b
        seeker = SeekerState(x=x0, d=p.d0_b)
        integrator = ctrl.last_command.id

    if os_tick and not frozen:
        schedule = p.schedule_a if mode is Mode.OSA else p.schedule_b
        seeker = po_step(seeker, meas.v_poc, schedule, _bounds(mode, limits))

    if mode is Mode.OSA:
        cmd = CurrentPair.from_polar(limits.i_max, seeker.x)
    else:
        iq = seeker.x
        cap = math.sqrt(max(limits.i_max**2 - iq**2, 0.0))
        integrator, id_ = dc_voltage_pi(integrator, ctrl.vdc_ref, meas.vdc, dt, p.gains, cap)
        cmd = CurrentPair(id_, iq)

    new = dataclasses.replace(
        ctrl,
        mode=mode,
        frozen=frozen,
        seeker=seeker,
        pi_integrator=integrator,
        calm_samples=calm,
        n_switches=n_switches,
        last_command=cmd,
    )
    return new, cmd


def model_based_step(grid: GridParams, limits: Limits) -> CurrentPair:
    return solve(grid, limits).optimum


def droop_iq(v: float, i_max: float) -> float:
    if v <= 0.5:
        return -i_max
    if v < 0.9:
        return (0.9 - v) / (0.5 - 0.9) * i_max
    return 0.0


def droop_step(
    meas: Measurements,
    limits: Limits,
    ctrl: ControllerState,
    dt: float,
) -> tuple[ControllerState, CurrentPair]:
    """Reactive current from the droop rule; active current from the dc PI.

    Reactive current has priority: the PI output is capped by what the
    current limit leaves over.
    """
    iq = droop_iq(meas.v_poc, limits.i_max)
    cap = math.sqrt(max(limits.i_max**2 - iq**2, 0.0))
    integrator, id_ = dc_voltage_pi(ctrl.pi_integrator, ctrl.vdc_ref, meas.vdc, dt, ctrl.params.gains, cap)
    cmd = CurrentPair(id_, iq)
    return dataclasses.replace(ctrl, pi_integrator=integrator, last_command=cmd), cmd
