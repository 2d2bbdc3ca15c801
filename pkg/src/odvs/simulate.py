"""Closed-loop episode driver: pre-fault hold, dip at t = 0, voltage support."""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .analytic import solve
from .errors import OdvsError
from .grid import CurrentPair, Limits
from .plant import Measurements, PlantState, apply_dip, measure, plant_step
from .reduction import psi
from .scenario import Scenario
from .strategies import (
    ControllerState,
    Mode,
    dc_voltage_pi,
    droop_step,
    initial_controller,
    model_based_step,
    model_free_step,
)

CSV_HEADER = (
    "t", "vg", "v_poc", "id_cmd", "iq_cmd", "phi_deg", "mode", "frozen",
    "vdc", "vdc_filt", "f_pll", "p_ac", "p_pv", "sync_ok",
)
V_BAND = 0.005
DC_BAND = 0.02
SETTLE_WINDOW = 0.1


@dataclass
class Series:
    """Column store, one entry per plant step."""

    t: list
    vg: list
    v_poc: list
    id_cmd: list
    iq_cmd: list
    phi_deg: list
    mode: list
    frozen: list
    vdc: list
    vdc_filt: list
    f_pll: list
    p_ac: list
    p_pv: list
    sync_ok: list
    os_moves: list

    @classmethod
    def empty(cls) -> "Series":
        return cls(*([] for _ in dataclasses.fields(cls)))

    def __len__(self) -> int:
        return len(self.t)

    def append(self, t, vg, cmd: CurrentPair, mode: str, frozen: bool, m: Measurements, os_moves: int):
        self.t.append(t)
        self.vg.append(vg)
        self.v_poc.append(m.v_poc)
        self.id_cmd.append(cmd.id)
        self.iq_cmd.append(cmd.iq)
        self.phi_deg.append(cmd.phi_deg)
        self.mode.append(mode)
        self.frozen.append(frozen)
        self.vdc.append(m.vdc)
        self.vdc_filt.append(m.vdc_filt)
        self.f_pll.append(m.f_pll)
        self.p_ac.append(m.p_ac)
        self.p_pv.append(m.p_pv)
        self.sync_ok.append(m.sync_ok)
        self.os_moves.append(os_moves)

    def array(self, name: str) -> np.ndarray:
        return np.asarray(getattr(self, name), dtype=float)


@dataclass(frozen=True)
class RunMetrics:
    scenario: str
    strategy: str
    v_star: float
    stage: str
    v_final: float
    phi_final: float
    id_final: float
    iq_final: float
    iterations_to_converge: Optional[int]
    time_to_converge: Optional[float]
    trigger_time: Optional[float]
    mode_final: str
    mode_switch_time: Optional[float]
    n_switches: int
    frozen_final: bool
    los_detected: bool
    los_longest: float
    los_total: float
    max_abs_df: float
    df_final: float
    vdc_ref: float
    vdc_final: float
    dc_recovery_time: Optional[float]

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _prefault_command(s: Scenario) -> CurrentPair:
    """Unity power factor injection of the MPP power on the pre-fault grid."""
    lim = s.limits
    id0 = psi(s.grid_prefault, s.p_max_effective, lim.kappa, 0.0) if s.p_max_effective > 0.0 else 0.0
    return CurrentPair(min(id0, lim.i_max), 0.0)


class _Strategy:
    """Uniform step interface over the three controllers."""

    def __init__(self, s: Scenario, vdc_ref: float, last: CurrentPair):
        self.s = s
        self.kind = s.strategy
        self.ctrl: ControllerState = initial_controller(vdc_ref, last, s.controller_params)
        self.os_moves = 0
        if self.kind == "model_based":
            self.target = model_based_step(s.grid_postfault, s.limits)
            self.ctrl = dataclasses.replace(self.ctrl, pi_integrator=self.target.id)

    def step(self, meas: Measurements, limits: Limits, dt: float, os_tick: bool) -> CurrentPair:
        if self.kind == "model_free":
            before = self.ctrl.seeker
            self.ctrl, cmd = model_free_step(self.ctrl, meas, limits, dt, os_tick)
            # a move advances k; warm-ups and re-seeds do not
            if self.ctrl.seeker.k > before.k:
                self.os_moves += 1
            return cmd
        if self.kind == "droop":
            self.ctrl, cmd = droop_step(meas, limits, self.ctrl, dt)
            return cmd
        # model-based: reactive set-point as computed, active current trimmed
        # by the dc loop so an exact power-limited set-point stays balanced
        integ, id_ = dc_voltage_pi(
            self.ctrl.pi_integrator, self.ctrl.vdc_ref, meas.vdc, dt, self.ctrl.params.gains, self.target.id
        )
        cmd = CurrentPair(id_, self.target.iq)
        self.ctrl = dataclasses.replace(self.ctrl, pi_integrator=integ, last_command=cmd)
        return cmd

    @property
    def mode(self) -> str:
        return self.ctrl.mode.value if self.kind == "model_free" else self.kind

    @property
    def frozen(self) -> bool:
        return self.ctrl.frozen


def _longest_run(mask: np.ndarray, dt: float) -> float:
    best = cur = 0
    for flag in mask:
        cur = cur + 1 if flag else 0
        best = max(best, cur)
    return best * dt


def run_simulation(s: Scenario) -> tuple[Series, RunMetrics]:
    """Simulate one episode; deterministic for a given scenario (and seed)."""
    rng = np.random.default_rng(s.seed)
    cfg = s.plant_config
    lim = s.limits
    dt = s.dt
    n_os = s.os_period_steps

    cmd = _prefault_command(s)
    vdc_ref = s.v_mpp
    state = PlantState(s.grid_prefault, vdc_ref, vdc_ref, s.f_n, s.irradiance, t=-s.t_pre)
    series = Series.empty()

    n_pre = int(round(s.t_pre / dt))
    for _ in range(n_pre):
        state, meas = plant_step(state, cmd, lim, dt, cfg)
        series.append(state.t, state.grid.vg, cmd, "prefault", False, meas, 0)

    state = dataclasses.replace(apply_dip(state, s.grid_postfault), t=0.0)
    meas = measure(state, cmd, lim, cfg)
    strat: Optional[_Strategy] = None
    trigger_time = None
    since_trigger = 0
    n_post = int(round(s.t_end / dt))

    for _ in range(n_post):
        v_obs = meas.v_poc + (rng.normal(0.0, s.noise_std) if s.noise_std > 0.0 else 0.0)
        m_obs = dataclasses.replace(meas, v_poc=v_obs)
        if strat is None and v_obs < s.trigger_v:
            # MPPT is frozen: the reference is the last pre-dip dc voltage
            strat = _Strategy(s, state.vdc, cmd)
            trigger_time = state.t
            since_trigger = 0
        if strat is not None:
            os_tick = since_trigger > 0 and since_trigger % n_os == 0
            mode_before = strat.mode
            cmd = strat.step(m_obs, lim, dt, os_tick)
            # a re-seeded search starts a fresh sampling period
            since_trigger = 1 if strat.mode != mode_before else since_trigger + 1
        state, meas = plant_step(state, cmd, lim, dt, cfg)
        series.append(
            state.t,
            state.grid.vg,
            cmd,
            strat.mode if strat else "hold",
            strat.frozen if strat else False,
            meas,
            strat.os_moves if strat else 0,
        )

    return series, _metrics(s, series, strat, trigger_time, n_pre, vdc_ref)


def _metrics(s, series: Series, strat, trigger_time, n_pre, vdc_ref) -> RunMetrics:
    dt = s.dt
    try:
        sol = solve(s.grid_postfault, s.limits)
        v_star, stage = sol.v_star, sol.stage.value
    except (OdvsError, ValueError):
        v_star, stage = math.nan, "none"

    post = slice(n_pre, len(series))
    t = series.array("t")[post]
    v = series.array("v_poc")[post]
    f = series.array("f_pll")[post]
    vdc = series.array("vdc")[post]
    moves = np.asarray(series.os_moves[post], dtype=int)
    modes = series.mode[post]

    n_tail = max(1, int(round(SETTLE_WINDOW / dt)))
    v_final = float(np.mean(v[-n_tail:])) if len(v) else math.nan

    iters = t_conv = None
    if len(v) and math.isfinite(v_star):
        bad = np.flatnonzero(np.abs(v - v_star) > V_BAND)
        if bad.size == 0:
            iters, t_conv = 0, 0.0
        elif bad[-1] + 1 < len(v):
            iters = int(moves[bad[-1] + 1])
            t_conv = float(t[bad[-1] + 1] - (trigger_time or 0.0))

    switch_t = None
    if trigger_time is not None:
        idx = next((i for i, m in enumerate(modes) if m == Mode.OSB.value), None)
        if idx is not None:
            switch_t = float(t[idx])

    df = np.abs(f - s.f_n)
    los_mask = df >= s.delta_f
    rec = None
    if trigger_time is not None and len(vdc):
        off = np.flatnonzero(np.abs(vdc - vdc_ref) > DC_BAND * vdc_ref)
        if off.size == 0:
            rec = 0.0
        elif off[-1] + 1 < len(vdc):
            rec = float(t[off[-1] + 1] - trigger_time)

    last_id = series.id_cmd[-1] if len(series) else 0.0
    last_iq = series.iq_cmd[-1] if len(series) else 0.0
    return RunMetrics(
        scenario=s.name,
        strategy=s.strategy,
        v_star=v_star,
        stage=stage,
        v_final=v_final,
        phi_final=math.degrees(math.atan2(last_iq, last_id)),
        id_final=last_id,
        iq_final=last_iq,
        iterations_to_converge=iters,
        time_to_converge=t_conv,
        trigger_time=trigger_time,
        mode_final=modes[-1] if modes else "none",
        mode_switch_time=switch_t,
        n_switches=strat.ctrl.n_switches if strat else 0,
        frozen_final=bool(series.frozen[-1]) if len(series) else False,
        los_detected=bool(los_mask.any()),
        los_longest=_longest_run(los_mask, dt),
        los_total=float(los_mask.sum() * dt),
        max_abs_df=float(df.max()) if len(df) else 0.0,
        df_final=float(df[-1]) if len(df) else 0.0,
        vdc_ref=vdc_ref,
        vdc_final=float(vdc[-1]) if len(vdc) else math.nan,
        dc_recovery_time=rec,
    )


def write_csv(series: Series, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for i in range(len(series)):
            w.writerow([
                *(f"{getattr(series, c)[i]:.6f}" for c in CSV_HEADER[:6]),
                series.mode[i],
                int(series.frozen[i]),
                *(f"{getattr(series, c)[i]:.6f}" for c in CSV_HEADER[8:13]),
                int(series.sync_ok[i]),
            ])


def write_metrics(metrics: RunMetrics, path: Path) -> None:
    path.write_text("".join(f"{k}={_fmt(v)}\n" for k, v in metrics.as_dict().items()))


def write_outputs(series: Series, metrics: RunMetrics, out_dir, figure: bool = True) -> dict[str, Path]:
    """Write ``timeseries.csv``, ``metrics.txt`` and (optionally) ``timeseries.png``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = {"csv": out / "timeseries.csv", "metrics": out / "metrics.txt"}
        write_csv(series, paths["csv"])
        write_metrics(metrics, paths["metrics"])
        if figure and len(series):
            from .plotting import plot_timeseries

            paths["figure"] = plot_timeseries(series, metrics, out / "timeseries.png")
    except OSError as exc:
        raise OSError(f"cannot write outputs to {out}: {exc}") from exc
    return paths
