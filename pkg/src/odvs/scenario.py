"""Simulation scenarios: compiled-in presets and strict TOML files.

A scenario file is TOML with the sections ``grid``, ``inverter``, ``pv``,
``controller``, ``seeker``, ``plant`` and ``run``. An optional top-level
``base = "caseA"`` starts from a preset. Unknown sections or keys are
rejected::

    base = "caseB"

    [pv]
    irradiance = 500.0

    [controller]
    strategy = "droop"
"""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ParseError
from .grid import GridParams, Limits
from .plant import PlantConfig, PvCurve
from .seeker import StepSchedule
from .strategies import ModelFreeParams, PiGains

STRATEGIES = ("model_free", "model_based", "droop")


def _f(section: str, default: Any, **kw) -> Any:
    return field(default=default, metadata={"section": section}, **kw)


@dataclass(frozen=True)
class Scenario:
    name: str = _f("run", "custom")

    vg_prefault: float = _f("grid", 1.0)
    vg_postfault: float = _f("grid", 0.4)
    scr_prefault: float = _f("grid", 20.0)
    scr_postfault: float = _f("grid", 10.0)
    r_over_x: float = _f("grid", 2.0)

    i_max: float = _f("inverter", 1.5)
    kappa: float = _f("inverter", 1.0)

    irradiance: float = _f("pv", 1000.0)
    p_stc: float = _f("pv", 1.0)
    v_mpp: float = _f("pv", 1.0)
    v_oc: float = _f("pv", 1.19)

    strategy: str = _f("controller", "model_free")
    freezing_enabled: bool = _f("controller", True)
    trigger_v: float = _f("controller", 0.9)
    rho: float = _f("controller", 0.95)
    delta_f: float = _f("controller", 0.3)
    kp: float = _f("controller", 30.0)
    ki: float = _f("controller", 3000.0)

    x0_a: float = _f("seeker", -45.0)
    d0_a: int = _f("seeker", -1)
    lam_a: float = _f("seeker", 15.0)
    p_a: float = _f("seeker", 1.0)
    x0_b: float = _f("seeker", -0.75)
    d0_b: int = _f("seeker", -1)
    lam_b: float = _f("seeker", 0.2)
    p_b: float = _f("seeker", 1.0)
    os_rate_hz: float = _f("seeker", 30.0)

    tau_dc: float = _f("plant", 0.05)
    tau_f: float = _f("plant", 0.010)
    tau_pll: float = _f("plant", 0.020)
    k_los: float = _f("plant", 50.0)
    f_n: float = _f("plant", 60.0)

    t_pre: float = _f("run", 0.1)
    t_end: float = _f("run", 2.0)
    dt: float = _f("run", 1.0 / 1200.0)
    seed: int = _f("run", 0)
    noise_std: float = _f("run", 0.0)

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ParseError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if not (self.dt > 0.0 and self.t_end > 0.0 and self.t_pre >= 0.0):
            raise ParseError("dt and t_end must be positive, t_pre non-negative")
        ratio = 1.0 / (self.os_rate_hz * self.dt)
        if abs(ratio - round(ratio)) > 1e-6 or round(ratio) < 1:
            raise ParseError(f"dt = {self.dt} must divide the OS sampling period 1/{self.os_rate_hz} s")
        if self.d0_a not in (1, -1) or self.d0_b not in (1, -1):
            raise ParseError("initial directions must be +1 or -1")
        if not 0.0 < self.rho < 1.0:
            raise ParseError("rho must lie in (0, 1)")
        if self.noise_std < 0.0:
            raise ParseError("noise_std must be non-negative")
        try:
            self.grid_prefault, self.grid_postfault, self.limits, self.plant_config, self.controller_params
        except ValueError as exc:
            raise ParseError(str(exc)) from exc

    @property
    def os_period_steps(self) -> int:
        return int(round(1.0 / (self.os_rate_hz * self.dt)))

    @property
    def grid_prefault(self) -> GridParams:
        return GridParams.from_scr(self.vg_prefault, self.scr_prefault, self.r_over_x)

    @property
    def grid_postfault(self) -> GridParams:
        return GridParams.from_scr(self.vg_postfault, self.scr_postfault, self.r_over_x)

    @property
    def curve(self) -> PvCurve:
        return PvCurve(self.p_stc, self.v_mpp, self.v_oc)

    @property
    def p_max_effective(self) -> float:
        """Available power at the MPP for the scenario irradiance."""
        return self.curve.p_mpp(self.irradiance)

    @property
    def limits(self) -> Limits:
        return Limits(self.i_max, self.p_max_effective, self.kappa)

    @property
    def plant_config(self) -> PlantConfig:
        return PlantConfig(self.tau_dc, self.tau_f, self.tau_pll, self.k_los, self.f_n, self.curve)

    @property
    def controller_params(self) -> ModelFreeParams:
        return ModelFreeParams(
            rho=self.rho,
            delta_f=self.delta_f,
            f_n=self.f_n,
            x0_a=self.x0_a,
            d0_a=self.d0_a,
            x0_b=self.x0_b,
            d0_b=self.d0_b,
            schedule_a=StepSchedule(self.lam_a, self.p_a),
            schedule_b=StepSchedule(self.lam_b, self.p_b),
            freezing_enabled=self.freezing_enabled,
            gains=PiGains(self.kp, self.ki),
        )

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)


_FIELDS = {f.name: f for f in dataclasses.fields(Scenario)}
SECTIONS = sorted({f.metadata["section"] for f in _FIELDS.values()})

PRESETS: dict[str, Scenario] = {
    "caseA": Scenario(name="caseA", vg_postfault=0.4, irradiance=1000.0),
    "caseB": Scenario(name="caseB", vg_postfault=0.4, irradiance=400.0),
    # p_stc = 0.9 gives 0.09 pu available at 100 W/m2 for cases C and D
    "caseC": Scenario(name="caseC", vg_postfault=0.1, irradiance=100.0, p_stc=0.9),
    "caseD": Scenario(name="caseD", vg_postfault=0.05, irradiance=100.0, p_stc=0.9),
}


def _coerce(name: str, value: Any, where: str) -> Any:
    f = _FIELDS[name]
    kind = type(f.default)
    if kind is bool:
        if not isinstance(value, bool):
            raise ParseError(f"{where}: expected a boolean, got {value!r}")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f"{where}: expected an integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"{where}: expected a number, got {value!r}")
        if not math.isfinite(value):
            raise ParseError(f"{where}: value must be finite")
        return float(value)
    if not isinstance(value, str):
        raise ParseError(f"{where}: expected a string, got {value!r}")
    return value


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{source}: {exc}") from exc

    base_name = doc.pop("base", None)
    if base_name is None:
        base = Scenario()
    elif base_name in PRESETS:
        base = PRESETS[base_name]
    else:
        raise ParseError(f"{source}: unknown base preset {base_name!r}; choose from {sorted(PRESETS)}")

    changes: dict[str, Any] = {}
    for section, table in doc.items():
        if section not in SECTIONS or not isinstance(table, dict):
            raise ParseError(f"{source}: unknown top-level key {section!r}; sections are {SECTIONS}")
        for key, value in table.items():
            where = f"{source}: [{section}] {key}"
            f = _FIELDS.get(key)
            if f is None or f.metadata["section"] != section:
                raise ParseError(f"{where}: unknown key")
            changes[key] = _coerce(key, value, where)
    if "name" not in changes and base_name is None:
        changes["name"] = Path(source).stem
    try:
        return base.replace(**changes)
    except ParseError as exc:
        raise ParseError(f"{source}: {exc}") from exc


def load_scenario(path_or_preset: Union[str, Path]) -> Scenario:
    """Load a preset by name (``caseA`` .. ``caseD``) or a TOML file."""
    key = str(path_or_preset)
    if key in PRESETS:
        return PRESETS[key]
    path = Path(key)
    if not path.is_file():
        raise ParseError(f"{key}: not a preset ({', '.join(PRESETS)}) and no such file")
    return parse_scenario(path.read_text(), source=str(path))


def scenario_to_toml(s: Scenario) -> str:
    """Serialise every field, grouped by section."""
    lines = []
    for section in SECTIONS:
        lines.append(f"[{section}]")
        for f in dataclasses.fields(Scenario):
            if f.metadata["section"] != section:
                continue
            v = getattr(s, f.name)
            if isinstance(v, bool):
                lines.append(f"{f.name} = {'true' if v else 'false'}")
            elif isinstance(v, str):
                lines.append(f'{f.name} = "{v}"')
            else:
                lines.append(f"{f.name} = {v!r}")
        lines.append("")
    return "\n".join(lines)
