import math

import pytest
from conftest import make_grid

from odvs.analytic import stage_s1
from odvs.grid import CurrentPair, Limits
from odvs.plant import (
    PlantConfig,
    PlantState,
    PvCurve,
    apply_dip,
    measure,
    plant_step,
    pv_power,
    pv_voltage_for_power,
)

CURVE = PvCurve()
LIM = Limits(1.5, 1.0)


def state(vg=0.4, vdc=1.0, irradiance=1000.0, f=60.0):
    return PlantState(make_grid(vg), vdc, vdc, f, irradiance)


def test_pv_curve_points():
    assert pv_power(CURVE, 1.0, 1000) == 1.0
    assert pv_power(CURVE, 1.19, 400) == 0.0
    assert pv_power(CURVE, 0.5, 1000) == 0.5
    assert pv_power(CURVE, 2.0, 1000) == 0.0
    with pytest.raises(ValueError):
        pv_power(CURVE, -0.1, 1000)
    with pytest.raises(ValueError):
        PvCurve(v_mpp=1.2, v_oc=1.19)


def test_self_protection_equilibrium_voltage():
    v = pv_voltage_for_power(CURVE, 0.7379, 1000)
    assert v == pytest.approx(1.0973, abs=1e-4)
    assert v * 505 == pytest.approx(554, abs=1)
    assert pv_power(CURVE, v, 1000) == pytest.approx(0.7379)


def test_energy_balance_example():
    s = state(irradiance=400.0)
    cmd = stage_s1(s.grid, 1.5)
    new, m = plant_step(s, cmd, LIM, 1e-3)
    assert m.p_pv == pytest.approx(0.4)
    assert m.p_ac == pytest.approx(0.737902, abs=1e-6)
    assert new.vdc == pytest.approx(0.99662, abs=1e-5)
    assert (new.vdc**2 - s.vdc**2) * 0.05 / 1e-3 == pytest.approx(m.p_pv - m.p_ac, rel=1e-9)


def test_equilibrium_holds():
    s = state(irradiance=1000.0)
    # pick a command whose power equals the MPP power exactly
    cmd = CurrentPair(1.341641, -0.670820)
    m = measure(s, cmd, LIM)
    # irradiance chosen so the MPP power equals the injected power
    s = PlantState(s.grid, 1.0, 1.0, 60.0, 1000.0 * m.p_ac)
    new, _ = plant_step(s, cmd, LIM, 1e-3)
    assert new.vdc == pytest.approx(1.0, abs=1e-12)


def test_sync_loss_drifts_frequency_and_drops_power():
    s = state(vg=0.05)
    new, m = plant_step(s, CurrentPair(1.5, 0.0), LIM, 1e-3)
    assert not m.sync_ok and m.p_ac == 0.0
    gs = abs(s.grid.x * 1.5) - 0.05
    assert new.f_pll - 60.0 == pytest.approx(1e-3 * 50.0 * gs / s.grid.z)


def test_frequency_relaxes_when_synchronised():
    s = state(f=61.0)
    cfg = PlantConfig()
    for _ in range(int(5 * cfg.tau_pll / 1e-3)):
        s, m = plant_step(s, CurrentPair(0.5, -0.5), LIM, 1e-3, cfg)
    assert abs(m.f_pll - 60.0) < 1.0 * math.exp(-5) + 1e-9


def test_vdc_converges_to_right_branch_equilibrium():
    s = state(irradiance=1000.0)
    cmd = stage_s1(s.grid, 1.5)
    for _ in range(5000):
        s, m = plant_step(s, cmd, LIM, 1e-3)
    assert s.vdc == pytest.approx(pv_voltage_for_power(CURVE, m.p_ac, 1000), abs=1e-6)


def test_vdc_filt_falls_when_demand_exceeds_supply():
    s = state(irradiance=400.0)
    cmd = stage_s1(s.grid, 1.5)
    t = 0.0
    while s.vdc_filt > 0.95:
        s, _ = plant_step(s, cmd, LIM, 1e-3)
        t += 1e-3
        assert t < 1.0
    assert s.vdc_filt <= 0.95


def test_filter_lags_and_dt_validation():
    s = PlantState(make_grid(0.4), 1.0, 0.9, 60.0, 1000.0)
    new, _ = plant_step(s, CurrentPair(0, 0), LIM, 1e-3)
    assert 0.9 < new.vdc_filt < new.vdc
    with pytest.raises(ValueError):
        plant_step(s, CurrentPair(0, 0), LIM, 0.0)


def test_apply_dip():
    s = state(vg=1.0)
    d = apply_dip(s, make_grid(0.4))
    assert d.grid.vg == 0.4 and d.vdc == s.vdc and d.f_pll == s.f_pll
    assert apply_dip(s, s.grid) == s
