import pytest

from odvs.errors import ParseError
from odvs.scenario import PRESETS, Scenario, load_scenario, parse_scenario, scenario_to_toml


def test_presets():
    a = load_scenario("caseA")
    assert (a.vg_postfault, a.i_max, a.rho, a.irradiance) == (0.4, 1.5, 0.95, 1000.0)
    assert load_scenario("caseB").p_max_effective == pytest.approx(0.4)
    c = load_scenario("caseC")
    assert (c.vg_postfault, c.irradiance) == (0.1, 100.0)
    assert c.p_max_effective == pytest.approx(0.09)
    assert load_scenario("caseD").vg_postfault == 0.05
    for s in PRESETS.values():
        assert s.grid_postfault.z == pytest.approx(0.1)
        assert s.grid_prefault.z == pytest.approx(0.05)
        assert s.grid_postfault.r / s.grid_postfault.x == pytest.approx(2.0)


def test_parse_with_base_and_overrides(tmp_path):
    f = tmp_path / "b.toml"
    f.write_text('base = "caseB"\n[pv]\nirradiance = 500\n[controller]\nstrategy = "droop"\n')
    s = load_scenario(f)
    assert s.irradiance == 500.0 and s.strategy == "droop" and s.name == "caseB"


def test_name_from_file_without_base(tmp_path):
    f = tmp_path / "mine.toml"
    f.write_text("[grid]\nvg_postfault = 0.3\n")
    s = load_scenario(f)
    assert s.name == "mine" and s.vg_postfault == 0.3


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("[inverter]\nimax_typo = 1.5\n", "imax_typo"),
        ("[wat]\nx = 1\n", "wat"),
        ("[grid]\nr_over_x = true\n", "r_over_x"),
        ("[run]\nseed = 1.5\n", "seed"),
        ('base = "caseZ"\n', "caseZ"),
        ("[grid\n", "line"),
        ('[controller]\nstrategy = "magic"\n', "strategy"),
        ("[run]\ndt = 0.001\n", "divide"),
        ("[seeker]\nd0_a = 0\n", "direction"),
        ("[pv]\nv_oc = 0.5\n", "PV"),
        ("[inverter]\ni_max = 1.5\n[grid]\nvg_prefault = 1.0\nx0_a = 1\n", "x0_a"),
    ],
)
def test_strict_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_scenario(text, source="t.toml")


def test_missing_file():
    with pytest.raises(ParseError):
        load_scenario("/nonexistent/s.toml")


def test_roundtrip():
    s = PRESETS["caseC"].replace(strategy="droop", freezing_enabled=False, seed=3)
    assert parse_scenario(scenario_to_toml(s)) == s


def test_os_period_steps():
    assert Scenario().os_period_steps == 40
