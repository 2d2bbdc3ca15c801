import pytest

from odvs.cli import EXIT_CHECK, EXIT_INPUT, EXIT_OK, main


def test_solve(capsys):
    assert main(["solve", "--vg", "0.4", "--p-max", "0.95"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "stage=S1" in out and "v_star=0.550000" in out and "pb=0.737902" in out


def test_oracle_compare(capsys):
    assert main(["oracle", "--vg", "0.4", "--p-max", "0.4", "--resolution", "0.005", "--compare", "--check"]) == EXIT_OK
    assert "abs_diff=" in capsys.readouterr().out


def test_oracle_check_fails_on_coarse_grid(capsys):
    assert main(["oracle", "--vg", "0.4", "--p-max", "0.4", "--resolution", "0.1", "--compare", "--check"]) == EXIT_CHECK


def test_simulate_preset(tmp_path, capsys):
    rc = main(["simulate", "--scenario", "caseA", "--out", str(tmp_path), "--check"])
    assert rc == EXIT_OK
    assert {p.name for p in tmp_path.iterdir()} == {"timeseries.csv", "metrics.txt", "timeseries.png"}
    assert "scenario=caseA" in capsys.readouterr().out


def test_simulate_overrides(tmp_path, capsys):
    rc = main(["simulate", "--scenario", "caseC", "--strategy", "droop", "--out", str(tmp_path), "--no-figure"])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "strategy=droop" in out and "los_detected=true" in out


def test_simulate_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("[inverter]\nimax_typo = 1\n")
    assert main(["simulate", "--scenario", str(bad), "--out", str(tmp_path / "o")]) == EXIT_INPUT
    assert "imax_typo" in capsys.readouterr().err


def test_bad_arguments():
    assert main(["nope"]) == EXIT_INPUT
    assert main(["solve", "--vg", "x", "--p-max", "1"]) == EXIT_INPUT
    assert main(["--help"]) == EXIT_OK


def test_domain_error_exit_code(capsys):
    assert main(["solve", "--vg", "0.4", "--p-max", "-1"]) == EXIT_INPUT


def test_sweep(tmp_path):
    out = tmp_path / "s.csv"
    fig = tmp_path / "s.png"
    assert main(["sweep", "--vg", "0.1,0.4", "--p-max", "0.4", "--out", str(out), "--figure", str(fig)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("vg,z,p_max,stage") and len(lines) == 3
    assert fig.exists()


def test_convergence_small(tmp_path, capsys):
    assert main(["convergence", "--n", "3", "--seed", "1", "--out", str(tmp_path)]) == EXIT_OK
    assert "harmonic" in capsys.readouterr().out
    assert (tmp_path / "convergence.png").exists()
