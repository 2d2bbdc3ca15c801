"""Command-line entry point: ``odvs <command> ...``.

Exit codes: 0 success, 2 bad input (including scenario parse errors),
3 a ``--check`` assertion failed.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from .analytic import brute_force_oracle, solve, thresholds
from .errors import OdvsError, ParseError
from .grid import KAPPA_VALUES, GridParams, Limits, sync_residual
from .scenario import PRESETS, load_scenario

EXIT_OK, EXIT_INPUT, EXIT_CHECK = 0, 2, 3
log = logging.getLogger("odvs")


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--vg", type=float, required=True, help="grid voltage (pu)")
    p.add_argument("--z", type=float, default=0.1, help="grid impedance magnitude (pu), default 0.1")
    p.add_argument("--r-over-x", type=float, default=2.0, help="default 2")
    p.add_argument("--i-max", type=float, default=1.5, help="default 1.5")
    p.add_argument("--p-max", type=float, required=True, help="available active power (pu)")
    p.add_argument("--kappa", type=float, default=1.0, choices=KAPPA_VALUES)


def _grid_from(ns) -> tuple[GridParams, Limits]:
    x = ns.z / math.sqrt(1.0 + ns.r_over_x**2)
    return GridParams(ns.vg, ns.r_over_x * x, x), Limits(ns.i_max, ns.p_max, ns.kappa)


def _emit(pairs: dict) -> None:
    for k, v in pairs.items():
        print(f"{k}={v:.6f}" if isinstance(v, float) else f"{k}={v}")


def cmd_solve(ns) -> int:
    grid, lim = _grid_from(ns)
    sol = solve(grid, lim)
    th = thresholds(grid, lim.i_max, lim.p_max, lim.kappa)
    _emit({
        "stage": sol.stage.value, "id": sol.optimum.id, "iq": sol.optimum.iq,
        "phi_deg": sol.optimum.phi_deg, "v_star": sol.v_star, "pb": th.pb, "ib": th.ib,
    })
    return EXIT_OK


def cmd_oracle(ns) -> int:
    grid, lim = _grid_from(ns)
    bf = brute_force_oracle(grid, lim, ns.resolution)
    out = {"stage": bf.stage.value, "id": bf.optimum.id, "iq": bf.optimum.iq, "v_star": bf.v_star}
    if ns.compare:
        out["v_star_analytic"] = solve(grid, lim).v_star
        out["abs_diff"] = abs(out["v_star_analytic"] - bf.v_star)
    _emit(out)
    if ns.check and ns.compare and out["abs_diff"] > 2e-3:
        print("check failed: analytic and brute-force optima differ by more than 2e-3", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def _simulation_checks(scenario, series, m) -> list[str]:
    fails = []
    cc = max((i * i + q * q for i, q in zip(series.id_cmd, series.iq_cmd)), default=0.0) - scenario.i_max**2
    if cc > 1e-12:
        fails.append(f"current limit exceeded by {cc:.3g}")
    if not m.frozen_final and series.sync_ok and series.sync_ok[-1] and math.isfinite(m.v_star):
        if m.v_final > m.v_star + 1e-6:
            fails.append(f"v_final {m.v_final:.6f} exceeds the optimum {m.v_star:.6f}")
    if scenario.strategy == "model_free" and m.n_switches > 1:
        fails.append("more than one mode switch")
    return fails


def cmd_simulate(ns) -> int:
    from .simulate import run_simulation, write_outputs

    scenario = load_scenario(ns.scenario)
    if ns.strategy:
        scenario = scenario.replace(strategy=ns.strategy)
    if ns.no_freeze:
        scenario = scenario.replace(freezing_enabled=False)
    series, metrics = run_simulation(scenario)
    paths = write_outputs(series, metrics, ns.out, figure=not ns.no_figure)
    for kind, path in paths.items():
        log.info("wrote %s %s", kind, path)
    print(Path(paths["metrics"]).read_text(), end="")
    if ns.check:
        fails = _simulation_checks(scenario, series, metrics)
        for f in fails:
            print(f"check failed: {f}", file=sys.stderr)
        if fails:
            return EXIT_CHECK
    return EXIT_OK


def cmd_convergence(ns) -> int:
    from .convergence import run_convergence_suite

    report = run_convergence_suite(ns.n, ns.seed)
    print("\n".join(report.lines()))
    if ns.out:
        from .plotting import plot_convergence

        out = Path(ns.out)
        out.mkdir(parents=True, exist_ok=True)
        plot_convergence({r.label: r.errors for r in report.results}, out / "convergence.png")
    if ns.check:
        bad = [r for r in report.results if r.p <= 1.0 and r.failed]
        control = [r for r in report.results if r.p > 1.0]
        if bad or any(r.failed == 0 for r in control):
            print("check failed: convergent schedules must all pass and the summable control must stall", file=sys.stderr)
            return EXIT_CHECK
    return EXIT_OK


SWEEP_FIELDS = ("vg", "z", "p_max", "stage", "id", "iq", "v_star", "pb", "ib", "gs")


def cmd_sweep(ns) -> int:
    rows = []
    for vg, z, p in itertools.product(ns.vg, ns.z, ns.p_max):
        x = z / math.sqrt(1.0 + ns.r_over_x**2)
        grid = GridParams(vg, ns.r_over_x * x, x)
        lim = Limits(ns.i_max, p, ns.kappa)
        try:
            sol = solve(grid, lim)
            th = thresholds(grid, lim.i_max, p, lim.kappa)
        except (OdvsError, ValueError) as exc:
            log.warning("vg=%g z=%g p_max=%g skipped: %s", vg, z, p, exc)
            continue
        rows.append({
            "vg": vg, "z": z, "p_max": p, "stage": sol.stage.value, "id": sol.optimum.id,
            "iq": sol.optimum.iq, "v_star": sol.v_star, "pb": th.pb, "ib": th.ib,
            "gs": sync_residual(grid, sol.optimum),
        })

    fh = open(ns.out, "w", newline="") if ns.out else sys.stdout
    try:
        w = csv.DictWriter(fh, SWEEP_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in r.items()})
    finally:
        if fh is not sys.stdout:
            fh.close()
    if ns.figure and rows:
        from .plotting import plot_sweep

        key = max(("vg", "z", "p_max"), key=lambda k: len({r[k] for r in rows}))
        plot_sweep(rows, key, ["v_star"], ns.figure)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="odvs", description="Optimal dynamic voltage support lab (per-unit).")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="analytic optimum and stage thresholds")
    _grid_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="brute-force grid search of the optimum")
    _grid_args(p)
    p.add_argument("--resolution", type=float, default=1e-3)
    p.add_argument("--compare", action="store_true", help="also report the analytic optimum")
    p.add_argument("--check", action="store_true", help="exit 3 if --compare differs by more than 2e-3")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="closed-loop run of a scenario")
    p.add_argument("--scenario", required=True, help=f"TOML file or preset ({', '.join(PRESETS)})")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--strategy", choices=("model_free", "model_based", "droop"), help="override the scenario strategy")
    p.add_argument("--no-freeze", action="store_true", help="disable the freezing strategy")
    p.add_argument("--no-figure", action="store_true")
    p.add_argument("--check", action="store_true", help="exit 3 if a run invariant is violated")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("convergence", help="randomised seeker convergence suite")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="directory for the convergence figure")
    p.add_argument("--check", action="store_true")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("sweep", help="analytic optimum over a grid of vg, z and p_max")
    p.add_argument("--vg", type=_floats, default=[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8])
    p.add_argument("--z", type=_floats, default=[0.1])
    p.add_argument("--p-max", type=_floats, default=[0.4, 1.0])
    p.add_argument("--r-over-x", type=float, default=2.0)
    p.add_argument("--i-max", type=float, default=1.5)
    p.add_argument("--kappa", type=float, default=1.0, choices=KAPPA_VALUES)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--figure", help="PNG path for a v_star plot")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.WARNING - 10 * ns.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        return ns.func(ns)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OdvsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
