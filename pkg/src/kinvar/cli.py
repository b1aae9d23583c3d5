"""``kinvar`` command line: simulate, shock-rarefaction, counterexample, compare.

Flags mirror config keys (``--grid.nx=512``). Exit codes: 0 pass, 1 an
assertion failed, 2 configuration error, 3 runtime or stability error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .cone import interaction_field
from .config import build_config, dumps, parse_pairs, read_config_text
from .errors import ConfigurationError, KinvarError, ResolutionError
from .kinetic import write_field_csv
from .solver import evolve
from .transport import TransportOperator

log = logging.getLogger("kinvar")

EXIT_OK, EXIT_ASSERT, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3

# per-subcommand defaults, applied beneath the config file and flags
SUBCOMMAND_DEFAULTS = {
    "simulate": {},
    "compare": {},
    "shock-rarefaction": {"grid.L": 4.0, "grid.nx": 256, "grid.nv": 256},
    "counterexample": {"flux.kind": "shifted_square", "grid.L": 4.0, "grid.nx": 512,
                       "grid.nv": 512, "mollify.eps": 0.1, "mollify.kernel": "plateau"},
}


def _parse_overrides(extra: list[str]) -> dict:
    pairs = []
    for item in extra:
        if not item.startswith("--") or "=" not in item:
            raise ConfigurationError(f"expected --key=value, got {item!r}")
        k, v = item[2:].split("=", 1)
        pairs.append((k, v))
    return parse_pairs(pairs, "<flags>")


def _write_report(out: Path, report: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(dumps(report) + "\n")


def _print_assertions(report: dict) -> None:
    for a in report["assertions"]:
        status = "PASS" if a["pass"] else "FAIL"
        print(f"[{status}] {a['name']}: measured={a['measured']!r} expected={a['expected']!r} "
              f"tol={a['tol']!r}")


def _write_profile(path: Path, x, values) -> None:
    with open(path, "w") as fh:
        fh.write("x,value\n")
        for a, b in zip(x, values):
            fh.write(f"{format(a, '.17g')},{format(b, '.17g')}\n")


def run_simulation(cfg) -> dict:
    """Evolve the configured initial data, write CSV artefacts and check invariants."""
    out = Path(cfg["output.dir"])
    (out / "snapshots").mkdir(parents=True, exist_ok=True)
    flux, T, tau = cfg.flux, cfg["time.T"], cfg["solver.tau_flat"]
    Y0 = cfg.initial_field()
    outputs = cfg["time.outputs"] or [0.0, T]
    traj = evolve(Y0, flux, T, cfg["time.cfl"], output_times=outputs, tau_flat=tau)
    for t, Y in traj.snapshots:
        write_field_csv(out / "snapshots" / f"field_t{t:.6f}.csv", Y)
    traj.diagnostics.to_csv(out / "diagnostics.csv")
    for label, Y in (("t0", Y0), ("final", traj.final)):
        _write_profile(out / f"interaction_{label}.csv", Y.grid.x, interaction_field(Y, flux, tau)[0])

    d = traj.diagnostics.as_arrays()
    speed = TransportOperator.from_flux(flux, Y0.grid).max_speed
    mass_drift = float(np.max(np.abs(d["mass"] - d["mass"][0])))
    mass_tol = 1e-12 * max(abs(d["mass"][0]), 1.0)
    l2_rise = float(np.max(np.diff(d["l2_squared"]), initial=0.0))
    grad_rise = float(np.max(np.diff(d["grad_x_norm"]), initial=0.0))
    vel_bound = speed * d["grad_x_norm"][0] * 1.01
    vel_max = float(np.nanmax(d["dt_velocity_norm"], initial=0.0))
    defect_min = float(np.nanmin(d["defect_min"], initial=0.0))
    defect_top = float(np.nanmax(d["defect_top"], initial=0.0))
    monotone = all(Y.is_monotone() for _, Y in traj.snapshots)
    A = experiments.assertion
    assertions = [
        A("snapshots_monotone_in_v", True, monotone, 0.0, monotone),
        A("mass_conserved", 0.0, mass_drift, mass_tol, mass_drift <= mass_tol),
        A("l2_nonincreasing", "<= 0", l2_rise, 1e-12, l2_rise <= 1e-12),
        A("grad_x_nonincreasing", "<= 0", grad_rise, 1e-12, grad_rise <= 1e-12),
        A("velocity_bound", f"<= {vel_bound:.6g}", vel_max, 0.01, vel_max <= vel_bound),
        A("defect_nonnegative", ">= 0", defect_min, 1e-10, defect_min >= -1e-10),
        A("defect_top_zero", 0.0, defect_top, 1e-12, defect_top <= 1e-12),
    ]
    measurements = {
        "steps": len(d["t"]) - 1,
        "final_time": float(d["t"][-1]),
        "l2_squared_initial": float(d["l2_squared"][0]),
        "l2_squared_final": float(d["l2_squared"][-1]),
        "mass_initial": float(d["mass"][0]),
        "interaction_total_initial": float(d["interaction_total"][0]),
        "interaction_total_final": float(d["interaction_total"][-1]),
        "grad_x_norm_initial": float(d["grad_x_norm"][0]),
        "grad_x_norm_final": float(d["grad_x_norm"][-1]),
        "snapshot_times": [t for t, _ in traj.snapshots],
    }
    return {"config": cfg.echo(), "measurements": measurements, "assertions": assertions}


def _write_compare_table(out: Path, report: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "compare.csv", "w") as fh:
        fh.write("nx,nv,level,t,l1_error\n")
        for r in report["measurements"]["table"]:
            fh.write(f"{r['nx']},{r['nv']},{r['level']!r},{r['t']!r},{format(r['l1_error'], '.17g')}\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kinvar", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, needs_cfg in (("simulate", True), ("compare", True),
                            ("shock-rarefaction", False), ("counterexample", False)):
        sp = sub.add_parser(name)
        sp.add_argument("config", nargs=None if needs_cfg else "?")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        file_values = dict(SUBCOMMAND_DEFAULTS[args.command])
        file_values.setdefault("output.dir", f"out/{args.command}")
        if args.config:
            path = Path(args.config)
            file_values.update(read_config_text(path.read_text(), str(path)))
        cfg = build_config(file_values, _parse_overrides(extra))
    except (ConfigurationError, OSError) as exc:
        print(f"kinvar: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(cfg["output.dir"])
    try:
        if args.command == "simulate":
            report = run_simulation(cfg)
        elif args.command == "shock-rarefaction":
            report = experiments.shock_rarefaction(cfg)
        elif args.command == "counterexample":
            report = experiments.counterexample(cfg)
        else:
            report = experiments.compare_with_reference(cfg)
            _write_compare_table(out, report)
    except (ConfigurationError, ResolutionError) as exc:
        print(f"kinvar: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (KinvarError, FloatingPointError, ValueError) as exc:
        print(f"kinvar: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    _write_report(out, report)
    _print_assertions(report)
    log.info("report written to %s", out / "report.json")
    return EXIT_OK if experiments.report_passed(report) else EXIT_ASSERT


if __name__ == "__main__":
    sys.exit(main())
