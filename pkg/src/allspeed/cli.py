"""Command-line runner: single runs, refinement studies and scenario listing.

Configuration is a flat ``key=value`` text file ('#' comments); any key can be
overridden on the command line with ``--override key=value``.  Every effective
setting is echoed into the output MANIFEST.
"""

import argparse
import dataclasses
import inspect
import os
import sys

import numpy as np

from . import io as aio
from .diagnostics import convergence_orders, l1_error
from .equilibrium import well_prepared_residuals
from .errors import (AllspeedError, ConfigurationError, DomainError,
                     PositivityError, SolverError, VacuumError)
from .integrator import Controls, run
from .scenarios import SCENARIOS
from .state import fill_conserved_ghosts

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

# keys consumed by the runner itself; everything else goes to the scenario builder
_PLAN_KEYS = {"scenario", "outdir", "formats", "t_final", "snapshots",
              "n_list", "cfl", "c_a", "tol", "order", "limiter", "seed"}
_VARIABLES = ("rho", "mom1", "mom2", "energy")


def parse_kv_file(path):
    """Flat key=value file; later keys win; '#' starts a comment."""
    entries = {}
    try:
        with open(path) as f:
            raw = f.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc}")
    for lineno, line in enumerate(raw.splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {text!r}")
        key, val = text.split("=", 1)
        entries[key.strip()] = val.strip()
    return entries


def _coerce(value):
    """Best-effort typing of a config value: bool, int, float, list or str."""
    low = value.lower()
    if low in ("true", "false"):
        return low == "true"
    if "," in value:
        return [_coerce(v) for v in value.split(",") if v.strip()]
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def build_plan(entries):
    """Validate config entries and split them into plan / builder settings."""
    cfg = {k: _coerce(v) for k, v in entries.items()}
    name = cfg.get("scenario")
    if name not in SCENARIOS:
        known = ", ".join(sorted(SCENARIOS))
        raise ConfigurationError(f"unknown scenario {name!r}; known: {known}")
    builder = SCENARIOS[name]
    accepted = set(inspect.signature(builder).parameters)
    builder_kwargs = {}
    for key, val in cfg.items():
        if key in _PLAN_KEYS:
            continue
        if key not in accepted:
            raise ConfigurationError(f"scenario {name!r} does not accept {key!r}")
        builder_kwargs[key] = val
    plan = {
        "scenario": name,
        "outdir": str(cfg.get("outdir", "out")),
        "formats": cfg.get("formats", ["csv", "vtk"]),
        "t_final": cfg.get("t_final"),
        "snapshots": cfg.get("snapshots", []),
        "n_list": cfg.get("n_list"),
        "cfl": cfg.get("cfl"),
        "c_a": cfg.get("c_a"),
        "tol": cfg.get("tol"),
        "order": cfg.get("order"),
        "limiter": cfg.get("limiter"),
    }
    for key in ("formats", "snapshots", "n_list"):
        if plan[key] is not None and not isinstance(plan[key], list):
            plan[key] = [plan[key]]
    return plan, builder_kwargs


def _make_setup(plan, builder_kwargs, n=None):
    kwargs = dict(builder_kwargs)
    if n is not None:
        kwargs["n"] = n
    setup = SCENARIOS[plan["scenario"]](**kwargs)
    ctl = setup.controls
    updates = {k: plan[k] for k in ("cfl", "c_a", "tol", "order", "limiter")
               if plan[k] is not None}
    if updates:
        ctl = dataclasses.replace(ctl, **updates)
    if plan["t_final"] is not None:
        setup.t_final = float(plan["t_final"])
    setup.controls = ctl
    return setup


def _manifest_entries(plan, setup, builder_kwargs):
    ctl = setup.controls
    entries = {
        "scenario": plan["scenario"],
        "outdir": plan["outdir"],
        "formats": ",".join(plan["formats"]),
        "t_final": setup.t_final,
        "snapshots": ",".join(aio.FMT % float(q) for q in plan["snapshots"]),
        "n": "x".join(str(k) for k in setup.grid.n),
        "mach": setup.scaling.mach,
        "froude": setup.scaling.froude,
        "gamma": setup.scaling.gamma,
        "order": ctl.order,
        "cfl": ctl.effective_cfl(setup.grid.dim),
        "c_a": ctl.c_a,
        "tol": ctl.tol,
        "limiter": ctl.limiter,
    }
    for key, val in builder_kwargs.items():
        entries[f"scenario.{key}"] = val
    return entries


def _snapshot_name(time):
    return "snapshot_t" + (aio.FMT % time).replace(".", "p").replace("-", "m")


def _execute_single(plan, setup, outdir):
    snap_times = [float(q) for q in plan["snapshots"]]
    result = run(setup.w0, setup.eq, setup.grid, setup.bcs, setup.scaling,
                 setup.t_final, setup.controls, snapshot_times=snap_times)
    fmts = plan["formats"]
    for time, w in result.snapshots:
        base = os.path.join(outdir, _snapshot_name(time))
        if "csv" in fmts:
            aio.write_csv(base + ".csv", w, setup.eq, setup.grid,
                          setup.scaling, time)
        if "vtk" in fmts:
            aio.write_vtk(base + ".vtk", w, setup.eq, setup.grid,
                          setup.scaling, time)
    aio.write_series(os.path.join(outdir, "kinetic_energy.csv"),
                     result.kinetic_energy, ["time", "kinetic_energy"])
    aio.write_series(
        os.path.join(outdir, "steps.csv"),
        [(h.t, h.dt, h.a, h.iterations, h.residual) for h in result.history],
        ["time", "dt", "a", "iterations", "residual"])
    return result


def cmd_run(plan, builder_kwargs):
    setup = _make_setup(plan, builder_kwargs)
    outdir = plan["outdir"]
    os.makedirs(outdir, exist_ok=True)
    entries = _manifest_entries(plan, setup, builder_kwargs)
    manifest = os.path.join(outdir, "MANIFEST")
    try:
        result = _execute_single(plan, setup, outdir)
    except (PositivityError, SolverError, DomainError, VacuumError) as exc:
        aio.write_manifest(manifest, entries, status="failed", message=str(exc))
        raise
    w = result.snapshots[-1][1]
    fill_conserved_ghosts(w, setup.grid, setup.bcs, setup.eq, setup.scaling,
                          t=result.t_final)
    report = well_prepared_residuals(w, setup.eq, setup.grid, setup.scaling)
    for key, val in report.as_dict().items():
        entries[f"diag.{key}"] = val
    if setup.exact is not None:
        err = l1_error(w, setup.reference(result.t_final), setup.grid)
        scale = (setup.error_scale if setup.error_scale is not None
                 else np.ones(len(err)))
        for var, e, fac in zip(_VARIABLES, err, scale):
            entries[f"error.{var}"] = float(e * fac)
    entries["steps"] = len(result.history)
    aio.write_manifest(manifest, entries, status="ok")
    print(f"completed {plan['scenario']} to t={aio.FMT % result.t_final} "
          f"in {len(result.history)} steps -> {outdir}")
    return EXIT_OK


def cmd_convergence(plan, builder_kwargs):
    ns = plan["n_list"] or [25, 50, 100, 200]
    ns = [int(v) for v in ns]
    if len(ns) < 2:
        raise ConfigurationError("a refinement study needs at least two grids")
    outdir = plan["outdir"]
    os.makedirs(outdir, exist_ok=True)
    errors = []
    setup = None
    for n in ns:
        setup = _make_setup(plan, builder_kwargs, n=n)
        if setup.exact is None:
            raise ConfigurationError(
                f"scenario {plan['scenario']!r} has no exact solution to converge to")
        subdir = os.path.join(outdir, f"n{n}")
        os.makedirs(subdir, exist_ok=True)
        result = _execute_single(plan, setup, subdir)
        w = result.snapshots[-1][1]
        err = l1_error(w, setup.reference(result.t_final), setup.grid)
        scale = (setup.error_scale if setup.error_scale is not None
                 else np.ones(len(err)))
        errors.append([float(e * f) for e, f in zip(err, scale)])
        print(f"n={n}: " + " ".join(
            f"{v}={aio.FMT % e}" for v, e in zip(_VARIABLES, errors[-1])))
    orders = convergence_orders(ns, np.asarray(errors))
    aio.write_convergence_table(os.path.join(outdir, "convergence.csv"),
                                ns, errors, orders, _VARIABLES)
    entries = _manifest_entries(plan, setup, builder_kwargs)
    entries["n_list"] = ",".join(str(n) for n in ns)
    aio.write_manifest(os.path.join(outdir, "MANIFEST"), entries, status="ok")
    print(f"wrote {os.path.join(outdir, 'convergence.csv')}")
    return EXIT_OK


def cmd_list_scenarios():
    for name in sorted(SCENARIOS):
        builder = SCENARIOS[name]
        params = inspect.signature(builder).parameters
        defaults = ", ".join(f"{k}={v.default}" for k, v in params.items())
        print(f"{name}: {defaults}")
    return EXIT_OK


def _apply_overrides(entries, overrides):
    for item in overrides or ():
        if "=" not in item:
            raise ConfigurationError(f"override must be key=value, got {item!r}")
        key, val = item.split("=", 1)
        entries[key.strip()] = val.strip()
    return entries


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="allspeed",
        description="Finite-volume solver for the Euler equations with gravity")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "convergence"):
        p = sub.add_parser(name)
        p.add_argument("config", help="key=value configuration file")
        p.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config entry")
    sub.add_parser("list-scenarios")
    args = parser.parse_args(argv)

    try:
        if args.command == "list-scenarios":
            return cmd_list_scenarios()
        entries = _apply_overrides(parse_kv_file(args.config), args.override)
        plan, builder_kwargs = build_plan(entries)
        if args.command == "run":
            return cmd_run(plan, builder_kwargs)
        return cmd_convergence(plan, builder_kwargs)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PositivityError, SolverError, DomainError, VacuumError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except AllspeedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
