"""Snapshot, table and manifest writers.

All numeric output uses 17 significant digits so values round-trip exactly;
row/column orderings are fixed, making re-runs byte-identical.
"""

import numpy as np

from .state import local_mach, pressure, split

FMT = "%.17g"


def _fields(w, eq, grid, s):
    """Per-cell output columns (interior only) in a fixed order."""
    itr = grid.interior
    rho, mom, _ = split(w)
    p = pressure(w, s, check=False)
    u = mom / rho
    cols = [("rho", rho[itr])]
    for k in range(grid.dim):
        cols.append((f"u{k + 1}", u[k][itr]))
    cols.append(("p", p[itr]))
    cols.append(("mach", local_mach(w, s)[itr]))
    cols.append(("drho", (rho - eq.alpha)[itr]))
    cols.append(("dp", (p - eq.beta)[itr]))
    return cols


def _header_lines(grid, s, time):
    lines = [f"mach={FMT % s.mach}", f"froude={FMT % s.froude}",
             f"gamma={FMT % s.gamma}",
             "n=" + "x".join(str(k) for k in grid.n),
             "lo=" + ",".join(FMT % v for v in grid.lo),
             "hi=" + ",".join(FMT % v for v in grid.hi),
             f"time={FMT % time}"]
    return lines


def write_csv(path, w, eq, grid, s, time):
    """One row per interior cell, x varying fastest, 17-digit columns."""
    cols = _fields(w, eq, grid, s)
    coords = [c[grid.interior] for c in grid.meshgrid(ghosts=True)]
    names = [f"x{k + 1}" if grid.dim > 2 else ("x", "y")[k] for k in range(grid.dim)]
    with open(path, "w", newline="\n") as f:
        for line in _header_lines(grid, s, time):
            f.write("# " + line + "\n")
        f.write(",".join(names + [name for name, _ in cols]) + "\n")
        # transpose so the first (x) index varies fastest
        data = [np.asarray(a).T.ravel() for a in coords]
        data += [np.asarray(a).T.ravel() for _, a in cols]
        for row in zip(*data):
            f.write(",".join(FMT % v for v in row) + "\n")


def write_vtk(path, w, eq, grid, s, time):
    """Legacy-text VTK structured-points file with the CSV fields as point data."""
    cols = _fields(w, eq, grid, s)
    nx = list(grid.n) + [1] * (3 - grid.dim)
    dx = list(grid.dx) + [1.0] * (3 - grid.dim)
    origin = [lo + 0.5 * h for lo, h in zip(grid.lo, grid.dx)] + [0.0] * (3 - grid.dim)
    npts = int(np.prod(grid.n))
    with open(path, "w", newline="\n") as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write("; ".join(_header_lines(grid, s, time)) + "\n")
        f.write("ASCII\nDATASET STRUCTURED_POINTS\n")
        f.write("DIMENSIONS %d %d %d\n" % tuple(nx))
        f.write("ORIGIN " + " ".join(FMT % v for v in origin) + "\n")
        f.write("SPACING " + " ".join(FMT % v for v in dx) + "\n")
        f.write(f"POINT_DATA {npts}\n")
        for name, a in cols:
            f.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            for v in np.asarray(a).T.ravel():
                f.write(FMT % v + "\n")


def write_series(path, rows, columns):
    """Simple CSV time series (e.g. kinetic energy or residual history)."""
    with open(path, "w", newline="\n") as f:
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(FMT % v for v in row) + "\n")


def write_convergence_table(path, ns, errors, orders, variables):
    """Error/order table: one row per grid, per-variable error and order columns.

    ``errors`` has shape (len(ns), len(variables)); ``orders`` one fewer row
    (the first row's order columns are left empty).
    """
    with open(path, "w", newline="\n") as f:
        head = ["n"]
        for v in variables:
            head += [f"err_{v}", f"order_{v}"]
        f.write(",".join(head) + "\n")
        for i, n in enumerate(ns):
            row = [str(int(n))]
            for j in range(len(variables)):
                row.append(FMT % errors[i][j])
                row.append("" if i == 0 else FMT % orders[i - 1][j])
            f.write(",".join(row) + "\n")


def write_manifest(path, entries, status="ok", message=""):
    """Reproducibility manifest: every effective setting plus a status line."""
    with open(path, "w", newline="\n") as f:
        f.write(f"status={status}\n")
        if message:
            f.write(f"message={message}\n")
        for key in sorted(entries):
            val = entries[key]
            if isinstance(val, float):
                val = FMT % val
            f.write(f"{key}={val}\n")
