"""CSV log export and a matplotlib script that plots it."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from pushrec.harness.simulation import NO_STEP, LogRecord

_AXES = ("x", "y", "z")


def csv_columns(include_timing: bool = False) -> list[str]:
    cols = ["time"]
    cols += [f"com_pos_{a}" for a in _AXES]
    cols += [f"com_vel_{a}" for a in _AXES]
    cols += [f"ang_mom_{a}" for a in _AXES]
    for foot in ("left", "right"):
        cols += [f"{foot}_force_{a}" for a in _AXES]
        cols += [f"{foot}_torque_{a}" for a in _AXES]
    cols += ["icp_x", "icp_y", "k_impact", "solver_status"]
    if include_timing:
        cols.append("solve_time")
    cols.append("qp_objective")
    return cols


def _row(r: LogRecord, include_timing: bool) -> list[str]:
    nums = np.concatenate([[r.time], r.state.as_vector(), r.commanded.as_vector(), r.icp])
    row = [repr(float(v)) for v in nums]
    row += [str(int(r.k_impact)), r.solver_status]
    if include_timing:
        row.append(repr(float(r.solve_time)))
    row.append(repr(float(r.qp_objective)))
    return row


def export_csv(records: list[LogRecord], path, include_timing: bool = False) -> Path:
    """Write one row per record.

    Wall-clock solve times make the file differ between runs, so they are
    only written when ``include_timing`` is set.
    """
    if not records:
        raise ValueError("no records to export")
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(csv_columns(include_timing))
        for r in records:
            w.writerow(_row(r, include_timing))
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    """Columns of an exported log; numeric columns as float or int arrays."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return {}
    out = {}
    for key in rows[0]:
        vals = [row[key] for row in rows]
        if key == "solver_status":
            out[key] = np.array(vals)
        elif key == "k_impact":
            out[key] = np.array([int(v) for v in vals])
        else:
            out[key] = np.array([float(v) for v in vals])
    return out


def event_times(records: list[LogRecord]) -> tuple[float | None, float | None]:
    """Time the step was planned (push start) and the impact time, from the log."""
    push_t = next((r.time for r in records if r.k_impact != NO_STEP), None)
    impact_t = next((r.time for r in records if r.k_impact == 0), None)
    return push_t, impact_t


_TEMPLATE = '''\
import csv

import matplotlib.pyplot as plt

CSV_PATH = {csv_path!r}
PUSH_TIME = {push_t!r}
IMPACT_TIME = {impact_t!r}
HULL_Y = {hull_y!r}

with open(CSV_PATH, newline="") as fh:
    rows = list(csv.DictReader(fh))
col = {{k: [float(r[k]) for r in rows] for k in rows[0] if k != "solver_status"}}
t = col["time"]


def markers(ax):
    for when, label in ((PUSH_TIME, "push"), (IMPACT_TIME, "impact")):
        if when is not None:
            ax.axvline(when, color="k", linestyle="--", linewidth=0.8)
            ax.annotate(label, (when, 1.0), xycoords=("data", "axes fraction"), va="bottom")


fig, axes = plt.subplots(3, 1, sharex=True, figsize=(8, 9))

# CoM position
ax = axes[0]
for a in "xyz":
    ax.plot(t, col["com_pos_" + a], label="CoM " + a)
markers(ax)
ax.set_ylabel("CoM position [m]")
ax.legend()

# ICP y and support hull bounds
ax = axes[1]
ax.plot(t, col["icp_y"], label="ICP y")
if HULL_Y is not None:
    for y in HULL_Y:
        ax.axhline(y, color="r", linestyle=":", linewidth=0.8)
markers(ax)
ax.set_ylabel("ICP y [m]")
ax.legend()

# commanded vertical forces
ax = axes[2]
ax.plot(t, col["left_force_z"], label="left f_z")
ax.plot(t, col["right_force_z"], label="right f_z")
markers(ax)
ax.set_ylabel("normal force [N]")
ax.set_xlabel("time [s]")
ax.legend()

fig.tight_layout()
plt.show()
'''


def emit_plot_script(records: list[LogRecord], path, csv_path, hull=None) -> Path:
    """Write a standalone plotting script for the CSV at ``csv_path``.

    ``hull`` (a HullConstraint) adds its lateral bounds to the ICP plot.
    """
    if not records:
        raise ValueError("no records to plot")
    push_t, impact_t = event_times(records)
    hull_y = None
    if hull is not None:
        lo, hi = hull.bounds()
        hull_y = (float(lo[1]), float(hi[1]))
    path = Path(path)
    path.write_text(
        _TEMPLATE.format(csv_path=str(csv_path), push_t=push_t, impact_t=impact_t, hull_y=hull_y), encoding="utf-8"
    )
    return path
