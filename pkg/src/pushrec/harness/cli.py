"""Command line entry point: ``pushrec run --scenario file.yaml --out log.csv``."""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from pushrec.errors import ConfigurationError, InvalidArgument
from pushrec.harness.controller import MpcController
from pushrec.harness.io import emit_plot_script, export_csv
from pushrec.harness.scenario import default_scenario_text, load_scenario
from pushrec.harness.simulation import run_closed_loop

log = logging.getLogger("pushrec")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pushrec", description="MPC push recovery on a centroidal humanoid model.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario and write a CSV log")
    run.add_argument("--scenario", required=True, help="scenario YAML file")
    run.add_argument("--out", required=True, help="output CSV path")
    run.add_argument("--plot", help="also write a matplotlib script plotting the CSV")
    run.add_argument("--horizon", type=int, help="override horizon_n")
    run.add_argument("--dt", type=float, help="override dt [s]")
    run.add_argument("--push-mag", type=float, help="override the push magnitude [N], keeping its direction")
    run.add_argument("--timing", action="store_true", help="add the per-tick solve_time column")
    run.add_argument("--warm-start", action="store_true", help="warm start each QP from the shifted previous plan")
    run.add_argument("--quiet", action="store_true", help="only report errors")

    sub.add_parser("scenario", help="print the default scenario file")
    return p


def _run(args) -> int:
    sc = load_scenario(args.scenario).with_overrides(horizon_n=args.horizon, dt=args.dt, push_mag=args.push_mag)
    ctrl = MpcController(sc, warm_start=args.warm_start)
    step = max(1, sc.num_ticks // 10)

    def progress(k, rec):
        if (k + 1) % step == 0:
            log.info("t=%.2f s  com=%s  %s", rec.time, np.round(rec.state.com_pos, 3), rec.solver_status)

    records = run_closed_loop(sc, ctrl, progress=progress)
    export_csv(records, args.out, include_timing=args.timing)
    if args.plot:
        emit_plot_script(records, args.plot, args.out, hull=ctrl.step_hull)
    bad = sum(r.solver_status != "optimal" for r in records)
    times = np.array([r.solve_time for r in records])
    log.info(
        "%d ticks, %d not optimal, solve time median %.4f s p95 %.4f s",
        len(records), bad, np.median(times), np.percentile(times, 95),
    )
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    level = logging.WARNING if getattr(args, "quiet", False) else logging.INFO
    logging.basicConfig(level=level, format="%(message)s")
    if args.command == "scenario":
        sys.stdout.write(default_scenario_text())
        return 0
    try:
        return _run(args)
    except (ConfigurationError, InvalidArgument) as exc:
        log.error("configuration error: %s", exc)
        return 2
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
