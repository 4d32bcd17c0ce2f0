"""Closed-loop simulation of the exact centroidal plant under the MPC."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from pushrec.capture_point import compute_icp
from pushrec.centroidal_model import ContactWrenches, State, exact_dynamics, static_wrenches
from pushrec.constraints import ImpactSchedule, update_impact_index
from pushrec.harness.controller import MpcController
from pushrec.harness.scenario import Scenario
from pushrec.transcription import extract_first_input

log = logging.getLogger(__name__)

NO_STEP = -1  # logged k_impact while no step is planned


@dataclass(frozen=True)
class LogRecord:
    time: float
    state: State
    commanded: ContactWrenches
    icp: np.ndarray
    k_impact: int
    solver_status: str
    solve_time: float
    qp_objective: float


def rk4_step(params, gamma, f, push_force, dt) -> np.ndarray:
    def rate(x):
        r = exact_dynamics(params, x, f)
        r[3:6] += push_force / params.mass
        return r

    k1 = rate(gamma)
    k2 = rate(gamma + 0.5 * dt * k1)
    k3 = rate(gamma + 0.5 * dt * k2)
    k4 = rate(gamma + dt * k3)
    return gamma + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def run_closed_loop(s: Scenario, controller: MpcController | None = None, progress=None) -> list[LogRecord]:
    """Simulate ``s.total_time`` seconds; one record per control tick.

    The push is active on ticks ``[start, start + duration)``. The step is
    planned when the push begins and the impact fires ``t_impact_nominal``
    later. Before the impact the right-foot wrench is dropped by the plant.
    Infeasible ticks hold the last feasible command.
    """
    ctrl = controller or MpcController(s)
    params = s.model
    k_push = s.ticks(s.push.start_time)
    k_push_end = k_push + s.ticks(s.push.duration)
    k_touch = k_push + s.ticks(s.step_plan.t_impact_nominal)
    n = s.horizon_n

    gamma = s.initial_state.as_vector()
    f_applied = static_wrenches(params)
    f_hold = f_applied.copy()
    schedule = None
    records = []
    for k in range(s.num_ticks):
        t = round(k * s.dt, 12)
        stepping = k >= k_push
        impacted = k >= k_touch
        if not stepping:
            qp_schedule = ImpactSchedule.no_step(n)
        elif schedule is None:
            schedule = ImpactSchedule(0 if impacted else k_touch - k, n)
            qp_schedule = schedule
        else:
            schedule = update_impact_index(schedule, impacted)
            qp_schedule = schedule

        res = ctrl.tick(gamma, qp_schedule, stepping, f_prev=f_applied, f_lin=f_applied)
        sol = res.solution
        if sol.optimal:
            f_cmd = extract_first_input(sol.x_star, ctrl.layout).as_vector()
            f_hold = f_cmd
        else:
            log.info("t=%.2f: QP %s, holding last feasible input", t, sol.status.value)
            f_cmd = f_hold.copy()
        f_plant = f_cmd.copy()
        if not impacted:
            f_plant[6:] = 0.0

        records.append(LogRecord(
            time=t,
            state=State.from_vector(gamma),
            commanded=ContactWrenches.from_vector(f_cmd),
            icp=compute_icp(gamma, res.icp_params),
            k_impact=schedule.k_impact if stepping else NO_STEP,
            solver_status=sol.status.value,
            solve_time=res.solve_time,
            qp_objective=sol.objective,
        ))
        push = s.push.force if k_push <= k < k_push_end else np.zeros(3)
        gamma = rk4_step(params, gamma, f_plant, push, s.dt)
        f_applied = f_plant
        if progress is not None:
            progress(k, records[-1])
    return records
