"""One receding-horizon tick: linearize, transcribe, solve."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from pushrec.capture_point import IcpParams, icp_extraction_matrix
from pushrec.centroidal_model import LinearizationPoint, discretize, linearize
from pushrec.constraints import (
    HullConstraint,
    ImpactSchedule,
    convex_hull_inequalities,
    stance_constraint_set,
)
from pushrec.cost import References, assemble_cost
from pushrec.qp_solver import QpSolution, SolverConfig, WarmStart, solve
from pushrec.transcription import (
    STAGE_DIM,
    DecisionLayout,
    QpProblem,
    assemble_qp,
    build_dynamics_equality,
    build_inequalities,
)


@dataclass
class TickResult:
    qp: QpProblem
    solution: QpSolution
    solve_time: float
    icp_params: IcpParams


MIN_ICP_HEIGHT_FRACTION = 0.05  # floor on the measured height, relative to the initial one


class MpcController:
    """Builds and solves the horizon QP from the current feedback.

    Before a step is planned the CoM and capture point references sit on the
    stance foot; once stepping they move to the centroid of the two-foot hull.
    """

    def __init__(self, scenario, solver_config: SolverConfig | None = None, warm_start: bool = False):
        self.scenario = scenario
        self.layout = DecisionLayout(scenario.horizon_n)
        self.contact_set = stance_constraint_set(
            scenario.foot_geom, scenario.friction, scenario.min_normal_force, scenario.max_normal_force
        )
        geom, model = scenario.foot_geom, scenario.model
        self.stance_hull = convex_hull_inequalities(geom.corners(model.left_foot_pos))
        self.step_hull = convex_hull_inequalities(
            np.vstack([geom.corners(model.left_foot_pos), geom.corners(model.right_foot_pos)])
        )
        self.nominal_height = float(scenario.initial_state.com_pos[2])
        self.solver_config = solver_config or SolverConfig()
        self.warm_start = warm_start
        self._last_chi = None

    def hull(self, stepping: bool) -> HullConstraint:
        return self.step_hull if stepping else self.stance_hull

    def references(self, stepping: bool, f_prev) -> References:
        target = self.hull(stepping).centroid() if stepping else self.scenario.model.left_foot_pos[:2].copy()
        gamma_ref = np.zeros(9)
        gamma_ref[0:2] = target
        gamma_ref[2] = self.nominal_height
        return References.constant(gamma_ref, self.layout.horizon_n, target, f_prev)

    def icp_params(self, gamma0) -> IcpParams:
        h = self.scenario.icp.nominal_height
        # a fallen plant has no meaningful pendulum height; keep omega0 finite
        height = max(float(gamma0[2]), MIN_ICP_HEIGHT_FRACTION * self.nominal_height) if h is None else h
        return IcpParams.from_height(height, self.scenario.model.gravity_accel)

    def build_qp(self, gamma0, schedule: ImpactSchedule, stepping: bool, f_prev, f_lin) -> tuple[QpProblem, IcpParams]:
        sc = self.scenario
        gamma0 = np.asarray(gamma0, dtype=float)
        lp = LinearizationPoint.from_feedback(gamma0, f_lin)
        dm = discretize(linearize(sc.model, lp), sc.dt)
        icp = self.icp_params(gamma0)
        c_icp = icp_extraction_matrix(icp)
        dyn = build_dynamics_equality(dm, gamma0, self.layout)
        ineq = build_inequalities(
            self.contact_set, self.contact_set, schedule, self.hull(stepping), c_icp, self.layout
        )
        cost = assemble_cost(sc.weights, self.references(stepping, f_prev), schedule, c_icp, self.layout.horizon_n)
        return assemble_qp(cost, dyn, ineq), icp

    def _shifted_guess(self) -> WarmStart | None:
        if self._last_chi is None:
            return None
        stages = self._last_chi.reshape(self.layout.horizon_n, STAGE_DIM)
        shifted = np.vstack([stages[1:], stages[-1:]])
        return WarmStart(shifted.reshape(-1))

    def tick(self, gamma0, schedule, stepping, f_prev, f_lin) -> TickResult:
        qp, icp = self.build_qp(gamma0, schedule, stepping, f_prev, f_lin)
        guess = self._shifted_guess() if self.warm_start else None
        t0 = time.perf_counter()
        sol = solve(qp, self.solver_config, guess)
        elapsed = time.perf_counter() - t0
        if sol.optimal:
            self._last_chi = sol.x_star
        return TickResult(qp, sol, elapsed, icp)
