"""Centroidal momentum dynamics of a biped with two foot contacts.

State ordering is ``(com_pos, com_vel, ang_mom)``; a foot wrench is
``(force, torque)`` and the stacked input is ``(left, right)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pushrec.errors import InvalidArgument

GRAVITY = 9.81

STATE_DIM = 9
INPUT_DIM = 12

POS = slice(0, 3)
VEL = slice(3, 6)
ANG = slice(6, 9)


def _vec(v, n: int, name: str) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.shape != (n,):
        raise InvalidArgument(f"{name} must have {n} entries, got shape {np.shape(v)}")
    if not np.all(np.isfinite(a)):
        raise InvalidArgument(f"{name} has non-finite entries")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ModelParams:
    mass: float
    left_foot_pos: np.ndarray
    right_foot_pos: np.ndarray
    gravity_accel: float = GRAVITY

    def __post_init__(self):
        if not self.mass > 0:
            raise InvalidArgument("mass must be positive")
        if not self.gravity_accel > 0:
            raise InvalidArgument("gravity_accel must be positive")
        for name in ("left_foot_pos", "right_foot_pos"):
            p = _vec(getattr(self, name), 3, name)
            if p[2] != 0.0:
                raise InvalidArgument(f"{name} must lie on the ground (z == 0)")
            object.__setattr__(self, name, p)

    @property
    def weight(self) -> float:
        return self.mass * self.gravity_accel


@dataclass(frozen=True)
class State:
    com_pos: np.ndarray
    com_vel: np.ndarray
    ang_mom: np.ndarray

    def __post_init__(self):
        for name in ("com_pos", "com_vel", "ang_mom"):
            object.__setattr__(self, name, _vec(getattr(self, name), 3, name))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.com_pos, self.com_vel, self.ang_mom])

    @classmethod
    def from_vector(cls, gamma) -> "State":
        g = _vec(gamma, STATE_DIM, "gamma")
        return cls(g[POS], g[VEL], g[ANG])


@dataclass(frozen=True)
class Wrench:
    force: np.ndarray
    torque: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "force", _vec(self.force, 3, "force"))
        object.__setattr__(self, "torque", _vec(self.torque, 3, "torque"))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.force, self.torque])

    @classmethod
    def from_vector(cls, w) -> "Wrench":
        w = _vec(w, 6, "wrench")
        return cls(w[:3], w[3:])

    @classmethod
    def zero(cls) -> "Wrench":
        return cls(np.zeros(3), np.zeros(3))


@dataclass(frozen=True)
class ContactWrenches:
    left: Wrench
    right: Wrench

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.left.as_vector(), self.right.as_vector()])

    @classmethod
    def from_vector(cls, f) -> "ContactWrenches":
        f = _vec(f, INPUT_DIM, "wrenches")
        return cls(Wrench.from_vector(f[:6]), Wrench.from_vector(f[6:]))


@dataclass(frozen=True)
class LinearizationPoint:
    """Expansion point of the angular momentum rate: CoM position and foot forces."""

    com_pos0: np.ndarray
    left_force0: np.ndarray
    right_force0: np.ndarray

    def __post_init__(self):
        for name in ("com_pos0", "left_force0", "right_force0"):
            object.__setattr__(self, name, _vec(getattr(self, name), 3, name))

    @classmethod
    def from_feedback(cls, gamma, f) -> "LinearizationPoint":
        gamma = np.asarray(gamma, dtype=float)
        f = np.asarray(f, dtype=float)
        return cls(gamma[POS], f[0:3], f[6:9])


@dataclass(frozen=True)
class ContinuousModel:
    ev_tilde: np.ndarray
    f_tilde: np.ndarray
    g_tilde: np.ndarray
    s0_tilde: np.ndarray


@dataclass(frozen=True)
class DiscreteModel:
    ev: np.ndarray
    f_mat: np.ndarray
    g_vec: np.ndarray
    s0_vec: np.ndarray
    dt: float


def _as_gamma(state) -> np.ndarray:
    if isinstance(state, State):
        return state.as_vector()
    return np.asarray(state, dtype=float).reshape(STATE_DIM)


def _as_input(wrenches) -> np.ndarray:
    if isinstance(wrenches, ContactWrenches):
        return wrenches.as_vector()
    return np.asarray(wrenches, dtype=float).reshape(INPUT_DIM)


def skew(v) -> np.ndarray:
    """Matrix ``S`` with ``S @ y == np.cross(v, y)``."""
    x, y, z = np.asarray(v, dtype=float).reshape(3)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def adjoint_transform(contact_pos, com_pos) -> np.ndarray:
    """Map a contact wrench to the CoM frame (inertial orientation)."""
    X = np.eye(6)
    X[3:, :3] = skew(np.asarray(contact_pos, dtype=float) - np.asarray(com_pos, dtype=float))
    return X


def exact_dynamics(params: ModelParams, state, wrenches) -> np.ndarray:
    """Nonlinear centroidal rates ``d/dt (com_pos, com_vel, ang_mom)``."""
    gamma = _as_gamma(state)
    f = _as_input(wrenches)
    x = gamma[POS]
    rate = np.empty(STATE_DIM)
    rate[POS] = gamma[VEL]
    rate[VEL] = (f[0:3] + f[6:9]) / params.mass
    rate[5] -= params.gravity_accel
    rate[ANG] = (
        np.cross(params.left_foot_pos - x, f[0:3]) + f[3:6]
        + np.cross(params.right_foot_pos - x, f[6:9]) + f[9:12]
    )
    return rate


def linearize(params: ModelParams, lp: LinearizationPoint) -> ContinuousModel:
    """First-order expansion of the bilinear angular momentum term around ``lp``.

    The CoM acceleration rows are already affine and are carried over unchanged.
    """
    total_force0 = lp.left_force0 + lp.right_force0
    fhat = skew(total_force0)

    ev = np.zeros((STATE_DIM, STATE_DIM))
    ev[POS, VEL] = np.eye(3)
    ev[ANG, POS] = fhat

    fm = np.zeros((STATE_DIM, INPUT_DIM))
    fm[VEL, 0:3] = np.eye(3) / params.mass
    fm[VEL, 6:9] = np.eye(3) / params.mass
    fm[ANG, 0:3] = skew(params.left_foot_pos - lp.com_pos0)
    fm[ANG, 3:6] = np.eye(3)
    fm[ANG, 6:9] = skew(params.right_foot_pos - lp.com_pos0)
    fm[ANG, 9:12] = np.eye(3)

    g = np.zeros(STATE_DIM)
    g[5] = -params.gravity_accel

    s0 = np.zeros(STATE_DIM)
    s0[ANG] = -fhat @ lp.com_pos0
    return ContinuousModel(ev, fm, g, s0)


def discretize(cm: ContinuousModel, dt: float, *, allow_zero: bool = False) -> DiscreteModel:
    """Forward-Euler discretization with step ``dt``.

    ``allow_zero`` admits ``dt == 0`` (identity map), which is only meaningful in tests.
    """
    dt = float(dt)
    if not np.isfinite(dt) or dt < 0 or (dt == 0 and not allow_zero):
        raise InvalidArgument(f"dt must be positive, got {dt}")
    return DiscreteModel(
        ev=np.eye(STATE_DIM) + dt * cm.ev_tilde,
        f_mat=dt * cm.f_tilde,
        g_vec=dt * cm.g_tilde,
        s0_vec=dt * cm.s0_tilde,
        dt=dt,
    )


def step(dm: DiscreteModel, gamma, f) -> np.ndarray:
    return dm.ev @ _as_gamma(gamma) + dm.f_mat @ _as_input(f) + dm.g_vec + dm.s0_vec


def static_wrenches(params: ModelParams, both_feet: bool = False) -> np.ndarray:
    """Gravity-compensating input split over the feet in contact (left only by default)."""
    f = np.zeros(INPUT_DIM)
    if both_feet:
        f[2] = f[8] = 0.5 * params.weight
    else:
        f[2] = params.weight
    return f
