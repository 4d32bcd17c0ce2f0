"""Impact-gated quadratic cost over the horizon."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from pushrec.centroidal_model import INPUT_DIM, STATE_DIM
from pushrec.constraints import ImpactSchedule
from pushrec.errors import InvalidArgument
from pushrec.transcription import DecisionLayout

PSD_TOL = 1e-9


def _psd(name: str, mat, n: int) -> np.ndarray:
    m = np.asarray(mat, dtype=float)
    if m.ndim == 1:
        m = np.diag(m)
    if m.shape != (n, n):
        raise InvalidArgument(f"{name} must be {n}x{n}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidArgument(f"{name} has non-finite entries")
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(m).max())):
        raise InvalidArgument(f"{name} must be symmetric")
    m = 0.5 * (m + m.T)
    if np.linalg.eigvalsh(m).min() < -PSD_TOL:
        raise InvalidArgument(f"{name} must be positive semi-definite")
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class Weights:
    """Gain matrices; 1-D inputs are taken as diagonals.

    ``k_gamma`` may only weight the vertical CoM position: transverse CoM
    tracking is left to ``k_gamma_imp`` (after impact and at the terminal state).
    """

    k_gamma: np.ndarray
    k_gamma_imp: np.ndarray
    k_f: np.ndarray
    k_icp: np.ndarray
    k_df: np.ndarray

    def __post_init__(self):
        dims = {"k_gamma": STATE_DIM, "k_gamma_imp": STATE_DIM, "k_f": INPUT_DIM, "k_icp": 2, "k_df": INPUT_DIM}
        for name, n in dims.items():
            object.__setattr__(self, name, _psd(name, getattr(self, name), n))
        if np.any(self.k_gamma[0:2, :] != 0) or np.any(self.k_gamma[:, 0:2] != 0):
            raise InvalidArgument("k_gamma must not weight the transverse CoM position")

    @classmethod
    def default(cls) -> "Weights":
        return cls(
            k_gamma=[0, 0, 50, 1, 1, 1, 0.1, 0.1, 0.1],
            k_gamma_imp=[100, 100, 0, 10, 10, 10, 0, 0, 0],
            k_f=np.full(INPUT_DIM, 1e-3),
            k_icp=[10, 10],
            k_df=np.full(INPUT_DIM, 1e-2),
        )


@dataclass(frozen=True)
class References:
    gamma_des: np.ndarray  # (N, 9), rows are gamma^d(1..N)
    icp_des: np.ndarray
    f_prev: np.ndarray

    def __post_init__(self):
        gd = np.atleast_2d(np.asarray(self.gamma_des, dtype=float))
        if gd.shape[1] != STATE_DIM:
            raise InvalidArgument("gamma_des rows must have 9 entries")
        icp = np.asarray(self.icp_des, dtype=float).reshape(2)
        fp = np.asarray(self.f_prev, dtype=float).reshape(INPUT_DIM)
        if not all(np.all(np.isfinite(a)) for a in (gd, icp, fp)):
            raise InvalidArgument("references must be finite")
        if np.any(gd[:, 2] <= 0):
            raise InvalidArgument("reference CoM height must be positive")
        object.__setattr__(self, "gamma_des", gd)
        object.__setattr__(self, "icp_des", icp)
        object.__setattr__(self, "f_prev", fp)

    @classmethod
    def constant(cls, gamma_ref, horizon_n: int, icp_des, f_prev) -> "References":
        return cls(np.tile(np.asarray(gamma_ref, dtype=float), (horizon_n, 1)), icp_des, f_prev)


def impact_gate_indices(schedule: ImpactSchedule) -> tuple[int, int]:
    """First state index of the post-impact state cost and of the capture point cost.

    The state gate is clipped to N so at least the terminal term survives; the
    capture point gate is clipped to N + 1, i.e. it vanishes without a step.
    """
    n = schedule.horizon_n
    k = max(schedule.k_impact, 1)
    return min(n, k), min(n + 1, k)


class _Accumulator:
    def __init__(self, size: int):
        self.rows, self.cols, self.vals = [], [], []
        self.g = np.zeros(size)
        self.c0 = 0.0
        self.size = size

    def add(self, r0: int, c0: int, block: np.ndarray):
        r, c = np.nonzero(block)
        if r.size:
            self.rows.append(r + r0)
            self.cols.append(c + c0)
            self.vals.append(block[r, c])

    def tracking(self, off: int, weight: np.ndarray, sel: np.ndarray, ref: np.ndarray):
        # 1/2 |sel x - ref|_W^2 on the block starting at off
        wsel = weight @ sel
        self.add(off, off, sel.T @ wsel)
        self.g[off:off + sel.shape[1]] -= wsel.T @ ref
        self.c0 += 0.5 * ref @ weight @ ref

    def hessian(self) -> sp.csc_matrix:
        if not self.rows:
            return sp.csc_matrix((self.size, self.size))
        r = np.concatenate(self.rows)
        c = np.concatenate(self.cols)
        v = np.concatenate(self.vals)
        return sp.csc_matrix((v, (r, c)), shape=(self.size, self.size))


def assemble_cost(w: Weights, r: References, schedule: ImpactSchedule, icp_map, n: int):
    """Hessian, gradient and constant of the horizon cost.

    ``1/2 chi'H chi + chi'g + c0`` equals the sum of the state tracking,
    post-impact state tracking, force effort, capture point and force rate
    terms for every ``chi``.
    """
    layout = DecisionLayout(n)
    if schedule.horizon_n != n:
        raise InvalidArgument("schedule horizon differs from n")
    gd = r.gamma_des
    if gd.shape[0] == 1:
        gd = np.repeat(gd, n, axis=0)
    if gd.shape[0] != n:
        raise InvalidArgument(f"gamma_des must have {n} rows")
    c_icp = np.asarray(icp_map, dtype=float).reshape(2, STATE_DIM)
    k_imp, k_icp = impact_gate_indices(schedule)
    eye_x = np.eye(STATE_DIM)
    eye_f = np.eye(INPUT_DIM)

    acc = _Accumulator(layout.size)
    for k in range(1, n + 1):
        off = layout.state_offset(k)
        acc.tracking(off, w.k_gamma, eye_x, gd[k - 1])
        if k >= k_imp:
            acc.tracking(off, w.k_gamma_imp, eye_x, gd[k - 1])
        if k >= k_icp:
            acc.tracking(off, w.k_icp, c_icp, r.icp_des)
    for k in range(n):
        off = layout.input_offset(k)
        acc.add(off, off, w.k_f)
        if k == 0:
            acc.tracking(off, w.k_df, eye_f, r.f_prev)
        else:
            prev = layout.input_offset(k - 1)
            acc.add(off, off, w.k_df)
            acc.add(prev, prev, w.k_df)
            acc.add(off, prev, -w.k_df)
            acc.add(prev, off, -w.k_df)
    return acc.hessian(), acc.g, acc.c0
