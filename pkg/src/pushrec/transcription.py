"""Direct transcription of the horizon into a sparse quadratic program.

The decision vector interleaves states and inputs stage by stage::

    chi = [gamma(1); f(0); gamma(2); f(1); ...; gamma(N); f(N-1)]
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from pushrec.centroidal_model import INPUT_DIM, STATE_DIM, ContactWrenches, DiscreteModel
from pushrec.constraints import (
    HullConstraint,
    ImpactSchedule,
    SwingKind,
    WrenchConstraintSet,
    swing_constraint_kind,
)
from pushrec.errors import InvalidArgument

STAGE_DIM = STATE_DIM + INPUT_DIM


@dataclass(frozen=True)
class DecisionLayout:
    horizon_n: int

    def __post_init__(self):
        if int(self.horizon_n) != self.horizon_n or self.horizon_n < 1:
            raise InvalidArgument("horizon_n must be a positive integer")

    @property
    def size(self) -> int:
        return STAGE_DIM * self.horizon_n

    def state_offset(self, k: int) -> int:
        """Offset of gamma(k), k = 1..N."""
        if not 1 <= k <= self.horizon_n:
            raise InvalidArgument(f"state index {k} outside 1..{self.horizon_n}")
        return STAGE_DIM * (k - 1)

    def input_offset(self, k: int) -> int:
        """Offset of f(k), k = 0..N-1."""
        if not 0 <= k <= self.horizon_n - 1:
            raise InvalidArgument(f"input index {k} outside 0..{self.horizon_n - 1}")
        return STAGE_DIM * k + STATE_DIM

    def pack(self, states, inputs) -> np.ndarray:
        """Interleave states gamma(1..N) and inputs f(0..N-1) into chi."""
        x = np.asarray(states, dtype=float).reshape(self.horizon_n, STATE_DIM)
        u = np.asarray(inputs, dtype=float).reshape(self.horizon_n, INPUT_DIM)
        return np.hstack([x, u]).reshape(-1)

    def unpack(self, chi) -> tuple[np.ndarray, np.ndarray]:
        chi = np.asarray(chi, dtype=float)
        if chi.shape != (self.size,):
            raise InvalidArgument(f"chi must have length {self.size}, got {chi.shape}")
        stages = chi.reshape(self.horizon_n, STAGE_DIM)
        return stages[:, :STATE_DIM].copy(), stages[:, STATE_DIM:].copy()


def _selector(layout: DecisionLayout, offset: int, width: int) -> sp.csr_matrix:
    n = layout.horizon_n
    rows = np.arange(n * width)
    cols = (np.arange(n)[:, None] * STAGE_DIM + offset + np.arange(width)[None, :]).reshape(-1)
    return sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n * width, layout.size))


def selection_state(layout: DecisionLayout) -> sp.csr_matrix:
    return _selector(layout, 0, STATE_DIM)


def selection_input(layout: DecisionLayout) -> sp.csr_matrix:
    return _selector(layout, STATE_DIM, INPUT_DIM)


def build_dynamics_equality(dm: DiscreteModel, gamma0, layout: DecisionLayout):
    """Stack ``gamma(k+1) = Ev gamma(k) + F f(k) + G + S0`` as ``A chi = b``.

    gamma(1) sees the feedback gamma(0) only through the right-hand side.
    """
    n = layout.horizon_n
    gamma0 = np.asarray(gamma0, dtype=float).reshape(STATE_DIM)
    blocks = [[None] * (2 * n) for _ in range(n)]
    minus_eye = -sp.identity(STATE_DIM, format="csr")
    f_blk = sp.csr_matrix(dm.f_mat)
    ev_blk = sp.csr_matrix(dm.ev)
    for k in range(n):
        blocks[k][2 * k] = minus_eye
        blocks[k][2 * k + 1] = f_blk
        if k >= 1:
            blocks[k][2 * (k - 1)] = ev_blk
    a = sp.bmat(blocks, format="csr")
    b = np.tile(-(dm.g_vec + dm.s0_vec), n)
    b[:STATE_DIM] -= dm.ev @ gamma0
    return a, b


def _stack_rows(rows_list, ncols: int):
    if not rows_list:
        return sp.csr_matrix((0, ncols)), np.zeros(0)
    a = sp.vstack([r[0] for r in rows_list], format="csr")
    b = np.concatenate([r[1] for r in rows_list])
    return a, b


def _place(block: np.ndarray, offset: int, ncols: int) -> sp.csr_matrix:
    r, c = np.nonzero(block)
    return sp.csr_matrix((block[r, c], (r, c + offset)), shape=(block.shape[0], ncols))


def build_inequalities(
    stance: WrenchConstraintSet,
    swing: WrenchConstraintSet,
    schedule: ImpactSchedule,
    hull: HullConstraint,
    icp_map: np.ndarray,
    layout: DecisionLayout,
):
    """Stage-wise contact and capturability constraints.

    Returns ``(A_leq, b_leq, A_eq_swing, b_eq_swing)``. Before the impact the
    swing wrench is pinned to zero by equalities; from the impact on it obeys
    the same polytope as the stance foot, and the capture point of every state
    from gamma(k_impact) onward must lie in the post-step hull.
    """
    if schedule.horizon_n != layout.horizon_n:
        raise InvalidArgument("schedule and layout horizons differ")
    n, ncols = layout.horizon_n, layout.size
    leq, eq = [], []
    for k in range(n):
        off = layout.input_offset(k)
        leq.append((_place(stance.a_mat, off, ncols), stance.b_vec))
        if swing_constraint_kind(schedule, k) is SwingKind.ZERO_WRENCH:
            eq.append((_place(np.eye(6), off + 6, ncols), np.zeros(6)))
        else:
            leq.append((_place(swing.a_mat, off + 6, ncols), swing.b_vec))
    hull_rows = np.asarray(hull.a_mat) @ np.asarray(icp_map)
    for k in range(max(schedule.k_impact, 1), n + 1):
        leq.append((_place(hull_rows, layout.state_offset(k), ncols), hull.b_vec))
    a_leq, b_leq = _stack_rows(leq, ncols)
    a_eq, b_eq = _stack_rows(eq, ncols)
    return a_leq, b_leq, a_eq, b_eq


@dataclass(frozen=True)
class QpProblem:
    """``min 1/2 x'Hx + g'x + c0  s.t.  A_eq x = b_eq,  A_leq x <= b_leq``."""

    hessian: sp.csc_matrix
    gradient: np.ndarray
    a_eq: sp.csr_matrix
    b_eq: np.ndarray
    a_leq: sp.csr_matrix
    b_leq: np.ndarray
    constant: float = 0.0

    def __post_init__(self):
        n = np.asarray(self.gradient).shape[0]
        h = sp.csc_matrix(self.hessian, dtype=float)
        a_eq = sp.csr_matrix(self.a_eq, dtype=float) if self.a_eq is not None else sp.csr_matrix((0, n))
        a_leq = sp.csr_matrix(self.a_leq, dtype=float) if self.a_leq is not None else sp.csr_matrix((0, n))
        b_eq = np.asarray(self.b_eq if self.b_eq is not None else [], dtype=float).reshape(-1)
        b_leq = np.asarray(self.b_leq if self.b_leq is not None else [], dtype=float).reshape(-1)
        if h.shape != (n, n):
            raise InvalidArgument(f"hessian shape {h.shape} does not match gradient length {n}")
        if a_eq.shape[1] != n or a_eq.shape[0] != b_eq.shape[0]:
            raise InvalidArgument("equality block dimensions are inconsistent")
        if a_leq.shape[1] != n or a_leq.shape[0] != b_leq.shape[0]:
            raise InvalidArgument("inequality block dimensions are inconsistent")
        for arr in (h.data, a_eq.data, a_leq.data, b_eq, b_leq, np.asarray(self.gradient, dtype=float)):
            if not np.all(np.isfinite(arr)):
                raise InvalidArgument("QP data must be finite")
        object.__setattr__(self, "hessian", h)
        object.__setattr__(self, "gradient", np.asarray(self.gradient, dtype=float).reshape(-1))
        object.__setattr__(self, "a_eq", a_eq)
        object.__setattr__(self, "b_eq", b_eq)
        object.__setattr__(self, "a_leq", a_leq)
        object.__setattr__(self, "b_leq", b_leq)
        object.__setattr__(self, "constant", float(self.constant))

    @property
    def num_vars(self) -> int:
        return self.gradient.shape[0]

    @property
    def num_eq(self) -> int:
        return self.b_eq.shape[0]

    @property
    def num_ineq(self) -> int:
        return self.b_leq.shape[0]

    def objective(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ (self.hessian @ x) + self.gradient @ x + self.constant)

    def dense(self) -> dict:
        return {
            "hessian": self.hessian.toarray(),
            "gradient": self.gradient.copy(),
            "a_eq": self.a_eq.toarray(),
            "b_eq": self.b_eq.copy(),
            "a_leq": self.a_leq.toarray(),
            "b_leq": self.b_leq.copy(),
        }


def assemble_qp(cost, dynamics, inequalities) -> QpProblem:
    """Combine cost ``(H, g, c0)``, dynamics ``(A, b)`` and the output of
    :func:`build_inequalities` into one problem."""
    h, g, c0 = cost
    a_dyn, b_dyn = dynamics
    a_leq, b_leq, a_sw, b_sw = inequalities
    n = np.asarray(g).shape[0]
    for name, mat in (("dynamics", a_dyn), ("inequalities", a_leq), ("swing equalities", a_sw)):
        if mat.shape[1] != n:
            raise InvalidArgument(f"{name} have {mat.shape[1]} columns, expected {n}")
    a_eq = sp.vstack([sp.csr_matrix(a_dyn), sp.csr_matrix(a_sw)], format="csr")
    b_eq = np.concatenate([np.asarray(b_dyn, dtype=float), np.asarray(b_sw, dtype=float)])
    return QpProblem(h, g, a_eq, b_eq, a_leq, b_leq, c0)


def extract_first_input(chi, layout: DecisionLayout) -> ContactWrenches:
    chi = np.asarray(chi, dtype=float)
    if chi.shape != (layout.size,):
        raise InvalidArgument(f"solution must have length {layout.size}, got {chi.shape}")
    off = layout.input_offset(0)
    return ContactWrenches.from_vector(chi[off:off + INPUT_DIM])


def _write_block(fh, name: str, mat: np.ndarray) -> None:
    mat = np.atleast_2d(mat)
    fh.write(f"{name} {mat.shape[0]} {mat.shape[1]}\n")
    for row in mat:
        fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def dump_qp(qp: QpProblem, path) -> None:
    """Write the dense problem data as plain text.

    Format: a header line ``qp n m_eq m_ineq``, then for each of hessian,
    gradient, a_eq, b_eq, a_leq, b_leq a line ``<name> <rows> <cols>``
    followed by the rows, space separated. Vectors are written as one row.
    """
    d = qp.dense()
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"qp {qp.num_vars} {qp.num_eq} {qp.num_ineq}\n")
        for key in ("hessian", "gradient", "a_eq", "b_eq", "a_leq", "b_leq"):
            arr = d[key]
            _write_block(fh, key, arr.reshape(1, -1) if arr.ndim == 1 else arr)


def load_qp(path) -> QpProblem:
    lines = Path(path).read_text(encoding="ascii").splitlines()
    tag, n, m_eq, m_ineq = lines[0].split()
    if tag != "qp":
        raise InvalidArgument("not a QP dump")
    n, m_eq, m_ineq = int(n), int(m_eq), int(m_ineq)
    data, i = {}, 1
    while i < len(lines):
        name, r, c = lines[i].split()
        r, c = int(r), int(c)
        rows = [np.array(lines[i + 1 + j].split(), dtype=float) for j in range(r)]
        data[name] = np.array(rows).reshape(r, c) if r else np.zeros((0, c))
        i += 1 + r
    return QpProblem(
        sp.csc_matrix(data["hessian"].reshape(n, n)),
        data["gradient"].reshape(n),
        sp.csr_matrix(data["a_eq"].reshape(m_eq, n)),
        data["b_eq"].reshape(m_eq),
        sp.csr_matrix(data["a_leq"].reshape(m_ineq, n)),
        data["b_leq"].reshape(m_ineq),
    )
