"""Primal-dual interior point solver for convex QPs.

Solves ``min 1/2 x'Hx + g'x  s.t.  A_eq x = b_eq,  A_leq x <= b_leq`` with a
Mehrotra predictor-corrector scheme on the sparse KKT system, followed by an
active-set polishing step. When the iteration stalls, a Farkas certificate of
primal infeasibility is searched with an auxiliary LP.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import qdldl
from scipy.optimize import linprog

from pushrec.errors import InvalidArgument
from pushrec.transcription import QpProblem

log = logging.getLogger(__name__)

PSD_TOL = 1e-9
_REG_PRIMAL = 1e-9
_REG_DUAL = 1e-9
_STEP_FRACTION = 0.99
_STALL_WINDOW = 50


class Status(enum.Enum):
    OPTIMAL = "optimal"
    PRIMAL_INFEASIBLE = "primal_infeasible"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class SolverConfig:
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    max_iterations: int = 4000
    infeasibility_tol: float = 1e-7
    polish: bool = True

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol", "max_iterations", "infeasibility_tol"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"{name} must be positive")


@dataclass
class QpSolution:
    x_star: np.ndarray
    eq_duals: np.ndarray
    ineq_duals: np.ndarray
    status: Status
    iterations: int
    objective: float
    certificate: tuple[np.ndarray, np.ndarray] | None = None
    residuals: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


@dataclass
class WarmStart:
    x: np.ndarray
    eq_duals: np.ndarray | None = None
    ineq_duals: np.ndarray | None = None


def kkt_residuals(qp: QpProblem, x, nu, lam) -> dict:
    """Infinity-norm KKT residuals of a primal-dual point on the original data."""
    x = np.asarray(x, dtype=float)
    nu = np.asarray(nu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    viol = qp.a_leq @ x - qp.b_leq
    stat = qp.hessian @ x + qp.gradient + qp.a_eq.T @ nu + qp.a_leq.T @ lam
    return {
        "primal_eq": float(np.abs(qp.a_eq @ x - qp.b_eq).max(initial=0.0)),
        "primal_ineq": float(np.max(viol, initial=0.0)),
        "dual": float(np.abs(stat).max(initial=0.0)),
        "complementarity": float(np.abs(lam * viol).max(initial=0.0)),
        "dual_sign": float(np.max(-lam, initial=0.0)),
    }


def _kkt_ok(res: dict, tol: float, gnorm: float) -> bool:
    return (
        res["primal_eq"] <= tol
        and res["primal_ineq"] <= tol
        and res["dual"] <= tol * (1.0 + gnorm)
        and res["complementarity"] <= tol
        and res["dual_sign"] <= tol
    )


def _check_hessian(h: sp.csc_matrix) -> None:
    scale = max(1.0, abs(h).max()) if h.nnz else 1.0
    if h.nnz and abs(h - h.T).max() > 1e-12 * scale:
        raise InvalidArgument("hessian must be symmetric")
    dense = h.toarray()
    try:
        sla.cholesky(dense + PSD_TOL * np.eye(h.shape[0]), lower=True, check_finite=False)
    except sla.LinAlgError:
        if np.linalg.eigvalsh(dense).min() < -PSD_TOL:
            raise InvalidArgument("hessian must be positive semi-definite") from None


class _Kkt:
    """Factorized KKT matrix with iterative refinement against the unregularized one."""

    def __init__(self, exact: sp.csc_matrix, ldl: qdldl.Solver):
        self.exact = exact
        self.ldl = ldl

    def solve(self, rhs: np.ndarray, refine: int = 8) -> np.ndarray:
        sol = self.ldl.solve(rhs)
        scale = 1e-14 * (1.0 + np.abs(rhs).max(initial=0.0))
        for _ in range(refine):
            r = rhs - self.exact @ sol
            if np.abs(r).max(initial=0.0) <= scale:
                break
            sol = sol + self.ldl.solve(r)
        return sol


class _KktPattern:
    """Fixed sparsity pattern of ``[[H + G'DG, A'], [A, 0]]`` for varying diagonal ``D``.

    The LDL' factorization works on the upper triangle with a small
    quasi-definite regularization; its symbolic analysis is reused across
    iterations.
    """

    def __init__(self, h: sp.spmatrix, a: sp.spmatrix, gm: sp.spmatrix):
        n, me = h.shape[0], a.shape[0]
        dim = n + me
        h = sp.coo_matrix(h)
        a = sp.coo_matrix(a)
        const_r = np.concatenate([h.row, a.row + n, a.col, np.arange(dim)])
        const_c = np.concatenate([h.col, a.col, a.row + n, np.arange(dim)])
        const_v = np.concatenate([h.data, a.data, a.data, np.zeros(dim)])
        # outer products of the inequality rows, weighted later by D
        g = sp.csr_matrix(gm)
        pr, pc, pv, pi = [], [], [], []
        for i in range(g.shape[0]):
            lo, hi = g.indptr[i], g.indptr[i + 1]
            idx, v = g.indices[lo:hi], g.data[lo:hi]
            pr.append(np.repeat(idx, idx.size))
            pc.append(np.tile(idx, idx.size))
            pv.append(np.outer(v, v).reshape(-1))
            pi.append(np.full(idx.size * idx.size, i))
        if pr:
            gr, gc, gv, gi = (np.concatenate(x) for x in (pr, pc, pv, pi))
        else:
            gr = gc = gi = np.zeros(0, dtype=np.int64)
            gv = np.zeros(0)
        keys = np.concatenate([const_c * dim + const_r, gc * dim + gr])
        uniq, inv = np.unique(keys, return_inverse=True)
        rows, cols = uniq % dim, uniq // dim
        self.indices = rows.astype(np.int32)
        self.indptr = np.concatenate([[0], np.cumsum(np.bincount(cols, minlength=dim))]).astype(np.int32)
        nc = const_r.size
        self.base = np.bincount(inv[:nc], weights=const_v, minlength=uniq.size)
        self.dmap = sp.csr_matrix((gv, (inv[nc:], gi)), shape=(uniq.size, g.shape[0]))
        self.dim = dim

        upper = rows <= cols
        self.upper_pos = np.flatnonzero(upper)
        self.upper_indices = rows[upper].astype(np.int32)
        self.upper_indptr = np.concatenate([[0], np.cumsum(np.bincount(cols[upper], minlength=dim))]).astype(np.int32)
        self.reg = np.zeros(uniq.size)
        diag = rows == cols
        self.reg[diag] = np.where(rows[diag] < n, _REG_PRIMAL, -_REG_DUAL)
        self._ldl = None

    def factor(self, d: np.ndarray) -> _Kkt:
        data = self.base + self.dmap @ d if d.size else self.base.copy()
        exact = sp.csc_matrix((data, self.indices, self.indptr), shape=(self.dim, self.dim))
        upper = sp.csc_matrix(
            ((data + self.reg)[self.upper_pos], self.upper_indices, self.upper_indptr), shape=(self.dim, self.dim)
        )
        if self._ldl is None:
            self._ldl = qdldl.Solver(upper)
        else:
            self._ldl.update(upper)
        return _Kkt(exact, self._ldl)


def _max_step(v: np.ndarray, dv: np.ndarray) -> float:
    neg = dv < 0
    if not np.any(neg):
        return 1.0
    return float(min(1.0, np.min(-v[neg] / dv[neg])))


def _interior_point(qp: QpProblem, cfg: SolverConfig, warm: WarmStart | None):
    h, g = qp.hessian, qp.gradient
    a, b = qp.a_eq, qp.b_eq
    gm, hv = qp.a_leq, qp.b_leq
    n, me, mi = qp.num_vars, qp.num_eq, qp.num_ineq
    gnorm = float(np.abs(g).max(initial=0.0))
    tol = 0.1 * cfg.abs_tol
    gmt = gm.T.tocsr()

    pattern = _KktPattern(h, a, gm)
    factor = pattern.factor

    # initial point: least-squares fit of the constraints with unit scaling
    if warm is not None:
        x = np.asarray(warm.x, dtype=float).copy()
        y = np.zeros(me) if warm.eq_duals is None else np.asarray(warm.eq_duals, dtype=float).copy()
        floor = 1e-2
        s = np.maximum(hv - gm @ x, floor)
        z = np.ones(mi) if warm.ineq_duals is None else np.maximum(np.asarray(warm.ineq_duals, dtype=float), floor)
    else:
        kkt = factor(np.ones(mi))
        sol = kkt.solve(np.concatenate([-g + gmt @ hv, b]))
        x, y = sol[:n], sol[n:]
        s = hv - gm @ x
        z = -s.copy()
        if mi:
            s = s + max(0.0, -s.min()) + 1.0
            z = z + max(0.0, -z.min()) + 1.0

    best, since_best, tiny_steps = np.inf, 0, 0
    for it in range(1, cfg.max_iterations + 1):
        r_d = h @ x + g + a.T @ y + gmt @ z
        r_p = a @ x - b
        r_i = gm @ x + s - hv
        mu = float(s @ z) / mi if mi else 0.0
        merit = max(
            np.abs(r_p).max(initial=0.0),
            np.abs(r_i).max(initial=0.0),
            np.abs(r_d).max(initial=0.0) / (1.0 + gnorm),
            float(np.max(s * z, initial=0.0)),
        )
        if merit <= tol:
            return x, y, z, s, it - 1, "converged"
        if merit < 0.9 * best:
            best, since_best = merit, 0
        else:
            since_best += 1
        if since_best >= _STALL_WINDOW or tiny_steps >= 3 or (mi and (z.max() > 1e13 or s.min() < 1e-200)):
            return x, y, z, s, it - 1, "stalled"

        d = z / s if mi else np.zeros(0)
        kkt = factor(d)

        def direction(r_c):
            tmp = (-r_c + z * r_i) / s if mi else np.zeros(0)
            rhs = np.concatenate([-r_d - gmt @ tmp, -r_p])
            sol = kkt.solve(rhs)
            dx, dy = sol[:n], sol[n:]
            if mi:
                ds = -r_i - gm @ dx
                dz = (-r_c - z * ds) / s
            else:
                ds = dz = np.zeros(0)
            return dx, dy, ds, dz

        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if mi:
                dx, dy, ds, dz = direction(s * z)
                alpha = min(_max_step(s, ds), _max_step(z, dz))
                mu_aff = float((s + alpha * ds) @ (z + alpha * dz)) / mi
                sigma = (mu_aff / mu) ** 3 if mu > 0 else 0.0
                dx, dy, ds, dz = direction(s * z + ds * dz - sigma * mu)
                alpha = min(1.0, _STEP_FRACTION * min(_max_step(s, ds), _max_step(z, dz)))
            else:
                dx, dy, ds, dz = direction(np.zeros(0))
                alpha = 1.0
        if not (np.all(np.isfinite(dx)) and np.all(np.isfinite(dz)) and np.isfinite(alpha)):
            return x, y, z, s, it - 1, "stalled"
        tiny_steps = tiny_steps + 1 if alpha < 1e-10 else 0
        x = x + alpha * dx
        y = y + alpha * dy
        if mi:
            s = s + alpha * ds
            z = z + alpha * dz
    return x, y, z, s, cfg.max_iterations, "limit"


def _polish(qp: QpProblem, x, y, z, s):
    """Re-solve the KKT system with the identified active set held as equalities."""
    active = np.flatnonzero(z > s)
    a_all = sp.vstack([qp.a_eq, qp.a_leq[active]], format="csr")
    kkt = _KktPattern(qp.hessian, a_all, sp.csr_matrix((0, qp.num_vars))).factor(np.zeros(0))
    sol = kkt.solve(np.concatenate([-qp.gradient, qp.b_eq, qp.b_leq[active]]), refine=5)
    n, me = qp.num_vars, qp.num_eq
    xp = sol[:n]
    yp = sol[n:n + me]
    zp = np.zeros(qp.num_ineq)
    zp[active] = sol[n + me:]
    if not np.all(np.isfinite(sol)):
        return None
    return xp, yp, zp


def _farkas_certificate(qp: QpProblem, tol: float):
    """Search ``y >= 0, nu`` with ``A_leq'y + A_eq'nu = 0`` and ``b_leq'y + b_eq'nu = -1``."""
    mi, me = qp.num_ineq, qp.num_eq
    a_ub_t = qp.a_leq.T.toarray()
    a_eq_t = qp.a_eq.T.toarray()
    a_lp = np.vstack([
        np.hstack([a_ub_t, a_eq_t]),
        np.concatenate([qp.b_leq, qp.b_eq])[None, :],
    ])
    rhs = np.zeros(a_lp.shape[0])
    rhs[-1] = -1.0
    bounds = [(0, None)] * mi + [(None, None)] * me
    res = linprog(np.zeros(mi + me), A_eq=a_lp, b_eq=rhs, bounds=bounds, method="highs")
    if res.status != 0:
        return None
    y, nu = res.x[:mi], res.x[mi:]
    resid = np.abs(a_ub_t @ y + a_eq_t @ nu).max(initial=0.0)
    if resid > tol or np.any(y < -tol):
        return None
    return np.maximum(y, 0.0), nu


def solve(qp: QpProblem, cfg: SolverConfig | None = None, warm_start: WarmStart | None = None) -> QpSolution:
    cfg = cfg or SolverConfig()
    _check_hessian(qp.hessian)
    gnorm = float(np.abs(qp.gradient).max(initial=0.0))

    x, y, z, s, iters, how = _interior_point(qp, cfg, warm_start)
    res = kkt_residuals(qp, x, y, z)
    if how == "converged" and cfg.polish and qp.num_ineq:
        polished = _polish(qp, x, y, z, s)
        if polished is not None:
            pres = kkt_residuals(qp, *polished)
            if _kkt_ok(pres, cfg.abs_tol, gnorm) and max(pres.values()) <= max(res.values()):
                x, y, z = polished
                res = pres
    if _kkt_ok(res, cfg.abs_tol, gnorm):
        return QpSolution(x, y, z, Status.OPTIMAL, iters, qp.objective(x), residuals=res)

    cert = _farkas_certificate(qp, cfg.infeasibility_tol)
    if cert is not None:
        log.debug("QP certified infeasible after %d iterations", iters)
        return QpSolution(x, y, z, Status.PRIMAL_INFEASIBLE, iters, np.nan, certificate=cert, residuals=res)
    return QpSolution(x, y, z, Status.ITERATION_LIMIT, iters, qp.objective(x), residuals=res)
