"""Contact wrench polytopes, the impact-gated swing schedule and support hulls."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from pushrec.errors import ConstraintSetError, DegenerateHullError, InvalidArgument


@dataclass(frozen=True)
class FootGeometry:
    half_length: float
    half_width: float

    def __post_init__(self):
        if not (self.half_length > 0 and self.half_width > 0):
            raise InvalidArgument("foot dimensions must be strictly positive")

    def corners(self, center) -> np.ndarray:
        cx, cy = np.asarray(center, dtype=float)[:2]
        dx, dy = self.half_length, self.half_width
        return np.array([[cx - dx, cy - dy], [cx + dx, cy - dy], [cx + dx, cy + dy], [cx - dx, cy + dy]])


@dataclass(frozen=True)
class FrictionModel:
    mu: float
    num_facets: int = 4

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidArgument("mu must be positive")
        if int(self.num_facets) != self.num_facets or self.num_facets < 4 or self.num_facets % 2:
            raise InvalidArgument("num_facets must be an even integer >= 4")


@dataclass(frozen=True)
class WrenchConstraintSet:
    """Polytope ``{w in R^6 : a_mat @ w <= b_vec}`` on a single foot wrench."""

    a_mat: np.ndarray
    b_vec: np.ndarray
    f_min: float = 0.0
    f_max: float | None = None

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a_mat, dtype=float))
        b = np.asarray(self.b_vec, dtype=float).reshape(-1)
        if a.shape[1] != 6 or a.shape[0] != b.shape[0]:
            raise InvalidArgument("wrench constraint rows must be (r, 6) with r offsets")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise InvalidArgument("wrench constraint rows must be finite")
        lift = 1.0 if self.f_max is None else min(1.0, 0.5 * (self.f_max - self.f_min))
        probe = np.array([0.0, 0.0, self.f_min + lift, 0.0, 0.0, 0.0])
        if np.any(a @ probe >= b):
            raise ConstraintSetError("wrench constraint set has no strictly feasible vertical wrench")
        object.__setattr__(self, "a_mat", a)
        object.__setattr__(self, "b_vec", b)

    @property
    def num_rows(self) -> int:
        return self.a_mat.shape[0]

    def contains(self, w, tol: float = 0.0) -> bool:
        return bool(np.all(self.a_mat @ np.asarray(w, dtype=float) <= self.b_vec + tol))


def friction_pyramid(fm: FrictionModel) -> tuple[np.ndarray, np.ndarray]:
    """Inscribed polyhedral friction cone with ``num_facets`` faces."""
    if not isinstance(fm, FrictionModel):
        raise InvalidArgument("expected a FrictionModel")
    n = int(fm.num_facets)
    theta = 2.0 * np.pi * np.arange(n) / n
    # apothem of the inscribed regular polygon
    mu_eff = fm.mu * np.cos(np.pi / n)
    a = np.zeros((n, 6))
    a[:, 0] = np.cos(theta)
    a[:, 1] = np.sin(theta)
    a[:, 2] = -mu_eff
    return a, np.zeros(n)


def cop_constraints(geom: FootGeometry) -> tuple[np.ndarray, np.ndarray]:
    # CoP = (-tau_y / f_z, tau_x / f_z) must lie in [-dx, dx] x [-dy, dy]
    dx, dy = geom.half_length, geom.half_width
    a = np.array([
        [0.0, 0.0, -dy, 1.0, 0.0, 0.0],
        [0.0, 0.0, -dy, -1.0, 0.0, 0.0],
        [0.0, 0.0, -dx, 0.0, -1.0, 0.0],
        [0.0, 0.0, -dx, 0.0, 1.0, 0.0],
    ])
    return a, np.zeros(4)


def normal_positivity(f_min: float) -> tuple[np.ndarray, np.ndarray]:
    if not f_min >= 0:
        raise InvalidArgument("f_min must be non-negative")
    return np.array([[0.0, 0.0, -1.0, 0.0, 0.0, 0.0]]), np.array([-float(f_min)])


def normal_force_bound(f_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Actuation limit ``f_z <= f_max``."""
    if not (np.isfinite(f_max) and f_max > 0):
        raise InvalidArgument("f_max must be positive and finite")
    return np.array([[0.0, 0.0, 1.0, 0.0, 0.0, 0.0]]), np.array([float(f_max)])


def stance_constraint_set(
    geom: FootGeometry, fm: FrictionModel, f_min: float = 0.0, f_max: float | None = None
) -> WrenchConstraintSet:
    """Friction, CoP and normal force rows for a foot in contact.

    ``f_max`` adds an optional upper bound on the normal force.
    """
    blocks = [friction_pyramid(fm), cop_constraints(geom), normal_positivity(f_min)]
    if f_max is not None:
        blocks.append(normal_force_bound(f_max))
    a = np.vstack([blk[0] for blk in blocks])
    b = np.concatenate([blk[1] for blk in blocks])
    return WrenchConstraintSet(a, b, f_min=float(f_min), f_max=None if f_max is None else float(f_max))


class SwingKind(enum.Enum):
    ZERO_WRENCH = "zero_wrench"
    FEASIBLE = "feasible"


@dataclass(frozen=True)
class ImpactSchedule:
    """Impact of the swing foot expected at the start of step ``k_impact``.

    ``k_impact > horizon_n - 1`` means no impact within the horizon.
    """

    k_impact: int
    horizon_n: int

    def __post_init__(self):
        if int(self.k_impact) != self.k_impact or self.k_impact < 0:
            raise InvalidArgument("k_impact must be a non-negative integer")
        if int(self.horizon_n) != self.horizon_n or self.horizon_n < 1:
            raise InvalidArgument("horizon_n must be a positive integer")
        object.__setattr__(self, "k_impact", int(self.k_impact))
        object.__setattr__(self, "horizon_n", int(self.horizon_n))

    @classmethod
    def no_step(cls, horizon_n: int) -> "ImpactSchedule":
        return cls(horizon_n + 1, horizon_n)


def swing_constraint_kind(schedule: ImpactSchedule, k: int) -> SwingKind:
    if not 0 <= k <= schedule.horizon_n - 1:
        raise InvalidArgument(f"step index {k} outside 0..{schedule.horizon_n - 1}")
    return SwingKind.ZERO_WRENCH if k < schedule.k_impact else SwingKind.FEASIBLE


def update_impact_index(schedule: ImpactSchedule, impact_occurred: bool) -> ImpactSchedule:
    """Shift the schedule by one controller tick.

    Without a detected impact the index saturates at 1, i.e. the impact is
    always expected no earlier than the next step.
    """
    if impact_occurred:
        k = 0
    else:
        k = max(1, schedule.k_impact - 1)
    return ImpactSchedule(k, schedule.horizon_n)


@dataclass(frozen=True)
class HullConstraint:
    """Half-plane description ``a_mat @ p <= b_vec`` of a convex polygon."""

    a_mat: np.ndarray
    b_vec: np.ndarray
    vertices: np.ndarray

    @property
    def num_rows(self) -> int:
        return self.a_mat.shape[0]

    def contains(self, p, tol: float = 0.0) -> bool:
        return bool(np.all(self.a_mat @ np.asarray(p, dtype=float)[:2] <= self.b_vec + tol))

    def centroid(self) -> np.ndarray:
        """Area centroid of the polygon (shoelace formula)."""
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        area = 0.5 * cross.sum()
        cx = ((v[:, 0] + w[:, 0]) * cross).sum() / (6.0 * area)
        cy = ((v[:, 1] + w[:, 1]) * cross).sum() / (6.0 * area)
        return np.array([cx, cy])

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


def convex_hull_inequalities(vertices) -> HullConstraint:
    pts = np.asarray(vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[1] < 2:
        raise DegenerateHullError("vertices must be an (n, 2) array")
    pts = pts[:, :2]
    if pts.shape[0] < 3:
        raise DegenerateHullError("at least three points are required")
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateHullError("points are collinear") from exc
    # qhull returns outward unit normals n and offsets c with n.p + c <= 0 inside
    a = hull.equations[:, :2].copy()
    b = -hull.equations[:, 2].copy()
    ring = pts[hull.vertices]  # counter-clockwise in 2D
    return HullConstraint(a, b, ring)
