import numpy as np
import pytest

from oracles import in_convex_hull
from pushrec.constraints import (
    FootGeometry,
    FrictionModel,
    ImpactSchedule,
    SwingKind,
    WrenchConstraintSet,
    convex_hull_inequalities,
    cop_constraints,
    friction_pyramid,
    normal_force_bound,
    normal_positivity,
    stance_constraint_set,
    swing_constraint_kind,
    update_impact_index,
)
from pushrec.errors import ConstraintSetError, DegenerateHullError, InvalidArgument

GEOM = FootGeometry(0.1, 0.05)
FRICTION = FrictionModel(0.5, 4)


def satisfies(blk, w, tol=0.0):
    a, b = blk
    return bool(np.all(a @ w <= b + tol))


# friction

def test_pyramid_vertical_force_feasible():
    assert satisfies(friction_pyramid(FrictionModel(0.5, 4)), np.array([0, 0, 100.0, 0, 0, 0]))


def test_pyramid_rejects_outside_cone():
    assert not satisfies(friction_pyramid(FrictionModel(0.5, 8)), np.array([60.0, 0, 100.0, 0, 0, 0]))


@pytest.mark.parametrize("facets", [4, 6, 8, 16])
def test_pyramid_rows(facets):
    a, b = friction_pyramid(FrictionModel(0.7, facets))
    assert a.shape == (facets, 6) and b.shape == (facets,)
    assert not a[:, 3:].any() and not b.any()
    theta = 2 * np.pi * np.arange(facets) / facets
    np.testing.assert_allclose(a[:, 0], np.cos(theta), atol=1e-15)
    np.testing.assert_allclose(a[:, 1], np.sin(theta), atol=1e-15)
    np.testing.assert_allclose(a[:, 2], -0.7 / np.sqrt(1 + np.tan(np.pi / facets) ** 2))


@pytest.mark.parametrize("facets", [4, 6, 8])
def test_pyramid_is_inner_approximation(rng, facets):
    mu = 0.5
    blk = friction_pyramid(FrictionModel(mu, facets))
    w = np.zeros((10_000, 6))
    w[:, 2] = rng.uniform(0, 100, size=10_000)
    w[:, :2] = rng.uniform(-60, 60, size=(10_000, 2))
    inside = np.all(w @ blk[0].T <= blk[1], axis=1)
    assert inside.sum() > 100
    cone = np.hypot(w[:, 0], w[:, 1]) <= mu * w[:, 2]
    assert not np.any(inside & ~cone)


def test_pyramid_touches_cone_at_facet_midpoints():
    # the inscribed polygon reaches the true cone in the facet normal directions
    mu, n = 0.5, 6
    blk = friction_pyramid(FrictionModel(mu, n))
    r = mu * np.cos(np.pi / n) * 100.0
    w = np.array([r, 0.0, 100.0, 0, 0, 0])
    assert satisfies(blk, w, tol=1e-12)
    assert not satisfies(blk, w * np.array([1.001, 1, 1, 1, 1, 1]))


@pytest.mark.parametrize("mu,facets", [(0.0, 4), (-1.0, 4), (0.5, 3), (0.5, 5), (0.5, 2)])
def test_friction_model_validation(mu, facets):
    with pytest.raises(InvalidArgument):
        FrictionModel(mu, facets)


# center of pressure

def test_cop_examples():
    blk = cop_constraints(GEOM)
    assert satisfies(blk, np.array([0, 0, 100.0, 0, 0, 0]))
    assert not satisfies(blk, np.array([0, 0, 100.0, 6.0, 0, 0]))
    assert satisfies(blk, np.array([0, 0, 100.0, 5.0, 0, 0]))
    assert not satisfies(blk, np.array([0, 0, 100.0, 0, -11.0, 0]))
    assert not cop_constraints(GEOM)[1].any()


def test_cop_division_oracle(rng):
    blk = cop_constraints(GEOM)
    hits = 0
    for _ in range(5000):
        fz = rng.uniform(1, 200)
        w = np.array([0, 0, fz, rng.uniform(-15, 15), rng.uniform(-25, 25), rng.normal()])
        cop = np.array([-w[4] / fz, w[3] / fz])
        in_rect = abs(cop[0]) <= GEOM.half_length and abs(cop[1]) <= GEOM.half_width
        assert satisfies(blk, w) == in_rect
        hits += in_rect
    assert 0 < hits < 5000


def test_foot_geometry_validation():
    with pytest.raises(InvalidArgument):
        FootGeometry(0.0, 0.05)
    np.testing.assert_array_equal(
        FootGeometry(0.1, 0.05).corners([1.0, 2.0, 0.0]),
        [[0.9, 1.95], [1.1, 1.95], [1.1, 2.05], [0.9, 2.05]],
    )


# normal force

def test_normal_positivity():
    assert satisfies(normal_positivity(0.0), np.zeros(6))
    assert not satisfies(normal_positivity(10.0), np.array([0, 0, 5.0, 0, 0, 0]))
    assert not satisfies(normal_positivity(0.0), np.array([0, 0, -1.0, 0, 0, 0]))
    with pytest.raises(InvalidArgument):
        normal_positivity(-1.0)


def test_normal_force_bound():
    assert satisfies(normal_force_bound(500.0), np.array([0, 0, 500.0, 0, 0, 0]))
    assert not satisfies(normal_force_bound(500.0), np.array([0, 0, 500.1, 0, 0, 0]))
    with pytest.raises(InvalidArgument):
        normal_force_bound(0.0)


def test_stance_set():
    s = stance_constraint_set(GEOM, FRICTION, 0.0)
    assert s.num_rows == 4 + 4 + 1
    assert s.contains(np.array([0, 0, 33 * 9.81 / 2, 0, 0, 0]))
    assert s.contains(np.zeros(6))
    assert stance_constraint_set(GEOM, FrictionModel(0.5, 8), 0.0).num_rows == 8 + 4 + 1
    bounded = stance_constraint_set(GEOM, FRICTION, 0.0, 500.0)
    assert bounded.num_rows == 10
    assert not bounded.contains(np.array([0, 0, 600.0, 0, 0, 0]))


def test_stance_set_min_force_excludes_zero():
    s = stance_constraint_set(GEOM, FRICTION, 5.0)
    assert not s.contains(np.zeros(6))
    assert s.contains(np.array([0, 0, 5.0, 0, 0, 0]))


def test_empty_wrench_set_rejected():
    # f_z <= -1 and f_z >= 0 cannot both hold
    a = np.array([[0, 0, 1.0, 0, 0, 0], [0, 0, -1.0, 0, 0, 0]])
    with pytest.raises(ConstraintSetError):
        WrenchConstraintSet(a, np.array([-1.0, 0.0]))
    with pytest.raises(InvalidArgument):
        WrenchConstraintSet(np.ones((2, 5)), np.zeros(2))


# impact schedule

def test_swing_kind_examples():
    assert swing_constraint_kind(ImpactSchedule(0, 15), 0) is SwingKind.FEASIBLE
    assert swing_constraint_kind(ImpactSchedule(7, 15), 6) is SwingKind.ZERO_WRENCH
    assert swing_constraint_kind(ImpactSchedule(7, 15), 7) is SwingKind.FEASIBLE
    assert all(swing_constraint_kind(ImpactSchedule(20, 15), k) is SwingKind.ZERO_WRENCH for k in range(15))
    with pytest.raises(InvalidArgument):
        swing_constraint_kind(ImpactSchedule(3, 15), 15)
    with pytest.raises(InvalidArgument):
        swing_constraint_kind(ImpactSchedule(3, 15), -1)


def test_update_examples():
    assert update_impact_index(ImpactSchedule(5, 15), False).k_impact == 4
    assert update_impact_index(ImpactSchedule(1, 15), False).k_impact == 1
    assert update_impact_index(ImpactSchedule(3, 15), True).k_impact == 0
    assert update_impact_index(ImpactSchedule(0, 15), False).k_impact == 1


def test_schedule_monotone_and_converges():
    for n in range(1, 12):
        for ki in range(0, 20):
            kinds = [swing_constraint_kind(ImpactSchedule(ki, n), k) for k in range(n)]
            zero = [kd is SwingKind.ZERO_WRENCH for kd in kinds]
            # zero-wrench steps form a prefix
            assert zero == sorted(zero, reverse=True)
            s = ImpactSchedule(ki, n)
            for _ in range(25):
                s = update_impact_index(s, False)
                assert s.k_impact >= 1
            assert s.k_impact == 1


def test_schedule_validation():
    with pytest.raises(InvalidArgument):
        ImpactSchedule(-1, 5)
    with pytest.raises(InvalidArgument):
        ImpactSchedule(0, 0)
    assert ImpactSchedule.no_step(15).k_impact == 16


# support hull

def test_square_hull():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1.0]])
    h = convex_hull_inequalities(sq)
    assert h.num_rows == 4
    for p, inside in [((0.5, 0.5), True), ((1.01, 0.5), False), ((0.5, -0.01), False), ((1.0, 1.0), True)]:
        assert h.contains(np.array(p), tol=1e-12) == inside
    h2 = convex_hull_inequalities(np.vstack([sq, [[0.5, 0.5]]]))
    assert h2.num_rows == 4
    rows = sorted(map(tuple, np.round(np.column_stack([h.a_mat, h.b_vec]), 12)))
    rows2 = sorted(map(tuple, np.round(np.column_stack([h2.a_mat, h2.b_vec]), 12)))
    assert rows == rows2
    np.testing.assert_allclose(h.centroid(), [0.5, 0.5])


def test_hull_rows_tight_and_outward(rng):
    for _ in range(30):
        pts = rng.normal(size=(rng.integers(3, 21), 2))
        h = convex_hull_inequalities(pts)
        slack = pts @ h.a_mat.T - h.b_vec
        assert np.all(slack <= 1e-12)
        assert np.all((np.abs(slack) <= 1e-12).sum(axis=0) >= 2)
        mean = pts.mean(axis=0)
        assert np.all(h.a_mat @ mean < h.b_vec)


def test_hull_membership_matches_lp_oracle(rng):
    for _ in range(30):
        pts = rng.normal(size=(rng.integers(3, 21), 2))
        h = convex_hull_inequalities(pts)
        for p in rng.normal(scale=1.5, size=(20, 2)):
            margin = np.max(h.a_mat @ p - h.b_vec)
            if abs(margin) < 1e-9:
                continue
            assert h.contains(p) == in_convex_hull(pts, p)


def test_two_foot_hull():
    h = convex_hull_inequalities(np.vstack([GEOM.corners([0, 0]), GEOM.corners([0, -0.2])]))
    lo, hi = h.bounds()
    np.testing.assert_allclose(lo, [-0.1, -0.25])
    np.testing.assert_allclose(hi, [0.1, 0.05])
    np.testing.assert_allclose(h.centroid(), [0.0, -0.1], atol=1e-15)


@pytest.mark.parametrize("pts", [
    [[0, 0], [1, 1]],
    [[0, 0], [1, 1], [2, 2], [3, 3]],
    [[0, 0], [0, 0], [0, 0]],
])
def test_degenerate_hull(pts):
    with pytest.raises(DegenerateHullError):
        convex_hull_inequalities(np.array(pts, dtype=float))
