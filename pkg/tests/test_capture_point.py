import numpy as np
import pytest

from pushrec.capture_point import IcpParams, compute_icp, icp_extraction_matrix
from pushrec.centroidal_model import State
from pushrec.constraints import FootGeometry, convex_hull_inequalities
from pushrec.errors import InvalidArgument


def test_zero_velocity_is_ground_projection():
    s = State([0.3, -0.1, 0.5], [0, 0, 0], [1, 2, 3])
    np.testing.assert_array_equal(compute_icp(s, IcpParams(3.0)), [0.3, -0.1])


def test_worked_example():
    p = IcpParams.from_height(0.5, 9.81)
    assert p.omega0 == pytest.approx(4.4294469180700204, rel=1e-15)
    s = State([0, 0, 0.5], [0.1, 0, 0], [0, 0, 0])
    np.testing.assert_allclose(compute_icp(s, p), [0.1 / np.sqrt(9.81 / 0.5), 0.0], rtol=1e-15)
    np.testing.assert_allclose(compute_icp(s, p), [0.02258, 0.0], atol=5e-6)


def test_doubling_omega_halves_offset(rng):
    gamma = rng.normal(size=9)
    a = compute_icp(gamma, IcpParams(2.0)) - gamma[:2]
    b = compute_icp(gamma, IcpParams(4.0)) - gamma[:2]
    np.testing.assert_allclose(b, 0.5 * a, rtol=1e-15)


def test_extraction_matrix(rng):
    p = IcpParams(4.2)
    c = icp_extraction_matrix(p)
    assert c.shape == (2, 9)
    assert np.count_nonzero(c) == 4
    assert not c[:, 6:].any()
    for _ in range(100):
        gamma = rng.normal(size=9)
        np.testing.assert_allclose(c @ gamma, compute_icp(gamma, p), rtol=0, atol=1e-15)


def test_linearity(rng):
    p = IcpParams(3.3)
    g1, g2 = rng.normal(size=9), rng.normal(size=9)
    np.testing.assert_allclose(
        compute_icp(2.0 * g1 - g2, p), 2.0 * compute_icp(g1, p) - compute_icp(g2, p), atol=1e-14
    )


def test_hull_classification_agrees(rng):
    geom = FootGeometry(0.1, 0.05)
    hull = convex_hull_inequalities(np.vstack([geom.corners([0, 0]), geom.corners([0, -0.2])]))
    p = IcpParams(4.4)
    c = icp_extraction_matrix(p)
    for _ in range(500):
        gamma = rng.normal(scale=[0.2, 0.2, 0.1, 0.5, 0.5, 0.1, 1, 1, 1])
        lhs = hull.a_mat @ c @ gamma
        if np.min(np.abs(lhs - hull.b_vec)) < 1e-12:
            continue
        assert bool(np.all(lhs <= hull.b_vec)) == hull.contains(compute_icp(gamma, p))


def test_invalid_params():
    with pytest.raises(InvalidArgument):
        IcpParams(0.0)
    with pytest.raises(InvalidArgument):
        IcpParams.from_height(-0.5)
