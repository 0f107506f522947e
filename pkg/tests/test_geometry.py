import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dirac_edge.coefficients import ZERO_POTENTIAL
from dirac_edge.errors import DegenerateGradient
from dirac_edge.geometry import (DomainWall, curvature, eval_wall, frame_angle, integrate_center,
                                 project_to_interface, rotation, unit_fields)
from dirac_edge.presets import constant_field, make_potential, make_wall

FLAT = make_wall("flat")
LOG = make_wall("circle_log")
QUAD = make_wall("circle_quadratic")


def test_eval_wall_linear():
    value, grad, lap = eval_wall(FLAT, (3.0, 0.0))
    assert value == 0.0
    np.testing.assert_allclose(grad, [0.0, 1.0])
    assert lap == 0.0


def test_eval_wall_log_circle():
    value, grad, lap = eval_wall(LOG, (1.0, 0.0))
    assert abs(value) < 1e-15
    np.testing.assert_allclose(grad, [1.0, 0.0], atol=1e-14)
    assert abs(lap) < 1e-12


def test_eval_wall_quadratic_matches_finite_differences():
    value, grad, lap = eval_wall(QUAD, (0.0, 1.0))
    assert value == 0.0
    np.testing.assert_allclose(grad, [0.0, 1.0])
    assert lap == pytest.approx(2.0)
    numeric = DomainWall(kappa=QUAD.kappa, name="fd")
    assert numeric.laplacian(np.array([0.0, 1.0])) == pytest.approx(2.0, rel=1e-5)


@pytest.mark.parametrize("wall, x, n, tau", [
    (FLAT, (0.0, 0.0), (0.0, 1.0), (-1.0, 0.0)),
    (LOG, (0.0, 1.0), (0.0, 1.0), (-1.0, 0.0)),
    (LOG, (1.0, 0.0), (1.0, 0.0), (0.0, 1.0)),
])
def test_unit_fields(wall, x, n, tau):
    got_n, got_tau = unit_fields(wall, x)
    np.testing.assert_allclose(got_n, n, atol=1e-14)
    np.testing.assert_allclose(got_tau, tau, atol=1e-14)


def test_degenerate_gradient_raises():
    with pytest.raises(DegenerateGradient):
        unit_fields(QUAD, (0.0, 0.0))


@pytest.mark.parametrize("wall, x0, expected", [
    (FLAT, (2.0, 0.3), (2.0, 0.0)),
    (LOG, (2.0, 0.0), (1.0, 0.0)),
    (QUAD, (0.0, -3.0), (0.0, -1.0)),
])
def test_projection(wall, x0, expected):
    np.testing.assert_allclose(project_to_interface(wall, x0), expected, atol=1e-10)


@given(st.floats(0.3, 3.0), st.floats(-math.pi, math.pi))
def test_projection_lands_on_interface(radius, angle):
    y = project_to_interface(QUAD, (radius * math.cos(angle), radius * math.sin(angle)))
    assert abs(QUAD.value(y)) < 1e-10


@given(st.floats(-20, 20))
def test_frame_angle_rotates_normal_to_e2(theta):
    n = np.array([-math.sin(theta), math.cos(theta)])
    np.testing.assert_allclose(rotation(frame_angle(n)) @ n, [0.0, 1.0], atol=1e-12)
    assert 0.0 <= frame_angle(n) < 2 * math.pi


def test_integrate_center_free_flat():
    frames = integrate_center(FLAT, ZERO_POTENTIAL, (0.0, 0.0), 1.0, 0.01)
    np.testing.assert_allclose(frames[-1].y, [-1.0, 0.0], atol=1e-12)


def test_integrate_center_magnetic_slowdown():
    frames = integrate_center(FLAT, constant_field(2.0), (0.0, 0.0), 1.0, 0.01)
    assert np.linalg.norm(frames[-1].y - frames[0].y) == pytest.approx(1 / math.sqrt(5), abs=1e-12)


def test_integrate_center_stays_on_log_circle():
    frames = integrate_center(LOG, ZERO_POTENTIAL, (1.0, 0.0), 2 * math.pi, 0.01)
    assert max(abs(np.linalg.norm(f.y) - 1) for f in frames) < 1e-8


def test_curvature_values():
    assert curvature(FLAT, (0.0, 0.0)) == pytest.approx(0.0, abs=1e-8)
    assert curvature(LOG, (1.0, 0.0)) == pytest.approx(1.0, rel=1e-6)
    assert curvature(make_wall("circle_quadratic", R=2.0), (2.0, 0.0)) == pytest.approx(0.5, rel=1e-6)


def _bend_frames(dt, t_max=2.0):
    return integrate_center(make_wall("tanh_bend"), constant_field(1.0), (1.5, 0.0), t_max, dt)


def test_frame_invariants_on_bend():
    frames = _bend_frames(0.01)
    wall = make_wall("tanh_bend")
    for f in frames:
        np.testing.assert_allclose(rotation(f.theta) @ f.n, [0.0, 1.0], atol=1e-8)
        assert abs(wall.value(f.y)) < 1e-6
    thetas = np.array([f.theta for f in frames])
    k_max = max(curvature(wall, f.y) for f in frames)
    assert np.max(np.abs(np.diff(thetas))) < 1.0 * k_max * 0.01 * 1.5


def test_speed_law_on_bend():
    dt = 0.005
    frames = _bend_frames(dt)
    field = constant_field(1.0)
    wall = make_wall("tanh_bend")
    ys = np.array([f.y for f in frames])
    speed = np.linalg.norm(ys[2:] - ys[:-2], axis=1) / (2 * dt)
    for i, f in enumerate(frames[1:-1]):
        r = np.linalg.norm(wall.gradient(f.y))
        b = field.field_at(f.y)
        assert speed[i] == pytest.approx(r / math.hypot(r, b), abs=5e-4)


def test_theta_branch_matches_atan2_modulo_two_pi():
    frames = integrate_center(QUAD, make_potential("circle_constant", B0=0.5), (1.0, 0.0),
                              9.0, 0.01)
    for f in frames:
        diff = (f.theta - frame_angle(f.n) + math.pi) % (2 * math.pi) - math.pi
        assert abs(diff) < 1e-8


def test_rk4_order():
    ref = _bend_frames(0.01 / 8)[-1].y
    coarse = np.linalg.norm(_bend_frames(0.1)[-1].y - ref)
    fine = np.linalg.norm(_bend_frames(0.05)[-1].y - ref)
    assert coarse / fine >= 12
