import math

import numpy as np
import pytest

from dirac_edge.assembler import (GridSpec, SpinorGrid, assemble_leading_order, exact_flat_solution,
                                  gauge_phase_quadratic, spin_rotations, spinor_direction)
from dirac_edge.coefficients import ZERO_POTENTIAL, build_track
from dirac_edge.diagnostics import center_of_mass, l2_error
from dirac_edge.envelope import GaussianProfile, WavepacketSpec
from dirac_edge.errors import WindowError
from dirac_edge.presets import make_potential, make_wall

GRID = GridSpec(128, 128, -5.0, 4.0, -3.0, 3.0)
SPEC = WavepacketSpec(0.2, (0.0, 0.0), GaussianProfile(1.0))
SIGMA = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])


def flat(B, t_max=1.0):
    field = make_potential("constant", B0=B)
    return build_track(make_wall("flat"), field, (0.0, 0.0), t_max, 0.01), field


def test_grid_geometry():
    g = GridSpec(4, 8, 0.0, 2.0, -1.0, 1.0)
    x, y = g.axes()
    np.testing.assert_allclose(x, [0.0, 0.5, 1.0, 1.5])
    assert g.hy == 0.25 and g.cell == 0.125
    with pytest.raises(ValueError):
        GridSpec(2, 8, 0.0, 1.0, 0.0, 1.0)


def test_spin_rotation_special_cases():
    U3, U2 = spin_rotations(0.0, math.pi)
    np.testing.assert_allclose(U3, np.eye(2))
    np.testing.assert_allclose(U2, [[0, -1], [1, 0]], atol=1e-15)


@pytest.mark.parametrize("phi", np.linspace(0, 2 * math.pi, 9))
def test_magnetic_tilt_conjugates_to_sigma3(phi):
    _, U2 = spin_rotations(0.0, phi)
    tilt = math.sin(phi) * SIGMA[0] + math.cos(phi) * SIGMA[2]
    np.testing.assert_allclose(U2.conj().T @ tilt @ U2, SIGMA[2], atol=1e-14)


def test_spinor_direction_is_unit_times_sqrt2():
    v = spinor_direction(1.3, 0.4)
    assert np.linalg.norm(v) == pytest.approx(math.sqrt(2))


def test_gauge_phase_vanishes_on_flat_landau_gauge():
    track, field = flat(1.0)
    x1, x2 = GRID.mesh()
    for t in (0.0, 0.5):
        chi = gauge_phase_quadratic(track, field, t, x1, x2)
        np.testing.assert_allclose(chi, 0.0, atol=1e-12)


def test_gauge_phase_zero_potential():
    track = build_track(make_wall("circle_quadratic"), ZERO_POTENTIAL, (1.0, 0.0), 1.0, 0.01)
    x1, x2 = GRID.mesh()
    np.testing.assert_allclose(gauge_phase_quadratic(track, None, 0.6, x1, x2), 0.0)


def test_gauge_phase_aharonov_bohm_loop():
    Phi = 2 * math.pi
    field = make_potential("flux_line", Phi=Phi)
    track = build_track(make_wall("circle_quadratic"), field, (1.0, 0.0), 2 * math.pi, 0.005)
    for frac in (0.25, 0.5, 1.0):
        t = frac * 2 * math.pi
        s = track.at(t)
        assert gauge_phase_quadratic(track, field, t, s.y[0], s.y[1]) == pytest.approx(
            Phi * frac, abs=1e-8)


def test_gauge_hessian_is_symmetric():
    field = make_potential("circle_constant", B0=0.7)
    track = build_track(make_wall("circle_quadratic"), field, (1.0, 0.0), 1.0, 0.01)
    s = track.at(0.4)
    H = field.jacobian(s.y) - s.B * np.outer(s.n, s.tau)
    np.testing.assert_allclose(H, H.T, atol=1e-12)


@pytest.mark.parametrize("B", [0.0, 1.0, 2.0])
def test_flat_leading_order_equals_exact(B):
    track, field = flat(B)
    for t in (0.0, 0.5, 1.0):
        a = assemble_leading_order(SPEC, track, t, GRID, field=field)
        b = exact_flat_solution(B, SPEC, t, GRID)
        assert l2_error(a, b) < 1e-8


def test_field_free_flat_profile():
    track = build_track(make_wall("flat"), ZERO_POTENTIAL, (0.0, 0.0), 1.0, 0.01)
    psi = assemble_leading_order(SPEC, track, 0.0, GRID, field=ZERO_POTENTIAL)
    x1, x2 = GRID.mesh()
    eps = SPEC.epsilon
    expected = (4 * math.pi) ** -0.25 * np.exp(-(x1**2 + x2**2) / (2 * eps)) / math.sqrt(eps)
    np.testing.assert_allclose(psi.values[..., 0], expected, atol=1e-12)
    np.testing.assert_allclose(psi.values[..., 1], -expected, atol=1e-12)


def test_leading_order_norm_constant_on_circle():
    field = make_potential("circle_constant", B0=1 / math.sqrt(2))
    track = build_track(make_wall("circle_quadratic"), field, (1.0, 0.0), 2.0, 0.01)
    grid = GridSpec(192, 192, -2.5, 2.5, -2.5, 2.5)
    spec = WavepacketSpec(0.05, (1.0, 0.0), GaussianProfile(1.0))
    norms = [assemble_leading_order(spec, track, t, grid, field=field).norm() for t in (0, 1, 2)]
    np.testing.assert_allclose(norms, GaussianProfile(1.0).l2_norm(), rtol=1e-6)


def test_window_error_when_packet_does_not_fit():
    track, field = flat(1.0)
    tight = GridSpec(64, 64, -0.5, 0.5, -0.5, 0.5)
    with pytest.raises(WindowError):
        assemble_leading_order(SPEC, track, 0.0, tight, field=field)


@pytest.mark.parametrize("B, speed", [(0.0, 1.0), (2.0, 1 / math.sqrt(5)), (1.0, 1 / math.sqrt(2))])
def test_exact_solution_moves_at_slowdown_speed(B, speed):
    for t in (0.0, 0.5, 1.0):
        com = center_of_mass(exact_flat_solution(B, SPEC, t, GRID))
        np.testing.assert_allclose(com, [-speed * t, 0.0], atol=2 * GRID.hx)


def test_spinor_grid_shape_checked():
    with pytest.raises(ValueError):
        SpinorGrid(grid=GRID, values=np.zeros((3, 3, 2)))
