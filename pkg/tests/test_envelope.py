import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dirac_edge.coefficients import ZERO_POTENTIAL, build_track
from dirac_edge.envelope import (GaussianProfile, SampledProfile, WavepacketSpec, bound_constant,
                                 envelope_numeric, envelope_scalar_numeric,
                                 gaussian_envelope_closed_form, gaussian_envelope_scalar,
                                 hermite_ground, kernel_residual, sup_amplitude_bound,
                                 transport_profile, transport_residual, xi_quadrature_grid)
from dirac_edge.errors import GridResolutionError
from dirac_edge.presets import make_potential, make_wall

SQRT2 = math.sqrt(2)
FLAT1 = build_track(make_wall("flat"), make_potential("constant", B0=1.0), (0.0, 0.0), 1.0, 0.01)
CIRCLE = build_track(make_wall("circle_quadratic"), make_potential("circle_constant", B0=1 / SQRT2),
                     (1.0, 0.0), 1.0, 0.01)
LONG_CIRCLE = build_track(make_wall("circle_quadratic"),
                          make_potential("circle_constant", B0=1 / SQRT2), (1.0, 0.0), 40.0, 0.02)
SPEC = WavepacketSpec(0.1, (0.0, 0.0), GaussianProfile(1.0))


def test_hermite_ground_value_and_normalization():
    np.testing.assert_allclose(hermite_ground(1.0, 0.0), (4 * math.pi) ** -0.25 * np.array([1, -1]))
    assert (4 * math.pi) ** -0.25 == pytest.approx(0.5311, abs=1e-4)


@given(st.floats(0.2, 5.0))
def test_hermite_ground_normalized(rho):
    zeta = np.linspace(-40, 40, 16001)
    phi = hermite_ground(rho, zeta)
    assert np.trapezoid(np.sum(phi**2, axis=1), zeta) == pytest.approx(1.0, abs=1e-10)
    far = zeta[np.abs(zeta) > 10 / math.sqrt(rho)]
    assert np.all(hermite_ground(rho, far)[:, 0] < 1e-15)


def test_transport_profile_initial_and_flat():
    xi = np.linspace(-6, 6, 101)
    np.testing.assert_array_equal(transport_profile(SPEC, CIRCLE, 0.0, xi), SPEC.profile(xi))
    np.testing.assert_allclose(transport_profile(SPEC, FLAT1, 0.7, xi), SPEC.profile(xi), atol=1e-12)


@given(st.floats(0.0, 1.0))
def test_transport_profile_modulus(t):
    xi = np.linspace(-6, 6, 101)
    s = CIRCLE.at(t)
    lhs = np.abs(transport_profile(SPEC, CIRCLE, t, xi))
    rhs = math.exp(s.mu / 2) * np.abs(SPEC.profile(math.exp(s.mu) * xi))
    np.testing.assert_allclose(lhs, rhs, atol=1e-14)


@given(st.floats(0.0, 40.0), st.floats(0.3, 3.0))
def test_transport_profile_unitary(t, sigma):
    spec = WavepacketSpec(0.1, (1.0, 0.0), GaussianProfile(sigma))
    xi = np.linspace(-30, 30, 24001)
    f = transport_profile(spec, LONG_CIRCLE, t, xi)
    assert math.sqrt(np.trapezoid(np.abs(f) ** 2, xi)) == pytest.approx(
        spec.profile.l2_norm(), abs=1e-10)


def test_transport_residual_flat_vanishes():
    assert transport_residual(SPEC, FLAT1, 0.5, np.linspace(-8, 8, 321)) < 1e-10


def _residual_at(dt, dxi, t=1.0):
    tr = build_track(make_wall("circle_quadratic"), make_potential("circle_constant", B0=1 / SQRT2),
                     (1.0, 0.0), 1.2, dt)
    xi = np.arange(-8.0, 8.0 + dxi / 2, dxi)
    return transport_residual(SPEC, tr, t, xi)


@pytest.mark.parametrize("t", [0.0, 1.0])
def test_transport_residual_converges(t):
    coarse = _residual_at(0.04, 0.2, t)
    fine = _residual_at(0.02, 0.1, t)
    assert coarse / fine >= 3.5


def test_flat_closed_form_matches_explicit_formula():
    s = FLAT1.at(0.4)
    sigma = 1.0
    z1, z2 = np.meshgrid(np.linspace(-4, 4, 41), np.linspace(-3, 3, 31), indexing="ij")
    Q = sigma + s.rho * s.gamma**2
    expected = ((s.rho / (4 * math.pi)) ** 0.25 / np.sqrt(Q)
                * np.exp(-(s.rho * z2**2 + (z1 + 1j * s.s * z2) ** 2 / Q) / 2))
    np.testing.assert_allclose(gaussian_envelope_scalar(sigma, s, None, z1, z2), expected,
                               rtol=1e-13, atol=1e-15)
    z = np.stack([z1, z2], axis=-1)
    np.testing.assert_allclose(gaussian_envelope_closed_form(sigma, s, None, z)[..., 1], -expected,
                               rtol=1e-13, atol=1e-15)


def test_field_free_closed_form_is_isotropic_gaussian():
    tr = build_track(make_wall("flat"), ZERO_POTENTIAL, (0.0, 0.0), 0.1, 0.01)
    z1, z2 = np.meshgrid(np.linspace(-4, 4, 9), np.linspace(-4, 4, 9), indexing="ij")
    got = gaussian_envelope_scalar(1.0, tr, 0.0, z1, z2)
    np.testing.assert_allclose(got, (4 * math.pi) ** -0.25 * np.exp(-(z1**2 + z2**2) / 2))


@pytest.mark.parametrize("track", [FLAT1, CIRCLE], ids=["flat", "circle"])
@pytest.mark.parametrize("t", [0.0, 0.5, 1.0])
def test_closed_form_matches_quadrature(track, t):
    z1 = np.linspace(-6, 6, 49)
    z2 = np.linspace(-5, 5, 41)
    num = envelope_numeric(SPEC, track, t, z1, z2).values
    Z1, Z2 = np.meshgrid(z1, z2, indexing="ij")
    closed = gaussian_envelope_scalar(1.0, track, t, Z1, Z2)
    assert np.max(np.abs(num - closed)) / np.max(np.abs(closed)) < 1e-8


def test_zero_profile_gives_zero_field():
    xi = np.linspace(-5, 5, 11)
    spec = WavepacketSpec(0.1, (0.0, 0.0), SampledProfile(xi, np.zeros(11)))
    field = envelope_numeric(spec, CIRCLE, 0.5, np.linspace(-3, 3, 7), np.linspace(-3, 3, 7))
    assert np.all(field.values == 0)


@pytest.mark.parametrize("t", [0.0, 0.5, 1.0])
def test_envelope_transform_is_unitary(t):
    z1 = np.linspace(-12, 12, 241)
    z2 = np.linspace(-10, 10, 201)
    field = envelope_numeric(SPEC, CIRCLE, t, z1, z2)
    # the transverse spinor profile has unit norm, so the transform preserves ||fhat||
    assert field.norm() == pytest.approx(SPEC.profile.l2_norm(), rel=1e-8)


def test_sampled_profile_matches_gaussian():
    xi = np.linspace(-9, 9, 1801)
    sampled = WavepacketSpec(0.1, (0.0, 0.0), SampledProfile(xi, np.exp(-xi**2 / 2)))
    z = np.linspace(-4, 4, 17)
    Z1, Z2 = np.meshgrid(z, z, indexing="ij")
    got = envelope_scalar_numeric(sampled, CIRCLE, 0.5, Z1, Z2)
    np.testing.assert_allclose(got, gaussian_envelope_scalar(1.0, CIRCLE, 0.5, Z1, Z2), atol=1e-8)


def test_sampled_profile_validation():
    xi = np.linspace(-1, 1, 5)
    with pytest.raises(ValueError):
        SampledProfile(xi, np.ones(5))
    with pytest.raises(ValueError):
        SampledProfile(xi[::-1], np.zeros(5))


def test_quadrature_grid_nyquist_check():
    s = LONG_CIRCLE.at(40.0)
    with pytest.raises(GridResolutionError):
        xi_quadrature_grid(SPEC, s, 10.0, n_xi=50)
    assert len(xi_quadrature_grid(SPEC, s, 10.0)) > 50


def test_kernel_property():
    xi = np.linspace(-8, 8, 161)
    zeta = np.linspace(-12, 12, 256, endpoint=False)
    for t in (0.0, 0.5, 1.0):
        assert kernel_residual(CIRCLE, t, SPEC, xi, zeta) < 1e-8


def test_bound_constant_in_t_for_flat():
    g = GaussianProfile(1.0)
    values = [sup_amplitude_bound(FLAT1, t, g.spatial_l1_norm(), g.l1_norm()) for t in (0, 0.5, 1)]
    np.testing.assert_allclose(values, values[0])


def test_bound_decays_like_inverse_sqrt_time():
    g = GaussianProfile(1.0)
    b20 = sup_amplitude_bound(LONG_CIRCLE, 20.0, g.spatial_l1_norm(), g.l1_norm())
    b40 = sup_amplitude_bound(LONG_CIRCLE, 40.0, g.spatial_l1_norm(), g.l1_norm())
    assert b20 / b40 == pytest.approx(SQRT2, rel=1e-6)


@pytest.mark.parametrize("t", [0.0, 2.0, 5.0, 10.0, 20.0, 40.0])
def test_measured_amplitude_below_bound(t):
    g = GaussianProfile(1.0)
    z1 = np.linspace(-40, 40, 801)
    z2 = np.linspace(-6, 6, 121)
    Z1, Z2 = np.meshgrid(z1, z2, indexing="ij")
    peak = np.max(np.abs(gaussian_envelope_scalar(1.0, LONG_CIRCLE, t, Z1, Z2)))
    assert peak <= sup_amplitude_bound(LONG_CIRCLE, t, g.spatial_l1_norm(), g.l1_norm())
    assert bound_constant(LONG_CIRCLE, t) > 0


def test_amplitude_times_sqrt_nu_is_bounded():
    z1 = np.linspace(-40, 40, 1601)
    z2 = np.linspace(-6, 6, 121)
    Z1, Z2 = np.meshgrid(z1, z2, indexing="ij")
    products = []
    for t in np.linspace(5, 40, 8):
        s = LONG_CIRCLE.at(t)
        if s.nu <= 5:
            continue
        peak = np.max(np.abs(gaussian_envelope_scalar(1.0, s, None, Z1, Z2)))
        products.append(peak * math.sqrt(s.nu))
    assert len(products) >= 4
    assert max(products) / min(products) < 1.5
