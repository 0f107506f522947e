"""Transverse ground state, transported longitudinal profile, and the sheared Fourier envelope.

The envelope is a scalar times the fixed spinor direction (1, -1). Functions named
``*_scalar`` return that scalar; the spinor-valued variants append the direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .coefficients import CoefficientTrack, TrackSample
from .errors import GridResolutionError

SPINOR = np.array([1.0, -1.0])
TRUNCATION = 1e-14


@dataclass(frozen=True)
class GaussianProfile:
    """fhat(xi) = exp(-sigma xi^2 / 2)."""

    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def __call__(self, xi):
        return np.exp(-0.5 * self.sigma * np.asarray(xi, dtype=float) ** 2).astype(complex)

    def support(self) -> float:
        return math.sqrt(2 * math.log(1 / TRUNCATION) / self.sigma)

    def l2_norm(self) -> float:
        return (math.pi / self.sigma) ** 0.25

    def l1_norm(self) -> float:
        return math.sqrt(2 * math.pi / self.sigma)

    def spatial_l1_norm(self) -> float:
        # inverse transform is sigma^(-1/2) exp(-y^2 / (2 sigma))
        return math.sqrt(2 * math.pi)


@dataclass(frozen=True)
class SampledProfile:
    """Complex samples of fhat on an increasing xi grid; zero outside the grid."""

    xi: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if xi.ndim != 1 or xi.shape != v.shape or len(xi) < 4 or np.any(np.diff(xi) <= 0):
            raise ValueError("sampled profile needs an increasing grid and matching values")
        if max(abs(v[0]), abs(v[-1])) > 1e-12 * max(1.0, float(np.max(np.abs(v)))):
            raise ValueError("sampled profile must decay below 1e-12 at the grid ends")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_re", CubicSpline(xi, v.real))
        object.__setattr__(self, "_im", CubicSpline(xi, v.imag))

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        inside = (xi >= self.xi[0]) & (xi <= self.xi[-1])
        return np.where(inside, self._re(xi) + 1j * self._im(xi), 0.0)

    def support(self) -> float:
        big = np.nonzero(np.abs(self.values) >= TRUNCATION)[0]
        if len(big) == 0:
            return 0.0
        return float(max(abs(self.xi[big[0]]), abs(self.xi[big[-1]])))

    def l2_norm(self) -> float:
        return math.sqrt(float(np.trapezoid(np.abs(self.values) ** 2, self.xi)))

    def l1_norm(self) -> float:
        return float(np.trapezoid(np.abs(self.values), self.xi))

    def spatial_l1_norm(self, n: int = 4096) -> float:
        span = self.xi[-1] - self.xi[0]
        dxi = float(np.min(np.diff(self.xi)))
        y_max = math.pi / dxi
        y = np.linspace(-y_max, y_max, n)
        xi = np.linspace(self.xi[0], self.xi[-1], max(n, int(4 * span / dxi)))
        fhat = self(xi)
        f = np.array([np.trapezoid(np.exp(1j * yy * xi) * fhat, xi) for yy in y]) / math.sqrt(2 * math.pi)
        return float(np.trapezoid(np.abs(f), y))


Profile = GaussianProfile | SampledProfile


@dataclass(frozen=True)
class WavepacketSpec:
    epsilon: float
    y0: tuple[float, float]
    profile: Profile = GaussianProfile()

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")


@dataclass
class EnvelopeField:
    """Scalar envelope on a grid; the full spinor is values * (1, -1) when ``spinor`` is set."""

    coords: tuple[np.ndarray, np.ndarray]
    values: np.ndarray
    spinor: bool = True

    def norm(self) -> float:
        a, b = self.coords
        da = float(a[1] - a[0]) if a.ndim == 1 else float(a[1, 0] - a[0, 0])
        db = float(b[1] - b[0]) if b.ndim == 1 else float(b[0, 1] - b[0, 0])
        weight = 2.0 if self.spinor else 1.0
        return math.sqrt(weight * float(np.sum(np.abs(self.values) ** 2)) * da * db)


def _sample(track: CoefficientTrack | TrackSample, t: float | None) -> TrackSample:
    return track if isinstance(track, TrackSample) else track.at(t)


def hermite_ground_scalar(rho: float, zeta):
    return (rho / (4 * math.pi)) ** 0.25 * np.exp(-0.5 * rho * np.asarray(zeta, dtype=float) ** 2)


def hermite_ground(rho: float, zeta):
    """Normalized kernel profile (rho / 4pi)^(1/4) exp(-rho zeta^2 / 2) (1, -1)."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    return hermite_ground_scalar(rho, zeta)[..., None] * SPINOR


def transport_profile(spec: WavepacketSpec, track, t, xi):
    s = _sample(track, t)
    scale = math.exp(s.mu)
    u = scale * np.asarray(xi, dtype=float)
    phase = np.exp(1j * s.lam + 0.5j * s.nu * u**2)
    return phase * math.sqrt(scale) * spec.profile(u)


def _d1_4th(values: np.ndarray, h: float, axis: int = -1) -> np.ndarray:
    """Fourth-order first derivative; one-sided stencils at the two ends."""
    f = np.moveaxis(np.asarray(values), axis, -1)
    out = np.empty_like(f)
    out[..., 2:-2] = (f[..., :-4] - 8 * f[..., 1:-3] + 8 * f[..., 3:-1] - f[..., 4:]) / (12 * h)
    fwd = np.array([-25, 48, -36, 16, -3]) / (12 * h)
    out[..., 0] = f[..., :5] @ fwd
    out[..., 1] = f[..., :5] @ (np.array([-3, -10, 18, -6, 1]) / (12 * h))
    out[..., -1] = -(f[..., -5:][..., ::-1] @ fwd)
    out[..., -2] = -(f[..., -5:][..., ::-1] @ (np.array([-3, -10, 18, -6, 1]) / (12 * h)))
    return np.moveaxis(out, -1, axis)


def transport_residual(spec: WavepacketSpec, track: CoefficientTrack, t: float, xi_grid) -> float:
    """Max-norm of the transport operator applied to the transported profile.

    Time derivatives use the track's own samples around ``t`` (which must be a
    sample time), xi derivatives use ``xi_grid``; both are fourth-order.
    """
    xi = np.asarray(xi_grid, dtype=float)
    idx = int(np.argmin(np.abs(track.t - t)))
    n = len(track.t)
    if n < 5:
        raise ValueError("need at least five track samples")
    lo = min(max(idx - 2, 0), n - 5)
    window = np.arange(lo, lo + 5)
    dt = float(track.t[1] - track.t[0])
    f_t = np.array([transport_profile(spec, track, float(track.t[i]), xi) for i in window])
    dfdt = _d1_4th(f_t, dt, axis=0)[idx - lo]
    f = f_t[idx - lo]
    dfdxi = _d1_4th(f, float(xi[1] - xi[0]))

    s = track.at(float(track.t[idx]))
    Dt = -1j * dfdt
    xi_D = -1j * xi * dfdxi
    residual = (Dt - s.k / (2 * s.rho) * f
                - 0.5 * s.j * s.gamma * (2 * xi_D - 1j * f)
                - (s.thetadot * s.gamma + s.k * s.gamma**2) * xi**2 * f)
    return float(np.max(np.abs(residual)))


def _q_sigma(sigma: float, s: TrackSample) -> complex:
    e2 = math.exp(2 * s.mu)
    return complex(e2 * sigma + s.s * s.gamma, -e2 * s.nu)


def gaussian_envelope_scalar(sigma: float, track, t, z1, z2):
    s = _sample(track, t)
    Q = _q_sigma(sigma, s)
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    pref = (s.rho / (4 * math.pi)) ** 0.25 * math.exp(0.5 * s.mu) / np.sqrt(Q) * np.exp(1j * s.lam)
    return pref * np.exp(-0.5 * s.rho * z2**2 - (z1 + 1j * s.s * z2) ** 2 / (2 * Q))


def gaussian_envelope_closed_form(sigma: float, track, t, z):
    """Closed-form sheared envelope for a Gaussian profile at points z[..., 2]."""
    z = np.asarray(z, dtype=float)
    return gaussian_envelope_scalar(sigma, track, t, z[..., 0], z[..., 1])[..., None] * SPINOR


def xi_quadrature_grid(spec: WavepacketSpec, s: TrackSample, z1_max: float,
                       n_xi: int | None = None) -> np.ndarray:
    scale = math.exp(s.mu)
    xi_max = spec.profile.support() / scale
    if xi_max == 0:
        return np.zeros(1)
    rate = z1_max + abs(s.nu) * scale**2 * xi_max
    if n_xi is None:
        decay = 72.0 / xi_max + 9.0 * math.sqrt(s.rho) * abs(s.gamma)
        dxi = math.pi / (rate + decay)
        n_xi = int(math.ceil(2 * xi_max / dxi)) + 1
    xi = np.linspace(-xi_max, xi_max, n_xi)
    dxi = float(xi[1] - xi[0]) if n_xi > 1 else 0.0
    if dxi * rate >= math.pi:
        raise GridResolutionError(
            f"xi spacing {dxi:.3e} cannot resolve phase gradient {rate:.3e} (Nyquist)")
    return xi


def envelope_scalar_numeric(spec: WavepacketSpec, track, t, z1, z2, n_xi: int | None = None,
                            chunk: int = 4096):
    """Trapezoid quadrature of the sheared Fourier transform at arbitrary points."""
    s = _sample(track, t)
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    z1, z2 = np.broadcast_arrays(z1, z2)
    shape = z1.shape
    z1f, z2f = z1.ravel(), z2.ravel()
    z1_max = float(np.max(np.abs(z1f))) if z1f.size else 0.0
    xi = xi_quadrature_grid(spec, s, z1_max, n_xi)
    out = np.zeros(z1f.shape, dtype=complex)
    if len(xi) < 2:
        return out.reshape(shape)
    f0 = transport_profile(spec, s, None, xi)
    keep = np.abs(f0) >= TRUNCATION
    xi, w = xi[keep], f0[keep] * (xi[1] - xi[0]) / math.sqrt(2 * math.pi)
    for lo in range(0, z1f.size, chunk):
        a, b = z1f[lo:lo + chunk, None], z2f[lo:lo + chunk, None]
        kern = np.exp(1j * a * xi - 0.5 * s.rho * (b + s.gamma * xi) ** 2)
        out[lo:lo + chunk] = kern @ w
    return (s.rho / (4 * math.pi)) ** 0.25 * out.reshape(shape)


def envelope_numeric(spec: WavepacketSpec, track, t, z1_grid, z2_grid,
                     n_xi: int | None = None) -> EnvelopeField:
    z1, z2 = np.meshgrid(np.asarray(z1_grid, float), np.asarray(z2_grid, float), indexing="ij")
    values = envelope_scalar_numeric(spec, track, t, z1, z2, n_xi)
    return EnvelopeField(coords=(np.asarray(z1_grid, float), np.asarray(z2_grid, float)),
                         values=values)


def bound_constant(track, t) -> float:
    s = _sample(track, t)
    return (s.rho / (4 * math.pi)) ** 0.25 * math.exp(-0.5 * s.mu) / math.sqrt(2 * math.pi)


def sup_amplitude_bound(track, t, f_l1_norm: float, fhat_l1_norm: float) -> float:
    """Upper bound on the envelope amplitude (per spinor component).

    Both branches share the constant (rho/4pi)^(1/4) e^(-mu/2) / sqrt(2 pi): the
    first follows from writing the envelope as a convolution of the spatial
    profile with the Gaussian kernel whose peak value fixes the constant.
    """
    s = _sample(track, t)
    C = bound_constant(s, None)
    trivial = C * fhat_l1_norm
    if s.nu == 0:
        return trivial
    return min(C * f_l1_norm / math.sqrt(abs(s.nu)), trivial)


def kernel_residual(track, t, spec: WavepacketSpec, xi, zeta) -> float:
    """L2 norm of c(1+sigma1) xi a + sigma2 D_zeta a + rho zeta sigma3 a on a (xi, zeta) grid.

    ``zeta`` must be uniform; the zeta derivative is spectral.
    """
    s = _sample(track, t)
    xi = np.asarray(xi, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    f = transport_profile(spec, s, None, xi)
    phi = hermite_ground_scalar(s.rho, zeta)
    a = f[:, None] * phi[None, :]
    a1, a2 = a, -a
    dz = float(zeta[1] - zeta[0])
    k = 2 * math.pi * np.fft.fftfreq(len(zeta), d=dz)

    def D(u):
        return np.fft.ifft(k * np.fft.fft(u, axis=1), axis=1)

    X = xi[:, None]
    Z = zeta[None, :]
    # c(1 + sigma1) xi
    r1 = s.c * X * (a1 + a2)
    r2 = s.c * X * (a2 + a1)
    # sigma2 D: sigma2 = [[0, -i], [i, 0]]
    r1 = r1 - 1j * D(a2)
    r2 = r2 + 1j * D(a1)
    # rho zeta sigma3
    r1 = r1 + s.rho * Z * a1
    r2 = r2 - s.rho * Z * a2
    cell = float(xi[1] - xi[0]) * dz
    return math.sqrt(float(np.sum(np.abs(r1) ** 2 + np.abs(r2) ** 2)) * cell)
