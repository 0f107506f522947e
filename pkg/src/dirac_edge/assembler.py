"""Leading-order wavepacket on the physical grid, and the exact flat-wall solution."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientTrack, MagneticPotential, TrackSample
from .envelope import (SPINOR, GaussianProfile, WavepacketSpec, envelope_scalar_numeric,
                       gaussian_envelope_scalar)
from .errors import WindowError
from .geometry import rotation

WINDOW_TOL = 1e-8


@dataclass(frozen=True)
class GridSpec:
    """Periodic uniform grid: x = x0 + i (x1 - x0) / nx, i = 0..nx-1 (likewise y)."""

    nx: int
    ny: int
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if self.nx < 4 or self.ny < 4 or not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError(f"invalid grid {self}")

    @property
    def hx(self) -> float:
        return (self.x1 - self.x0) / self.nx

    @property
    def hy(self) -> float:
        return (self.y1 - self.y0) / self.ny

    @property
    def cell(self) -> float:
        return self.hx * self.hy

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (self.x0 + self.hx * np.arange(self.nx), self.y0 + self.hy * np.arange(self.ny))

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij")


@dataclass
class SpinorGrid:
    grid: GridSpec
    values: np.ndarray  # (nx, ny, 2) complex
    t: float = 0.0
    epsilon: float = 1.0

    def __post_init__(self):
        if self.values.shape != (self.grid.nx, self.grid.ny, 2):
            raise ValueError(f"values shape {self.values.shape} does not match {self.grid}")

    @property
    def nx(self) -> int:
        return self.grid.nx

    @property
    def ny(self) -> int:
        return self.grid.ny

    def density(self) -> np.ndarray:
        return np.sum(np.abs(self.values) ** 2, axis=-1)

    def norm(self) -> float:
        return math.sqrt(float(np.sum(self.density())) * self.grid.cell)


def spin_rotations(theta: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """U3 = exp(-i theta sigma3 / 2) and U2 = exp(-i phi sigma2 / 2)."""
    U3 = np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    c, s = math.cos(0.5 * phi), math.sin(0.5 * phi)
    U2 = np.array([[c, -s], [s, c]], dtype=complex)
    return U3, U2


def spinor_direction(theta: float, phi: float) -> np.ndarray:
    """U3 U2 (1, -1): the frame rotation acts after the magnetic tilt."""
    U3, U2 = spin_rotations(theta, phi)
    return U3 @ U2 @ SPINOR


def gauge_phase_quadratic(track, field: MagneticPotential | None, t, x1, x2,
                          q: float = 0.5):
    """Quadratic jet of the gauge phase around the center y_t.

    line integral of A along the trajectory + A(y).d + q d.(grad A - B n tau^T).d
    with d = x - y and grad A[j, k] = d_j A_k.
    """
    s = track if isinstance(track, TrackSample) else track.at(t)
    if field is not None:
        A, H = field.potential(s.y), field.jacobian(s.y)
    else:
        A, H = s.A, s.grad_A
    H = H - s.B * np.outer(s.n, s.tau)
    d1 = np.asarray(x1, dtype=float) - s.y[0]
    d2 = np.asarray(x2, dtype=float) - s.y[1]
    quad = H[0, 0] * d1 * d1 + (H[0, 1] + H[1, 0]) * d1 * d2 + H[1, 1] * d2 * d2
    return s.line_integral + A[0] * d1 + A[1] * d2 + q * quad


def _check_window(values: np.ndarray, grid: GridSpec, expected: float) -> None:
    mass = float(np.sum(np.abs(values) ** 2)) * grid.cell
    if expected > 0 and abs(expected - mass) > WINDOW_TOL * expected:
        raise WindowError(
            f"wavepacket mass on grid {mass:.12g} differs from {expected:.12g}; "
            "the packet does not fit inside the grid")


def assemble_leading_order(spec: WavepacketSpec, track: CoefficientTrack, t: float,
                           grid: GridSpec, q: float = 0.5,
                           field: MagneticPotential | None = None,
                           check_window: bool = True) -> SpinorGrid:
    s = track.at(t)
    eps = spec.epsilon
    X1, X2 = grid.mesh()
    root = math.sqrt(eps)
    z1, z2 = (X1 - s.y[0]) / root, (X2 - s.y[1]) / root
    R = rotation(s.theta)
    w1 = R[0, 0] * z1 + R[0, 1] * z2
    w2 = R[1, 0] * z1 + R[1, 1] * z2
    if isinstance(spec.profile, GaussianProfile):
        env = gaussian_envelope_scalar(spec.profile.sigma, s, None, w1, w2)
    else:
        env = envelope_scalar_numeric(spec, s, None, w1, w2)
    chi = gauge_phase_quadratic(s, field, None, X1, X2, q)
    scalar = env * np.exp(1j * chi / eps) / root
    values = scalar[..., None] * spinor_direction(s.theta, s.phi)
    if check_window:
        _check_window(values, grid, spec.profile.l2_norm() ** 2)
    return SpinorGrid(grid=grid, values=values, t=float(t), epsilon=eps)


def flat_sample(B: float, t: float = 0.0) -> TrackSample:
    """Coefficients of the straight wall kappa = x2 with A = -B x2 e1."""
    rho = math.hypot(1.0, B)
    c = 1.0 / rho
    phi = math.atan2(B, 1.0) % (2 * math.pi)
    return TrackSample(
        t=t, y=np.array([-c * t, 0.0]), n=np.array([0.0, 1.0]), tau=np.array([-1.0, 0.0]),
        theta=0.0, r=1.0, B=B, rho=rho, gamma=B / rho**2, c=c, s=B / rho, phi=phi,
        thetadot=0.0, j=0.0, k=0.0, lam=0.0, mu=0.0, nu=0.0, A=np.zeros(2),
        grad_A=np.array([[0.0, 0.0], [-B, 0.0]]), line_integral=0.0,
    )


def exact_flat_solution(B: float, spec: WavepacketSpec, t: float, grid: GridSpec) -> SpinorGrid:
    """Exact non-dispersive solution on the straight wall, translated at speed c along tau = -e1.

    Normalized like the leading-order packet, so its L2 norm is that of fhat.
    """
    s = flat_sample(B, t)
    X1, X2 = grid.mesh()
    root = math.sqrt(spec.epsilon)
    z1, z2 = (X1 - s.y[0]) / root, (X2 - s.y[1]) / root
    env = envelope_scalar_numeric(spec, s, None, z1, z2)
    _, U2 = spin_rotations(0.0, s.phi)
    values = (env / root)[..., None] * (U2 @ SPINOR)
    return SpinorGrid(grid=grid, values=values, t=float(t), epsilon=spec.epsilon)
