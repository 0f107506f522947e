"""Domain walls, the interface frame, and the trajectory of the wavepacket center.

A domain wall is a scalar mass function kappa whose zero set is the interface.
Evaluators are vectorized: they take coordinate arrays ``x1, x2`` of any
(broadcastable) shape so the same objects drive both pointwise geometry and
full-grid PDE potentials.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateGradient, DriftWarning, InvalidWall, ProjectionFailed

GRAD_TOL = 1e-8
PROJECTION_TOL = 1e-10
DRIFT_TOL = 1e-6

# quarter turn, tau = J n
J = np.array([[0.0, -1.0], [1.0, 0.0]])

ScalarFn = Callable[[np.ndarray, np.ndarray], np.ndarray]
VectorFn = Callable[[np.ndarray, np.ndarray], tuple]


def fd_step(x: np.ndarray) -> float:
    return 1e-5 * (1.0 + float(np.hypot(x[0], x[1])))


@dataclass(frozen=True)
class DomainWall:
    """Evaluator bundle for kappa and its derivatives.

    ``grad_kappa`` returns ``(g1, g2)``, ``hessian_kappa`` returns
    ``(h11, h12, h22)``. Missing derivatives fall back to centered differences.
    """

    kappa: ScalarFn
    grad_kappa: VectorFn | None = None
    laplacian_kappa: ScalarFn | None = None
    hessian_kappa: VectorFn | None = None
    name: str = "custom"

    def value(self, x: np.ndarray) -> float:
        return float(self.kappa(x[0], x[1]))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        if self.grad_kappa is not None:
            g = self.grad_kappa(x[0], x[1])
            return np.array([float(g[0]), float(g[1])])
        h = fd_step(x)
        k = self.kappa
        return np.array([
            (k(x[0] + h, x[1]) - k(x[0] - h, x[1])) / (2 * h),
            (k(x[0], x[1] + h) - k(x[0], x[1] - h)) / (2 * h),
        ])

    def hessian(self, x: np.ndarray) -> np.ndarray:
        if self.hessian_kappa is not None:
            h11, h12, h22 = self.hessian_kappa(x[0], x[1])
            return np.array([[float(h11), float(h12)], [float(h12), float(h22)]])
        # differentiate the gradient; nested differences need a coarser step
        h = fd_step(x) if self.grad_kappa is not None else 100 * fd_step(x)
        e1, e2 = np.array([h, 0.0]), np.array([0.0, h])
        c1 = (self.gradient(x + e1) - self.gradient(x - e1)) / (2 * h)
        c2 = (self.gradient(x + e2) - self.gradient(x - e2)) / (2 * h)
        off = 0.5 * (c1[1] + c2[0])
        return np.array([[c1[0], off], [off, c2[1]]])

    def laplacian(self, x: np.ndarray) -> float:
        if self.laplacian_kappa is not None:
            return float(self.laplacian_kappa(x[0], x[1]))
        return float(np.trace(self.hessian(x)))


@dataclass(frozen=True)
class FramePoint:
    t: float
    y: np.ndarray
    n: np.ndarray
    tau: np.ndarray
    theta: float
    curvature: float


def rotation(theta: float) -> np.ndarray:
    """Clockwise rotation by theta."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def frame_angle(n: np.ndarray) -> float:
    """Angle in [0, 2pi) with rotation(theta) @ n = e2."""
    theta = math.atan2(-n[0], n[1]) % (2 * math.pi)
    # a tiny negative angle rounds up to exactly 2pi under the modulo
    return 0.0 if theta >= 2 * math.pi else theta


def eval_wall(wall: DomainWall, x) -> tuple[float, np.ndarray, float]:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidWall(f"non-finite evaluation point {x}")
    k, g, lap = wall.value(x), wall.gradient(x), wall.laplacian(x)
    if not (math.isfinite(k) and np.all(np.isfinite(g)) and math.isfinite(lap)):
        raise InvalidWall(f"wall {wall.name!r} produced non-finite values at {x}")
    return k, g, lap


def unit_fields(wall: DomainWall, x) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    g = wall.gradient(x)
    r = float(np.hypot(g[0], g[1]))
    if not r > GRAD_TOL:
        raise DegenerateGradient(f"|grad kappa| = {r:.3e} at {x}")
    n = g / r
    return n, J @ n


def project_to_interface(wall: DomainWall, x0, max_iter: int = 50) -> np.ndarray:
    """Newton iteration along the normal onto the zero set of kappa."""
    y = np.array(x0, dtype=float)
    for _ in range(max_iter):
        k = wall.value(y)
        if abs(k) < PROJECTION_TOL:
            return y
        g = wall.gradient(y)
        r2 = float(g @ g)
        if not r2 > GRAD_TOL**2:
            raise DegenerateGradient(f"|grad kappa| degenerate at {y}")
        y = y - k * g / r2
        if not np.all(np.isfinite(y)):
            break
    if np.all(np.isfinite(y)) and abs(wall.value(y)) < PROJECTION_TOL:
        return y
    raise ProjectionFailed(f"no convergence from {x0} after {max_iter} steps")


def tangential_curvature(wall: DomainWall, y: np.ndarray) -> float:
    """Signed tau . d_tau n, from the Hessian (analytic when the wall supplies it)."""
    g = wall.gradient(y)
    r = float(np.hypot(g[0], g[1]))
    if not r > GRAD_TOL:
        raise DegenerateGradient(f"|grad kappa| = {r:.3e} at {y}")
    tau = J @ (g / r)
    return float(tau @ wall.hessian(y) @ tau) / r


def signed_curvature_fd(wall: DomainWall, y) -> float:
    """tau . d_tau n by a centered difference of n along tau."""
    y = np.asarray(y, dtype=float)
    n, tau = unit_fields(wall, y)
    h = fd_step(y)
    n_plus, _ = unit_fields(wall, y + h * tau)
    n_minus, _ = unit_fields(wall, y - h * tau)
    return float(tau @ (n_plus - n_minus)) / (2 * h)


def curvature(wall: DomainWall, y) -> float:
    return abs(signed_curvature_fd(wall, y))


def _speed(wall: DomainWall, field, y: np.ndarray) -> float:
    g = wall.gradient(y)
    r = float(np.hypot(g[0], g[1]))
    if not r > GRAD_TOL:
        raise DegenerateGradient(f"|grad kappa| = {r:.3e} at {y}")
    b = field.field_at(y) if field is not None else 0.0
    return r / math.hypot(r, b)


def _rhs(wall: DomainWall, field, y: np.ndarray) -> tuple[np.ndarray, float]:
    c = _speed(wall, field, y)
    _, tau = unit_fields(wall, y)
    return c * tau, c * tangential_curvature(wall, y)


def integrate_center(wall: DomainWall, field, y0, t_max: float, dt: float) -> list[FramePoint]:
    """RK4 for the center y and frame angle theta, re-projecting onto the interface each step.

    theta is integrated rather than recomputed with atan2 so it stays continuous
    across full turns; theta_0 is taken in [0, 2pi).
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    n_steps = max(1, int(round(t_max / dt)))
    dt = t_max / n_steps if t_max > 0 else dt

    y = project_to_interface(wall, y0)
    n, _ = unit_fields(wall, y)
    theta = frame_angle(n)
    frames = [_frame(wall, 0.0, y, theta)]
    worst = 0.0
    for i in range(n_steps):
        k1, w1 = _rhs(wall, field, y)
        k2, w2 = _rhs(wall, field, y + 0.5 * dt * k1)
        k3, w3 = _rhs(wall, field, y + 0.5 * dt * k2)
        k4, w4 = _rhs(wall, field, y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        theta += dt / 6 * (w1 + 2 * w2 + 2 * w3 + w4)
        drift = abs(wall.value(y))
        worst = max(worst, drift)
        y = project_to_interface(wall, y)
        frames.append(_frame(wall, (i + 1) * dt, y, theta))
    if worst > DRIFT_TOL:
        warnings.warn(f"trajectory drifted to |kappa| = {worst:.2e} before re-projection",
                      DriftWarning, stacklevel=2)
    return frames


def _frame(wall: DomainWall, t: float, y: np.ndarray, theta: float) -> FramePoint:
    n, tau = unit_fields(wall, y)
    return FramePoint(t=t, y=y.copy(), n=n, tau=tau, theta=theta,
                      curvature=abs(tangential_curvature(wall, y)))
