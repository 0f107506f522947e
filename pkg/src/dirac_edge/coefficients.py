"""Magnetic potentials and the scalar coefficient track along the interface trajectory."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from .errors import ConsistencyError, DegenerateGradient
from .geometry import (GRAD_TOL, DomainWall, FramePoint, fd_step, integrate_center,
                       signed_curvature_fd)


@dataclass(frozen=True)
class MagneticPotential:
    """Evaluator bundle for the vector potential A and the field B = d1 A2 - d2 A1.

    ``grad_A(x1, x2)`` returns nested pairs with ``[j][k] = d_j A_k``. Missing
    ``B``/``grad_B``/``grad_A`` are recovered by centered differences.
    """

    A: Callable
    grad_A: Callable | None = None
    B: Callable | None = None
    grad_B: Callable | None = None
    name: str = "custom"

    def potential(self, x: np.ndarray) -> np.ndarray:
        a = self.A(x[0], x[1])
        return np.array([float(a[0]), float(a[1])])

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """Matrix with entry [j, k] = d_j A_k."""
        if self.grad_A is not None:
            g = self.grad_A(x[0], x[1])
            return np.array([[float(g[0][0]), float(g[0][1])], [float(g[1][0]), float(g[1][1])]])
        h = fd_step(x)
        e1, e2 = np.array([h, 0.0]), np.array([0.0, h])
        d1 = (self.potential(x + e1) - self.potential(x - e1)) / (2 * h)
        d2 = (self.potential(x + e2) - self.potential(x - e2)) / (2 * h)
        return np.array([d1, d2])

    def field_at(self, x: np.ndarray) -> float:
        if self.B is not None:
            return float(self.B(x[0], x[1]))
        g = self.jacobian(x)
        return float(g[0, 1] - g[1, 0])

    def field_gradient(self, x: np.ndarray) -> np.ndarray:
        if self.grad_B is not None:
            g = self.grad_B(x[0], x[1])
            return np.array([float(g[0]), float(g[1])])
        h = fd_step(x)
        return np.array([
            (self.field_at(x + [h, 0.0]) - self.field_at(x - [h, 0.0])) / (2 * h),
            (self.field_at(x + [0.0, h]) - self.field_at(x - [0.0, h])) / (2 * h),
        ])


ZERO_POTENTIAL = MagneticPotential(
    A=lambda x1, x2: (0.0 * x1, 0.0 * x2),
    grad_A=lambda x1, x2: ((0.0, 0.0), (0.0, 0.0)),
    B=lambda x1, x2: 0.0 * x1,
    grad_B=lambda x1, x2: (0.0, 0.0),
    name="zero",
)

CSV_COLUMNS = ("t", "y1", "y2", "theta", "r", "B", "rho", "gamma", "c", "s", "phi",
               "thetadot", "j", "k", "lambda", "mu", "nu")


@dataclass
class CoefficientTrack:
    """Per-sample coefficients. Every field is an array indexed by sample."""

    t: np.ndarray
    y: np.ndarray          # (N, 2)
    n: np.ndarray          # (N, 2)
    tau: np.ndarray        # (N, 2)
    theta: np.ndarray
    r: np.ndarray
    B: np.ndarray
    rho: np.ndarray
    gamma: np.ndarray
    c: np.ndarray
    s: np.ndarray
    phi: np.ndarray
    thetadot: np.ndarray
    j: np.ndarray
    k: np.ndarray
    K: np.ndarray          # unsigned curvature
    dnB: np.ndarray        # normal derivative of B
    lap_kappa: np.ndarray
    A: np.ndarray          # (N, 2) potential at y
    grad_A: np.ndarray     # (N, 2, 2), [j, k] = d_j A_k
    lam: np.ndarray = field(default=None)
    mu: np.ndarray = field(default=None)
    nu: np.ndarray = field(default=None)
    line_integral: np.ndarray = field(default=None)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def filled(self) -> bool:
        return self.nu is not None

    def at(self, t: float) -> "TrackSample":
        """Coefficients at time t; cubic-spline interpolation between samples."""
        if not self.filled:
            raise ValueError("envelope integrals not filled; call integrate_envelope first")
        t0, t1 = float(self.t[0]), float(self.t[-1])
        span = t1 - t0
        if t < t0 - 1e-9 * max(span, 1) or t > t1 + 1e-9 * max(span, 1):
            raise ValueError(f"t={t} outside track [{t0}, {t1}]")
        idx = int(np.searchsorted(self.t, t))
        for i in (idx - 1, idx):
            if 0 <= i < len(self.t) and abs(self.t[i] - t) <= 1e-12 * max(1.0, abs(t)):
                return self._sample(i)
        return self._interpolate(t)

    def _sample(self, i: int) -> "TrackSample":
        return TrackSample(
            t=float(self.t[i]), y=self.y[i].copy(), n=self.n[i].copy(), tau=self.tau[i].copy(),
            theta=float(self.theta[i]), r=float(self.r[i]), B=float(self.B[i]),
            rho=float(self.rho[i]), gamma=float(self.gamma[i]), c=float(self.c[i]),
            s=float(self.s[i]), phi=float(self.phi[i]), thetadot=float(self.thetadot[i]),
            j=float(self.j[i]), k=float(self.k[i]), lam=float(self.lam[i]),
            mu=float(self.mu[i]), nu=float(self.nu[i]), A=self.A[i].copy(),
            grad_A=self.grad_A[i].copy(), line_integral=float(self.line_integral[i]),
        )

    def _interpolate(self, t: float) -> "TrackSample":
        if not hasattr(self, "_splines"):
            names = ("y", "n", "tau", "theta", "r", "B", "rho", "gamma", "c", "s", "phi",
                     "thetadot", "j", "k", "lam", "mu", "nu", "A", "grad_A", "line_integral")
            self._splines = {name: CubicSpline(self.t, getattr(self, name), axis=0) for name in names}
        v = {name: spline(t) for name, spline in self._splines.items()}
        n = v["n"] / np.linalg.norm(v["n"])
        return TrackSample(
            t=float(t), y=v["y"], n=n, tau=np.array([-n[1], n[0]]), theta=float(v["theta"]),
            r=float(v["r"]), B=float(v["B"]), rho=float(v["rho"]), gamma=float(v["gamma"]),
            c=float(v["c"]), s=float(v["s"]), phi=float(v["phi"]),
            thetadot=float(v["thetadot"]), j=float(v["j"]), k=float(v["k"]),
            lam=float(v["lam"]), mu=float(v["mu"]), nu=float(v["nu"]), A=v["A"],
            grad_A=v["grad_A"], line_integral=float(v["line_integral"]),
        )

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            cols = (self.t, self.y[:, 0], self.y[:, 1], self.theta, self.r, self.B, self.rho,
                    self.gamma, self.c, self.s, self.phi, self.thetadot, self.j, self.k,
                    self.lam, self.mu, self.nu)
            for row in zip(*cols):
                w.writerow([repr(float(v)) for v in row])


@dataclass(frozen=True)
class TrackSample:
    t: float
    y: np.ndarray
    n: np.ndarray
    tau: np.ndarray
    theta: float
    r: float
    B: float
    rho: float
    gamma: float
    c: float
    s: float
    phi: float
    thetadot: float
    j: float
    k: float
    lam: float
    mu: float
    nu: float
    A: np.ndarray
    grad_A: np.ndarray
    line_integral: float


def _tangential_derivative_of_ratio(wall: DomainWall, field: MagneticPotential,
                                    y: np.ndarray, n: np.ndarray, tau: np.ndarray,
                                    r: float, b: float) -> float:
    """d_tau (B / |grad kappa|) at y."""
    if field.grad_B is not None and wall.hessian_kappa is not None:
        d_tau_b = float(field.field_gradient(y) @ tau)
        d_tau_r = float(tau @ wall.hessian(y) @ n)
        return d_tau_b / r - b * d_tau_r / r**2
    h = fd_step(y)

    def ratio(p):
        g = wall.gradient(p)
        return field.field_at(p) / math.hypot(g[0], g[1])

    return (ratio(y + h * tau) - ratio(y - h * tau)) / (2 * h)


def sample_coefficients(traj: Sequence[FramePoint], wall: DomainWall,
                        field: MagneticPotential) -> CoefficientTrack:
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    N = len(traj)
    out = {name: np.empty(N) for name in ("t", "theta", "r", "B", "thetadot", "j", "k", "K",
                                          "dnB", "lap_kappa")}
    y = np.empty((N, 2))
    n = np.empty((N, 2))
    tau = np.empty((N, 2))
    A = np.empty((N, 2))
    grad_A = np.empty((N, 2, 2))
    c = np.empty(N)
    for i, fp in enumerate(traj):
        g = wall.gradient(fp.y)
        r = float(np.hypot(g[0], g[1]))
        if not r > GRAD_TOL:
            raise DegenerateGradient(f"|grad kappa| = {r:.3e} at t={fp.t}")
        b = field.field_at(fp.y)
        rho = math.hypot(r, b)
        ci = r / rho
        lap = wall.laplacian(fp.y)
        dnb = float(field.field_gradient(fp.y) @ fp.n)
        d_ratio = _tangential_derivative_of_ratio(wall, field, fp.y, fp.n, fp.tau, r, b)
        signed = float(fp.tau @ wall.hessian(fp.y) @ fp.tau) / r
        out["t"][i] = fp.t
        out["theta"][i] = fp.theta
        out["r"][i] = r
        out["B"][i] = b
        out["thetadot"][i] = ci * signed
        out["j"][i] = -r * ci * d_ratio
        out["k"][i] = 0.5 * ci * (dnb - b * lap / r)
        out["K"][i] = abs(signed)
        out["dnB"][i] = dnb
        out["lap_kappa"][i] = lap
        c[i] = ci
        y[i], n[i], tau[i] = fp.y, fp.n, fp.tau
        A[i] = field.potential(fp.y)
        grad_A[i] = field.jacobian(fp.y)

    r, b = out["r"], out["B"]
    rho = np.hypot(r, b)
    phi = np.arctan2(b, r)
    if phi[0] < 0:
        phi = phi + 2 * math.pi
    phi = np.unwrap(phi)
    return CoefficientTrack(
        t=out["t"], y=y, n=n, tau=tau, theta=out["theta"], r=r, B=b, rho=rho,
        gamma=b / rho**2, c=c, s=b / rho, phi=phi, thetadot=out["thetadot"], j=out["j"],
        k=out["k"], K=out["K"], dnB=out["dnB"], lap_kappa=out["lap_kappa"], A=A, grad_A=grad_A,
    )


def _running_integral(values: np.ndarray, t: np.ndarray) -> np.ndarray:
    if len(t) < 2:
        return np.zeros_like(values)
    if len(t) == 2:
        return np.concatenate([[0.0], [0.5 * (values[0] + values[1]) * (t[1] - t[0])]])
    return cumulative_simpson(values, x=t, initial=0.0)


def integrate_envelope(track: CoefficientTrack) -> CoefficientTrack:
    """Fill the running integrals lambda, mu, nu and the gauge line integral."""
    t = track.t
    lam = _running_integral(track.k / (2 * track.rho), t)
    rate = track.thetadot * track.gamma + track.k * track.gamma**2
    nu = 2 * _running_integral((track.c[0] / track.c) ** 2 * rate, t)
    mu = np.log(track.c / track.c[0])
    velocity = track.c[:, None] * track.tau
    line = _running_integral(np.einsum("ij,ij->i", velocity, track.A), t)
    return replace(track, lam=lam, mu=mu, nu=nu, line_integral=line)


def dispersion_rate(track: CoefficientTrack, idx: int, wall: DomainWall | None = None) -> float:
    """theta_dot + gamma k at sample idx, cross-checked against the curvature form.

    The second route uses the unsigned curvature with the convexity sign and the
    normal derivative of B. When ``wall`` is given the curvature is re-evaluated
    there by finite differences, making the check independent of the Hessian.
    """
    direct = track.thetadot[idx] + track.gamma[idx] * track.k[idx]
    if wall is not None:
        signed = signed_curvature_fd(wall, track.y[idx])
    else:
        signed = track.thetadot[idx] / track.c[idx]
    sign = 1.0 if signed >= 0 else -1.0
    K = abs(signed)
    b, r = track.B[idx], track.r[idx]
    geometric = track.c[idx] * (
        sign * K + 0.5 * (b * track.dnB[idx] - b * b * track.lap_kappa[idx] / r) / (b * b + r * r)
    )
    if abs(direct - geometric) > 1e-6:
        raise ConsistencyError(
            f"dispersion rate routes disagree at sample {idx}: {direct!r} vs {geometric!r}")
    return float(direct)


def build_track(wall: DomainWall, field: MagneticPotential, y0, t_max: float,
                dt: float) -> CoefficientTrack:
    return integrate_envelope(sample_coefficients(integrate_center(wall, field, y0, t_max, dt),
                                                  wall, field))
