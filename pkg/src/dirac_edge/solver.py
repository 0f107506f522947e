"""Strang-split spectral integrator for the magnetic Dirac equation with a domain-wall mass.

The equation is i eps d_t Psi = [(eps D1 - A1) s1 + (eps D2 - A2) s2 + kappa s3] Psi
with D = -i grad, on a periodic grid. Potentials are multiplied by a smooth
plateau window so they are periodic; the packet has to stay on the plateau.
"""

from __future__ import annotations

import math
import os
import struct
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.fft

from .assembler import GridSpec, SpinorGrid
from .coefficients import MagneticPotential
from .diagnostics import ObservableSeries
from .errors import BoundaryContamination, PhaseResolutionWarning
from .geometry import DomainWall
from .presets import smoothstep

CONTAMINATION_TOL = 1e-6
MAGIC = b"DEWP"
VERSION = 1


def fft_workers() -> int:
    value = os.environ.get("DIRAC_EDGE_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def plateau_window(grid: GridSpec, rolloff: float = 0.1) -> np.ndarray:
    """Product window equal to 1 away from the edges, vanishing smoothly at the boundary.

    ``rolloff`` is the fraction of each extent used by the transition on each side.
    """
    x, y = grid.axes()

    def one_d(u, lo, hi):
        width = rolloff * (hi - lo)
        return smoothstep((u - lo) / width) * smoothstep((hi - u) / width)

    return np.outer(one_d(x, grid.x0, grid.x1), one_d(y, grid.y0, grid.y1))


def _su2_exponential(v1, v2, v3, a):
    """Entries of exp(-i a v.sigma) for real field arrays v."""
    norm = np.sqrt(v1 * v1 + v2 * v2 + v3 * v3)
    c = np.cos(a * norm)
    s = a * np.sinc(a * norm / math.pi)
    m00 = c - 1j * s * v3
    m11 = c + 1j * s * v3
    m01 = -1j * s * (v1 - 1j * v2)
    m10 = -1j * s * (v1 + 1j * v2)
    return m00, m01, m10, m11


@dataclass
class SolverState:
    grid: GridSpec
    psi: np.ndarray          # (2, nx, ny)
    t: float
    dt: float
    epsilon: float
    kinetic: tuple          # (cos, m01, m10) per Fourier mode
    half: tuple             # potential half-step entries
    full: tuple             # potential full-step entries
    window: np.ndarray
    v_max: float

    def snapshot(self) -> SpinorGrid:
        return SpinorGrid(grid=self.grid, values=np.moveaxis(self.psi, 0, -1).copy(),
                          t=self.t, epsilon=self.epsilon)

    def boundary_mass_fraction(self) -> float:
        rho = np.abs(self.psi[0]) ** 2 + np.abs(self.psi[1]) ** 2
        total = float(np.sum(rho))
        return float(np.sum(rho[self.window < 1.0])) / total if total > 0 else 0.0


def default_dt(grid: GridSpec, epsilon: float, v_max: float) -> float:
    h = min(grid.hx, grid.hy)
    bounds = [0.2 * epsilon * h / math.pi]
    if v_max > 0:
        bounds.append(0.2 * epsilon / v_max)
    return min(bounds)


def potential_fields(grid: GridSpec, wall: DomainWall, field: MagneticPotential,
                     rolloff: float = 0.1):
    X1, X2 = grid.mesh()
    W = plateau_window(grid, rolloff)
    A1, A2 = field.A(X1, X2)
    kappa = wall.kappa(X1, X2)
    shape = X1.shape
    v1 = -np.broadcast_to(A1, shape) * W
    v2 = -np.broadcast_to(A2, shape) * W
    v3 = np.broadcast_to(kappa, shape) * W
    return v1, v2, v3, W


def make_state(initial: SpinorGrid, wall: DomainWall, field: MagneticPotential,
               epsilon: float, dt: float | None = None, rolloff: float = 0.1) -> SolverState:
    grid = initial.grid
    v1, v2, v3, W = potential_fields(grid, wall, field, rolloff)
    v_max = float(np.max(np.sqrt(v1 * v1 + v2 * v2 + v3 * v3)))
    if dt is None:
        dt = default_dt(grid, epsilon, v_max)
    if dt * v_max / epsilon > math.pi / 4:
        warnings.warn(f"potential phase per step {dt * v_max / epsilon:.3f} exceeds pi/4",
                      PhaseResolutionWarning, stacklevel=2)
    k1 = 2 * math.pi * np.fft.fftfreq(grid.nx, d=grid.hx)
    k2 = 2 * math.pi * np.fft.fftfreq(grid.ny, d=grid.hy)
    K1, K2 = np.meshgrid(k1, k2, indexing="ij")
    m00, m01, m10, _ = _su2_exponential(K1, K2, np.zeros_like(K1), dt)
    half = _su2_exponential(v1, v2, v3, 0.5 * dt / epsilon)
    full = _su2_exponential(v1, v2, v3, dt / epsilon)
    psi = np.ascontiguousarray(np.moveaxis(initial.values, -1, 0), dtype=complex)
    return SolverState(grid=grid, psi=psi, t=initial.t, dt=dt, epsilon=epsilon,
                       kinetic=(m00.real.copy(), m01, m10), half=half, full=full, window=W,
                       v_max=v_max)


def _apply_potential(m, psi: np.ndarray) -> np.ndarray:
    m00, m01, m10, m11 = m
    return np.stack([m00 * psi[0] + m01 * psi[1], m10 * psi[0] + m11 * psi[1]])


def _apply_kinetic(state: SolverState, psi: np.ndarray) -> np.ndarray:
    c, m01, m10 = state.kinetic
    workers = fft_workers()
    p = scipy.fft.fft2(psi, axes=(1, 2), workers=workers)
    p = np.stack([c * p[0] + m01 * p[1], m10 * p[0] + c * p[1]])
    return scipy.fft.ifft2(p, axes=(1, 2), workers=workers)


def step_strang(state: SolverState) -> SolverState:
    """One potential-kinetic-potential step, in place."""
    psi = _apply_potential(state.half, state.psi)
    psi = _apply_kinetic(state, psi)
    state.psi = _apply_potential(state.half, psi)
    state.t += state.dt
    return state


def advance(state: SolverState, n_steps: int) -> SolverState:
    """n Strang steps with the inner potential half-steps fused into full steps."""
    if n_steps <= 0:
        return state
    psi = _apply_potential(state.half, state.psi)
    for i in range(n_steps):
        psi = _apply_kinetic(state, psi)
        psi = _apply_potential(state.full if i < n_steps - 1 else state.half, psi)
    state.psi = psi
    state.t += n_steps * state.dt
    return state


def steps_per(interval: float, dt: float) -> int:
    n = int(round(interval / dt))
    if n < 1 or abs(n * dt - interval) > 1e-9 * interval:
        raise ValueError(f"time step {dt} does not divide interval {interval}")
    return n


def evolve(state: SolverState, t_max: float, cadence: float,
           reference: Callable[[float], SpinorGrid] | None = None,
           observers: tuple[Callable[[SpinorGrid], None], ...] = (),
           series: ObservableSeries | None = None) -> ObservableSeries:
    """Advance to t_max, recording observables every ``cadence`` (t = start included).

    ``reference(t)`` supplies a field for the L2-error column. Observers get a
    copy of the state at each cadence point.
    """
    series = series if series is not None else ObservableSeries()
    per = steps_per(cadence, state.dt)
    n_obs = int(round((t_max - state.t) / cadence))
    t_start = state.t

    def observe():
        snap = state.snapshot()
        frac = state.boundary_mass_fraction()
        if frac > CONTAMINATION_TOL:
            raise BoundaryContamination(
                f"mass fraction {frac:.2e} reached the window roll-off at t={state.t:.4f}")
        series.record(snap, reference(snap.t) if reference is not None else None)
        for obs in observers:
            obs(snap)

    observe()
    for i in range(n_obs):
        advance(state, per)
        # re-anchor to avoid accumulating round-off in t
        state.t = t_start + (i + 1) * cadence
        observe()
    return series


def write_snapshot(path, grid: SpinorGrid) -> None:
    g = grid.grid
    header = MAGIC + struct.pack("<III", VERSION, g.nx, g.ny) + struct.pack(
        "<6d", g.x0, g.x1, g.y0, g.y1, grid.t, grid.epsilon)
    data = np.empty((g.nx, g.ny, 4), dtype="<f8")
    data[..., 0] = grid.values[..., 0].real
    data[..., 1] = grid.values[..., 0].imag
    data[..., 2] = grid.values[..., 1].real
    data[..., 3] = grid.values[..., 1].imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes(order="C"))


def read_snapshot(path) -> SpinorGrid:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise ValueError(f"{path} is not a snapshot file")
    version, nx, ny = struct.unpack_from("<III", blob, 4)
    if version != VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    x0, x1, y0, y1, t, eps = struct.unpack_from("<6d", blob, 16)
    data = np.frombuffer(blob, dtype="<f8", offset=64).reshape(nx, ny, 4)
    values = np.empty((nx, ny, 2), dtype=complex)
    values[..., 0] = data[..., 0] + 1j * data[..., 1]
    values[..., 1] = data[..., 2] + 1j * data[..., 3]
    return SpinorGrid(grid=GridSpec(nx, ny, x0, x1, y0, y1), values=values, t=t, epsilon=eps)
