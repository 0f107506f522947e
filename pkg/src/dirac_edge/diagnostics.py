"""Observables extracted from spinor fields and the fits applied to their time series."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .assembler import SpinorGrid
from .errors import NumericalContractError

SERIES_COLUMNS = ("t", "com_x", "com_y", "speed", "max_amp", "center_phase_unwrapped",
                  "l2_norm", "l2_err_vs_asymptotic")


def center_of_mass(state: SpinorGrid) -> np.ndarray:
    rho = state.density()
    total = float(np.sum(rho))
    if not total > 0:
        raise NumericalContractError("center of mass of a zero field")
    x, y = state.grid.axes()
    return np.array([float(np.sum(rho.sum(axis=1) * x)) / total,
                     float(np.sum(rho.sum(axis=0) * y)) / total])


def nearest_node(state: SpinorGrid, point) -> tuple[int, int]:
    g = state.grid
    i = int(round((point[0] - g.x0) / g.hx)) % g.nx
    j = int(round((point[1] - g.y0) / g.hy)) % g.ny
    return i, j


def phase_at_center(state: SpinorGrid, component: int = 0) -> float:
    i, j = nearest_node(state, center_of_mass(state))
    value = state.values[i, j, component]
    if abs(value) <= 1e-8:
        raise NumericalContractError(f"amplitude {abs(value):.2e} at the center is too small")
    return float(np.angle(value))


def max_amplitude(state: SpinorGrid) -> float:
    return math.sqrt(float(np.max(state.density())))


def l2_error(a: SpinorGrid, b: SpinorGrid) -> float:
    if a.grid != b.grid:
        raise ValueError("l2_error needs identical grids")
    return math.sqrt(float(np.sum(np.abs(a.values - b.values) ** 2)) * a.grid.cell)


@dataclass
class ObservableSeries:
    t: list = field(default_factory=list)
    com: list = field(default_factory=list)
    max_amp: list = field(default_factory=list)
    raw_phase: list = field(default_factory=list)
    l2_norm: list = field(default_factory=list)
    l2_err: list = field(default_factory=list)

    def record(self, state: SpinorGrid, reference: SpinorGrid | None = None) -> None:
        if self.t and state.t <= self.t[-1]:
            raise ValueError("series times must increase")
        com = center_of_mass(state)
        i, j = nearest_node(state, com)
        self.t.append(float(state.t))
        self.com.append(com)
        self.max_amp.append(max_amplitude(state))
        self.raw_phase.append(np.angle(state.values[i, j, :]))
        self.l2_norm.append(state.norm())
        self.l2_err.append(l2_error(state, reference) if reference is not None else math.nan)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def times(self) -> np.ndarray:
        return np.asarray(self.t)

    @property
    def centers(self) -> np.ndarray:
        return np.asarray(self.com).reshape(-1, 2)

    @property
    def phase(self) -> np.ndarray:
        """Unwrapped center phase per spinor component, shape (N, 2)."""
        return np.unwrap(np.asarray(self.raw_phase).reshape(-1, 2), axis=0)

    def arc_length(self) -> np.ndarray:
        steps = np.linalg.norm(np.diff(self.centers, axis=0), axis=1)
        return np.concatenate([[0.0], np.cumsum(steps)])

    def speeds(self) -> np.ndarray:
        if len(self) < 2:
            return np.full(len(self), math.nan)
        return np.gradient(self.arc_length(), self.times)

    def to_csv(self, path) -> None:
        speeds = self.speeds()
        phase = self.phase[:, 0] if len(self) else []
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(SERIES_COLUMNS)
            for i in range(len(self)):
                row = (self.t[i], self.com[i][0], self.com[i][1], speeds[i], self.max_amp[i],
                       phase[i], self.l2_norm[i], self.l2_err[i])
                w.writerow([repr(float(v)) for v in row])


def speed_estimate(series: ObservableSeries, window: tuple[float, float] | None = None) -> float:
    """Least-squares slope of the center's arc length against time."""
    t = series.times
    s = series.arc_length()
    mask = np.ones(len(t), bool) if window is None else (t >= window[0]) & (t <= window[1])
    if mask.sum() < 5:
        raise ValueError(f"speed estimate needs at least 5 samples, got {int(mask.sum())}")
    return float(np.polyfit(t[mask], s[mask], 1)[0])


def fit_power_law(abscissa, values, window: tuple[float, float] | None = None) -> float:
    """Exponent p of values ~ C abscissa^p by least squares in log-log."""
    x = np.asarray(abscissa, dtype=float)
    v = np.asarray(values, dtype=float)
    mask = np.ones(len(x), bool) if window is None else (x >= window[0]) & (x <= window[1])
    x, v = x[mask], v[mask]
    if len(x) < 8:
        raise ValueError(f"power-law fit needs at least 8 points, got {len(x)}")
    if np.any(v <= 0) or np.any(x <= 0):
        raise ValueError("power-law fit needs positive values and abscissae")
    return float(np.polyfit(np.log(x), np.log(v), 1)[0])
