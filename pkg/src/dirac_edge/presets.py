"""Named domain walls and magnetic potentials used by the experiments."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .coefficients import ZERO_POTENTIAL, MagneticPotential
from .geometry import DomainWall


def _zeros(x1):
    return np.zeros_like(np.asarray(x1, dtype=float))


def _ones(x1):
    return np.ones_like(np.asarray(x1, dtype=float))


def flat_wall(angle: float = 0.0) -> DomainWall:
    """Straight interface through the origin with normal (-sin a, cos a); angle 0 gives kappa = x2."""
    n1, n2 = -math.sin(angle), math.cos(angle)
    return DomainWall(
        kappa=lambda x1, x2: n1 * x1 + n2 * x2,
        grad_kappa=lambda x1, x2: (n1 + _zeros(x1), n2 + _zeros(x1)),
        laplacian_kappa=lambda x1, x2: _zeros(x1),
        hessian_kappa=lambda x1, x2: (_zeros(x1), _zeros(x1), _zeros(x1)),
        name="flat",
    )


def circle_log_wall(R: float = 1.0) -> DomainWall:
    def hess(x1, x2):
        q = x1 * x1 + x2 * x2
        return (x2 * x2 - x1 * x1) / q**2, -2 * x1 * x2 / q**2, (x1 * x1 - x2 * x2) / q**2

    return DomainWall(
        kappa=lambda x1, x2: 0.5 * np.log((x1 * x1 + x2 * x2) / R**2),
        grad_kappa=lambda x1, x2: (x1 / (x1 * x1 + x2 * x2), x2 / (x1 * x1 + x2 * x2)),
        laplacian_kappa=lambda x1, x2: _zeros(x1),
        hessian_kappa=hess,
        name="circle_log",
    )


def circle_quadratic_wall(R: float = 1.0) -> DomainWall:
    return DomainWall(
        kappa=lambda x1, x2: 0.5 * (x1 * x1 + x2 * x2 - R * R),
        grad_kappa=lambda x1, x2: (x1, x2),
        laplacian_kappa=lambda x1, x2: 2.0 * _ones(x1),
        hessian_kappa=lambda x1, x2: (_ones(x1), _zeros(x1), _ones(x1)),
        name="circle_quadratic",
    )


def circle_power_wall(m: float = 2.0, R: float = 1.0) -> DomainWall:
    """kappa = (|x|^m - R^m) / (m R^(m-1)), so |grad kappa| = 1 on the circle."""
    scale = 1.0 / R ** (m - 1)

    def grad(x1, x2):
        q = np.power(x1 * x1 + x2 * x2, 0.5 * (m - 2))
        return scale * q * x1, scale * q * x2

    def hess(x1, x2):
        r2 = x1 * x1 + x2 * x2
        q = np.power(r2, 0.5 * (m - 2))
        p = (m - 2) * np.power(r2, 0.5 * (m - 4))
        return scale * (q + p * x1 * x1), scale * p * x1 * x2, scale * (q + p * x2 * x2)

    return DomainWall(
        kappa=lambda x1, x2: (np.power(x1 * x1 + x2 * x2, 0.5 * m) - R**m) / (m * R ** (m - 1)),
        grad_kappa=grad,
        laplacian_kappa=lambda x1, x2: scale * m * np.power(x1 * x1 + x2 * x2, 0.5 * (m - 2)),
        hessian_kappa=hess,
        name="circle_power_m",
    )


def tanh_bend_wall(amplitude: float = 1.0) -> DomainWall:
    """kappa = x2 - a (tanh x1 - 1): a straight edge that steps down by 2a near x1 = 0."""

    def sech2(x1):
        return 1.0 / np.cosh(x1) ** 2

    return DomainWall(
        kappa=lambda x1, x2: x2 - amplitude * (np.tanh(x1) - 1.0),
        grad_kappa=lambda x1, x2: (-amplitude * sech2(x1) + _zeros(x2), 1.0 + _zeros(x1)),
        laplacian_kappa=lambda x1, x2: 2 * amplitude * sech2(x1) * np.tanh(x1) + _zeros(x2),
        hessian_kappa=lambda x1, x2: (2 * amplitude * sech2(x1) * np.tanh(x1) + _zeros(x2),
                                      _zeros(x1), _zeros(x1)),
        name="tanh_bend",
    )


def constant_field(B0: float) -> MagneticPotential:
    """A = -B0 x2 e1."""
    return MagneticPotential(
        A=lambda x1, x2: (-B0 * x2 + _zeros(x1), _zeros(x1)),
        grad_A=lambda x1, x2: ((0.0, 0.0), (-B0, 0.0)),
        B=lambda x1, x2: B0 + _zeros(x1),
        grad_B=lambda x1, x2: (0.0, 0.0),
        name="constant",
    )


def tilted_constant_field(B0: float, angle: float = 0.0) -> MagneticPotential:
    """A = B0 kappa tau for the straight wall at the given angle; vanishes on the interface."""
    n = np.array([-math.sin(angle), math.cos(angle)])
    tau = np.array([-n[1], n[0]])
    return MagneticPotential(
        A=lambda x1, x2: (B0 * (n[0] * x1 + n[1] * x2) * tau[0],
                          B0 * (n[0] * x1 + n[1] * x2) * tau[1]),
        grad_A=lambda x1, x2: ((B0 * n[0] * tau[0], B0 * n[0] * tau[1]),
                               (B0 * n[1] * tau[0], B0 * n[1] * tau[1])),
        B=lambda x1, x2: B0 + _zeros(x1),
        grad_B=lambda x1, x2: (0.0, 0.0),
        name="tilted_constant",
    )


def circle_constant_field(B0: float) -> MagneticPotential:
    """A = B0 x1 e2."""
    return MagneticPotential(
        A=lambda x1, x2: (_zeros(x1), B0 * x1 + _zeros(x2)),
        grad_A=lambda x1, x2: ((0.0, B0), (0.0, 0.0)),
        B=lambda x1, x2: B0 + _zeros(x1),
        grad_B=lambda x1, x2: (0.0, 0.0),
        name="circle_constant",
    )


def _bump(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def _bump_prime(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos]) / u[pos] ** 2
    return out


def smoothstep(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1."""
    a, b = _bump(u), _bump(1.0 - np.asarray(u, dtype=float))
    return a / (a + b)


def smoothstep_prime(u):
    u = np.asarray(u, dtype=float)
    a, b = _bump(u), _bump(1.0 - u)
    da, db = _bump_prime(u), -_bump_prime(1.0 - u)
    return (da * b - a * db) / (a + b) ** 2


def flux_line_field(Phi: float, r_core: float = 0.2) -> MagneticPotential:
    """Aharonov-Bohm potential Phi/(2 pi r) e_theta, switched off smoothly inside r_core.

    The cutoff rises from 0 at r_core/2 to 1 at r_core, so the potential is
    smooth everywhere and the flux through any loop around the core is Phi.
    """
    r_in = 0.5 * r_core
    width = r_core - r_in

    def profile(x1, x2):
        # A = u(r) (-x2, x1); returns u and u'(r)/r
        r2 = np.asarray(x1 * x1 + x2 * x2, dtype=float)
        r = np.sqrt(r2)
        g = smoothstep((r - r_in) / width)
        dg = smoothstep_prime((r - r_in) / width) / width
        safe = np.where(r > r_in, r, 1.0)
        u = np.where(r > r_in, Phi * g / (2 * math.pi * safe**2), 0.0)
        du_over_r = np.where(r > r_in, Phi / (2 * math.pi) * (dg / safe**3 - 2 * g / safe**4), 0.0)
        return u, du_over_r, dg, safe, r > r_in

    def A(x1, x2):
        u, *_ = profile(x1, x2)
        return -u * x2, u * x1

    def grad_A(x1, x2):
        u, d, *_ = profile(x1, x2)
        return ((-d * x1 * x2, u + d * x1 * x1), (-u - d * x2 * x2, d * x1 * x2))

    def B(x1, x2):
        # (1/r) d/dr (r * u r) = 2u + r u'
        u, d, *_ = profile(x1, x2)
        r2 = x1 * x1 + x2 * x2
        return 2 * u + d * r2

    def grad_B(x1, x2):
        # B = Phi g'(r) / (2 pi r) exactly; differentiate that
        r2 = np.asarray(x1 * x1 + x2 * x2, dtype=float)
        r = np.sqrt(r2)
        inside = (r > r_in) & (r < r_core)
        safe = np.where(inside, r, 1.0)
        v = np.where(inside, (safe - r_in) / width, 0.5)
        h = 1e-6
        ddg = (smoothstep_prime(v + h) - smoothstep_prime(v - h)) / (2 * h) / width**2
        dg = smoothstep_prime(v) / width
        dBdr = np.where(inside, Phi / (2 * math.pi) * (ddg / safe - dg / safe**2), 0.0)
        return dBdr * x1 / safe, dBdr * x2 / safe

    return MagneticPotential(A=A, grad_A=grad_A, B=B, grad_B=grad_B, name="flux_line")


def tanh_ramp_field(B0: float, x_ramp: float = 2.0) -> MagneticPotential:
    """A1 = -B0 x2 (1 - tanh(x1 - x_ramp)), so B = B0 (1 - tanh(x1 - x_ramp))."""

    def sech2(x1):
        return 1.0 / np.cosh(x1 - x_ramp) ** 2

    return MagneticPotential(
        A=lambda x1, x2: (-B0 * x2 * (1 - np.tanh(x1 - x_ramp)), _zeros(x1 + x2)),
        grad_A=lambda x1, x2: ((B0 * x2 * sech2(x1), 0.0),
                               (-B0 * (1 - np.tanh(x1 - x_ramp)), 0.0)),
        B=lambda x1, x2: B0 * (1 - np.tanh(x1 - x_ramp)) + _zeros(x2),
        grad_B=lambda x1, x2: (-B0 * sech2(x1) + _zeros(x2), _zeros(x1 + x2)),
        name="tanh_ramp",
    )


def transverse_linear_field(B2: float, B0: float = 1.0) -> MagneticPotential:
    """A = -(B0 + 2 B2 x2) x2 e1, so B = B0 + 4 B2 x2."""
    return MagneticPotential(
        A=lambda x1, x2: (-(B0 + 2 * B2 * x2) * x2 + _zeros(x1), _zeros(x1 + x2)),
        grad_A=lambda x1, x2: ((0.0, 0.0), (-(B0 + 4 * B2 * x2), 0.0)),
        B=lambda x1, x2: B0 + 4 * B2 * x2 + _zeros(x1),
        grad_B=lambda x1, x2: (_zeros(x1 + x2), 4 * B2 + _zeros(x1 + x2)),
        name="transverse_linear",
    )


def periodic_modulation_field(B2: float = 1.0, B0: float = 1.0,
                              period: float = 15.0) -> MagneticPotential:
    """B = B0 + 4 B2 cos(2 pi x1 / period) x2 from A1 = -(B0 + 2 B2 cos(.) x2) x2."""
    w = 2 * math.pi / period
    return MagneticPotential(
        A=lambda x1, x2: (-(B0 + 2 * B2 * np.cos(w * x1) * x2) * x2, _zeros(x1 + x2)),
        grad_A=lambda x1, x2: ((2 * B2 * w * np.sin(w * x1) * x2 * x2, 0.0),
                               (-(B0 + 4 * B2 * np.cos(w * x1) * x2), 0.0)),
        B=lambda x1, x2: B0 + 4 * B2 * np.cos(w * x1) * x2,
        grad_B=lambda x1, x2: (-4 * B2 * w * np.sin(w * x1) * x2, 4 * B2 * np.cos(w * x1) + _zeros(x2)),
        name="periodic_modulation",
    )


WALLS: dict[str, tuple[Callable[..., DomainWall], dict[str, float]]] = {
    "flat": (flat_wall, {"angle": 0.0}),
    "circle_log": (circle_log_wall, {"R": 1.0}),
    "circle_quadratic": (circle_quadratic_wall, {"R": 1.0}),
    "circle_power_m": (circle_power_wall, {"m": 2.0, "R": 1.0}),
    "tanh_bend": (tanh_bend_wall, {"amplitude": 1.0}),
}

POTENTIALS: dict[str, tuple[Callable[..., MagneticPotential], dict[str, float]]] = {
    "zero": (lambda: ZERO_POTENTIAL, {}),
    "constant": (constant_field, {"B0": 1.0}),
    "tilted_constant": (tilted_constant_field, {"B0": 1.0, "angle": 0.0}),
    "flux_line": (flux_line_field, {"Phi": 2 * math.pi, "r_core": 0.2}),
    "circle_constant": (circle_constant_field, {"B0": 1.0}),
    "tanh_ramp": (tanh_ramp_field, {"B0": 1.0, "x_ramp": 2.0}),
    "transverse_linear": (transverse_linear_field, {"B2": 0.5, "B0": 1.0}),
    "periodic_modulation": (periodic_modulation_field, {"B2": 1.0, "B0": 1.0, "period": 15.0}),
}


def make_wall(name: str, **params) -> DomainWall:
    factory, defaults = WALLS[name]
    return factory(**{**defaults, **params})


def make_potential(name: str, **params) -> MagneticPotential:
    factory, defaults = POTENTIALS[name]
    return factory(**{**defaults, **params})
