"""Magnetic Dirac edge wavepackets: full-PDE solver and leading-order asymptotic construction."""

from .assembler import (GridSpec, SpinorGrid, assemble_leading_order, exact_flat_solution,
                        gauge_phase_quadratic, spin_rotations)
from .coefficients import (CoefficientTrack, MagneticPotential, build_track, dispersion_rate,
                           integrate_envelope, sample_coefficients)
from .config import SimConfig, parse_config
from .envelope import (GaussianProfile, SampledProfile, WavepacketSpec,
                       gaussian_envelope_closed_form, envelope_numeric, hermite_ground,
                       sup_amplitude_bound, transport_profile, transport_residual)
from .experiments import REGISTRY, run_experiment
from .geometry import (DomainWall, FramePoint, curvature, eval_wall, integrate_center,
                       project_to_interface, unit_fields)
from .presets import make_potential, make_wall

__all__ = [
    "REGISTRY", "SimConfig", "CoefficientTrack", "DomainWall", "FramePoint", "GaussianProfile", "GridSpec",
    "MagneticPotential", "SampledProfile", "SpinorGrid", "WavepacketSpec",
    "assemble_leading_order", "build_track", "curvature", "dispersion_rate", "envelope_numeric",
    "eval_wall", "exact_flat_solution", "gauge_phase_quadratic", "gaussian_envelope_closed_form",
    "hermite_ground", "integrate_center", "integrate_envelope", "make_potential", "make_wall", "parse_config",
    "project_to_interface", "run_experiment", "sample_coefficients", "spin_rotations", "sup_amplitude_bound",
    "transport_profile", "transport_residual", "unit_fields",
]
