"""Scenario registry: each experiment runs the PDE and the asymptotic packet and writes artifacts.

Every run writes ``resolved_config.ini``, ``summary.txt`` (first line is the
config hash), one observables CSV and one coefficient-track CSV per sub-run, and
snapshots when ``snapshot_every`` is positive. Nothing depends on wall-clock time,
so reruns with the same thread count are bit-identical.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .assembler import GridSpec, assemble_leading_order, exact_flat_solution
from .coefficients import CoefficientTrack, build_track, dispersion_rate
from .config import SimConfig
from .diagnostics import ObservableSeries, fit_power_law, speed_estimate
from .envelope import GaussianProfile, SampledProfile, WavepacketSpec, _d1_4th
from .errors import ConfigError, NumericalContractError
from .geometry import DomainWall
from .presets import make_potential, make_wall
from .solver import default_dt, evolve, make_state, potential_fields, write_snapshot


@dataclass
class Run:
    config: SimConfig
    out: Path
    summary: list = field(default_factory=list)
    results: dict = field(default_factory=dict)

    def note(self, key: str, value) -> None:
        self.results[key] = value
        self.summary.append(f"{key}: {_fmt(value)}")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def _label(params: dict) -> str:
    return "__".join(f"{k}_{v:g}" for k, v in params.items()) or "base"


def grid_of(config: SimConfig) -> GridSpec:
    g = config.grid
    return GridSpec(g["nx"], g["ny"], g["x0"], g["x1"], g["y0"], g["y1"])


def profile_of(config: SimConfig):
    if config.profile_file is None:
        return GaussianProfile(config.sigma)
    try:
        data = np.loadtxt(config.profile_file, ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read profile file {config.profile_file!r}: {exc}") from None
    if data.shape[1] != 3:
        raise ConfigError("profile file needs three columns: xi, real part, imaginary part")
    try:
        return SampledProfile(data[:, 0], data[:, 1] + 1j * data[:, 2])
    except ValueError as exc:
        raise ConfigError(f"profile file {config.profile_file!r}: {exc}") from None


def sweep(config: SimConfig) -> list[dict]:
    """Expand list-valued potential parameters into one parameter set per combination."""
    keys, choices = [], []
    for k, v in config.potential_params.items():
        keys.append(k)
        choices.append(v if isinstance(v, list) else [v])
    return [dict(zip(keys, combo)) for combo in itertools.product(*choices)]


def swept_keys(config: SimConfig) -> list[str]:
    return [k for k, v in config.potential_params.items() if isinstance(v, list) and len(v) > 1]


def _revolution_time(config: SimConfig, wall: DomainWall, potential) -> float:
    y = np.asarray(config.y0, dtype=float)
    r = float(np.linalg.norm(wall.gradient(y)))
    b = potential.field_at(y)
    c = r / math.hypot(b, r)
    radius = config.wall_params.get("R", 1.0)
    return config.extras["revolutions"] * 2 * math.pi * radius / c


def _schedule(t_max: float, cadence: float, dt: float) -> tuple[float, float]:
    """Cadence dividing t_max, and the largest step <= dt dividing the cadence."""
    n_obs = max(1, int(round(t_max / cadence)))
    cadence = t_max / n_obs
    per = max(1, math.ceil(cadence / dt - 1e-9))
    return cadence, cadence / per


class PacketRun:
    """PDE evolution from the leading-order packet with the asymptotic packet as reference."""

    def __init__(self, run: Run, label: str, wall: DomainWall, potential, t_max: float,
                 epsilon: float | None = None, q: float | None = None, dt: float | None = None):
        cfg = run.config
        self.run, self.label, self.wall, self.potential = run, label, wall, potential
        self.epsilon = epsilon if epsilon is not None else cfg.epsilon
        self.q = q if q is not None else cfg.q
        self.t_max = t_max
        self.grid = grid_of(cfg)
        self.spec = WavepacketSpec(self.epsilon, cfg.y0, profile_of(cfg))
        self.track = build_track(wall, potential, cfg.y0, t_max, min(cfg.extras["track_dt"], t_max))
        self.track.to_csv(run.out / f"track_{label}.csv")
        self.dt_request = dt if dt is not None else cfg.dt
        self.asymptotic = ObservableSeries()

    def reference(self, t: float):
        ref = assemble_leading_order(self.spec, self.track, t, self.grid, q=self.q,
                                     field=self.potential, check_window=False)
        self.asymptotic.record(ref)
        return ref

    def initial(self):
        return assemble_leading_order(self.spec, self.track, 0.0, self.grid, q=self.q,
                                      field=self.potential)

    def evolve(self, initial=None, reference: Callable | None = None) -> ObservableSeries:
        cfg = self.run.config
        rolloff = cfg.grid["rolloff"]
        dt = self.dt_request
        if dt is None:
            v1, v2, v3, _ = potential_fields(self.grid, self.wall, self.potential, rolloff)
            dt = default_dt(self.grid, self.epsilon, float(np.max(np.sqrt(v1**2 + v2**2 + v3**2))))
        cadence, dt = _schedule(self.t_max, cfg.cadence, dt)
        self.dt, self.cadence = dt, cadence
        state = make_state(initial if initial is not None else self.initial(), self.wall,
                           self.potential, self.epsilon, dt=dt, rolloff=rolloff)
        observers = []
        if cfg.snapshot_every > 0:
            every = max(1, int(round(cfg.snapshot_every / cadence)))
            counter = itertools.count()

            def dump(snap):
                i = next(counter)
                if i % every == 0:
                    write_snapshot(self.run.out / f"snapshot_{self.label}_{i // every:04d}.dewp",
                                   snap)
            observers.append(dump)
        series = evolve(state, self.t_max, cadence,
                        reference=reference if reference is not None else self.reference,
                        observers=tuple(observers))
        series.to_csv(self.run.out / f"observables_{self.label}.csv")
        self.series = series
        return series

    def nu_at(self, times) -> np.ndarray:
        return np.interp(times, self.track.t, self.track.nu)

    def norm_drift(self) -> float:
        return abs(self.series.l2_norm[-1] / self.series.l2_norm[0] - 1)


# -- experiments ---------------------------------------------------------------------------

def _wall(config: SimConfig) -> DomainWall:
    return make_wall(config.wall, **config.wall_params)


def flat_slowdown(run: Run) -> None:
    cfg = run.config
    wall = _wall(cfg)
    for params in sweep(cfg):
        potential = make_potential(cfg.potential, **params)
        pr = PacketRun(run, _label(params), wall, potential, cfg.t_max)
        series = pr.evolve()
        b = params.get("B0", 0.0)
        expected = 1 / math.hypot(1.0, b)
        v_pde = speed_estimate(series)
        v_asym = speed_estimate(pr.asymptotic)
        tag = _label(params)
        run.note(f"{tag}.expected_speed", expected)
        run.note(f"{tag}.speed_pde", v_pde)
        run.note(f"{tag}.speed_asymptotic", v_asym)
        run.note(f"{tag}.speed_rel_dev_pde", abs(v_pde / expected - 1))
        run.note(f"{tag}.speed_rel_dev_pde_vs_asymptotic", abs(v_pde / v_asym - 1))
        run.note(f"{tag}.norm_drift", pr.norm_drift())


def flat_exact_oracle(run: Run) -> None:
    """Step-size self-convergence against the exact translating solution."""
    cfg = run.config
    wall = _wall(cfg)
    params = sweep(cfg)[0]
    b = params.get("B0", 0.0)
    potential = make_potential(cfg.potential, **params)
    base = cfg.dt if cfg.dt is not None else 0.02
    errors = []
    for level in range(3):
        pr = PacketRun(run, f"dt{level}", wall, potential, cfg.t_max, dt=base / 2**level)
        exact = lambda t, pr=pr: exact_flat_solution(b, pr.spec, t, pr.grid)
        series = pr.evolve(initial=exact(0.0), reference=exact)
        errors.append(series.l2_err[-1])
        run.note(f"dt{level}.dt", pr.dt)
        run.note(f"dt{level}.l2_error", series.l2_err[-1])
        run.note(f"dt{level}.norm_drift", pr.norm_drift())
    ratios = [errors[i] / errors[i + 1] for i in range(len(errors) - 1)]
    run.note("error_ratios", ratios)


def _circle_common(run: Run, label: str, potential=None):
    cfg = run.config
    wall = _wall(cfg)
    potential = potential or make_potential(cfg.potential, **sweep(cfg)[0])
    t_max = cfg.t_max if cfg.t_max is not None else _revolution_time(cfg, wall, potential)
    pr = PacketRun(run, label, wall, potential, t_max)
    pr.evolve()
    return pr


def circle_dispersion(run: Run) -> None:
    cfg = run.config
    pr = _circle_common(run, "circle")
    series = pr.series
    amp = np.asarray(series.max_amp)
    nu = np.abs(pr.nu_at(series.times))
    nu_max = float(nu[-1])
    run.note("t_max", pr.t_max)
    run.note("nu_max", nu_max)
    run.note("amplitude_drop", float(1 - amp[-1] / amp[0]))
    window = (cfg.extras["fit_nu_min"], nu_max)
    run.note("fit_window", list(window))
    try:
        run.note("exponent", fit_power_law(nu, amp, window))
    except ValueError as exc:
        run.note("exponent", f"n/a ({exc})")
    # upper half of the attainable nu range, always available as a diagnostic
    try:
        run.note("exponent_upper_half", fit_power_law(nu, amp, (0.5 * nu_max, nu_max)))
    except ValueError as exc:
        run.note("exponent_upper_half", f"n/a ({exc})")
    asym = np.asarray(pr.asymptotic.max_amp)
    run.note("asymptotic_amplitude_drop", float(1 - asym[-1] / asym[0]))
    run.note("norm_drift", pr.norm_drift())


def no_dispersion(run: Run) -> None:
    pr = _circle_common(run, "circle")
    amp = np.asarray(pr.series.max_amp)
    track = pr.track
    rates = [dispersion_rate(track, i) for i in range(len(track))]
    run.note("t_max", pr.t_max)
    run.note("nu_max_abs", float(np.max(np.abs(track.nu))))
    run.note("dispersion_rate_max_abs", float(np.max(np.abs(rates))))
    run.note("amplitude_drop", float(1 - amp[-1] / amp[0]))
    run.note("amplitude_min_ratio", float(amp.min() / amp[0]))
    run.note("norm_drift", pr.norm_drift())


def aharonov_bohm(run: Run) -> None:
    cfg = run.config
    params = sweep(cfg)[0]
    for label, flux in (("flux", params["Phi"]), ("control", 0.0)):
        potential = make_potential(cfg.potential, **{**params, "Phi": flux})
        pr = _circle_common(run, label, potential)
        total = pr.series.phase[-1] - pr.series.phase[0]
        run.note(f"{label}.Phi", float(flux))
        run.note(f"{label}.expected_phase", float(flux / cfg.epsilon))
        run.note(f"{label}.phase_total", [float(v) for v in total])
        run.note(f"{label}.turns", [float(v / (2 * math.pi)) for v in total])
        run.note(f"{label}.norm_drift", pr.norm_drift())


def log_speed_identity(track: CoefficientTrack) -> float:
    """max |j gamma - d ln c / dt| with a fourth-order time derivative."""
    dlnc = _d1_4th(np.log(track.c), float(track.t[1] - track.t[0]))
    return float(np.max(np.abs(track.j * track.gamma - dlnc)))


def _flat_sweep(run: Run, extra: Callable[[str, PacketRun], None]) -> None:
    cfg = run.config
    wall = _wall(cfg)
    for params in sweep(cfg):
        potential = make_potential(cfg.potential, **params)
        tag = _label({k: params[k] for k in swept_keys(cfg)}) if swept_keys(cfg) else "base"
        pr = PacketRun(run, tag, wall, potential, cfg.t_max)
        pr.evolve()
        amp = np.asarray(pr.series.max_amp)
        run.note(f"{tag}.params", _label(params))
        run.note(f"{tag}.nu_final", float(pr.track.nu[-1]))
        run.note(f"{tag}.amplitude_final_ratio", float(amp[-1] / amp[0]))
        run.note(f"{tag}.amplitude_min_ratio", float(amp.min() / amp[0]))
        run.note(f"{tag}.norm_drift", pr.norm_drift())
        extra(tag, pr)


def varying_B_ramp(run: Run) -> None:
    def extra(tag, pr):
        series = pr.series
        run.note(f"{tag}.speed_start", float(series.speeds()[1]))
        run.note(f"{tag}.speed_end", float(series.speeds()[-2]))
        run.note(f"{tag}.c_start", float(pr.track.c[0]))
        run.note(f"{tag}.c_end", float(pr.track.c[-1]))
        run.note(f"{tag}.log_speed_identity", log_speed_identity(pr.track))
    _flat_sweep(run, extra)


def varying_B_transverse(run: Run) -> None:
    def extra(tag, pr):
        t = pr.series.times
        amp = np.asarray(pr.series.max_amp)
        try:
            p = fit_power_law(t, amp, (0.5 * pr.t_max, pr.t_max))
        except ValueError as exc:
            p = f"n/a ({exc})"
        run.note(f"{tag}.exponent_vs_t", p)
    _flat_sweep(run, extra)


def varying_B_periodic(run: Run) -> None:
    def extra(tag, pr):
        amp = np.asarray(pr.series.max_amp) / pr.series.max_amp[0]
        t = pr.series.times
        first = int(np.argmin(np.where(t <= 0.5 * pr.t_max, amp, np.inf)))
        run.note(f"{tag}.time_of_min_amplitude", float(t[int(np.argmin(amp))]))
        run.note(f"{tag}.first_dip_time", float(t[first]))
        run.note(f"{tag}.first_dip_ratio", float(amp[first]))
        run.note(f"{tag}.recovered_ratio", float(np.max(amp[first:])))
        run.note(f"{tag}.nu_range", [float(pr.track.nu.min()), float(pr.track.nu.max())])
    _flat_sweep(run, extra)


def epsilon_convergence(run: Run) -> None:
    """sup_t L2 error between PDE and leading-order packet, per epsilon and gauge switch."""
    cfg = run.config
    wall = _wall(cfg)
    potential = make_potential(cfg.potential, **sweep(cfg)[0])
    epsilons = cfg.extras["epsilons"]
    for q in (0.5, 1.0):
        errors = []
        for eps in epsilons:
            dt = cfg.dt if cfg.dt is not None else eps / 20
            pr = PacketRun(run, f"q{q:g}_eps{eps:g}", wall, potential, cfg.t_max,
                           epsilon=eps, q=q, dt=dt)
            series = pr.evolve()
            errors.append(float(np.max(series.l2_err)))
        slope = float(np.polyfit(np.log(epsilons), np.log(errors), 1)[0])
        run.note(f"q{q:g}.sup_errors", errors)
        run.note(f"q{q:g}.slope", slope)
    run.note("epsilons", list(epsilons))


def coefficient_dump(run: Run) -> None:
    cfg = run.config
    wall = _wall(cfg)
    for params in sweep(cfg):
        potential = make_potential(cfg.potential, **params)
        tag = _label(params)
        track = build_track(wall, potential, cfg.y0, cfg.t_max, cfg.extras["track_dt"])
        track.to_csv(run.out / f"track_{tag}.csv")
        rates = [dispersion_rate(track, i) for i in range(len(track))]
        run.note(f"{tag}.samples", len(track))
        run.note(f"{tag}.log_speed_identity", log_speed_identity(track))
        run.note(f"{tag}.dispersion_rate_range", [float(min(rates)), float(max(rates))])
        run.note(f"{tag}.nu_final", float(track.nu[-1]))
        run.note(f"{tag}.c_range", [float(track.c.min()), float(track.c.max())])


REGISTRY: dict[str, Callable[[Run], None]] = {
    "flat_slowdown": flat_slowdown,
    "flat_exact_oracle": flat_exact_oracle,
    "circle_dispersion": circle_dispersion,
    "no_dispersion": no_dispersion,
    "aharonov_bohm": aharonov_bohm,
    "varying_B_ramp": varying_B_ramp,
    "varying_B_transverse": varying_B_transverse,
    "varying_B_periodic": varying_B_periodic,
    "epsilon_convergence": epsilon_convergence,
    "coefficient_dump": coefficient_dump,
}


def run_experiment(config: SimConfig) -> Run:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    resolved = config.resolved_text()
    (out / "resolved_config.ini").write_text(resolved)
    run = Run(config=config, out=out)
    run.summary.append(f"config_hash: {config.digest()}")
    run.summary.append(f"experiment: {config.experiment}")
    run.summary.append(f"profile: {config.profile_file or f'gaussian sigma={config.sigma!r}'}")
    try:
        REGISTRY[config.experiment](run)
    except NumericalContractError as exc:
        raise type(exc)(f"experiment {config.experiment!r}: {exc}") from exc
    finally:
        (out / "summary.txt").write_text("\n".join(run.summary) + "\n")
    return run
