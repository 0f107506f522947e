"""Line-oriented experiment configuration: ``[section]`` headers and ``key = value`` lines.

Values may be quoted. Lists are comma separated. Every error carries the line
number; unknown keys name the closest valid key.
"""

from __future__ import annotations

import difflib
import hashlib
import math
from dataclasses import dataclass, field

from .errors import ConfigError

EXPERIMENTS = (
    "flat_slowdown", "flat_exact_oracle", "circle_dispersion", "no_dispersion",
    "aharonov_bohm", "varying_B_ramp", "varying_B_transverse", "varying_B_periodic",
    "epsilon_convergence", "coefficient_dump",
)

WALL_KEYS = ("wall", "m", "R", "angle", "amplitude")
POTENTIAL_KEYS = ("potential", "B0", "B2", "Phi", "r_core", "x_ramp", "period", "angle")

# key -> value kind
SCHEMA: dict[str, dict[str, str]] = {
    "experiment": {
        "experiment": "str", "epsilon": "float", "epsilons": "floats", "t_max": "float",
        "revolutions": "float", "dt": "float", "cadence": "float", "q": "float",
        "sigma": "float", "profile_file": "str", "y0": "pair", "track_dt": "float",
        "fit_nu_min": "float",
    },
    "wall": {"wall": "str", "m": "float", "R": "float", "angle": "float", "amplitude": "float"},
    "potential": {"potential": "str", "B0": "floats", "B2": "floats", "Phi": "float",
                  "r_core": "float", "x_ramp": "float", "period": "float", "angle": "float"},
    "grid": {"nx": "int", "ny": "int", "x0": "float", "x1": "float", "y0": "float",
             "y1": "float", "rolloff": "float"},
    "output": {"dir": "str", "snapshot_every": "float"},
}

# may be zero or negative
SIGNED = {("experiment", "y0"), ("grid", "x0"), ("grid", "x1"), ("grid", "y0"), ("grid", "y1"),
          ("potential", "B0"), ("potential", "B2"), ("potential", "Phi"),
          ("potential", "x_ramp"), ("wall", "angle"), ("potential", "angle"),
          ("output", "snapshot_every"), ("wall", "amplitude")}

DEFAULTS: dict[str, dict[str, object]] = {
    "experiment": {"epsilon": 0.05, "epsilons": [0.2, 0.1, 0.05], "q": 0.5, "sigma": 1.0,
                   "track_dt": 0.005, "fit_nu_min": 5.0, "revolutions": 1.0},
    "grid": {"nx": 1024, "ny": 1024, "rolloff": 0.1},
    "output": {"snapshot_every": 0.0},
}

# per-experiment defaults layered under the user's values
SCENARIOS: dict[str, dict[str, dict[str, object]]] = {
    "flat_slowdown": {
        "experiment": {"t_max": 2.0, "cadence": 0.05, "y0": (0.0, 0.0)},
        "wall": {"wall": "flat"},
        "potential": {"potential": "constant", "B0": [0.0, 0.5, 1.0, 1.5, 2.0]},
        "grid": {"x0": -7.0, "x1": 5.0, "y0": -5.0, "y1": 5.0},
    },
    "flat_exact_oracle": {
        "experiment": {"t_max": 1.0, "cadence": 0.25, "y0": (0.0, 0.0), "dt": 0.02},
        "wall": {"wall": "flat"},
        "potential": {"potential": "constant", "B0": [1.0]},
        "grid": {"x0": -7.0, "x1": 5.0, "y0": -5.0, "y1": 5.0},
    },
    "circle_dispersion": {
        "experiment": {"cadence": 0.05, "y0": (1.0, 0.0)},
        "wall": {"wall": "circle_quadratic", "R": 1.0},
        "potential": {"potential": "circle_constant", "B0": [1 / math.sqrt(2)]},
        "grid": {"x0": -2.5, "x1": 2.5, "y0": -2.5, "y1": 2.5},
    },
    "no_dispersion": {
        "experiment": {"cadence": 0.05, "y0": (1.0, 0.0)},
        "wall": {"wall": "circle_power_m", "m": 4.0, "R": 1.0},
        "potential": {"potential": "circle_constant", "B0": [1.0]},
        "grid": {"x0": -3.5, "x1": 3.5, "y0": -3.5, "y1": 3.5},
    },
    "aharonov_bohm": {
        "experiment": {"cadence": 0.05, "y0": (1.0, 0.0), "epsilon": 0.075},
        "wall": {"wall": "circle_quadratic", "R": 1.0},
        "potential": {"potential": "flux_line", "Phi": 2 * math.pi, "r_core": 0.2},
        "grid": {"x0": -4.5, "x1": 4.5, "y0": -4.5, "y1": 4.5},
    },
    "varying_B_ramp": {
        "experiment": {"t_max": 6.0, "cadence": 0.1, "y0": (5.0, 0.0)},
        "wall": {"wall": "flat"},
        "potential": {"potential": "tanh_ramp", "B0": [1.0], "x_ramp": 2.0},
        "grid": {"x0": -3.0, "x1": 10.0, "y0": -5.0, "y1": 5.0},
    },
    "varying_B_transverse": {
        "experiment": {"t_max": 8.0, "cadence": 0.1, "y0": (3.0, 0.0)},
        "wall": {"wall": "flat"},
        "potential": {"potential": "transverse_linear", "B0": [1.0], "B2": [0.0, 0.5, 1.0]},
        # wide on both sides: the packet disperses ahead, and states trapped where B
        # vanishes drift backwards
        "grid": {"x0": -14.0, "x1": 20.0, "y0": -5.0, "y1": 5.0},
    },
    "varying_B_periodic": {
        "experiment": {"t_max": 15.0, "cadence": 0.1, "y0": (0.0, 0.0)},
        "wall": {"wall": "flat"},
        "potential": {"potential": "periodic_modulation", "B0": [1.0], "B2": [1.0],
                      "period": 15.0},
        "grid": {"x0": -20.0, "x1": 20.0, "y0": -5.0, "y1": 5.0},
    },
    "epsilon_convergence": {
        "experiment": {"t_max": 1.0, "cadence": 0.1, "y0": (1.0, 0.0)},
        "wall": {"wall": "circle_quadratic", "R": 1.0},
        "potential": {"potential": "circle_constant", "B0": [1 / math.sqrt(2)]},
        "grid": {"x0": -3.5, "x1": 3.5, "y0": -3.5, "y1": 3.5},
    },
    "coefficient_dump": {
        "experiment": {"t_max": 6.0, "cadence": 0.1, "y0": (5.0, 0.0)},
        "wall": {"wall": "flat"},
        "potential": {"potential": "tanh_ramp", "B0": [1.0], "x_ramp": 2.0},
        "grid": {"x0": -3.0, "x1": 10.0, "y0": -5.0, "y1": 5.0},
    },
}


@dataclass
class SimConfig:
    experiment: str
    epsilon: float
    wall: str
    wall_params: dict
    potential: str
    potential_params: dict
    grid: dict
    t_max: float | None
    cadence: float
    dt: float | None
    q: float
    sigma: float
    profile_file: str | None
    y0: tuple[float, float]
    out_dir: str
    snapshot_every: float
    extras: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    def resolved_text(self) -> str:
        lines = []
        for section in SCHEMA:
            lines.append(f"[{section}]")
            for key, value in self.values.get(section, {}).items():
                lines.append(f"{key} = {_format(value)}")
            lines.append("")
        return "\n".join(lines)

    def digest(self) -> str:
        return hashlib.sha256(self.resolved_text().encode()).hexdigest()


def _format(value) -> str:
    if isinstance(value, (list, tuple)):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(kind: str, raw: str, line: int, key: str):
    text = raw.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        text = text[1:-1]
    try:
        if kind == "str":
            if not text:
                raise ValueError
            return text
        if kind == "int":
            value = int(text)
            return value
        if kind == "float":
            value = float(text)
            if not math.isfinite(value):
                raise ValueError
            return value
        if kind in ("floats", "pair"):
            items = [float(p) for p in text.split(",")]
            if not all(math.isfinite(v) for v in items):
                raise ValueError
            if kind == "pair":
                if len(items) != 2:
                    raise ValueError
                return tuple(items)
            return items
    except ValueError:
        raise ConfigError(f"malformed {kind} value {raw.strip()!r} for key {key!r}", line) from None
    raise AssertionError(kind)


def _suggest(word: str, options) -> str:
    match = difflib.get_close_matches(word, list(options), n=1, cutoff=0.0)
    return f"; did you mean {match[0]!r}?" if match else ""


def parse_raw(text: str) -> dict[str, dict[str, tuple[object, int]]]:
    sections: dict[str, dict[str, tuple[object, int]]] = {}
    current = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw_line.strip()!r}", lineno)
            current = line[1:-1].strip()
            if current not in SCHEMA:
                raise ConfigError(f"unknown section [{current}]" + _suggest(current, SCHEMA), lineno)
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", lineno)
        if current is None:
            raise ConfigError("key outside of any section", lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        valid = SCHEMA[current]
        if key not in valid:
            raise ConfigError(f"unknown key {key!r} in [{current}]" + _suggest(key, valid), lineno)
        if key in sections[current]:
            raise ConfigError(f"duplicate key {key!r} in [{current}]", lineno)
        sections[current][key] = (_parse_value(valid[key], value, lineno, key), lineno)
    return sections


def parse_config(text: str) -> SimConfig:
    raw = parse_raw(text)
    if "experiment" not in raw.get("experiment", {}):
        raise ConfigError("missing required key 'experiment' in [experiment]",
                          max(1, len(text.splitlines())))
    name, line = raw["experiment"]["experiment"]
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}" + _suggest(name, EXPERIMENTS), line)

    values: dict[str, dict[str, object]] = {}
    for section in SCHEMA:
        merged: dict[str, object] = {"experiment": name} if section == "experiment" else {}
        merged.update(DEFAULTS.get(section, {}))
        merged.update(SCENARIOS[name].get(section, {}))
        merged.update({k: v for k, (v, _) in raw.get(section, {}).items()})
        values[section] = merged

    for section, entries in raw.items():
        for key, (value, lineno) in entries.items():
            _validate(section, key, value, lineno)

    from .presets import POTENTIALS, WALLS

    exp, wall, pot, grid, out = (values[s] for s in SCHEMA)
    if wall["wall"] not in WALLS:
        raise ConfigError(f"unknown wall {wall['wall']!r}" + _suggest(wall["wall"], WALLS),
                          raw.get("wall", {}).get("wall", (None, None))[1])
    if pot["potential"] not in POTENTIALS:
        raise ConfigError(
            f"unknown potential {pot['potential']!r}" + _suggest(pot["potential"], POTENTIALS),
            raw.get("potential", {}).get("potential", (None, None))[1])
    if exp["q"] not in (0.5, 1.0):
        raise ConfigError("q must be 0.5 or 1", raw["experiment"].get("q", (None, None))[1])
    if not 0 < exp["epsilon"] <= 1:
        raise ConfigError("epsilon must lie in (0, 1]", raw["experiment"].get("epsilon", (None, None))[1])
    if grid["x1"] <= grid["x0"] or grid["y1"] <= grid["y0"]:
        raise ConfigError("grid extents must satisfy x0 < x1 and y0 < y1")
    if not 0 < grid["rolloff"] < 0.5:
        raise ConfigError("rolloff must lie in (0, 0.5)", raw.get("grid", {}).get("rolloff", (None, None))[1])

    wall_factory_keys = set(WALLS[wall["wall"]][1])
    pot_factory_keys = set(POTENTIALS[pot["potential"]][1])
    wall_params = {k: v for k, v in wall.items() if k in wall_factory_keys}
    potential_params = {k: v for k, v in pot.items() if k in pot_factory_keys}
    for k, (v, lineno) in raw.get("wall", {}).items():
        if k != "wall" and k not in wall_factory_keys:
            raise ConfigError(f"wall {wall['wall']!r} takes no parameter {k!r}", lineno)
    for k, (v, lineno) in raw.get("potential", {}).items():
        if k != "potential" and k not in pot_factory_keys:
            raise ConfigError(f"potential {pot['potential']!r} takes no parameter {k!r}", lineno)

    # keep only meaningful keys in the resolved echo
    values["wall"] = {"wall": wall["wall"], **wall_params}
    values["potential"] = {"potential": pot["potential"], **potential_params}
    out.setdefault("dir", f"out/{name}")

    extras = {k: exp[k] for k in ("epsilons", "track_dt", "fit_nu_min", "revolutions")}
    return SimConfig(
        experiment=name, epsilon=exp["epsilon"], wall=wall["wall"], wall_params=wall_params,
        potential=pot["potential"], potential_params=potential_params, grid=grid,
        t_max=exp.get("t_max"), cadence=exp["cadence"], dt=exp.get("dt"), q=exp["q"],
        sigma=exp["sigma"], profile_file=exp.get("profile_file"), y0=tuple(exp["y0"]),
        out_dir=out["dir"], snapshot_every=out["snapshot_every"], extras=extras, values=values,
    )


def _validate(section: str, key: str, value, line: int) -> None:
    if (section, key) in SIGNED or isinstance(value, str):
        return
    items = value if isinstance(value, (list, tuple)) else [value]
    if any(v <= 0 for v in items):
        raise ConfigError(f"{key!r} must be positive", line)


def override(config: SimConfig, dt: float | None = None, grid: int | None = None,
             out: str | None = None) -> SimConfig:
    """Apply command-line overrides, keeping the resolved echo in sync."""
    if dt is not None:
        if not (dt > 0 and math.isfinite(dt)):
            raise ConfigError("--dt must be positive")
        config.dt = dt
        config.values["experiment"]["dt"] = dt
    if grid is not None:
        if grid < 4:
            raise ConfigError("--grid must be at least 4")
        config.grid["nx"] = config.grid["ny"] = grid
    if out is not None:
        config.out_dir = out
        config.values["output"]["dir"] = out
    return config
