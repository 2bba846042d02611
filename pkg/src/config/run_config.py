"""
Declarative run description: particle, initial width, stage list, pre- and
post-selection, grid and output settings. Loaded from and written to JSON.
"""

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..domain.errors import ConfigError, InvalidRange
from ..domain.gaussian import Representation
from ..domain.sgevolve import PARTICLE_PRESETS, Axis, Particle, SGStage
from ..domain.spin import Spinor, parse_spinor
from .settings import CM_TO_M, DEFAULT_GRID_POINTS, HBAR, MIN_GRID_POINTS


@dataclass(frozen=True)
class ParticleConfig:
    preset: Optional[str] = "neutron"
    mass: Optional[float] = None
    magnetic_moment: Optional[float] = None
    hbar: Optional[float] = None

    def build(self) -> Particle:
        if self.preset is not None:
            return PARTICLE_PRESETS[self.preset]()
        return Particle(mass=self.mass, magnetic_moment=self.magnetic_moment,
                        hbar=self.hbar if self.hbar is not None else HBAR)


@dataclass(frozen=True)
class StageConfig:
    axis: str
    gradient_gauss_per_cm: float
    transit_time: float
    field_length_cm: float = 0.0

    def build(self) -> SGStage:
        return SGStage.from_cgs(Axis.parse(self.axis), self.gradient_gauss_per_cm,
                                self.transit_time, self.field_length_cm)


@dataclass(frozen=True)
class RunConfig:
    name: str
    delta_cm: float
    stages: Tuple[StageConfig, ...]
    preselect: Dict[str, Any]
    postselect: Dict[str, Any]
    particle: ParticleConfig = field(default_factory=ParticleConfig)
    representation: str = "momentum"
    grid_points: int = DEFAULT_GRID_POINTS
    seed: int = 0
    out_dir: Optional[str] = None
    provenance: str = ""

    @property
    def delta(self) -> float:
        return self.delta_cm * CM_TO_M

    def build_particle(self) -> Particle:
        return self.particle.build()

    def build_stages(self) -> List[SGStage]:
        return [s.build() for s in self.stages]

    def chi_in(self) -> Spinor:
        return parse_spinor(self.preselect, field="preselect")

    def chi_f(self) -> Spinor:
        return parse_spinor(self.postselect, field="postselect")

    @property
    def pointer_representation(self) -> Representation:
        return Representation(self.representation)

    def with_overrides(self, **changes) -> "RunConfig":
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)


def _number(data: Mapping[str, Any], key: str, path: str, required: bool = True,
            default: Optional[float] = None) -> Optional[float]:
    if key not in data:
        if required:
            raise ConfigError("missing required field", field=f"{path}{key}")
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", field=f"{path}{key}")
    if not math.isfinite(value):
        raise ConfigError("must be finite", field=f"{path}{key}")
    return float(value)


def _spinor_spec(value: Any, path: str) -> Dict[str, Any]:
    """Validate a spinor entry and return it in canonical form."""
    parse_spinor(value, field=path)
    if "theta_deg" in value:
        return {"theta_deg": float(value["theta_deg"]),
                "phi_deg": float(value.get("phi_deg", 0.0))}
    return {"up": _pair(value["up"]), "down": _pair(value["down"])}


def _pair(value: Any) -> List[float]:
    if isinstance(value, (list, tuple)):
        return [float(value[0]), float(value[1])]
    return [float(value), 0.0]


def _particle_from_dict(data: Any) -> ParticleConfig:
    if data is None:
        return ParticleConfig()
    if isinstance(data, str):
        data = {"preset": data}
    if not isinstance(data, Mapping):
        raise ConfigError("expected a preset name or an object", field="particle")
    preset = data.get("preset")
    if preset is not None:
        if preset not in PARTICLE_PRESETS:
            raise ConfigError(f"unknown particle preset {preset!r}", field="particle.preset")
        return ParticleConfig(preset=preset)
    mass = _number(data, "mass", "particle.")
    moment = _number(data, "magnetic_moment", "particle.")
    hbar = _number(data, "hbar", "particle.", required=False)
    for key, value in (("mass", mass), ("magnetic_moment", moment), ("hbar", hbar)):
        if value is not None and value <= 0:
            raise ConfigError("must be positive", field=f"particle.{key}")
    return ParticleConfig(preset=None, mass=mass, magnetic_moment=moment, hbar=hbar)


def _stage_from_dict(data: Any, index: int) -> StageConfig:
    path = f"stages[{index}]."
    if not isinstance(data, Mapping):
        raise ConfigError("expected an object", field=f"stages[{index}]")
    axis = str(data.get("axis", ""))
    if axis.lower() not in ("x", "z"):
        raise ConfigError(f"unknown stage axis {axis!r} (expected 'x' or 'z')",
                          field=f"{path}axis")
    tau = _number(data, "transit_time", path)
    if tau < 0:
        raise ConfigError("must be >= 0", field=f"{path}transit_time")
    return StageConfig(axis=axis.lower(),
                       gradient_gauss_per_cm=_number(data, "gradient_gauss_per_cm", path),
                       transit_time=tau,
                       field_length_cm=_number(data, "field_length_cm", path,
                                               required=False, default=0.0))


def run_config_from_dict(data: Mapping[str, Any]) -> RunConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("run configuration must be a JSON object")
    delta_cm = _number(data, "delta_cm", "")
    if delta_cm <= 0:
        raise ConfigError("must be positive", field="delta_cm")

    stages_raw = data.get("stages")
    if not isinstance(stages_raw, list) or not stages_raw:
        raise ConfigError("expected a non-empty list of stages", field="stages")
    stages = tuple(_stage_from_dict(s, i) for i, s in enumerate(stages_raw))

    for key in ("preselect", "postselect"):
        if key not in data:
            raise ConfigError("missing required field", field=key)

    representation = data.get("representation", "momentum")
    if representation not in {r.value for r in Representation}:
        raise ConfigError(f"expected 'momentum' or 'position', got {representation!r}",
                          field="representation")

    grid_points = data.get("grid_points", DEFAULT_GRID_POINTS)
    if isinstance(grid_points, bool) or not isinstance(grid_points, int) \
            or grid_points < MIN_GRID_POINTS:
        raise ConfigError(f"expected an integer >= {MIN_GRID_POINTS}", field="grid_points")
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("expected a non-negative integer", field="seed")

    return RunConfig(
        name=str(data.get("name", "custom")),
        delta_cm=delta_cm,
        stages=stages,
        preselect=_spinor_spec(data["preselect"], "preselect"),
        postselect=_spinor_spec(data["postselect"], "postselect"),
        particle=_particle_from_dict(data.get("particle")),
        representation=representation,
        grid_points=grid_points,
        seed=seed,
        out_dir=data.get("out_dir"),
        provenance=str(data.get("provenance", "")),
    )


def run_config_to_dict(config: RunConfig) -> Dict[str, Any]:
    if config.particle.preset is not None:
        particle: Dict[str, Any] = {"preset": config.particle.preset}
    else:
        particle = {"mass": config.particle.mass,
                    "magnetic_moment": config.particle.magnetic_moment}
        if config.particle.hbar is not None:
            particle["hbar"] = config.particle.hbar
    return {
        "name": config.name,
        "particle": particle,
        "delta_cm": config.delta_cm,
        "stages": [{"axis": s.axis,
                    "gradient_gauss_per_cm": s.gradient_gauss_per_cm,
                    "transit_time": s.transit_time,
                    "field_length_cm": s.field_length_cm} for s in config.stages],
        "preselect": dict(config.preselect),
        "postselect": dict(config.postselect),
        "representation": config.representation,
        "grid_points": config.grid_points,
        "seed": config.seed,
        "out_dir": config.out_dir,
        "provenance": config.provenance,
    }


def load_run_config(path: str) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", line=e.lineno)
    return run_config_from_dict(data)


def save_run_config(config: RunConfig, path: str):
    with open(path, 'w') as f:
        json.dump(run_config_to_dict(config), f, indent=2)


SWEEP_VARIABLES = ("b", "tau", "delta", "theta")


@dataclass(frozen=True)
class SweepSpec:
    """b in G/cm, tau in s, delta in cm, theta in degrees."""
    variable: str
    start: float
    stop: float
    count: int
    log: bool = False

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise InvalidRange(f"sweep variable must be one of {SWEEP_VARIABLES}, "
                               f"got {self.variable!r}")
        if self.count < 1:
            raise InvalidRange(f"sweep needs at least one point, got {self.count}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise InvalidRange("sweep bounds must be finite")
        if self.log and (self.start <= 0 or self.stop <= 0):
            raise InvalidRange("logarithmic sweep bounds must be positive")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        if self.log:
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)

    def apply(self, config: RunConfig, value: float) -> RunConfig:
        """Config with the swept quantity set; b and tau act on the first stage."""
        value = float(value)
        if self.variable == "delta":
            return replace(config, delta_cm=value)
        if self.variable == "theta":
            return replace(config, preselect={"theta_deg": value, "phi_deg": 0.0})
        first = config.stages[0]
        if self.variable == "b":
            first = replace(first, gradient_gauss_per_cm=value)
        else:
            first = replace(first, transit_time=value)
        return replace(config, stages=(first,) + tuple(config.stages[1:]))
