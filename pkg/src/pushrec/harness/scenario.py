"""Scenario description and its YAML file format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from pushrec.centroidal_model import ModelParams, State
from pushrec.constraints import FootGeometry, FrictionModel
from pushrec.cost import Weights
from pushrec.errors import ConfigurationError, InvalidArgument

DEFAULT_SCENARIO = "push_recovery.yaml"


@dataclass(frozen=True)
class Push:
    start_time: float
    duration: float
    force: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "force", np.asarray(self.force, dtype=float).reshape(3))
        if self.start_time < 0 or self.duration < 0:
            raise ConfigurationError("push start_time and duration must be non-negative")


@dataclass(frozen=True)
class StepPlan:
    t_impact_nominal: float  # seconds after the push is detected
    swing_target: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "swing_target", np.asarray(self.swing_target, dtype=float).reshape(3))


@dataclass(frozen=True)
class IcpConfig:
    """Source of the CoM height used for the pendulum frequency.

    ``None`` uses the measured CoM height at every controller tick.
    """

    nominal_height: float | None = None

    def __post_init__(self):
        if self.nominal_height is not None and not self.nominal_height > 0:
            raise ConfigurationError("icp.nominal_height must be positive")


@dataclass(frozen=True)
class Scenario:
    dt: float
    horizon_n: int
    total_time: float
    model: ModelParams
    foot_geom: FootGeometry
    friction: FrictionModel
    weights: Weights
    icp: IcpConfig
    push: Push
    step_plan: StepPlan
    initial_state: State
    min_normal_force: float = 0.0
    max_normal_force: float | None = None

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError("dt must be positive")
        if int(self.horizon_n) != self.horizon_n or self.horizon_n < 1:
            raise ConfigurationError("horizon_n must be a positive integer")
        if self.total_time < self.push.start_time + self.push.duration:
            raise ConfigurationError("total_time must cover the whole push")
        if self.min_normal_force < 0:
            raise ConfigurationError("min_normal_force must be non-negative")
        if self.max_normal_force is not None and not self.max_normal_force > self.min_normal_force:
            raise ConfigurationError("max_normal_force must exceed min_normal_force")
        if not self.step_plan.t_impact_nominal > 0:
            raise ConfigurationError("step_plan.t_impact_nominal must be positive")
        for name, value in (
            ("step_plan.t_impact_nominal", self.step_plan.t_impact_nominal),
            ("push.start_time", self.push.start_time),
            ("push.duration", self.push.duration),
        ):
            if not _is_multiple(value, self.dt):
                raise ConfigurationError(f"{name} must be a multiple of dt")
        if not np.allclose(self.model.right_foot_pos, self.step_plan.swing_target):
            raise ConfigurationError("model.right_foot_pos must equal step_plan.swing_target")

    def ticks(self, seconds: float) -> int:
        return int(round(seconds / self.dt))

    @property
    def num_ticks(self) -> int:
        return self.ticks(self.total_time)

    def with_overrides(self, horizon_n=None, dt=None, push_mag=None) -> "Scenario":
        changes = {}
        if horizon_n is not None:
            changes["horizon_n"] = int(horizon_n)
        if dt is not None:
            changes["dt"] = float(dt)
        if push_mag is not None:
            f = self.push.force
            direction = f / np.linalg.norm(f) if np.linalg.norm(f) > 0 else np.array([0.0, -1.0, 0.0])
            changes["push"] = dataclasses.replace(self.push, force=float(push_mag) * direction)
        return dataclasses.replace(self, **changes) if changes else self


def _is_multiple(value: float, dt: float) -> bool:
    q = value / dt
    return abs(q - round(q)) <= 1e-9 * max(1.0, abs(q))


_SECTIONS = {
    "model": {"mass", "gravity_accel", "left_foot_pos", "right_foot_pos"},
    "foot_geom": {"half_length", "half_width"},
    "friction": {"mu", "num_facets"},
    "weights": {"k_gamma", "k_gamma_imp", "k_f", "k_icp", "k_df"},
    "icp": {"nominal_height"},
    "push": {"start_time", "duration", "force"},
    "step_plan": {"t_impact_nominal", "swing_target"},
    "initial_state": {"com_pos", "com_vel", "ang_mom"},
}
_SCALARS = {"dt", "horizon_n", "total_time", "min_normal_force", "max_normal_force"}
_REQUIRED_TOP = {"dt", "horizon_n", "total_time", "model", "foot_geom", "friction", "push", "step_plan", "initial_state"}


def _check_keys(where: str, got: dict, allowed: set) -> None:
    if not isinstance(got, dict):
        raise ConfigurationError(f"{where} must be a mapping")
    unknown = set(got) - allowed
    if unknown:
        raise ConfigurationError(f"unknown keys in {where}: {sorted(unknown)}")


def scenario_from_dict(data: dict) -> Scenario:
    _check_keys("scenario", data, _SCALARS | set(_SECTIONS))
    missing = _REQUIRED_TOP - set(data)
    if missing:
        raise ConfigurationError(f"missing scenario keys: {sorted(missing)}")
    for section, keys in _SECTIONS.items():
        if section in data:
            _check_keys(section, data[section], keys)
    try:
        step_plan = StepPlan(**data["step_plan"])
        model = dict(data["model"])
        model.setdefault("right_foot_pos", step_plan.swing_target)
        weights = Weights(**data["weights"]) if "weights" in data else Weights.default()
        if "weights" in data and set(data["weights"]) != _SECTIONS["weights"]:
            raise ConfigurationError("weights must list all five gain matrices")
        return Scenario(
            dt=float(data["dt"]),
            horizon_n=data["horizon_n"],
            total_time=float(data["total_time"]),
            model=ModelParams(**model),
            foot_geom=FootGeometry(**data["foot_geom"]),
            friction=FrictionModel(**data["friction"]),
            weights=weights,
            icp=IcpConfig(**data.get("icp", {})),
            push=Push(**data["push"]),
            step_plan=step_plan,
            initial_state=State(**data["initial_state"]),
            min_normal_force=float(data.get("min_normal_force", 0.0)),
            max_normal_force=None if data.get("max_normal_force") is None else float(data["max_normal_force"]),
        )
    except (TypeError, InvalidArgument) as exc:
        raise ConfigurationError(str(exc)) from exc


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"malformed scenario file {path}: {exc}") from exc
    return scenario_from_dict(data)


def default_scenario_text() -> str:
    return resources.files("pushrec.harness").joinpath(DEFAULT_SCENARIO).read_text(encoding="utf-8")


def default_scenario() -> Scenario:
    return scenario_from_dict(yaml.safe_load(default_scenario_text()))
