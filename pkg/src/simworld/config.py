"""
Simulator configuration and maneuver scripts.
"""
from typing import Dict, Literal

from pydantic import Field, model_validator

from src.core.config import ConfigModel

MANEUVERS = (
    "cruise",
    "accelerate",
    "brake_to_stop",
    "decelerate",
    "turn_left",
    "turn_right",
    "stop_at_light",
)

ManeuverName = Literal[
    "cruise",
    "accelerate",
    "brake_to_stop",
    "decelerate",
    "turn_left",
    "turn_right",
    "stop_at_light",
]

# Weights that give each of the 12 joint meta-actions an equal share:
# turns split evenly over the four longitudinal profiles.
DEFAULT_MANEUVER_MIX: Dict[str, float] = {
    "cruise": 1.0,
    "accelerate": 1.0,
    "decelerate": 1.0,
    "brake_to_stop": 0.5,
    "stop_at_light": 0.5,
    "turn_left": 4.0,
    "turn_right": 4.0,
}


class SimConfig(ConfigModel):
    """Synthetic dataset parameters."""

    seed: int = Field(default=0, ge=0)
    n_scenes: int = Field(default=1000, ge=0)
    max_agents: int = Field(default=8, ge=0)
    vru_fraction: float = 0.4
    traffic_light_prob: float = 0.5
    maneuver_mix: Dict[str, float] = Field(default_factory=lambda: dict(DEFAULT_MANEUVER_MIX))

    @model_validator(mode="after")
    def _check(self):
        for name in ("vru_fraction", "traffic_light_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        unknown = set(self.maneuver_mix) - set(MANEUVERS)
        if unknown:
            raise ValueError(f"unknown maneuvers: {sorted(unknown)}")
        weights = list(self.maneuver_mix.values())
        if any(w < 0 for w in weights) or not any(w > 0 for w in weights):
            raise ValueError("maneuver weights must be >= 0 and not all zero")
        return self


class ManeuverScript(ConfigModel):
    """Constant-curvature, linear-speed-ramp motion script."""

    name: ManeuverName
    curvature: float = 0.0
    target_speed: float
    initial_speed: float
    ramp_time: float = Field(default=3.0, gt=0)

    @model_validator(mode="after")
    def _check(self):
        if self.target_speed < 0 or self.initial_speed < 0:
            raise ValueError("speeds must be >= 0")
        if self.name == "turn_left" and self.curvature <= 0:
            raise ValueError("turn_left needs positive curvature")
        if self.name == "turn_right" and self.curvature >= 0:
            raise ValueError("turn_right needs negative curvature")
        return self
