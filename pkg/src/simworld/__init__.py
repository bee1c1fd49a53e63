"""
Synthetic driving scenes: kinematics, scene generation and view rasterization.
"""
from src.simworld.config import DEFAULT_MANEUVER_MIX, MANEUVERS, ManeuverScript, SimConfig
from src.simworld.generator import generate_dataset, generate_scene, generate_scenes, scene_rng
from src.simworld.kinematics import rollout_kinematics, speed_profile
from src.simworld.rasterizer import C_VIS, N_PATCHES, ViewFeatureGrid, rasterize_views, stack_views

__all__ = [
    "C_VIS",
    "DEFAULT_MANEUVER_MIX",
    "MANEUVERS",
    "N_PATCHES",
    "ManeuverScript",
    "SimConfig",
    "ViewFeatureGrid",
    "generate_dataset",
    "generate_scene",
    "generate_scenes",
    "rasterize_views",
    "rollout_kinematics",
    "scene_rng",
    "speed_profile",
    "stack_views",
]
