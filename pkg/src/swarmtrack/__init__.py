"""Swarm-guided particle-filter multi-object tracking."""

from .appearance import GrayImage, OutOfFrameError, cosine_sim, extract_hog
from .association import (
    AssignmentResult,
    CostMatrix,
    build_cost_matrix,
    classify,
    motion_cost,
    solve_assignment,
)
from .baseline import GreedyIouTracker
from .config import ConfigError, TrackerConfig, validate_config
from .geometry import BBox, Detection, Velocity4, center_distance, iou
from .lifecycle import (
    SlopeWindow,
    Track,
    create_track,
    penalty_age_update,
    prune,
    trend_velocity,
    update_strong,
    update_weak,
)
from .metrics import MetricsReport, TrackFile, evaluate, trajectory_matches
from .particles import Particle, resample, sample_particles
from .pipeline import FrameInput, Tracker, TrackOutput
from .rng import CounterRng
from .scenario import ScenarioSpec, TargetPath, generate_scenario, parse_scenario_spec
from .swarm import (
    FitnessWeights,
    NeighbourInfo,
    SwarmResult,
    neighbours,
    optimize,
    pair_fitness,
    social_fitness,
)

__version__ = "0.1.0"

__all__ = [
    "AssignmentResult",
    "BBox",
    "ConfigError",
    "CostMatrix",
    "CounterRng",
    "Detection",
    "FitnessWeights",
    "FrameInput",
    "GrayImage",
    "GreedyIouTracker",
    "MetricsReport",
    "NeighbourInfo",
    "OutOfFrameError",
    "Particle",
    "ScenarioSpec",
    "SlopeWindow",
    "SwarmResult",
    "Track",
    "TrackFile",
    "TrackOutput",
    "Tracker",
    "TrackerConfig",
    "TargetPath",
    "Velocity4",
    "build_cost_matrix",
    "center_distance",
    "classify",
    "cosine_sim",
    "create_track",
    "evaluate",
    "extract_hog",
    "generate_scenario",
    "iou",
    "motion_cost",
    "neighbours",
    "optimize",
    "pair_fitness",
    "parse_scenario_spec",
    "penalty_age_update",
    "prune",
    "resample",
    "sample_particles",
    "social_fitness",
    "solve_assignment",
    "trajectory_matches",
    "trend_velocity",
    "update_strong",
    "update_weak",
    "validate_config",
]
