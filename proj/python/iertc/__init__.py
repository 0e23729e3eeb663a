"""Experience-guided anytime motion planning."""

from ._core import (
    ExperiencePath,
    GenerationError,
    InputError,
    LibraryError,
    PathLibrary,
    Problem,
    Scene,
    build_dataset,
    generate_scene,
    map_experience,
    plan,
    rrt_connect,
    rrt_star,
    run_suite,
)

__all__ = [
    "ExperiencePath",
    "GenerationError",
    "InputError",
    "LibraryError",
    "PathLibrary",
    "Problem",
    "Scene",
    "build_dataset",
    "generate_scene",
    "map_experience",
    "plan",
    "rrt_connect",
    "rrt_star",
    "run_suite",
]
