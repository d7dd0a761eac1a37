"""Deterministic 2D grid-world exploration simulator: sensing, frontier
detection, Dijkstra planning, hallucinated weighted pose-graphs, and
D-optimal action selection."""

from spectral_slam.explore.grid import (
    FREE,
    OCCUPIED,
    UNKNOWN,
    OccupancyGrid,
    parse_world,
    serialize_world,
)
from spectral_slam.explore.kernels import KERNEL_BACKEND
from spectral_slam.explore.frontier import Frontier, detect_frontiers
from spectral_slam.explore.planner import plan_path, plan_to_goals
from spectral_slam.explore.hallucinate import (
    HallucinationParams,
    hallucinate_graph,
    utility_dopt,
)
from spectral_slam.explore.episode import (
    CandidatePlan,
    EpisodeConfig,
    ExplorationMetrics,
    run_episode,
    select_action,
)
