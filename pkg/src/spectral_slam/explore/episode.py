"""Exploration episodes: sense, detect, plan, hallucinate, select, execute.

The estimate/truth divergence model is deliberately light: odometry noise
is integrated on the estimated pose only, and a loop closure snaps the
estimate toward truth with a configurable gain instead of running a graph
optimizer. Episodes are fully deterministic for a fixed
(world, policy, budget, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from spectral_slam.core_graph import GraphError, laplacian_from_edge_list
from spectral_slam.criteria import d_opt, spanning_tree_count
from spectral_slam.explore.frontier import (
    Frontier,
    detect_frontiers,
    goal_cell as frontier_goal_cell,
)
from spectral_slam.explore.grid import FREE, UNKNOWN, OccupancyGrid, unknown_grid
from spectral_slam.explore.hallucinate import (
    GraphState,
    HallucinationParams,
    hallucinate_graph,
    utility_dopt,
)
from spectral_slam.explore.kernels import cast_rays
from spectral_slam.explore.planner import plan_to_goals

POLICIES = ("closest_frontier", "graph_dopt")


@dataclass(frozen=True)
class EpisodeConfig:
    sensor_range: float = 6.0
    n_beams: int = 181
    fov: float = math.pi
    sigma_xy: float = 0.3       # odometry noise per graph node step (m)
    sigma_theta: float = 0.063  # odometry noise per graph node step (rad)
    node_spacing: float = 1.0   # m between real graph nodes
    loop_radius: float = 1.0    # revisit disc that triggers a real loop closure
    loop_min_gap: int = 20      # how much older a node must be to loop against
    loop_info_gain: float = 4.0  # loop edge info = odometry info * gain
    snap_gain: float = 0.5      # estimate correction applied on loop closure
    initial_disc: float = 0.3   # initially-known free disc around the start (m)
    min_frontier_cells: int = 5
    hallucination: HallucinationParams = field(default_factory=HallucinationParams)

    @property
    def phi_odometry(self) -> np.ndarray:
        return np.diag([1.0 / self.sigma_xy ** 2,
                        1.0 / self.sigma_xy ** 2,
                        1.0 / self.sigma_theta ** 2])

    def to_dict(self) -> dict:
        d = {
            "sensor_range": self.sensor_range,
            "n_beams": self.n_beams,
            "fov": self.fov,
            "sigma_xy": self.sigma_xy,
            "sigma_theta": self.sigma_theta,
            "node_spacing": self.node_spacing,
            "loop_radius": self.loop_radius,
            "loop_min_gap": self.loop_min_gap,
            "loop_info_gain": self.loop_info_gain,
            "snap_gain": self.snap_gain,
            "initial_disc": self.initial_disc,
            "min_frontier_cells": self.min_frontier_cells,
        }
        d.update(self.hallucination.to_dict())
        return d


@dataclass
class CandidatePlan:
    frontier: Frontier
    goal_cell: tuple[int, int]
    path: list[tuple[int, int]]
    path_xy: list[tuple[float, float]]
    cost_m: float
    utility: float


@dataclass(frozen=True)
class ExplorationMetrics:
    map_size: tuple[float, float]  # explored bounding box, meters
    coverage: float                # % of world free space observed
    rmse: float                    # max node position error (m)
    avg_degree: float
    norm_tree_connectivity: float
    n_nodes: int
    m_edges: int
    n_loop_closures: int
    steps: int
    completed: bool
    trapped: bool

    def to_dict(self) -> dict:
        return {
            "map_size": [float(f"{v:.12g}") for v in self.map_size],
            "coverage": float(f"{self.coverage:.12g}"),
            "rmse": float(f"{self.rmse:.12g}"),
            "avg_degree": float(f"{self.avg_degree:.12g}"),
            "norm_tree_connectivity": float(f"{self.norm_tree_connectivity:.12g}"),
            "n_nodes": self.n_nodes,
            "m_edges": self.m_edges,
            "n_loop_closures": self.n_loop_closures,
            "steps": self.steps,
            "completed": self.completed,
            "trapped": self.trapped,
        }


def select_action(candidates: list[CandidatePlan], policy: str) -> CandidatePlan | None:
    """Greatest utility (graph_dopt) or smallest path cost (closest_frontier);
    ties keep the earliest candidate (frontier sort order). None signals
    exploration complete."""
    if policy not in POLICIES:
        raise GraphError(f"unknown policy {policy!r}")
    if not candidates:
        return None
    best = candidates[0]
    for cand in candidates[1:]:
        if policy == "graph_dopt":
            if cand.utility > best.utility:
                best = cand
        else:
            if cand.cost_m < best.cost_m:
                best = cand
    return best


class _SlamGraph:
    """Pose nodes with true and estimated planar positions, weighted edges."""

    def __init__(self, true_xy, est_xy):
        self.true_xy: list[tuple[float, float]] = [true_xy]
        self.est_xy: list[tuple[float, float]] = [est_xy]
        self.edges: list[tuple[int, int]] = []
        self.weights: list[float] = []
        self.n_loops = 0

    @property
    def n(self) -> int:
        return len(self.true_xy)

    def add_node(self, true_xy, est_xy) -> int:
        self.true_xy.append(true_xy)
        self.est_xy.append(est_xy)
        return self.n - 1

    def add_edge(self, i, k, weight, loop=False):
        self.edges.append((i, k))
        self.weights.append(weight)
        if loop:
            self.n_loops += 1

    def state(self) -> GraphState:
        return GraphState(list(self.est_xy), list(self.edges), list(self.weights))

    def max_position_error(self) -> float:
        t = np.asarray(self.true_xy)
        e = np.asarray(self.est_xy)
        return float(np.max(np.linalg.norm(t - e, axis=1)))

    def health(self) -> tuple[float, float]:
        """(average degree, normalized tree connectivity)."""
        n = self.n
        avg_degree = 2.0 * len(self.edges) / n
        if n <= 2:
            return avg_degree, 1.0 if len(self.edges) >= n - 1 else 0.0
        lap = laplacian_from_edge_list(n, self.edges, [1.0] * len(self.edges),
                                       scheme="unit")
        log_t = spanning_tree_count(lap)
        # unit weights give a tree count >= 1, so clamp Cholesky round-off
        tau = (0.0 if log_t == -math.inf
               else max(0.0, log_t / ((n - 2) * math.log(n))))
        return avg_degree, tau


def _unknown_heading(belief: OccupancyGrid, frontier: Frontier,
                     x: float, y: float) -> float | None:
    """Direction from (x, y) toward the mean of the unknown cells bordering
    a frontier; None when the frontier has been fully observed meanwhile."""
    sx = sy = 0.0
    count = 0
    for r, c in frontier.cells:
        for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if belief.in_bounds(nr, nc) and belief.cells[nr, nc] == UNKNOWN:
                cx, cy = belief.center_of(nr, nc)
                sx += cx
                sy += cy
                count += 1
    if count == 0:
        return None
    dx, dy = sx / count - x, sy / count - y
    if dx == 0.0 and dy == 0.0:
        return None
    return math.atan2(dy, dx)


def start_cell(world: OccupancyGrid) -> tuple[int, int]:
    """Free cell with maximum clearance from obstacles, ties broken by
    distance to the grid center then lexicographically."""
    from scipy import ndimage

    free = world.cells == FREE
    if not np.any(free):
        raise GraphError("world has no free cells")
    clearance = ndimage.distance_transform_edt(free)
    rows, cols = np.nonzero(free)
    cr, cc = world.height / 2.0 - 0.5, world.width / 2.0 - 0.5
    d2 = (rows - cr) ** 2 + (cols - cc) ** 2
    # round clearance so center proximity breaks near-ties deterministically
    order = np.lexsort((cols, rows, d2, -np.round(clearance[rows, cols], 6)))
    return int(rows[order[0]]), int(cols[order[0]])


def _coverage(world: OccupancyGrid, belief: OccupancyGrid) -> float:
    world_free = world.cells == FREE
    seen = world_free & (belief.cells == FREE)
    total = int(np.count_nonzero(world_free))
    return 100.0 * int(np.count_nonzero(seen)) / total if total else 0.0


def _explored_bbox(belief: OccupancyGrid) -> tuple[float, float]:
    known = belief.cells != -1
    if not np.any(known):
        return 0.0, 0.0
    rows, cols = np.nonzero(known)
    res = belief.resolution
    return (float(cols.max() - cols.min() + 1) * res,
            float(rows.max() - rows.min() + 1) * res)


def run_episode(world: OccupancyGrid, policy: str, budget: int, seed: int,
                config: EpisodeConfig = EpisodeConfig(),
                ) -> tuple[ExplorationMetrics, list[dict]]:
    """Run one exploration episode; returns metrics and a per-decision
    trajectory log (JSON-able dicts, first record holds the configuration)."""
    if budget < 1:
        raise GraphError("budget must be >= 1")
    if policy not in POLICIES:
        raise GraphError(f"unknown policy {policy!r}")
    rng = np.random.default_rng(seed)
    res = world.resolution

    s_cell = start_cell(world)
    sx, sy = world.center_of(*s_cell)
    true_pose = [sx, sy, 0.0]
    est_pose = [sx, sy, 0.0]

    belief = unknown_grid(world)
    # initially-known disc around the start (world-free cells only)
    r_cells = int(math.ceil(config.initial_disc / res)) + 1
    for dr in range(-r_cells, r_cells + 1):
        for dc in range(-r_cells, r_cells + 1):
            rr, cc = s_cell[0] + dr, s_cell[1] + dc
            if not world.in_bounds(rr, cc) or world.cells[rr, cc] != FREE:
                continue
            cx, cy = world.center_of(rr, cc)
            if (cx - sx) ** 2 + (cy - sy) ** 2 <= config.initial_disc ** 2:
                belief.cells[rr, cc] = FREE

    graph = _SlamGraph((sx, sy), (sx, sy))
    phi_odo = config.phi_odometry
    w_odo = d_opt(np.diag(phi_odo))
    last_phi = phi_odo

    log: list[dict] = [{"record": "config", "policy": policy, "budget": budget,
                        "seed": seed, **config.to_dict()}]
    completed = False
    trapped = False
    steps_taken = 0

    for step in range(1, budget + 1):
        cast_rays(world.cells, belief.cells, true_pose[0], true_pose[1],
                  true_pose[2], res, config.sensor_range, config.n_beams,
                  config.fov)
        frontiers = detect_frontiers(belief, config.min_frontier_cells)
        if not frontiers:
            completed = True
            break
        robot_cell = world.cell_of(true_pose[0], true_pose[1])
        goal_cells = [frontier_goal_cell(f, res, avoid=robot_cell)
                      for f in frontiers]
        plans = plan_to_goals(belief, robot_cell, goal_cells)

        candidates: list[CandidatePlan] = []
        state = graph.state()
        for frontier, goal, (path, cost) in zip(frontiers, goal_cells, plans):
            if path is None:
                continue
            path_xy = [belief.center_of(r, c) for r, c in path]
            lap = hallucinate_graph(state, path_xy, belief, last_phi,
                                    config.hallucination)
            candidates.append(CandidatePlan(
                frontier, goal, path, path_xy, cost, utility_dopt(lap)))
        chosen = select_action(candidates, policy)
        if chosen is None:
            trapped = True
            break
        steps_taken = step

        log.append({
            "record": "decision",
            "step": step,
            "robot_cell": list(robot_cell),
            "n_frontiers": len(frontiers),
            "frontier_sizes": [f.size for f in frontiers],
            "costs": [f"{c.cost_m:.12g}" for c in candidates],
            "utilities": [f"{c.utility:.12g}" for c in candidates],
            "chosen_goal": list(chosen.goal_cell),
            "coverage": f"{_coverage(world, belief):.12g}",
            "n_nodes": graph.n,
            "m_edges": len(graph.edges),
        })

        # execute the path: a real graph node (plus sensing) every
        # node_spacing meters of arc length, and one at the goal
        samples = []
        target = config.node_spacing
        travelled = 0.0
        headings = []
        pts = chosen.path_xy
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            seg = math.hypot(x1 - x0, y1 - y0)
            heading = math.atan2(y1 - y0, x1 - x0)
            while seg > 0 and travelled + seg >= target:
                frac = (target - travelled) / seg
                samples.append((x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)))
                headings.append(heading)
                target += config.node_spacing
            travelled += seg
        end = pts[-1]
        if not samples or math.hypot(samples[-1][0] - end[0],
                                     samples[-1][1] - end[1]) > 1e-9:
            samples.append(end)
            headings.append(headings[-1] if headings else true_pose[2])

        for (nx_, ny_), heading in zip(samples, headings):
            dx, dy = nx_ - true_pose[0], ny_ - true_pose[1]
            true_pose = [nx_, ny_, heading]
            noise = rng.normal(0.0, [config.sigma_xy, config.sigma_xy,
                                     config.sigma_theta])
            est_pose = [est_pose[0] + dx + noise[0],
                        est_pose[1] + dy + noise[1],
                        heading + noise[2]]
            prev = graph.n - 1
            new = graph.add_node((nx_, ny_), (est_pose[0], est_pose[1]))
            graph.add_edge(prev, new, w_odo)
            last_phi = phi_odo

            # loop closure against a sufficiently old node revisited in truth
            old_limit = new - config.loop_min_gap
            if old_limit > 0:
                olds = np.asarray(graph.true_xy[:old_limit])
                d2 = np.sum((olds - (nx_, ny_)) ** 2, axis=1)
                nearest = int(np.argmin(d2))
                if d2[nearest] <= config.loop_radius ** 2:
                    graph.add_edge(nearest, new,
                                   w_odo * config.loop_info_gain, loop=True)
                    gain = config.snap_gain
                    est_pose[0] += gain * (nx_ - est_pose[0])
                    est_pose[1] += gain * (ny_ - est_pose[1])
                    graph.est_xy[new] = (est_pose[0], est_pose[1])
                    last_phi = phi_odo * config.loop_info_gain

            cast_rays(world.cells, belief.cells, true_pose[0], true_pose[1],
                      true_pose[2], res, config.sensor_range, config.n_beams,
                      config.fov)

        # face the unknown side of the chosen frontier so the next scan
        # (180 degree FOV) reveals it even when the goal was already reached
        heading = _unknown_heading(belief, chosen.frontier,
                                   true_pose[0], true_pose[1])
        if heading is not None:
            true_pose[2] = heading
            est_pose[2] = heading

    avg_degree, tau = graph.health()
    metrics = ExplorationMetrics(
        map_size=_explored_bbox(belief),
        coverage=_coverage(world, belief),
        rmse=graph.max_position_error(),
        avg_degree=avg_degree,
        norm_tree_connectivity=tau,
        n_nodes=graph.n,
        m_edges=len(graph.edges),
        n_loop_closures=graph.n_loops,
        steps=steps_taken,
        completed=completed,
        trapped=trapped,
    )
    log.append({"record": "final", **metrics.to_dict()})
    return metrics, log


_CONFIG_INT_KEYS = {"n_beams", "loop_min_gap", "min_frontier_cells"}
_EPISODE_KEYS = {"sensor_range", "n_beams", "fov", "sigma_xy", "sigma_theta",
                 "node_spacing", "loop_radius", "loop_min_gap",
                 "loop_info_gain", "snap_gain", "initial_disc",
                 "min_frontier_cells"}
_HALLUCINATION_KEYS = {"decay", "k_unknown", "k_occupied",
                       "neighborhood_radius", "loop_threshold",
                       "loop_attach_radius"}


def parse_episode_config(text: str) -> EpisodeConfig:
    """Plain key=value overrides for the episode and hallucination constants.
    The hallucinated-node spacing shares the ``node_spacing`` key."""
    episode_kwargs: dict = {}
    hall_kwargs: dict = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise GraphError(f"config line {line_no}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        parsed = int(value) if key in _CONFIG_INT_KEYS else float(value)
        if key in _EPISODE_KEYS:
            episode_kwargs[key] = parsed
            if key == "node_spacing":
                hall_kwargs["node_spacing"] = parsed
        elif key in _HALLUCINATION_KEYS:
            hall_kwargs[key] = parsed
        else:
            raise GraphError(f"config line {line_no}: unknown key {key!r}")
    return EpisodeConfig(hallucination=HallucinationParams(**hall_kwargs),
                         **episode_kwargs)
