"""Incremental equivalence experiments and route timing.

Replays a pose-graph's edges in dataset order to emulate trajectory growth,
computing T/D/E criteria at each step via both routes (full block FIM
spectrum vs weighted-Laplacian spectrum), with wall-clock timing, bound
auditing, and a size sweep demonstrating the complexity gap between the
O((n*ell)^3) FIM eigensolve and the O(n^3)+O(ell^3) Laplacian route.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from spectral_slam.core_graph import (
    Edge,
    GraphError,
    PoseGraph,
    Vertex,
    is_connected,
    laplacian,
)
from spectral_slam.criteria import (
    WeightScheme,
    assemble_fim,
    criteria_from_fim,
    criteria_from_laplacian,
    edge_weights,
)
from spectral_slam.dataset_io import ResultRow

DEFAULT_FIM_CAP = 3000


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: WeightScheme = WeightScheme("unit")
    stride: int = 1
    fim_cap: int = DEFAULT_FIM_CAP  # max n*ell for the FIM route
    seed: int = 0

    def __post_init__(self):
        if self.stride < 1:
            raise GraphError("stride must be >= 1")
        if self.fim_cap < 6:
            raise GraphError("fim_cap must be >= 2*ell")


def parse_config(text: str) -> ExperimentConfig:
    """Plain key=value config: scheme, stride, cap, seed."""
    kwargs = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise GraphError(f"config line {line_no}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "scheme":
            kwargs["scheme"] = WeightScheme.parse(value)
        elif key == "stride":
            kwargs["stride"] = int(value)
        elif key == "cap":
            kwargs["fim_cap"] = int(value)
        elif key == "seed":
            kwargs["seed"] = int(value)
        else:
            raise GraphError(f"config line {line_no}: unknown key {key!r}")
    return ExperimentConfig(**kwargs)


def _prefix_graph(g: PoseGraph, edges: list[Edge]) -> PoseGraph:
    n = max(max(e.src, e.dst) for e in edges) + 1
    return PoseGraph(g.vertices[:n], tuple(edges))


def incremental_run(g: PoseGraph, cfg: ExperimentConfig) -> list[ResultRow]:
    """Criteria by both routes after each edge insertion (every ``stride``
    edges and always at the final edge). Disconnected prefixes are skipped;
    beyond the FIM size cap the FIM columns are left empty."""
    rows: list[ResultRow] = []
    ell = g.ell
    edges: list[Edge] = []
    for step, edge in enumerate(g.edges, start=1):
        edges.append(edge)
        if step % cfg.stride != 0 and step != g.m:
            continue
        prefix = _prefix_graph(g, edges)
        if not is_connected(prefix):
            continue

        t0 = time.perf_counter()
        weights = None
        phi_bar = None
        if cfg.scheme.kind == "unit":
            # constant-uncertainty route: unit Laplacian times the shared
            # edge info spectrum
            phi_bar = prefix.edges[0].info
        else:
            weights = edge_weights(prefix, cfg.scheme)
        lap = laplacian(prefix, weights)
        rep_lap = criteria_from_laplacian(lap, phi_bar=phi_bar, m=prefix.m)
        us_lap = (time.perf_counter() - t0) * 1e6

        t_fim = d_fim = e_fim = us_fim = None
        if prefix.n * ell <= cfg.fim_cap:
            t0 = time.perf_counter()
            rep_fim = criteria_from_fim(assemble_fim(prefix))
            us_fim = (time.perf_counter() - t0) * 1e6
            t_fim, d_fim, e_fim = rep_fim.t_opt, rep_fim.d_opt, rep_fim.e_opt

        rows.append(ResultRow(
            step=step, n=prefix.n, m=prefix.m,
            t_fim=t_fim, d_fim=d_fim, e_fim=e_fim,
            t_lap=rep_lap.t_opt, d_lap=rep_lap.d_opt, e_lap=rep_lap.e_opt,
            us_fim=us_fim, us_lap=us_lap,
        ))
    return rows


@dataclass(frozen=True)
class BoundAuditEntry:
    step: int
    criterion: str
    rel_gap: float


def audit_bounds(rows: list[ResultRow], rel_slack: float = 1e-9) -> list[BoundAuditEntry]:
    """Violations of criterion(FIM) <= criterion(Laplacian) beyond relative
    slack, per step and criterion; empty on conforming MaxEig runs."""
    violations = []
    for row in rows:
        for name, f, l in (("t_opt", row.t_fim, row.t_lap),
                           ("d_opt", row.d_fim, row.d_lap),
                           ("e_opt", row.e_fim, row.e_lap)):
            if f is None:
                continue
            if f > l + rel_slack * max(abs(f), abs(l), 1.0):
                violations.append(BoundAuditEntry(row.step, name,
                                                  (f - l) / max(abs(l), 1e-300)))
    return violations


def max_route_gap(rows: list[ResultRow]) -> dict[str, float]:
    """Largest per-step relative difference between the two routes."""
    gaps = {"t_opt": 0.0, "d_opt": 0.0, "e_opt": 0.0}
    for row in rows:
        for name, f, l in (("t_opt", row.t_fim, row.t_lap),
                           ("d_opt", row.d_fim, row.d_lap),
                           ("e_opt", row.e_fim, row.e_lap)):
            if f is None:
                continue
            gaps[name] = max(gaps[name], abs(f - l) / max(abs(l), 1e-300))
    return gaps


# ---------------------------------------------------------------------------
# Timing sweep
# ---------------------------------------------------------------------------

@dataclass
class BenchSummary:
    ell: int
    sizes: list[int]
    fim_us: list[float]
    lap_us: list[float]
    speedups: list[float] = field(default_factory=list)

    def __post_init__(self):
        if not self.speedups:
            self.speedups = [f / l for f, l in zip(self.fim_us, self.lap_us)]

    def check(self, min_final_speedup: float = 5.0) -> list[str]:
        """Failure descriptions; empty when the speedup series is
        non-decreasing and the largest size clears the floor. Sizes of 2
        are degenerate and excluded."""
        sizes = [n for n in self.sizes if n > 2]
        sp = [s for n, s in zip(self.sizes, self.speedups) if n > 2]
        failures = []
        for i in range(1, len(sp)):
            if sp[i] < sp[i - 1]:
                failures.append(
                    f"speedup not monotone: {sp[i-1]:.2f}x at n={sizes[i-1]} "
                    f"vs {sp[i]:.2f}x at n={sizes[i]}")
        if sp and sp[-1] < min_final_speedup:
            failures.append(
                f"final speedup {sp[-1]:.2f}x at n={sizes[-1]} below "
                f"{min_final_speedup}x floor")
        return failures

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "sizes": self.sizes,
            "fim_us": [float(f"{v:.12g}") for v in self.fim_us],
            "lap_us": [float(f"{v:.12g}") for v in self.lap_us],
            "speedups": [float(f"{v:.12g}") for v in self.speedups],
        }


def _chain_graph(n: int, ell: int) -> PoseGraph:
    """Unit-information chain used as the timing workload."""
    phi = np.eye(ell)
    if ell == 3:
        vertices = tuple(Vertex(i, (float(i), 0.0, 0.0)) for i in range(n))
        rel = (1.0, 0.0, 0.0)
    else:
        vertices = tuple(Vertex(i, (float(i), 0.0, 0.0, 0.0, 0.0, 0.0, 1.0))
                         for i in range(n))
        rel = (1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0)
    edges = tuple(Edge(i, i + 1, phi, rel) for i in range(n - 1))
    return PoseGraph(vertices, edges)


_TICK = time.get_clock_info("perf_counter").resolution


def _time_callable(fn) -> float:
    """Median-robust single sample in seconds; batches the call until the
    elapsed time spans at least 10 timer ticks."""
    batch = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(batch):
            fn()
        elapsed = time.perf_counter() - t0
        if elapsed >= 10 * _TICK:
            return elapsed / batch
        batch *= 4


def timing_sweep(sizes: list[int], ell: int = 3, repeats: int = 5) -> BenchSummary:
    """Median wall-clock per route over a size sweep (warm-up discarded)."""
    if repeats < 3:
        raise GraphError("timing sweep needs repeats >= 3")
    if sorted(sizes) != list(sizes):
        raise GraphError("sizes must be ascending")
    if ell not in (3, 6):
        raise GraphError("ell must be 3 or 6")
    fim_us, lap_us = [], []
    for n in sizes:
        g = _chain_graph(n, ell)
        phi_bar = g.edges[0].info

        def fim_route():
            criteria_from_fim(assemble_fim(g))

        def lap_route():
            criteria_from_laplacian(laplacian(g), phi_bar=phi_bar, m=g.m)

        fim_route()  # warm-up
        lap_route()
        fim_samples = [_time_callable(fim_route) for _ in range(repeats)]
        lap_samples = [_time_callable(lap_route) for _ in range(repeats)]
        fim_us.append(statistics.median(fim_samples) * 1e6)
        lap_us.append(statistics.median(lap_samples) * 1e6)
    return BenchSummary(ell, list(sizes), fim_us, lap_us)
