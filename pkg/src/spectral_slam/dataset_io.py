"""Pose-graph text ingestion (g2o-style), synthetic generators, result export.

Supported records, one per line, '#' comments skipped:

    VERTEX_SE2 id x y theta
    EDGE_SE2 i j dx dy dtheta  I11 I12 I13 I22 I23 I33
    VERTEX_SE3:QUAT id x y z qx qy qz qw
    EDGE_SE3:QUAT i j dx dy dz qx qy qz qw  <21 upper-triangular info entries>

Information matrices are stored as the row-major upper triangle and
reconstructed symmetric. One dimension (2D or 3D) per file. Unknown record
tags are skipped and counted. Dataset vertex ids are remapped to dense
0..n-1 in order of first appearance; the original ids are retained on the
graph.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from spectral_slam.core_graph import Edge, GraphError, PoseGraph, Vertex

VERTEX_2D_TAGS = ("VERTEX_SE2", "VERTEX2")
EDGE_2D_TAGS = ("EDGE_SE2", "EDGE2")
VERTEX_3D_TAGS = ("VERTEX_SE3:QUAT",)
EDGE_3D_TAGS = ("EDGE_SE3:QUAT",)

QUAT_FIX_TOL = 1e-3


class ParseError(ValueError):
    """Malformed dataset line; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass
class ParseStats:
    skipped_tags: int = 0
    non_pd_edges: int = 0
    skipped_examples: list[str] = field(default_factory=list)


def _unpack_upper(values: list[float], dim: int) -> np.ndarray:
    """Row-major upper triangle -> symmetric matrix."""
    mat = np.zeros((dim, dim))
    it = iter(values)
    for r in range(dim):
        for c in range(r, dim):
            v = next(it)
            mat[r, c] = v
            mat[c, r] = v
    return mat


def _pack_upper(mat: np.ndarray) -> list[float]:
    dim = mat.shape[0]
    return [mat[r, c] for r in range(dim) for c in range(r, dim)]


def parse_pose_graph_ex(text: str) -> tuple[PoseGraph, ParseStats]:
    """Parse dataset text; returns the graph and parse statistics."""
    stats = ParseStats()
    raw_vertices: list[tuple[int, tuple[float, ...]]] = []
    raw_edges: list[tuple[int, int, int, tuple[float, ...], np.ndarray]] = []
    dim: int | None = None

    def check_dim(line_no, d):
        nonlocal dim
        if dim is None:
            dim = d
        elif dim != d:
            raise ParseError(line_no, f"mixed 2D/3D records (file is {dim}D)")

    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        tag = fields[0]
        try:
            nums = [float(x) for x in fields[1:]]
        except ValueError as exc:
            raise ParseError(line_no, f"malformed numeric field: {exc}") from None
        if tag in VERTEX_2D_TAGS:
            check_dim(line_no, 2)
            if len(nums) != 4:
                raise ParseError(line_no, f"2D vertex needs 4 fields, got {len(nums)}")
            raw_vertices.append((int(nums[0]), tuple(nums[1:4])))
        elif tag in EDGE_2D_TAGS:
            check_dim(line_no, 2)
            if len(nums) != 11:
                raise ParseError(line_no, f"2D edge needs 11 fields, got {len(nums)}")
            info = _unpack_upper(nums[5:11], 3)
            raw_edges.append((line_no, int(nums[0]), int(nums[1]), tuple(nums[2:5]), info))
        elif tag in VERTEX_3D_TAGS:
            check_dim(line_no, 3)
            if len(nums) != 8:
                raise ParseError(line_no, f"3D vertex needs 8 fields, got {len(nums)}")
            pose = list(nums[1:8])
            qnorm = math.sqrt(sum(q * q for q in pose[3:7]))
            if abs(qnorm - 1.0) > QUAT_FIX_TOL:
                raise ParseError(line_no, f"quaternion norm {qnorm:.6f} too far from 1")
            pose[3:7] = [q / qnorm for q in pose[3:7]]
            raw_vertices.append((int(nums[0]), tuple(pose)))
        elif tag in EDGE_3D_TAGS:
            check_dim(line_no, 3)
            if len(nums) != 30:
                raise ParseError(line_no, f"3D edge needs 30 fields, got {len(nums)}")
            info = _unpack_upper(nums[9:30], 6)
            raw_edges.append((line_no, int(nums[0]), int(nums[1]), tuple(nums[2:9]), info))
        else:
            stats.skipped_tags += 1
            if len(stats.skipped_examples) < 5:
                stats.skipped_examples.append(tag)

    if not raw_vertices:
        raise ParseError(0, "no vertex records found")

    id_map: dict[int, int] = {}
    vertices = []
    for src_id, pose in raw_vertices:
        if src_id in id_map:
            raise GraphError(f"duplicate vertex id {src_id}")
        id_map[src_id] = len(vertices)
        vertices.append(Vertex(len(vertices), pose))

    edges = []
    for line_no, i, k, rel, info in raw_edges:
        if i not in id_map or k not in id_map:
            raise ParseError(line_no, f"edge ({i},{k}) references missing vertex")
        pd = bool(np.linalg.eigvalsh(info)[0] > 0)
        if not pd:
            stats.non_pd_edges += 1
        edges.append(Edge(id_map[i], id_map[k], info, rel, pd_flag=pd))

    graph = PoseGraph(tuple(vertices), tuple(edges), source_ids=id_map)
    return graph, stats


def parse_pose_graph(text: str) -> PoseGraph:
    return parse_pose_graph_ex(text)[0]


def serialize_pose_graph(g: PoseGraph) -> str:
    """Emit g2o-style text; floats use shortest round-trip representation so
    parse(serialize(g)) reproduces the graph bit-exactly."""
    out = io.StringIO()
    rev = {v: k for k, v in g.source_ids.items()} if g.source_ids else {}
    ell = g.ell
    vtag = "VERTEX_SE2" if ell == 3 else "VERTEX_SE3:QUAT"
    etag = "EDGE_SE2" if ell == 3 else "EDGE_SE3:QUAT"
    rel_len = 3 if ell == 3 else 7
    for v in g.vertices:
        sid = rev.get(v.id, v.id)
        pose = v.pose if v.pose is not None else (0.0,) * rel_len
        out.write(f"{vtag} {sid} " + " ".join(repr(x) for x in pose) + "\n")
    for e in g.edges:
        rel = e.relative_pose if e.relative_pose is not None else (0.0,) * rel_len
        nums = list(rel) + _pack_upper(e.info)
        out.write(
            f"{etag} {rev.get(e.src, e.src)} {rev.get(e.dst, e.dst)} "
            + " ".join(repr(float(x)) for x in nums) + "\n"
        )
    return out.getvalue()


def load_pose_graph(path) -> PoseGraph:
    with open(path) as fh:
        return parse_pose_graph(fh.read())


@dataclass(frozen=True)
class DatasetDescriptor:
    """Dataset source plus optionally declared (n, m) to validate against."""

    path: str | None = None
    text: str | None = None
    declared_n: int | None = None
    declared_m: int | None = None

    def load(self) -> PoseGraph:
        if self.text is not None:
            text = self.text
        elif self.path is not None:
            with open(self.path) as fh:
                text = fh.read()
        else:
            raise GraphError("descriptor needs a path or inline text")
        g = parse_pose_graph(text)
        if self.declared_n is not None and g.n != self.declared_n:
            raise GraphError(f"declared n={self.declared_n} but parsed {g.n}")
        if self.declared_m is not None and g.m != self.declared_m:
            raise GraphError(f"declared m={self.declared_m} but parsed {g.m}")
        return g


def truncate_prefix(g: PoseGraph, k: int) -> PoseGraph:
    """First k vertices and all edges with both endpoints retained."""
    if not (1 <= k <= g.n):
        raise GraphError(f"truncation count {k} out of range 1..{g.n}")
    vertices = g.vertices[:k]
    edges = tuple(e for e in g.edges if e.src < k and e.dst < k)
    src = {s: d for s, d in (g.source_ids or {}).items() if d < k} or None
    return PoseGraph(vertices, edges, source_ids=src)


# ---------------------------------------------------------------------------
# Synthetic generators
# ---------------------------------------------------------------------------

def random_spd(rng: np.random.Generator, dim: int = 3,
               eig_range: tuple[float, float] = (1.0, 300.0)) -> np.ndarray:
    """Random SPD matrix with eigenvalues log-uniform in eig_range."""
    lo, hi = eig_range
    eigs = np.exp(rng.uniform(math.log(lo), math.log(hi), size=dim))
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    mat = (q * eigs) @ q.T
    return (mat + mat.T) / 2.0


def synth_graph(kind: str, n: int, phi_bar: np.ndarray | None = None,
                seed: int = 0) -> PoseGraph:
    """Synthetic 2D pose-graph: 'chain' (n-1 odometry edges) or
    'chain_with_loops' (plus seeded loop closures between near-revisit
    indices). Constant edge info when phi_bar is given, else random SPD
    matrices with eigenvalues log-uniform in [1, 300]."""
    if n < 2:
        raise GraphError("synthetic graph needs n >= 2")
    if kind not in ("chain", "chain_with_loops"):
        raise GraphError(f"unknown synthetic kind {kind!r}")
    rng = np.random.default_rng(seed)

    def phi() -> np.ndarray:
        if phi_bar is not None:
            return np.asarray(phi_bar, dtype=float)
        return random_spd(rng)

    vertices = tuple(Vertex(i, (float(i), 0.0, 0.0)) for i in range(n))
    edges = [Edge(i, i + 1, phi(), (1.0, 0.0, 0.0)) for i in range(n - 1)]
    if kind == "chain_with_loops":
        n_loops = max(1, n // 10)
        for _ in range(n_loops):
            i = int(rng.integers(0, n - 6))
            span = int(rng.integers(5, min(31, n - i)))
            edges.append(Edge(i, i + span, phi(), (float(span), 0.0, 0.0)))
    return PoseGraph(vertices, tuple(edges))


# ---------------------------------------------------------------------------
# Result series export
# ---------------------------------------------------------------------------

CSV_HEADER = "step,n,m,t_fim,d_fim,e_fim,t_lap,d_lap,e_lap,us_fim,us_lap"
_FIELDS = ("step", "n", "m", "t_fim", "d_fim", "e_fim",
           "t_lap", "d_lap", "e_lap", "us_fim", "us_lap")


@dataclass(frozen=True)
class ResultRow:
    """One incremental-run step: both routes' criteria plus wall-clock
    microseconds. FIM columns are None beyond the size cap."""

    step: int
    n: int
    m: int
    t_fim: float | None
    d_fim: float | None
    e_fim: float | None
    t_lap: float
    d_lap: float
    e_lap: float
    us_fim: float | None
    us_lap: float


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return f"{value:.12g}"


def export_series(rows: list[ResultRow], fmt: str = "csv") -> str:
    """Serialize rows as CSV (fixed header) or JSON (list of objects);
    numbers carry 12 significant digits."""
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in rows:
            lines.append(",".join(_fmt(getattr(r, f)) for f in _FIELDS))
        return "\n".join(lines) + "\n"
    if fmt == "json":
        payload = []
        for r in rows:
            obj = {}
            for f in _FIELDS:
                v = getattr(r, f)
                obj[f] = v if (v is None or isinstance(v, int)) else float(f"{v:.12g}")
            payload.append(obj)
        return json.dumps(payload, indent=2) + "\n"
    raise GraphError(f"unknown export format {fmt!r}")


def parse_series_csv(text: str) -> list[ResultRow]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise GraphError("unexpected series CSV header")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        vals: list = []
        for f, p in zip(_FIELDS, parts):
            if p == "":
                vals.append(None)
            elif f in ("step", "n", "m"):
                vals.append(int(p))
            else:
                vals.append(float(p))
        rows.append(ResultRow(*vals))
    return rows
