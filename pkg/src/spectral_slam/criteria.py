"""Optimal-design criteria on information matrices and graph Laplacians.

The p-parameterized utility family (power mean of the eigenvalues, geometric
mean at p = 0) yields the four classic criteria: T (p=1), D (p=0), A (p=-1),
E (p -> -inf), plus the max-eigenvalue variant Etilde (p -> +inf).

Convention: every criterion reported here is the utility applied to the
*reduced* spectrum, i.e. after removing the structural zero eigenvalues
(one for a connected Laplacian, ell for a connected block information
matrix), normalizing by the reduced count. The literature's closed forms
normalize by n instead; those are exposed separately as the
``*_fullsize`` accessors. Under the reduced convention the
constant-uncertainty factorization is exact with exponent 1 for every p,
and the MaxEig bound holds criterion-by-criterion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from spectral_slam.core_graph import (
    REL_ZERO_TOL,
    GraphError,
    LaplacianMatrix,
    PoseGraph,
    reduced_laplacian,
)


def zero_tolerance(values: np.ndarray) -> float:
    """Scale-relative threshold below which an eigenvalue counts as zero."""
    if len(values) == 0:
        return REL_ZERO_TOL
    return REL_ZERO_TOL * max(float(values[-1]), 1.0)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted ascending plus the count below the zero threshold."""

    values: np.ndarray
    zero_count: int

    @property
    def nonzero(self) -> np.ndarray:
        return self.values[self.zero_count:]


def spectrum_of(matrix: np.ndarray) -> Spectrum:
    values = np.linalg.eigvalsh(np.asarray(matrix, dtype=float))
    tol = zero_tolerance(values)
    return Spectrum(values, int(np.searchsorted(values, tol, side="right")))


def utility_p(values, p: float, count: int | None = None) -> float:
    """Power-mean utility of a positive spectrum.

    ``count`` overrides the normalization denominator (defaults to
    len(values)); the full-size accessors use it to normalize over the
    full matrix size while summing only nonzero eigenvalues.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise GraphError("utility of an empty spectrum")
    if p > 1:
        raise GraphError(f"utility parameter p must be <= 1, got {p}")
    if count is None:
        count = v.size
    if p == 0:
        if np.any(v <= 0):
            raise GraphError("geometric-mean utility needs a strictly positive spectrum")
        return float(math.exp(np.sum(np.log(v)) / count))
    if p < 0 and np.any(v <= 0):
        raise GraphError("negative-order utility needs a strictly positive spectrum")
    return float((np.sum(v ** p) / count) ** (1.0 / p))


def t_opt(values, count: int | None = None) -> float:
    return utility_p(values, 1.0, count)


def d_opt(values, count: int | None = None) -> float:
    return utility_p(values, 0.0, count)


def a_opt(values, count: int | None = None) -> float:
    return utility_p(values, -1.0, count)


def e_opt(values) -> float:
    return float(np.min(values))


def e_tilde_opt(values) -> float:
    return float(np.max(values))


@dataclass(frozen=True)
class OptimalityReport:
    """T/D/A/E (plus max-eigenvalue Etilde) values for one graph state."""

    t_opt: float
    d_opt: float
    a_opt: float
    e_opt: float
    e_tilde_opt: float
    source: str  # "fim" | "laplacian"
    n: int
    m: int | None = None
    connected: bool = True

    def ordering_holds(self, rel_tol: float = 1e-9) -> bool:
        """Etilde >= T >= D >= A >= E within relative slack."""
        chain = [self.e_tilde_opt, self.t_opt, self.d_opt, self.a_opt, self.e_opt]
        for hi, lo in zip(chain, chain[1:]):
            if lo > hi + rel_tol * max(abs(hi), abs(lo), 1.0):
                return False
        return True


def _report_from_values(nonzero, source, n, m, connected=True) -> OptimalityReport:
    return OptimalityReport(
        t_opt=t_opt(nonzero),
        d_opt=d_opt(nonzero),
        a_opt=a_opt(nonzero),
        e_opt=e_opt(nonzero),
        e_tilde_opt=e_tilde_opt(nonzero),
        source=source,
        n=n,
        m=m,
        connected=connected,
    )


# ---------------------------------------------------------------------------
# Graph spectral indices
# ---------------------------------------------------------------------------

def spanning_tree_count(lap: LaplacianMatrix) -> float:
    """log of the (weighted) spanning-tree count, via the log-determinant of
    the reduced Laplacian (matrix-tree theorem). -inf for disconnected graphs.
    """
    if lap.size < 2:
        return 0.0  # single vertex: one (empty) spanning tree
    red = reduced_laplacian(lap, 0)
    try:
        chol = scipy.linalg.cholesky(red, lower=True)
    except scipy.linalg.LinAlgError:
        return -math.inf
    diag = np.diag(chol)
    # Cholesky can "succeed" on a numerically singular reduced Laplacian;
    # a pivot at rounding-noise scale means a disconnected graph.
    floor = math.sqrt(REL_ZERO_TOL * max(float(np.max(np.diag(red))), 1.0))
    if np.min(diag) <= floor:
        return -math.inf
    return float(2.0 * np.sum(np.log(diag)))


def algebraic_connectivity(lap: LaplacianMatrix) -> float:
    """Second-smallest Laplacian eigenvalue (Fiedler value)."""
    if lap.size < 2:
        raise GraphError("algebraic connectivity needs n >= 2")
    values = np.linalg.eigvalsh(lap.matrix)
    return float(values[1])


def kirchhoff_index(lap: LaplacianMatrix) -> float:
    """Kirchhoff index n * sum(1/mu_k) over nonzero eigenvalues; +inf when
    disconnected (infinite effective resistance)."""
    n = lap.size
    values = np.linalg.eigvalsh(lap.matrix)
    tol = zero_tolerance(values)
    nonzero = values[values > tol]
    if len(nonzero) < n - 1:
        return math.inf
    return float(n * np.sum(1.0 / nonzero))


# ---------------------------------------------------------------------------
# Edge weights and FIM assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightScheme:
    """Per-edge scalarization of the info matrix: unit weights, the largest
    eigenvalue (a guaranteed upper bound), or the order-p utility (matched)."""

    kind: str  # "unit" | "maxeig" | "matched"
    p: float | None = None

    def __post_init__(self):
        if self.kind not in ("unit", "maxeig", "matched"):
            raise GraphError(f"unknown weight scheme {self.kind!r}")
        if self.kind == "matched":
            if self.p is None:
                raise GraphError("matched scheme requires p")
            if self.p > 1:
                raise GraphError(f"matched scheme requires p <= 1, got {self.p}")

    @classmethod
    def parse(cls, text: str) -> "WeightScheme":
        """Parse 'unit', 'maxeig', or 'matched:<p>'."""
        text = text.strip().lower()
        if text in ("unit", "maxeig"):
            return cls(text)
        if text.startswith("matched:"):
            return cls("matched", float(text.split(":", 1)[1]))
        raise GraphError(f"cannot parse weight scheme {text!r}")

    def label(self) -> str:
        return self.kind if self.kind != "matched" else f"matched:{self.p:g}"


def edge_weight(phi: np.ndarray, scheme: WeightScheme) -> float:
    """Scalar weight of one edge's information matrix under a scheme."""
    if scheme.kind == "unit":
        return 1.0
    values = np.linalg.eigvalsh(np.asarray(phi, dtype=float))
    if values[0] <= 0:
        raise GraphError("edge info matrix is not positive definite")
    if scheme.kind == "maxeig":
        return float(values[-1])
    return utility_p(values, scheme.p)


def edge_weights(g: PoseGraph, scheme: WeightScheme) -> np.ndarray:
    return np.array([edge_weight(e.info, scheme) for e in g.edges])


@dataclass(frozen=True)
class BlockInfoMatrix:
    """Full n*ell x n*ell block information matrix of a pose-graph."""

    matrix: np.ndarray
    block_dim: int
    n: int
    m: int


def assemble_fim(g: PoseGraph) -> BlockInfoMatrix:
    """Edge-additive block information matrix: each edge adds +phi on both
    diagonal blocks and -phi on the two off-diagonal blocks (the Kronecker
    form E_j (x) phi_j summed over edges)."""
    ell = g.ell
    y = np.zeros((g.n * ell, g.n * ell))
    for e in g.edges:
        i, k = e.src * ell, e.dst * ell
        y[i:i + ell, i:i + ell] += e.info
        y[k:k + ell, k:k + ell] += e.info
        y[i:i + ell, k:k + ell] -= e.info
        y[k:k + ell, i:i + ell] -= e.info
    return BlockInfoMatrix(y, ell, g.n, g.m)


# ---------------------------------------------------------------------------
# Criteria, both routes
# ---------------------------------------------------------------------------

def criteria_from_fim(y: BlockInfoMatrix) -> OptimalityReport:
    """Criteria from the full FIM spectrum. Requires exactly ell zero
    eigenvalues (connected graph)."""
    spec = spectrum_of(y.matrix)
    if spec.zero_count != y.block_dim:
        raise GraphError(
            f"expected {y.block_dim} zero eigenvalues, found {spec.zero_count}: "
            "graph disconnected or numerically degenerate"
        )
    return _report_from_values(spec.nonzero, "fim", y.n, y.m)


def criteria_from_laplacian(
    lap: LaplacianMatrix,
    phi_bar: np.ndarray | None = None,
    m: int | None = None,
) -> OptimalityReport:
    """Criteria from the (weighted) Laplacian spectrum, dropping its single
    zero eigenvalue. With ``phi_bar`` the constant-uncertainty factorization
    is applied, reproducing the FIM-route criteria exactly for graphs whose
    edges all carry phi_bar."""
    spec = spectrum_of(lap.matrix)
    n = lap.size
    if spec.zero_count != 1:
        e_tilde = float(spec.values[-1]) if n > 0 else 0.0
        return OptimalityReport(0.0, 0.0, 0.0, 0.0, e_tilde,
                                "laplacian", n, m, connected=False)
    mu = spec.nonzero
    if phi_bar is None:
        return _report_from_values(mu, "laplacian", n, m)
    rho = np.linalg.eigvalsh(np.asarray(phi_bar, dtype=float))
    if rho[0] <= 0:
        raise GraphError("phi_bar must be positive definite")
    # Kronecker spectrum {mu_k * rho_b}: power means over a product multiset
    # factor into the per-multiset means, for every order p.
    return OptimalityReport(
        t_opt=t_opt(mu) * t_opt(rho),
        d_opt=d_opt(mu) * d_opt(rho),
        a_opt=a_opt(mu) * a_opt(rho),
        e_opt=float(mu[0] * rho[0]),
        e_tilde_opt=float(mu[-1] * rho[-1]),
        source="laplacian",
        n=n,
        m=m,
    )


# Paper-form closed shortcuts (normalized over n rather than n-1).

def t_opt_fullsize(lap: LaplacianMatrix) -> float:
    """(2m/n) * mean weight == trace(L_w)/n."""
    return float(np.trace(lap.matrix)) / lap.size


def d_opt_fullsize(lap: LaplacianMatrix) -> float:
    """(n * weighted-tree-count)^(1/n), in log domain."""
    n = lap.size
    log_t = spanning_tree_count(lap)
    if log_t == -math.inf:
        return 0.0
    return math.exp((math.log(n) + log_t) / n)


def a_opt_fullsize(lap: LaplacianMatrix) -> float:
    """n^2 / Kirchhoff index (constant-weight special case)."""
    kf = kirchhoff_index(lap)
    if kf == math.inf:
        return 0.0
    return lap.size ** 2 / kf


@dataclass(frozen=True)
class BoundViolation:
    criterion: str
    fim_value: float
    laplacian_value: float
    rel_gap: float


def verify_bound(report_fim: OptimalityReport, report_lap: OptimalityReport,
                 rel_slack: float = 1e-9) -> list[BoundViolation]:
    """Check criterion(FIM) <= criterion(L_w) for every criterion; returns
    the violations beyond relative slack (empty list on a conforming pair).
    Meaningful when the Laplacian side used MaxEig weights."""
    violations = []
    for name in ("t_opt", "d_opt", "a_opt", "e_opt", "e_tilde_opt"):
        f = getattr(report_fim, name)
        l = getattr(report_lap, name)
        slack = rel_slack * max(abs(f), abs(l), 1.0)
        if f > l + slack:
            gap = (f - l) / max(abs(l), 1e-300)
            violations.append(BoundViolation(name, f, l, gap))
    return violations


def graph_health_metrics(g: PoseGraph) -> dict[str, float]:
    """Average degree 2m/n and normalized tree connectivity
    log t(G) / log t(K_n). Disconnected graphs score 0."""
    from spectral_slam.core_graph import laplacian as _laplacian

    n = g.n
    avg_degree = 2.0 * g.m / n
    log_t = spanning_tree_count(_laplacian(g))
    if log_t == -math.inf:
        tau = 0.0
    elif n <= 2:
        tau = 1.0  # K_1/K_2: the graph is the complete graph
    else:
        tau = log_t / ((n - 2) * math.log(n))  # t(K_n) = n^(n-2)
    return {"avg_degree": avg_degree, "norm_tree_connectivity": tau}
