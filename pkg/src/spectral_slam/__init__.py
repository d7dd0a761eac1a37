"""Pose-graph uncertainty via graph spectra.

Computes optimal-design criteria (T/D/A/E) on SLAM pose-graphs two ways:
from the full block information matrix and from the (weighted) graph
Laplacian spectrum. Includes an incremental equivalence/bound benchmark and
a D-optimal frontier-exploration simulator.
"""

from spectral_slam.core_graph import (
    Edge,
    GraphError,
    LaplacianMatrix,
    PoseGraph,
    Vertex,
    adjacency_matrix,
    incidence_matrix,
    is_connected,
    laplacian,
    reduced_laplacian,
)
from spectral_slam.criteria import (
    OptimalityReport,
    Spectrum,
    WeightScheme,
    algebraic_connectivity,
    assemble_fim,
    criteria_from_fim,
    criteria_from_laplacian,
    edge_weight,
    graph_health_metrics,
    kirchhoff_index,
    spanning_tree_count,
    utility_p,
    verify_bound,
)

__version__ = "0.1.0"
