import numpy as np
import pytest

from helpers import I3, make_graph, random_connected_pairs

from spectral_slam.core_graph import (
    Edge,
    GraphError,
    PoseGraph,
    Vertex,
    adjacency_matrix,
    connected_component_count,
    incidence_matrix,
    is_connected,
    laplacian,
    laplacian_from_edge_list,
    reduced_laplacian,
)


# --- adjacency ---------------------------------------------------------------

def test_adjacency_triangle():
    g = make_graph(3, [(0, 1), (1, 2), (0, 2)])
    expected = np.ones((3, 3), dtype=int) - np.eye(3, dtype=int)
    assert np.array_equal(adjacency_matrix(g), expected)


def test_adjacency_single_vertex():
    g = PoseGraph((Vertex(0),), ())
    assert np.array_equal(adjacency_matrix(g), np.zeros((1, 1), dtype=int))


def test_adjacency_chain():
    g = make_graph(3, [(0, 1), (1, 2)])
    a = adjacency_matrix(g)
    assert a[0, 1] == a[1, 0] == 1
    assert a[1, 2] == a[2, 1] == 1
    assert a[0, 2] == a[2, 0] == 0
    assert np.all(np.diag(a) == 0)


# --- incidence ---------------------------------------------------------------

def test_incidence_single_edge():
    g = make_graph(2, [(0, 1)])
    assert np.array_equal(incidence_matrix(g), np.array([[1], [-1]]))


def test_incidence_chain():
    g = make_graph(3, [(0, 1), (1, 2)])
    assert np.array_equal(incidence_matrix(g),
                          np.array([[1, 0], [-1, 1], [0, -1]]))


def test_incidence_gram_equals_unit_laplacian():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 9))
        g = make_graph(n, random_connected_pairs(rng, n, extra=3))
        q = incidence_matrix(g)
        assert np.array_equal(q @ q.T, laplacian(g).matrix.astype(int))


# --- laplacian ---------------------------------------------------------------

def test_laplacian_single_weighted_edge():
    g = make_graph(2, [(0, 1)])
    lap = laplacian(g, [3.0])
    assert np.array_equal(lap.matrix, np.array([[3.0, -3.0], [-3.0, 3.0]]))


def test_laplacian_k3_unit():
    g = make_graph(3, [(0, 1), (1, 2), (0, 2)])
    expected = np.array([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]], dtype=float)
    assert np.array_equal(laplacian(g).matrix, expected)


def test_parallel_edges_accumulate():
    g = make_graph(2, [(0, 1), (0, 1)])
    lap = laplacian(g, [1.0, 2.0])
    assert np.array_equal(lap.matrix, np.array([[3.0, -3.0], [-3.0, 3.0]]))


def test_nonpositive_weight_rejected():
    g = make_graph(2, [(0, 1)])
    with pytest.raises(GraphError):
        laplacian(g, [0.0])
    with pytest.raises(GraphError):
        laplacian(g, [-1.0])


def test_weight_count_mismatch_rejected():
    g = make_graph(3, [(0, 1), (1, 2)])
    with pytest.raises(GraphError):
        laplacian(g, [1.0])


def test_laplacian_invariants_random():
    for seed in range(15):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(2, 12))
        g = make_graph(n, random_connected_pairs(rng, n, extra=4))
        w = rng.uniform(0.5, 250.0, size=g.m)
        lap = laplacian(g, w).matrix
        scale = np.abs(lap).max()
        assert np.abs(lap.sum(axis=1)).max() <= 1e-9 * scale
        assert np.abs(lap - lap.T).max() == 0.0
        assert np.linalg.eigvalsh(lap)[0] >= -1e-9 * scale
        offdiag = lap - np.diag(np.diag(lap))
        assert np.all(offdiag <= 0)


def test_unit_trace_is_twice_edge_count():
    for seed in range(10):
        rng = np.random.default_rng(200 + seed)
        n = int(rng.integers(2, 10))
        g = make_graph(n, random_connected_pairs(rng, n, extra=3))
        assert np.trace(laplacian(g).matrix) == 2 * g.m


def test_laplacian_from_edge_list_matches_graph_route():
    g = make_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    w = [1.0, 2.0, 3.0, 4.0]
    a = laplacian(g, w).matrix
    b = laplacian_from_edge_list(4, [(0, 1), (1, 2), (2, 3), (0, 3)], w).matrix
    assert np.array_equal(a, b)


# --- reduced laplacian -------------------------------------------------------

def test_reduced_k3():
    g = make_graph(3, [(0, 1), (1, 2), (0, 2)])
    red = reduced_laplacian(laplacian(g), 0)
    assert np.array_equal(red, np.array([[2.0, -1.0], [-1.0, 2.0]]))
    assert round(np.linalg.det(red)) == 3


def test_reduced_path_has_one_tree():
    g = make_graph(3, [(0, 1), (1, 2)])
    for drop in range(3):
        assert round(np.linalg.det(reduced_laplacian(laplacian(g), drop))) == 1


def test_reduced_determinant_drop_independent():
    for seed in range(20):
        rng = np.random.default_rng(300 + seed)
        n = int(rng.integers(2, 9))
        g = make_graph(n, random_connected_pairs(rng, n, extra=3))
        lap = laplacian(g)
        dets = {round(np.linalg.det(reduced_laplacian(lap, d)))
                for d in range(n)}
        assert len(dets) == 1


def test_reduced_rejects_single_vertex():
    lap = laplacian(PoseGraph((Vertex(0),), ()))
    with pytest.raises(GraphError):
        reduced_laplacian(lap, 0)


def test_reduced_rejects_bad_drop():
    g = make_graph(2, [(0, 1)])
    with pytest.raises(GraphError):
        reduced_laplacian(laplacian(g), 5)


# --- connectivity ------------------------------------------------------------

def test_is_connected_chain():
    assert is_connected(make_graph(5, [(i, i + 1) for i in range(4)]))


def test_is_connected_disjoint_edges():
    assert not is_connected(make_graph(4, [(0, 1), (2, 3)]))


def test_component_count_matches_zero_eigenvalues():
    for seed in range(20):
        rng = np.random.default_rng(400 + seed)
        n = int(rng.integers(2, 21))
        m = int(rng.integers(0, 2 * n))
        pairs = []
        for _ in range(m):
            i, k = int(rng.integers(0, n)), int(rng.integers(0, n))
            if i != k:
                pairs.append((i, k))
        g = make_graph(n, pairs)
        values = np.linalg.eigvalsh(laplacian(g).matrix)
        tol = 1e-9 * max(values[-1], 1.0)
        zeros = int(np.sum(values <= tol))
        assert zeros == connected_component_count(g)
        assert is_connected(g) == (zeros == 1)


# --- validation --------------------------------------------------------------

def test_edge_rejects_self_loop():
    with pytest.raises(GraphError):
        Edge(2, 2, I3)


def test_edge_rejects_bad_dimension():
    with pytest.raises(GraphError):
        Edge(0, 1, np.eye(4))


def test_edge_rejects_asymmetric_info():
    info = np.eye(3)
    info[0, 1] = 0.5
    with pytest.raises(GraphError):
        Edge(0, 1, info)


def test_graph_rejects_missing_endpoint():
    with pytest.raises(GraphError):
        make_graph(2, [(0, 5)])


def test_graph_rejects_sparse_ids():
    with pytest.raises(GraphError):
        PoseGraph((Vertex(0), Vertex(2)), ())


def test_graph_rejects_mixed_block_dims():
    with pytest.raises(GraphError):
        PoseGraph(
            tuple(Vertex(i) for i in range(3)),
            (Edge(0, 1, np.eye(3)), Edge(1, 2, np.eye(6))),
        )


def test_vertex_rejects_non_unit_quaternion():
    with pytest.raises(GraphError):
        Vertex(0, (0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.5))
