"""Shared test utilities: graph builders and independent oracles.

The oracles here deliberately avoid the library's own code paths (exhaustive
spanning-tree enumeration, pseudo-inverse resistance distances, a standalone
uniform-cost search) so that agreement is meaningful evidence.
"""

import heapq
import itertools
import math

import numpy as np

from spectral_slam.core_graph import Edge, PoseGraph, Vertex

I3 = np.eye(3)


def make_graph(n, pairs, phi=None):
    """PoseGraph on n vertices from (src, dst) pairs; constant info phi
    (identity by default) or a list of per-edge matrices."""
    vertices = tuple(Vertex(i, (float(i), 0.0, 0.0)) for i in range(n))
    if phi is None:
        phi = I3
    if isinstance(phi, np.ndarray):
        phi = [phi] * len(pairs)
    edges = tuple(Edge(i, k, p) for (i, k), p in zip(pairs, phi))
    return PoseGraph(vertices, edges)


def random_connected_pairs(rng, n, extra=2):
    """Random spanning tree plus ``extra`` additional random edges."""
    pairs = [(int(rng.integers(0, i)), i) for i in range(1, n)]
    for _ in range(extra):
        i = int(rng.integers(0, n))
        k = int(rng.integers(0, n))
        if i != k:
            pairs.append((min(i, k), max(i, k)))
    return pairs


def complete_graph_pairs(n):
    return list(itertools.combinations(range(n), 2))


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def brute_force_tree_count(n, pairs, weights=None):
    """Weighted spanning-tree count by exhaustive enumeration of all
    (n-1)-edge subsets; exact integers for unit weights."""
    if n == 1:
        return 1
    total = 0 if weights is None else 0.0
    for subset in itertools.combinations(range(len(pairs)), n - 1):
        uf = _UnionFind(n)
        if all(uf.union(*pairs[j]) for j in subset):
            if weights is None:
                total += 1
            else:
                total += math.prod(weights[j] for j in subset)
    return total


def resistance_kirchhoff(lap_matrix):
    """Kirchhoff index as the sum over vertex pairs of effective resistances
    computed from the Laplacian pseudo-inverse."""
    n = lap_matrix.shape[0]
    pinv = np.linalg.pinv(lap_matrix)
    total = 0.0
    for i in range(n):
        for k in range(i + 1, n):
            total += pinv[i, i] + pinv[k, k] - 2.0 * pinv[i, k]
    return total


def ucs_cost(passable, start, goal):
    """Uniform-cost search over the 8-connected grid, written independently
    of the library's Dijkstra kernel. Returns the cell-unit cost to ``goal``
    (inf when unreachable); the goal must itself be passable."""
    height, width = passable.shape
    best = {start: 0.0}
    frontier = [(0.0, start)]
    while frontier:
        d, cell = heapq.heappop(frontier)
        if cell == goal:
            return d
        if d > best.get(cell, math.inf):
            continue
        r, c = cell
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr == 0 and dc == 0:
                    continue
                nr, nc = r + dr, c + dc
                if not (0 <= nr < height and 0 <= nc < width):
                    continue
                if not passable[nr, nc]:
                    continue
                nd = d + (1.0 if dr == 0 or dc == 0 else math.sqrt(2.0))
                if nd < best.get((nr, nc), math.inf):
                    best[(nr, nc)] = nd
                    heapq.heappush(frontier, (nd, (nr, nc)))
    return math.inf
