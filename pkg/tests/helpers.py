"""Shared fixtures for the test suite."""

import numpy as np

from coles.graph_core import SparseSym
from coles.rng import Xoshiro256StarStar


def random_graph(n, extra_per_node, seed):
    """Ring plus random chords: connected, no isolated nodes."""
    rng = Xoshiro256StarStar(seed)
    edges = [(i, (i + 1) % n) for i in range(n)]
    for i in range(n):
        for j in rng.distinct(n, extra_per_node, exclude=i):
            edges.append((min(i, j), max(i, j)))
    return SparseSym.from_edges(n, edges)


def rand_x(n, d, seed=0):
    return np.array(Xoshiro256StarStar(seed).normals(n * d)).reshape(n, d)
