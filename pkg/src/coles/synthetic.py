"""Stochastic-block-model fixtures with Gaussian class features.

Edges are Bernoulli per unordered pair (p_in within a block, p_out across);
features are the node's class mean plus isotropic noise, with class means
sitting at the vertices of a regular simplex so every pair of classes is
equidistant at distance mean_sep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph_core import LabeledGraph, SparseSym
from .rng import Xoshiro256StarStar


@dataclass
class SbmSpec:
    n_classes: int = 3
    per_block: int = 100
    p_in: float = 0.1
    p_out: float = 0.01
    feature_dim: int = 16
    mean_sep: float = 1.0
    noise_sigma: float = 1.0
    seed: int = 0

    def validate(self) -> None:
        if self.n_classes < 1:
            raise ValueError("need at least one class")
        if self.per_block < 2:
            raise ValueError("per_block must be >= 2")
        if not (0.0 <= self.p_out <= self.p_in <= 1.0):
            raise ValueError("need 0 <= p_out <= p_in <= 1")
        if self.feature_dim < self.n_classes:
            raise ValueError("feature_dim must be >= n_classes for simplex means")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")


def simplex_means(n_classes: int, dim: int, sep: float) -> np.ndarray:
    """Class means: centered unit-simplex vertices scaled to pairwise distance sep."""
    means = np.zeros((n_classes, dim))
    means[:, :n_classes] = np.eye(n_classes)
    means[:, :n_classes] -= 1.0 / n_classes
    if n_classes > 1:
        means *= sep / np.sqrt(2.0)  # e_i - e_j has length sqrt(2)
    return means


def generate_sbm(spec: SbmSpec) -> LabeledGraph:
    spec.validate()
    n = spec.n_classes * spec.per_block
    labels = np.repeat(np.arange(spec.n_classes), spec.per_block)
    rng = Xoshiro256StarStar(spec.seed)

    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            p = spec.p_in if labels[i] == labels[j] else spec.p_out
            if rng.random() < p:
                edges.append((i, j))
    adjacency = SparseSym.from_edges(n, edges) if edges else SparseSym.zeros(n)

    means = simplex_means(spec.n_classes, spec.feature_dim, spec.mean_sep)
    noise = np.array(rng.normals(n * spec.feature_dim)).reshape(n, spec.feature_dim)
    features = means[labels] + spec.noise_sigma * noise
    return LabeledGraph(adjacency=adjacency, features=features, labels=labels)
