import numpy as np
import pytest

from coles.diagnostics import expected_negative_homophily, homophily
from coles.synthetic import SbmSpec, generate_sbm, simplex_means


def test_no_cross_edges_when_p_out_zero():
    g = generate_sbm(SbmSpec(n_classes=2, per_block=20, p_in=0.3, p_out=0.0, seed=3))
    for u, v in g.adjacency.edge_list():
        assert g.labels[u] == g.labels[v]


def test_disjoint_cliques_full_homophily():
    g = generate_sbm(SbmSpec(n_classes=2, per_block=10, p_in=1.0, p_out=0.0, seed=0))
    dense = g.adjacency.toarray()
    for b in range(2):
        block = dense[b * 10:(b + 1) * 10, b * 10:(b + 1) * 10]
        assert np.array_equal(block, np.ones((10, 10)) - np.eye(10))
    assert homophily(g.adjacency, g.labels) == 1.0


def test_generation_deterministic():
    spec = SbmSpec(n_classes=3, per_block=15, p_in=0.2, p_out=0.02, seed=11)
    a = generate_sbm(spec)
    b = generate_sbm(spec)
    assert a.adjacency.equals(b.adjacency)
    assert np.array_equal(a.features, b.features)
    assert np.array_equal(a.labels, b.labels)


def test_labels_are_block_ids():
    g = generate_sbm(SbmSpec(n_classes=3, per_block=4, seed=0))
    assert np.array_equal(g.labels, np.repeat([0, 1, 2], 4))


def test_simplex_means_equidistant():
    means = simplex_means(4, 9, sep=2.5)
    for i in range(4):
        for j in range(i + 1, 4):
            assert abs(np.linalg.norm(means[i] - means[j]) - 2.5) < 1e-12


def test_feature_noise_scale():
    spec = SbmSpec(n_classes=2, per_block=400, feature_dim=8, mean_sep=0.0,
                   noise_sigma=1.7, seed=5)
    g = generate_sbm(spec)
    assert abs(np.std(g.features) - 1.7) < 0.05


def test_within_block_edge_count_near_binomial_mean():
    per_block, p_in = 60, 0.15
    spec = SbmSpec(n_classes=2, per_block=per_block, p_in=p_in, p_out=0.0, seed=21)
    g = generate_sbm(spec)
    n_pairs = 2 * per_block * (per_block - 1) // 2
    count = len(g.adjacency.edge_list())
    sd = np.sqrt(n_pairs * p_in * (1 - p_in))
    assert abs(count - n_pairs * p_in) < 4 * sd


def test_homophily_above_negative_baseline():
    for seed in range(20):
        spec = SbmSpec(n_classes=3, per_block=100, p_in=0.1, p_out=0.01, seed=seed)
        g = generate_sbm(spec)
        h = homophily(g.adjacency, g.labels)
        assert h > expected_negative_homophily(np.full(3, 1.0 / 3.0))


def test_invalid_specs_rejected():
    with pytest.raises(ValueError, match="p_out"):
        SbmSpec(p_in=0.1, p_out=0.5).validate()
    with pytest.raises(ValueError, match="per_block"):
        SbmSpec(per_block=1).validate()
    with pytest.raises(ValueError, match="simplex"):
        SbmSpec(n_classes=5, feature_dim=3).validate()
