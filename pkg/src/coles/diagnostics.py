"""Score-distribution diagnostics and graph homophily measures.

Quantifies how separated positive-pair and negative-pair dot-product scores
are: Parzen-window densities, the Jensen-Shannon divergence between them
(saturates at log 2 once supports separate) and the 1-D Wasserstein
distance (keeps growing with the gap), plus the label-homophily indices
that predict when the contrastive setting is easy.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .graph_core import SparseSym

LOG2 = math.log(2.0)


def _clean_sample(values, name: str = "sample") -> np.ndarray:
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite values")
    return v


def silverman_bandwidth(values) -> float:
    """Rule-of-thumb bandwidth 1.06 * std * n^(-1/5)."""
    v = _clean_sample(values)
    sigma = float(np.std(v, ddof=1)) if v.size > 1 else 1.0
    if sigma == 0:
        sigma = 1.0  # degenerate sample; any positive width works
    return 1.06 * sigma * v.size ** (-0.2)


def parzen_density(values, bandwidth: float, grid) -> np.ndarray:
    """Gaussian-kernel density estimate evaluated on a sorted grid."""
    v = _clean_sample(values)
    if bandwidth <= 0:
        raise ValueError("bandwidth must be > 0")
    g = np.asarray(grid, dtype=np.float64).ravel()
    if g.size < 2 or np.any(np.diff(g) <= 0):
        raise ValueError("grid must be sorted with at least 2 distinct points")
    z = (g[:, None] - v[None, :]) / bandwidth
    dens = np.exp(-0.5 * z * z).sum(axis=1) / (v.size * bandwidth * math.sqrt(2.0 * math.pi))
    return dens


def shared_grid(p, q, bandwidth_p: float, bandwidth_q: float,
                grid_points: int = 512) -> np.ndarray:
    """Evenly spaced grid covering both supports padded by 5 bandwidths."""
    p = _clean_sample(p, "p")
    q = _clean_sample(q, "q")
    pad = 5.0 * max(bandwidth_p, bandwidth_q)
    lo = min(p.min(), q.min()) - pad
    hi = max(p.max(), q.max()) + pad
    return np.linspace(lo, hi, grid_points)


def js_divergence(p, q, bandwidth: float | None = None, grid_points: int = 512) -> float:
    """JS divergence (natural log) between Parzen densities of two samples.

    With bandwidth=None each sample gets its own Silverman bandwidth;
    a given bandwidth applies to both. The value is clipped to
    [0, log 2 + 1e-6].
    """
    p = _clean_sample(p, "p")
    q = _clean_sample(q, "q")
    if bandwidth is not None and bandwidth <= 0:
        raise ValueError("bandwidth must be > 0")
    h_p = bandwidth if bandwidth is not None else silverman_bandwidth(p)
    h_q = bandwidth if bandwidth is not None else silverman_bandwidth(q)
    grid = shared_grid(p, q, h_p, h_q, grid_points)
    fp = parzen_density(p, h_p, grid)
    fq = parzen_density(q, h_q, grid)
    fm = 0.5 * (fp + fq)

    def kl_term(f):
        mask = f > 0
        out = np.zeros_like(f)
        out[mask] = f[mask] * np.log(f[mask] / fm[mask])
        return out

    js = 0.5 * np.trapezoid(kl_term(fp), grid) + 0.5 * np.trapezoid(kl_term(fq), grid)
    return float(np.clip(js, 0.0, LOG2 + 1e-6))


def wasserstein1(p, q) -> float:
    """Exact 1-D Wasserstein distance between empirical measures.

    Integral of |CDF_p - CDF_q|; for equal sizes this reduces to the mean
    absolute difference of the sorted samples.
    """
    p = np.sort(_clean_sample(p, "p"))
    q = np.sort(_clean_sample(q, "q"))
    if p.size == q.size:
        return float(np.mean(np.abs(p - q)))
    allv = np.sort(np.concatenate([p, q]))
    deltas = np.diff(allv)
    cdf_p = np.searchsorted(p, allv[:-1], side="right") / p.size
    cdf_q = np.searchsorted(q, allv[:-1], side="right") / q.size
    return float(np.sum(np.abs(cdf_p - cdf_q) * deltas))


class LipschitzCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def lipschitz_check(u, u_prime, v) -> LipschitzCheck:
    """|u.v - u'.v| <= max|v| * ||u - u'||_1 (Hoelder), evaluated both sides."""
    u = np.asarray(u, dtype=np.float64)
    u_prime = np.asarray(u_prime, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != u_prime.shape or u.shape != v.shape:
        raise ValueError("vectors must share one dimension")
    lhs = abs(float(u @ v) - float(u_prime @ v))
    rhs = float(np.max(np.abs(v)) * np.sum(np.abs(u - u_prime))) if v.size else 0.0
    return LipschitzCheck(lhs, rhs, lhs <= rhs + 1e-12)


def homophily(adj: SparseSym, labels, weighted: bool = False) -> float:
    """Mean same-label neighbor fraction, self-loops excluded.

    weighted=True instead sums W_ij over same-label pairs and divides by n,
    for a degree-normalized W (the two coincide only under row
    normalization).
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape[0] != adj.n:
        raise ValueError("labels length must match node count")
    total = 0.0
    for i in range(adj.n):
        cols = adj.indices[adj.indptr[i]:adj.indptr[i + 1]]
        vals = adj.data[adj.indptr[i]:adj.indptr[i + 1]]
        mask = cols != i
        cols, vals = cols[mask], vals[mask]
        same = labels[cols] == labels[i]
        if weighted:
            total += float(np.sum(vals[same]))
        else:
            if cols.size == 0:
                raise ValueError(f"node {i} is isolated; homophily undefined")
            total += float(np.count_nonzero(same)) / cols.size
    return total / adj.n


def expected_negative_homophily(class_probs) -> float:
    """Probability two independently drawn nodes share a class: sum of rho_c^2."""
    rho = np.asarray(class_probs, dtype=np.float64)
    if rho.size == 0 or np.any(rho < 0) or abs(float(rho.sum()) - 1.0) > 1e-9:
        raise ValueError("class_probs must be a probability vector")
    return float(np.sum(rho * rho))


def separation(score_pos: float, score_neg: float) -> float:
    """|sigma(x) - sigma(x')| / (sigma(x) + sigma(x')) in [0, 1)."""
    if not (math.isfinite(score_pos) and math.isfinite(score_neg)):
        raise ValueError("scores must be finite")
    a = 1.0 / (1.0 + math.exp(-score_pos))
    b = 1.0 / (1.0 + math.exp(-score_neg))
    return abs(a - b) / (a + b)


def pair_scores(y: np.ndarray, graph: SparseSym, normalize: bool = True,
                tau: float = 1.0) -> np.ndarray:
    """Dot-product scores y_i . y_j over the graph's (i < j) edges."""
    y = np.asarray(y, dtype=np.float64)
    if normalize:
        norms = np.linalg.norm(y, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        y = tau * y / norms
    edges = graph.edge_list()
    if not edges:
        raise ValueError("graph has no off-diagonal edges to score")
    return np.array([float(y[i] @ y[j]) for i, j in edges])
