"""Randomized negative graphs and the signed adjacency they induce.

The contrastive objective subtracts an average of degree-normalized random
graphs from the degree-normalized data graph:

    delta_w = W_pos - (eta'/kappa) * sum_k W_neg_k

Each negative graph k draws from its own xoshiro256** stream keyed by
(seed XOR k * golden64), so graphs are independent and individually
reproducible regardless of sampling order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .graph_core import SparseSym, add_self_loops, degree_normalize
from .rng import GOLDEN64, MASK64, Xoshiro256StarStar, splitmix64

MODES = ("per-node-k", "erdos-renyi")


@dataclass
class NegSampleConfig:
    kappa: int = 10
    per_node: int = 5
    mode: str = "per-node-k"
    p_prime: float = 0.05
    eta_prime: float = 1.0
    seed: int = 0

    def validate(self, n: int | None = None) -> None:
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.mode == "per-node-k":
            if self.per_node < 1:
                raise ValueError("per_node must be >= 1")
            if n is not None and self.per_node >= n:
                raise ValueError(f"per_node={self.per_node} must be < n={n}")
        if self.mode == "erdos-renyi" and not (0.0 < self.p_prime < 1.0):
            raise ValueError("p_prime must lie in (0, 1)")
        if not (0.0 <= self.eta_prime <= 1.0):
            raise ValueError("eta_prime must lie in [0, 1]")


def negative_stream(seed: int, k: int) -> Xoshiro256StarStar:
    """The PRNG stream for negative graph k under a master seed."""
    return Xoshiro256StarStar((seed ^ ((k * GOLDEN64) & MASK64)) & MASK64)


def _raw_edges(n: int, cfg: NegSampleConfig, rng: Xoshiro256StarStar) -> set[tuple[int, int]]:
    edges: set[tuple[int, int]] = set()
    if cfg.mode == "per-node-k":
        for i in range(n):
            for j in rng.distinct(n, cfg.per_node, exclude=i):
                edges.add((min(i, j), max(i, j)))
    else:
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < cfg.p_prime:
                    edges.add((i, j))
    return edges


def sample_negative_graph(n: int, cfg: NegSampleConfig, k: int) -> SparseSym:
    """Sample negative graph k and return it degree-normalized.

    Self-loops are added before normalization, matching the positive-graph
    pipeline, so positive and negative matrices live on the same scale.
    """
    if n < 2:
        raise ValueError("need at least 2 nodes to sample a negative graph")
    if k < 0 or (cfg.kappa and k >= cfg.kappa):
        raise ValueError(f"graph index {k} out of range for kappa={cfg.kappa}")
    cfg.validate(n)
    rng = negative_stream(cfg.seed, k)
    edges = _raw_edges(n, cfg, rng)
    if not edges and cfg.mode == "erdos-renyi":
        edges = _raw_edges(n, cfg, rng)  # one resample for degenerate draws
        if not edges:
            raise ValueError(f"empty negative graph twice in a row (p_prime={cfg.p_prime})")
    raw = SparseSym.from_edges(n, edges)
    return degree_normalize(add_self_loops(raw))


def build_delta_w(w_pos: SparseSym, w_negs: list[SparseSym], eta_prime: float) -> SparseSym:
    """delta_w = w_pos - (eta'/kappa) * sum of negatives (w_pos when kappa=0)."""
    if not w_negs:
        return SparseSym(w_pos.n, w_pos.indptr.copy(), w_pos.indices.copy(), w_pos.data.copy())
    for w in w_negs:
        if w.n != w_pos.n:
            raise ValueError(f"negative graph is {w.n}x{w.n}, expected {w_pos.n}x{w_pos.n}")
    acc = w_negs[0]._scipy().copy()
    for w in w_negs[1:]:
        acc = acc + w._scipy()
    delta = w_pos._scipy() - (eta_prime / len(w_negs)) * acc
    return SparseSym.from_scipy(delta)


class PsdMargin(NamedTuple):
    value: float
    converged: bool


def psd_margin(l_pos: SparseSym, l_negs: list[SparseSym], eta_prime: float,
               tol: float = 1e-6, max_iter: int = 20000) -> PsdMargin:
    """Smallest eigenvalue of L - (eta'/kappa) * sum L_neg_k.

    Estimated by power iteration on the shifted operator mu*I - S with mu a
    Gershgorin upper bound on the spectrum; a negative value means the
    contrastive combination lost positive semidefiniteness.
    """
    n = l_pos.n
    s = l_pos._scipy().copy()
    if l_negs:
        coef = eta_prime / len(l_negs)
        for l in l_negs:
            if l.n != n:
                raise ValueError("Laplacian size mismatch")
            s = s - coef * l._scipy()
    s = s.tocsr()
    mu = float(np.abs(s).sum(axis=1).max()) if s.nnz else 0.0

    # deterministic pseudo-random start, biased away from exact eigenvectors
    state = 0xC0FFEE
    v = np.empty(n)
    for i in range(n):
        state, z = splitmix64(state)
        v[i] = (z >> 11) * (2.0 ** -53) - 0.5
    nv = np.linalg.norm(v)
    v = np.full(n, 1.0 / np.sqrt(n)) if nv == 0 else v / nv

    lam = 0.0
    converged = False
    scale = max(1.0, mu)
    for _ in range(max_iter):
        w = mu * v - s @ v  # B v with B = mu*I - S
        lam = float(v @ w)
        resid = w - lam * v
        if np.linalg.norm(resid) <= tol * scale:
            # (lam, v) is an eigenpair of B within tol, and by this point the
            # iteration has driven lam toward lambda_max(B)
            converged = True
            break
        nw = np.linalg.norm(w)
        if nw == 0:
            break
        v = w / nw
    return PsdMargin(mu - lam, converged)
