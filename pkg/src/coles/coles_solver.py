"""Closed-form contrastive embeddings for linear graph networks.

The trace objective  max_P trace(P M P^T)  with  M = (FX)^T delta_w (FX)
and orthonormal rows P P^T = I is solved exactly by the top eigenvectors of
the small d x d matrix M. Eigenpairs come from a cyclic Jacobi sweep, which
is simple to verify and deterministic; M stays at feature dimensionality,
so the desk-scale envelope is d up to a couple of thousand. Wider feature
matrices should be folded first with hash_features().
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .graph_core import SparseSym, as_dense, normalized_adjacency, spmm
from .negative_sampling import NegSampleConfig, build_delta_w, sample_negative_graph
from .rng import GOLDEN64, MASK64, splitmix64
from .spectral_filters import FilterConfig, apply_filter


@dataclass
class ColesConfig:
    d_prime: int = 16
    filter: FilterConfig = field(default_factory=FilterConfig)
    negatives: NegSampleConfig = field(default_factory=NegSampleConfig)
    beta: float = 0.0
    tau: float = 1.0
    self_loops: bool = True

    def validate(self, d: int | None = None) -> None:
        if self.d_prime < 1:
            raise ValueError("d_prime must be >= 1")
        if d is not None and self.d_prime > d:
            raise ValueError(f"d_prime={self.d_prime} exceeds feature dimension {d}")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.tau <= 0:
            raise ValueError("tau must be > 0")
        self.filter.validate()
        self.negatives.validate()


@dataclass
class EmbeddingResult:
    P: np.ndarray            # d' x d, orthonormal rows
    Y: np.ndarray            # n x d'
    eigenvalues: np.ndarray  # d' values, descending
    objective: float
    converged: bool = True
    rank_warning: bool = False  # fewer than d' positive eigenvalues


class EigResult(NamedTuple):
    values: np.ndarray   # descending
    vectors: np.ndarray  # orthonormal columns, vectors[:, i] pairs values[i]
    converged: bool


def sym_eig(m: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> EigResult:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi.

    Sweeps rotate every (p, q) pair in row order until the off-diagonal
    Frobenius norm falls below tol * ||M||_F. Eigenvalues are returned in
    descending order; each eigenvector's largest-magnitude component is made
    positive so signs are reproducible.
    """
    m = as_dense(m, "m")
    n = m.shape[0]
    if m.shape[1] != n:
        raise ValueError(f"matrix must be square, got {m.shape}")
    if n and np.max(np.abs(m - m.T)) > 1e-9:
        raise ValueError("matrix is not symmetric within 1e-9")
    a = 0.5 * (m + m.T)
    v = np.eye(n)
    norm = np.linalg.norm(a)

    def off_norm() -> float:
        # summed directly over off-diagonal entries; the ||A||_F^2 - sum(diag^2)
        # shortcut cancels catastrophically once the matrix is nearly diagonal
        od = a.copy()
        np.fill_diagonal(od, 0.0)
        return float(np.linalg.norm(od))

    converged = False
    for _ in range(max_sweeps):
        if off_norm() <= tol * norm:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(diff) + 100.0 * abs(apq) == abs(diff):
                    t = apq / diff  # pivot negligible vs the diagonal gap
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p,q) rotation
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        converged = off_norm() <= tol * norm

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order]
    for i in range(n):
        col = vectors[:, i]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            vectors[:, i] = -col
    return EigResult(values, vectors, converged)


def build_quadratic_form(fx: np.ndarray, delta_w: SparseSym) -> np.ndarray:
    """M = fx^T (delta_w fx), explicitly symmetrized."""
    fx = as_dense(fx, "fx")
    if fx.shape[0] != delta_w.n:
        raise ValueError(f"fx has {fx.shape[0]} rows, delta_w is {delta_w.n}x{delta_w.n}")
    m = fx.T @ spmm(delta_w, fx)
    return 0.5 * (m + m.T)


def coles_objective(y: np.ndarray, delta_w: SparseSym) -> float:
    """trace(Y^T delta_w Y)."""
    y = as_dense(y, "y")
    if y.shape[0] != delta_w.n:
        raise ValueError(f"y has {y.shape[0]} rows, delta_w is {delta_w.n}x{delta_w.n}")
    return float(np.sum(y * spmm(delta_w, y)))


def orthogonality_penalty(y: np.ndarray) -> float:
    """||Y^T Y - I||_F^2, the soft orthogonality penalty."""
    y = as_dense(y, "y")
    g = y.T @ y - np.eye(y.shape[1])
    return float(np.sum(g * g))


def general_objective(y: np.ndarray, delta_w: SparseSym, beta: float) -> float:
    """Trace objective with the orthogonality penalty subtracted at weight beta."""
    return coles_objective(y, delta_w) - beta * orthogonality_penalty(y)


def solve_projection(fx: np.ndarray, delta_w: SparseSym, d_prime: int,
                     tol: float = 1e-12) -> EmbeddingResult:
    """Top-d' eigenvector projection of the quadratic form of (fx, delta_w)."""
    fx = as_dense(fx, "fx")
    d = fx.shape[1]
    if not (1 <= d_prime <= d):
        raise ValueError(f"d_prime must be in [1, {d}], got {d_prime}")
    m = build_quadratic_form(fx, delta_w)
    eig = sym_eig(m, tol=tol)
    p = eig.vectors[:, :d_prime].T.copy()
    y = fx @ p.T
    top = eig.values[:d_prime].copy()
    return EmbeddingResult(
        P=p,
        Y=np.ascontiguousarray(y),
        eigenvalues=top,
        objective=float(top.sum()),
        converged=eig.converged,
        rank_warning=bool(np.sum(eig.values > 0) < d_prime),
    )


def solve_linear_coles(x: np.ndarray, adjacency: SparseSym, cfg: ColesConfig) -> EmbeddingResult:
    """Full pipeline: normalize, sample negatives, filter, project.

    `adjacency` is the raw binary graph (no self-loops); `x` the n x d node
    features. Deterministic given (x, adjacency, cfg).
    """
    x = as_dense(x, "x")
    cfg.validate(d=x.shape[1])
    if adjacency.n != x.shape[0]:
        raise ValueError(f"adjacency has {adjacency.n} nodes, features have {x.shape[0]} rows")
    w_pos = normalized_adjacency(adjacency, self_loops=cfg.self_loops)
    negs = [sample_negative_graph(adjacency.n, cfg.negatives, k)
            for k in range(cfg.negatives.kappa)]
    delta_w = build_delta_w(w_pos, negs, cfg.negatives.eta_prime)
    fx = apply_filter(w_pos, x, cfg.filter)
    return solve_projection(fx, delta_w, cfg.d_prime)


def hash_features(x: np.ndarray, n_buckets: int, seed: int = 0) -> np.ndarray:
    """Fold a wide feature matrix into n_buckets signed hash buckets.

    Column j lands in a bucket chosen by a splitmix64 hash of (seed, j) with
    a +-1 sign; columns are folded in ascending j, so the output is
    deterministic. Use before the solver when d exceeds the eigensolver's
    desk-scale envelope.
    """
    x = as_dense(x, "x")
    if n_buckets < 1:
        raise ValueError("n_buckets must be >= 1")
    out = np.zeros((x.shape[0], n_buckets))
    for j in range(x.shape[1]):
        state = (seed ^ ((j * GOLDEN64) & MASK64)) & MASK64
        state, h1 = splitmix64(state)
        _, h2 = splitmix64(state)
        bucket = (h1 * n_buckets) >> 64
        sign = 1.0 if (h2 & 1) == 0 else -1.0
        out[:, bucket] += sign * x[:, j]
    return out
