"""Sparse symmetric graphs, degree normalization and the propagation kernel.

SparseSym is the single sparse type used everywhere: it stores a symmetric
n x n matrix in canonical CSR form (sorted column indices, no duplicates,
no explicit zeros) and validates symmetry bit-exactly on construction.
Dense matrices are plain 2-D float64 C-contiguous numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

MAX_NODE_ID = 2**32 - 1


def as_dense(x, name: str = "matrix") -> np.ndarray:
    """Validate and return a 2-D float64 C-contiguous dense matrix."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


class SparseSym:
    """Symmetric sparse matrix in canonical CSR storage.

    Immutable by convention: operations return new instances. The stored
    pattern always satisfies (i, j, w) present iff (j, i, w) present with
    bit-identical w, indices sorted per row, no duplicates, finite weights.
    """

    __slots__ = ("n", "indptr", "indices", "data")

    def __init__(self, n: int, indptr, indices, data, _validated: bool = False):
        self.n = int(n)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.data = np.asarray(data, dtype=np.float64)
        if not _validated:
            self._validate()

    def _validate(self) -> None:
        if self.n < 0:
            raise ValueError("negative node count")
        if self.indptr.shape != (self.n + 1,):
            raise ValueError("indptr length must be n+1")
        if self.indices.shape != self.data.shape:
            raise ValueError("indices/data length mismatch")
        if self.indices.size and (self.indices.min() < 0 or self.indices.max() >= self.n):
            raise ValueError("column index out of range")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("non-finite weight")
        for i in range(self.n):
            cols = self.indices[self.indptr[i]:self.indptr[i + 1]]
            if cols.size > 1 and np.any(np.diff(cols) <= 0):
                raise ValueError(f"row {i}: unsorted or duplicate column indices")
        # bit-exact symmetry: the CSR of the transpose must match entrywise
        t = self._scipy().T.tocsr()
        t.sort_indices()
        if not (np.array_equal(t.indptr.astype(np.int64), self.indptr)
                and np.array_equal(t.indices.astype(np.int64), self.indices)
                and np.array_equal(t.data, self.data)):
            raise ValueError("matrix is not bit-exactly symmetric")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_scipy(cls, m) -> "SparseSym":
        m = sp.csr_matrix(m, dtype=np.float64)
        if m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        return cls(m.shape[0], m.indptr.astype(np.int64), m.indices.astype(np.int64),
                   m.data.copy())

    @classmethod
    def from_edges(cls, n: int, edges, weight: float = 1.0) -> "SparseSym":
        """Build a binary symmetric matrix from undirected (u, v) pairs.

        Pairs are deduplicated; (u, v) and (v, u) count once. Self pairs
        are rejected.
        """
        uniq = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop ({u}, {u}) not allowed here")
            uniq.add((min(u, v), max(u, v)))
        rows = np.empty(2 * len(uniq), dtype=np.int64)
        cols = np.empty(2 * len(uniq), dtype=np.int64)
        for t, (u, v) in enumerate(sorted(uniq)):
            rows[2 * t], cols[2 * t] = u, v
            rows[2 * t + 1], cols[2 * t + 1] = v, u
        vals = np.full(rows.shape, float(weight))
        m = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
        return cls.from_scipy(m)

    @classmethod
    def identity(cls, n: int) -> "SparseSym":
        return cls.from_scipy(sp.identity(n, format="csr"))

    @classmethod
    def zeros(cls, n: int) -> "SparseSym":
        return cls(n, np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64),
                   np.empty(0), _validated=True)

    # -- views -------------------------------------------------------------

    def _scipy(self) -> sp.csr_matrix:
        m = sp.csr_matrix((self.data, self.indices, self.indptr), shape=(self.n, self.n))
        m.has_sorted_indices = True
        return m

    @property
    def nnz(self) -> int:
        return int(self.data.size)

    def toarray(self) -> np.ndarray:
        return self._scipy().toarray()

    def degrees(self) -> np.ndarray:
        """Row sums (weighted degrees, diagonal included)."""
        out = np.zeros(self.n)
        row_ids = np.repeat(np.arange(self.n), np.diff(self.indptr))
        np.add.at(out, row_ids, self.data)
        return out

    def has_diagonal(self) -> bool:
        for i in range(self.n):
            cols = self.indices[self.indptr[i]:self.indptr[i + 1]]
            pos = np.searchsorted(cols, i)
            if pos < cols.size and cols[pos] == i:
                return True
        return False

    def edge_list(self) -> list[tuple[int, int]]:
        """Upper-triangle (u < v) entry positions in sorted order."""
        out = []
        for i in range(self.n):
            for j in self.indices[self.indptr[i]:self.indptr[i + 1]]:
                if i < j:
                    out.append((i, int(j)))
        return out

    def equals(self, other: "SparseSym") -> bool:
        """Bit-identical structural and numerical equality."""
        return (self.n == other.n
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.data, other.data))


@dataclass
class LabeledGraph:
    """A graph with node features and integer class labels."""

    adjacency: SparseSym
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.features = as_dense(self.features, "features")
        self.labels = np.asarray(self.labels, dtype=np.int64)
        n = self.adjacency.n
        if self.features.shape[0] != n or self.labels.shape[0] != n:
            raise ValueError("adjacency, features and labels disagree on node count")
        if self.labels.size and self.labels.min() < 0:
            raise ValueError("labels must be non-negative")

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0


# -- edge-list files --------------------------------------------------------

def load_edge_list(path, n: int | None = None) -> SparseSym:
    """Read an undirected binary graph from a "u v" text file.

    Lines starting with '#' and blank lines are ignored. Duplicate lines and
    reversed pairs collapse to one edge. Node count is 1 + max id unless a
    larger n is given explicitly (trailing isolated nodes).
    """
    edges = set()
    max_id = -1
    n_lines = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            n_lines += 1
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer node id in {line!r}") from None
            if u < 0 or v < 0:
                raise ValueError(f"{path}:{lineno}: negative node id")
            if u > MAX_NODE_ID or v > MAX_NODE_ID:
                raise ValueError(f"{path}:{lineno}: node id overflow")
            if u == v:
                raise ValueError(f"{path}:{lineno}: self-loop in input ({u} {v})")
            edges.add((min(u, v), max(u, v)))
            max_id = max(max_id, u, v)
    if not edges:
        raise ValueError(f"{path}: empty edge list")
    inferred = max_id + 1
    if n is None:
        n = inferred
    elif n < inferred:
        raise ValueError(f"{path}: node id {max_id} exceeds requested n={n}")
    return SparseSym.from_edges(n, edges)


def save_edge_list(adj: SparseSym, path) -> None:
    """Write the upper-triangle edges as "u v" lines (sorted)."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in adj.edge_list():
            fh.write(f"{u} {v}\n")


# -- normalization pipeline --------------------------------------------------

def add_self_loops(adj: SparseSym) -> SparseSym:
    """Return adj + I. Rejects inputs that already carry diagonal entries."""
    if adj.has_diagonal():
        raise ValueError("adjacency already has diagonal entries")
    return SparseSym.from_scipy(adj._scipy() + sp.identity(adj.n, format="csr"))


def degree_normalize(adj: SparseSym) -> SparseSym:
    """Symmetric degree normalization: entry (i, j) -> w_ij / sqrt(d_i d_j)."""
    deg = adj.degrees()
    if np.any(deg <= 0):
        bad = int(np.argmin(deg))
        raise ValueError(f"node {bad} has zero degree; enable self-loops or connect it")
    inv_sqrt = 1.0 / np.sqrt(deg)
    row_ids = np.repeat(np.arange(adj.n), np.diff(adj.indptr))
    data = adj.data * inv_sqrt[row_ids] * inv_sqrt[adj.indices]
    return SparseSym(adj.n, adj.indptr.copy(), adj.indices.copy(), data)


def laplacian(w_norm: SparseSym) -> SparseSym:
    """L = I - W for a degree-normalized W."""
    return SparseSym.from_scipy(sp.identity(w_norm.n, format="csr") - w_norm._scipy())


def normalized_adjacency(adj: SparseSym, self_loops: bool = True) -> SparseSym:
    """Full positive-graph pipeline: optional self-loops, then normalization."""
    return degree_normalize(add_self_loops(adj) if self_loops else adj)


def spmm(s: SparseSym, x: np.ndarray) -> np.ndarray:
    """Sparse-dense product s @ x.

    Per output row the accumulation runs in ascending column order (canonical
    CSR, single-threaded), so results are bit-identical across runs.
    """
    x = as_dense(x, "x")
    if s.n != x.shape[0]:
        raise ValueError(f"dimension mismatch: sparse is {s.n}x{s.n}, dense has {x.shape[0]} rows")
    return np.ascontiguousarray(s._scipy() @ x)
