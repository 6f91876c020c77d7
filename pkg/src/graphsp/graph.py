"""Graphs and their algebraic shift operators.

Edge ``(src, dst, w)`` is a weighted edge going from ``src`` to ``dst``.
It lands in the adjacency matrix at ``A[dst, src] = w``: row ``i`` of ``A``
lists the in-edges of node ``i``, so ``(A @ s)[i]`` collects the values
of the nodes pointing at ``i``.  With this convention the directed ring
``k -> k+1`` has the cyclic delay matrix as adjacency and ``A @ s`` is
``s`` delayed by one sample.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.spatial import cKDTree

from graphsp import errors

#: Operators with at most this many nodes are stored as dense arrays.
DENSE_THRESHOLD = 2048

_WEIGHT_MATCH_TOL = 1e-12


class ShiftKind(str, enum.Enum):
    ADJACENCY = "adjacency"
    LAPLACIAN = "laplacian"
    NORMALIZED = "normalized"

    @property
    def is_laplacian(self) -> bool:
        return self is not ShiftKind.ADJACENCY


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Weighted graph on nodes ``0 .. n-1``.

    Build instances with :func:`from_edge_list` (or the generators); the
    constructor itself does not validate.  Undirected graphs store every
    edge in both directions.  Edge arrays are sorted by ``(src, dst)`` and
    read-only.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    directed: bool

    @property
    def num_edges(self) -> int:
        """Number of stored edge records (twice the edge count if undirected)."""
        return int(self.src.size)

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [
            (int(i), int(j), float(w))
            for i, j, w in zip(self.src, self.dst, self.weight)
        ]

    def same_edges(self, other: "Graph") -> bool:
        return (
            self.n == other.n
            and self.directed == other.directed
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weight, other.weight)
        )

    @cached_property
    def adjacency_sparse(self) -> sp.csr_matrix:
        a = sp.csr_matrix(
            (self.weight, (self.dst, self.src)), shape=(self.n, self.n), dtype=np.float64
        )
        a.sort_indices()
        return a

    def adjacency(self) -> np.ndarray | sp.csr_matrix:
        """Adjacency matrix, dense up to ``DENSE_THRESHOLD`` nodes."""
        if self.n <= DENSE_THRESHOLD:
            return self.adjacency_sparse.toarray()
        return self.adjacency_sparse.copy()

    @cached_property
    def degrees(self) -> np.ndarray:
        """Row sums of ``A`` (weighted in-degree).

        Each row is summed in ascending weight order so the result does
        not depend on node labels, which keeps relabelled Laplacians
        exactly conjugate.
        """
        d = np.zeros(self.n)
        if self.num_edges:
            order = np.lexsort((self.weight, self.dst))
            rows, w = self.dst[order], self.weight[order]
            starts = np.flatnonzero(np.r_[True, rows[1:] != rows[:-1]])
            d[rows[starts]] = np.add.reduceat(w, starts)
        return _readonly(d)


def from_edge_list(
    rows: Iterable[Sequence[float]] | np.ndarray, n: int, directed: bool = False
) -> Graph:
    """Build a validated :class:`Graph` from ``(src, dst, weight)`` rows.

    Undirected rows may list an edge once or in both directions; when both
    directions appear their weights must agree to within 1e-12.

    Raises
    ------
    IndexOutOfRange, SelfLoop, DuplicateEdge, AsymmetricWeight,
    NegativeWeight, NonFiniteWeight
    """
    n = int(n)
    if n < 1:
        raise errors.TooSmall(f"graph needs at least one node, got n={n}")
    arr = np.asarray(rows, dtype=np.float64)
    if arr.size == 0:
        arr = np.empty((0, 3))
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise errors.InputError("edge rows must be (src, dst, weight) triples")

    src_f, dst_f, w = arr[:, 0], arr[:, 1], arr[:, 2].copy()
    if not (np.all(np.isfinite(src_f)) and np.all(np.isfinite(dst_f))):
        raise errors.IndexOutOfRange("non-finite node index")
    src = src_f.astype(np.int64)
    dst = dst_f.astype(np.int64)
    if np.any(src != src_f) or np.any(dst != dst_f):
        raise errors.IndexOutOfRange("node indices must be integers")
    bad = (src < 0) | (src >= n) | (dst < 0) | (dst >= n)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise errors.IndexOutOfRange(
            f"edge ({src[k]}, {dst[k]}) has an index outside [0, {n})"
        )
    if not np.all(np.isfinite(w)):
        raise errors.NonFiniteWeight("edge weights must be finite")
    loops = src == dst
    if np.any(loops):
        raise errors.SelfLoop(f"self-loop at node {src[np.flatnonzero(loops)[0]]}")

    key = src * n + dst
    uniq, counts = np.unique(key, return_counts=True)
    if np.any(counts > 1):
        k = int(uniq[np.argmax(counts > 1)])
        raise errors.DuplicateEdge(f"edge ({k // n}, {k % n}) listed more than once")

    if not directed:
        if np.any(w < 0):
            raise errors.NegativeWeight("undirected graphs require non-negative weights")
        lo, hi = np.minimum(src, dst), np.maximum(src, dst)
        ckey = lo * n + hi
        order = np.argsort(ckey, kind="stable")
        ckey, w_sorted = ckey[order], w[order]
        # after the duplicate check a canonical pair occurs at most twice
        pair = np.flatnonzero(ckey[1:] == ckey[:-1])
        mismatch = np.abs(w_sorted[pair] - w_sorted[pair + 1]) > _WEIGHT_MATCH_TOL
        if np.any(mismatch):
            k = int(ckey[pair[np.argmax(mismatch)]])
            raise errors.AsymmetricWeight(
                f"edge ({k // n}, {k % n}) given with two different weights"
            )
        keep = np.ones(ckey.size, dtype=bool)
        keep[pair + 1] = False
        ckey, w_sorted = ckey[keep], w_sorted[keep]
        lo, hi = ckey // n, ckey % n
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        w = np.concatenate([w_sorted, w_sorted])

    order = np.lexsort((dst, src))
    return Graph(
        n=n,
        src=_readonly(src[order]),
        dst=_readonly(dst[order]),
        weight=_readonly(w[order].astype(np.float64)),
        directed=bool(directed),
    )


def cycle_graph(n: int, directed: bool = True) -> Graph:
    """Ring on ``n`` nodes with unit weights.

    The directed ring has edges ``k -> (k+1) mod n`` so its adjacency is
    the cyclic delay matrix.
    """
    n = int(n)
    if n < 2 or (not directed and n < 3):
        raise errors.TooSmall(
            f"{'directed' if directed else 'undirected'} cycle needs more nodes, got n={n}"
        )
    k = np.arange(n)
    rows = np.column_stack([k, (k + 1) % n, np.ones(n)])
    return from_edge_list(rows, n, directed=directed)


def knn_graph(points: Sequence[Sequence[float]] | np.ndarray, k: int, sigma: float) -> Graph:
    """Undirected k-nearest-neighbour graph with Gaussian weights.

    Edge ``(i, j)`` exists when either node is among the other's ``k``
    nearest neighbours (union symmetrization); its weight is
    ``exp(-d(i, j)**2 / (2 sigma**2))``.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    if k < 1:
        raise errors.InputError("k must be at least 1")
    if not sigma > 0:
        raise errors.InputError("sigma must be positive")
    if n < k + 1:
        raise errors.KTooLarge(f"k={k} needs at least {k + 1} points, got {n}")
    if not np.all(np.isfinite(pts)):
        raise errors.InputError("point coordinates must be finite")
    if np.unique(pts, axis=0).shape[0] < n:
        raise errors.DuplicatePoints("point set contains coincident points")

    tree = cKDTree(pts)
    dist, idx = tree.query(pts, k=k + 1)
    rows = np.repeat(np.arange(n), k + 1)
    cols, d = idx.ravel(), dist.ravel()
    # drop self matches, keep the first k others per row
    not_self = (cols != rows).reshape(n, k + 1)
    rank = np.cumsum(not_self, axis=1)
    take = (not_self & (rank <= k)).ravel()
    rows, cols, d = rows[take], cols[take], d[take]

    lo, hi = np.minimum(rows, cols), np.maximum(rows, cols)
    key, first = np.unique(lo * n + hi, return_index=True)
    w = np.exp(-(d[first] ** 2) / (2.0 * sigma**2))
    return from_edge_list(np.column_stack([key // n, key % n, w]), n, directed=False)


@dataclass(frozen=True, eq=False)
class ShiftOperator:
    """A graph shift matrix tagged with its kind."""

    kind: ShiftKind
    matrix: np.ndarray | sp.csr_matrix
    graph: Graph

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    @cached_property
    def sparse(self) -> sp.csr_matrix:
        return self.matrix if self.is_sparse else sp.csr_matrix(self.matrix)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)

    @cached_property
    def is_symmetric(self) -> bool:
        if self.kind.is_laplacian:
            return True
        if self.is_sparse:
            return (abs(self.matrix - self.matrix.T)).max() == 0 if self.matrix.nnz else True
        return bool(np.array_equal(self.matrix, self.matrix.T))

    def __matmul__(self, x):
        return self.matrix @ x


def shift(g: Graph, kind: ShiftKind | str) -> ShiftOperator:
    """Adjacency, combinatorial Laplacian ``D - A`` or ``D^-1/2 L D^-1/2``."""
    kind = ShiftKind(kind)
    a = g.adjacency_sparse
    if kind is ShiftKind.ADJACENCY:
        m = a.copy()
    else:
        if g.directed:
            raise errors.DirectedLaplacian("Laplacian shifts are defined for undirected graphs only")
        d = g.degrees
        lap = sp.diags(d, format="csr") - a
        if kind is ShiftKind.LAPLACIAN:
            m = lap
        else:
            if np.any(d <= 0):
                raise errors.IsolatedNode(
                    f"node {int(np.flatnonzero(d <= 0)[0])} has zero degree"
                )
            dinv = sp.diags(1.0 / np.sqrt(d), format="csr")
            m = dinv @ lap @ dinv
            # exact symmetry, the triple product can differ by one ulp
            m = (m + m.T) * 0.5
        m = sp.csr_matrix(m)
    m.sort_indices()
    matrix = m.toarray() if g.n <= DENSE_THRESHOLD else m
    if isinstance(matrix, np.ndarray):
        _readonly(matrix)
    return ShiftOperator(kind=kind, matrix=matrix, graph=g)


def relabel(g: Graph, perm: Sequence[int] | np.ndarray) -> Graph:
    """Rename node ``i`` to ``perm[i]``.

    The new adjacency is ``P A P^T`` with ``P[perm[i], i] = 1``.
    """
    p = np.asarray(perm)
    if p.shape != (g.n,) or not np.issubdtype(p.dtype, np.integer):
        raise errors.NotAPermutation(f"expected {g.n} integer labels")
    if not np.array_equal(np.sort(p), np.arange(g.n)):
        raise errors.NotAPermutation("labels are not a bijection on the node set")
    rows = np.column_stack([p[g.src], p[g.dst], g.weight])
    return from_edge_list(rows, g.n, directed=g.directed)


def permutation_matrix(perm: Sequence[int] | np.ndarray) -> np.ndarray:
    p = np.asarray(perm)
    m = np.zeros((p.size, p.size))
    m[p, np.arange(p.size)] = 1.0
    return m
