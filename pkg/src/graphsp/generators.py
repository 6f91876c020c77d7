"""Small graph families and seeded random graphs used by tests and demos."""

from __future__ import annotations

import numpy as np

from graphsp.graph import Graph, from_edge_list


def path_graph(n: int, weight: float = 1.0) -> Graph:
    k = np.arange(n - 1)
    return from_edge_list(np.column_stack([k, k + 1, np.full(n - 1, weight)]), n)


def complete_graph(n: int) -> Graph:
    i, j = np.triu_indices(n, 1)
    return from_edge_list(np.column_stack([i, j, np.ones(i.size)]), n)


def random_tree(n: int, rng: np.random.Generator, weighted: bool = False) -> Graph:
    """Uniform random recursive tree: node k attaches to a random earlier node."""
    if n == 1:
        return from_edge_list([], 1)
    child = np.arange(1, n)
    parent = np.array([rng.integers(0, k) for k in child])
    w = rng.uniform(0.5, 1.5, n - 1) if weighted else np.ones(n - 1)
    return from_edge_list(np.column_stack([parent, child, w]), n)


def random_connected_graph(
    n: int, rng: np.random.Generator, p: float = 0.1, weighted: bool = True
) -> Graph:
    """Random spanning tree plus Erdos-Renyi extra edges, undirected.

    Weights are uniform on [0.5, 1.5] when ``weighted``.
    """
    tree = random_tree(n, rng)
    edges = {(min(i, j), max(i, j)) for i, j in zip(tree.src, tree.dst)}
    iu, ju = np.triu_indices(n, 1)
    extra = rng.random(iu.size) < p
    edges.update(zip(iu[extra].tolist(), ju[extra].tolist()))
    pairs = np.array(sorted((int(a), int(b)) for a, b in edges), dtype=np.float64).reshape(-1, 2)
    w = rng.uniform(0.5, 1.5, len(pairs)) if weighted else np.ones(len(pairs))
    return from_edge_list(np.column_stack([pairs, w]), n)


def random_sparse_graph(n: int, avg_degree: float, rng: np.random.Generator) -> Graph:
    """Undirected random graph with about ``avg_degree`` neighbours per node.

    A ring keeps it connected; the remaining edges are uniform random
    pairs.  Built with vectorized numpy so it scales to ~1e5 nodes.
    """
    k = np.arange(n)
    lo = np.concatenate([k, rng.integers(0, n, int(n * max(avg_degree - 2, 0) / 2))])
    hi = np.concatenate([(k + 1) % n, rng.integers(0, n, lo.size - n)])
    a, b = np.minimum(lo, hi), np.maximum(lo, hi)
    keep = a != b
    key = np.unique(a[keep] * n + b[keep])
    w = rng.uniform(0.5, 1.5, key.size)
    return from_edge_list(np.column_stack([key // n, key % n, w]), n)
