"""Undirected simple graphs: loading, validation, and walk-related summaries.

A :class:`Graph` is an immutable wrapper around a sparse symmetric 0/1
adjacency matrix together with the degree vector. All node IDs are dense
``0..n-1``; the mapping back to the IDs found in the source file is kept in
``original_ids``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

__all__ = [
    "Graph",
    "PositionDistribution",
    "GraphSummary",
    "load_edge_list",
    "largest_connected_component",
    "check_ergodic",
    "stationary_distribution",
    "graph_summary",
    "load_manifest",
    "load_dataset",
    "complete_graph",
    "cycle_graph",
    "star_graph",
    "path_graph",
    "from_edges",
]

DATASET_NAMES = ("facebook", "twitch", "deezer", "enron", "google")

PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph held as a CSR adjacency matrix.

    Invariants (enforced by the constructors in this module): no self-loops,
    no duplicate edges, symmetric adjacency, and ``degrees.sum() == 2 * m``.
    Instances are immutable and safe to share across workers.
    """

    n: int
    m: int
    adj: sp.csr_matrix = field(repr=False)
    degrees: np.ndarray = field(repr=False)
    original_ids: np.ndarray = field(repr=False)

    @cached_property
    def _connectivity(self) -> tuple[bool, bool]:
        return _connected_and_bipartite(self.adj)

    @property
    def is_connected(self) -> bool:
        return self._connectivity[0]

    @property
    def is_bipartite(self) -> bool:
        return self._connectivity[1]

    def neighbors(self, node: int) -> np.ndarray:
        return self.adj.indices[self.adj.indptr[node] : self.adj.indptr[node + 1]]

    def is_regular(self) -> bool:
        return bool(self.degrees.min() == self.degrees.max())


@dataclass(frozen=True)
class PositionDistribution:
    """Probability of a report sitting at each node at a given time step.

    ``time_step`` is a round count, or the string ``"stationary"`` for the
    long-run fixed point.
    """

    probs: np.ndarray = field(repr=False)
    time_step: int | str = 0

    def __post_init__(self):
        probs = np.asarray(self.probs)
        object.__setattr__(self, "probs", probs)
        if probs.dtype != object:
            total = float(probs.sum())
            if abs(total - 1.0) > PROB_SUM_TOL:
                raise ValueError(f"probabilities sum to {total!r}, not 1")
            if float(probs.min()) < -PROB_SUM_TOL or float(probs.max()) > 1 + PROB_SUM_TOL:
                raise ValueError("probabilities must lie in [0, 1]")

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    def sum_squared(self) -> float:
        return float(np.dot(self.probs, self.probs))


@dataclass(frozen=True)
class GraphSummary:
    """Size, irregularity, and ergodicity facts computed in one pass.

    ``gamma`` is ``n * sum(pi_i^2)`` for the degree-proportional stationary
    distribution; it equals 1 exactly on regular graphs and grows with
    degree skew.
    """

    n: int
    m: int
    gamma: float
    sum_pi_squared: float
    is_connected: bool
    is_bipartite: bool


def from_edges(edges, node_ids=None, symmetrize: bool = True) -> Graph:
    """Build a simple undirected graph from an array of node-ID pairs.

    Self-loops and duplicate edges are dropped. Node IDs may be arbitrary
    integers; they are remapped to dense ``0..n-1`` and the original labels
    retained. With ``symmetrize=False``, an edge list containing an ordered
    pair without its reverse is rejected instead of silently symmetrized.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size == 0:
        raise ValueError("empty graph")

    if node_ids is None:
        node_ids, dense = np.unique(edges, return_inverse=True)
        dense = dense.reshape(edges.shape)
    else:
        node_ids = np.asarray(node_ids, dtype=np.int64)
        lookup = {int(v): i for i, v in enumerate(node_ids)}
        dense = np.array([[lookup[int(u)], lookup[int(v)]] for u, v in edges], dtype=np.int64)
    n = int(node_ids.shape[0])

    u, v = dense[:, 0], dense[:, 1]
    keep = u != v
    u, v = u[keep], v[keep]
    if u.size == 0:
        raise ValueError("empty graph")

    data = np.ones(u.shape[0], dtype=np.int8)
    upper = sp.coo_matrix((data, (u, v)), shape=(n, n))
    adj = upper + upper.T
    adj.data[:] = 1
    adj = adj.tocsr()
    adj.data = adj.data.astype(np.float64)

    if not symmetrize:
        directed = sp.coo_matrix((data, (u, v)), shape=(n, n)).tocsr()
        directed.data[:] = 1
        if (directed != directed.T).nnz != 0:
            raise ValueError(
                "edge list is directed (an ordered pair appears without its "
                "reverse); pass symmetrize=True to add reverse edges"
            )

    degrees = np.asarray(adj.sum(axis=1)).ravel().astype(np.int64)
    m = int(adj.nnz // 2)
    return Graph(n=n, m=m, adj=adj, degrees=degrees, original_ids=node_ids)


def load_edge_list(path, symmetrize: bool = True) -> Graph:
    """Parse a whitespace- or comma-separated edge-list file into a Graph.

    Lines starting with ``#`` or ``%`` are comments. Duplicate edges and
    self-loops are dropped; node IDs are remapped to dense integers with the
    original labels retained on the result.
    """
    path = Path(path)
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("%"):
                continue
            parts = line.replace(",", " ").split()
            if len(parts) < 2:
                raise ValueError(f"{path}:{lineno}: expected a node pair, got {line!r}")
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed node pair {line!r}") from exc
    if not pairs:
        raise ValueError("empty graph")
    return from_edges(np.array(pairs, dtype=np.int64), symmetrize=symmetrize)


def largest_connected_component(g: Graph) -> Graph:
    """Induced subgraph on the largest connected component, re-densified.

    Ties between equally large components are broken by the smallest minimum
    original node ID, which makes the extraction deterministic.
    """
    n_comp, labels = connected_components(g.adj, directed=False, return_labels=True)
    if n_comp == 1:
        return g
    sizes = np.bincount(labels, minlength=n_comp)
    largest = np.flatnonzero(sizes == sizes.max())
    if largest.size > 1:
        min_ids = [g.original_ids[labels == c].min() for c in largest]
        winner = largest[int(np.argmin(min_ids))]
    else:
        winner = largest[0]
    keep = np.flatnonzero(labels == winner)
    sub = g.adj[keep][:, keep].tocsr()
    degrees = np.asarray(sub.sum(axis=1)).ravel().astype(np.int64)
    return Graph(
        n=int(keep.size),
        m=int(sub.nnz // 2),
        adj=sub,
        degrees=degrees,
        original_ids=g.original_ids[keep],
    )


def _bfs_levels(adj: sp.csr_matrix, roots: np.ndarray) -> np.ndarray:
    """Breadth-first levels from multiple roots at once (-1 = unreached)."""
    n = adj.shape[0]
    levels = np.full(n, -1, dtype=np.int64)
    frontier = np.asarray(roots, dtype=np.int64)
    levels[frontier] = 0
    depth = 0
    indptr, indices = adj.indptr, adj.indices
    while frontier.size:
        depth += 1
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        offsets = np.repeat(starts, counts) + _ranges(counts)
        nbrs = indices[offsets]
        fresh = np.unique(nbrs[levels[nbrs] < 0])
        levels[fresh] = depth
        frontier = fresh
    return levels


def _ranges(counts: np.ndarray) -> np.ndarray:
    # concatenation of arange(c) for each c in counts, without a Python loop
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    starts = np.cumsum(counts) - counts
    return np.arange(total, dtype=np.int64) - np.repeat(starts, counts)


def _connected_and_bipartite(adj: sp.csr_matrix) -> tuple[bool, bool]:
    n = adj.shape[0]
    if n == 0:
        return False, True
    n_comp, labels = connected_components(adj, directed=False, return_labels=True)
    roots = np.zeros(n_comp, dtype=np.int64)
    seen = np.zeros(n_comp, dtype=bool)
    for node, comp in enumerate(labels):
        if not seen[comp]:
            seen[comp] = True
            roots[comp] = node
    levels = _bfs_levels(adj, roots)
    coo = adj.tocoo()
    same_parity = (levels[coo.row] % 2) == (levels[coo.col] % 2)
    return n_comp == 1, not bool(same_parity.any())


def check_ergodic(g: Graph) -> tuple[bool, bool]:
    """Return ``(is_connected, is_bipartite)``.

    A random walk on the graph converges to the stationary distribution from
    every start iff the graph is connected and not bipartite.
    """
    return g.is_connected, g.is_bipartite


def stationary_distribution(g: Graph) -> PositionDistribution:
    """Degree-proportional fixed point ``pi_i = k_i / 2m`` of the walk."""
    if not g.is_connected:
        raise ValueError("stationary distribution requires a connected graph")
    return PositionDistribution(probs=g.degrees / (2.0 * g.m), time_step="stationary")


def graph_summary(g: Graph) -> GraphSummary:
    """n, m, irregularity gamma, sum of squared pi, and ergodicity flags.

    gamma is evaluated as the integer ratio ``n * sum(k^2) / (2m)^2`` with a
    single float division, so regular graphs yield exactly 1.0 (the ratio is
    1 iff all degrees are equal, by Cauchy-Schwarz).
    """
    sum_k_sq = int(np.dot(g.degrees, g.degrees))
    denom = 4 * g.m * g.m
    connected, bipartite = g.is_connected, g.is_bipartite
    return GraphSummary(
        n=g.n,
        m=g.m,
        gamma=(g.n * sum_k_sq) / denom,
        sum_pi_squared=sum_k_sq / denom,
        is_connected=connected,
        is_bipartite=bipartite,
    )


def load_manifest(path) -> dict[str, Path]:
    """Read a JSON manifest mapping dataset names to edge-list file paths.

    Paths may be relative; they are resolved against the manifest location.
    No downloading is performed anywhere in this library.
    """
    path = Path(path)
    with open(path) as fh:
        raw = json.load(fh)
    base = path.parent
    return {name: (base / p if not Path(p).is_absolute() else Path(p)) for name, p in raw.items()}


def load_dataset(name: str, manifest) -> Graph:
    """Load a named dataset per the manifest, symmetrize, and take the LCC."""
    if not isinstance(manifest, dict):
        manifest = load_manifest(manifest)
    if name not in manifest:
        raise KeyError(f"dataset {name!r} has no manifest entry")
    path = manifest[name]
    if not Path(path).exists():
        raise FileNotFoundError(f"manifest entry {name!r} points to missing file {path}")
    return largest_connected_component(load_edge_list(path, symmetrize=True))


def complete_graph(n: int) -> Graph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return from_edges(edges)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return from_edges([(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    """Star with one hub (node 0) and ``leaves`` spokes."""
    return from_edges([(0, i) for i in range(1, leaves + 1)])


def path_graph(n: int) -> Graph:
    if n < 2:
        raise ValueError("path needs n >= 2")
    return from_edges([(i, i + 1) for i in range(n - 1)])
