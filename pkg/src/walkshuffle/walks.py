"""Exact evolution of position distributions and Monte-Carlo report exchange.

Every user injects one report at t=0 and each round every held report moves
to a uniformly random neighbor of its current node, so the multi-report
exchange is exactly n independent random walks. The simulators exploit that:
walks are vectorized over reports and trials, with per-chunk RNG streams
derived from a single seed so runs are reproducible and mergeable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .graphs import Graph, PositionDistribution, from_edges

__all__ = [
    "ReportAllocation",
    "WalkTrace",
    "evolve_distribution",
    "delta_distribution",
    "exact_symmetric_distribution",
    "rho_star",
    "simulate_walks",
    "simulate_allocation",
    "sample_single_reports",
    "allocation_l2_bound",
    "expected_dummy_count",
    "random_regular_graph",
]

DUMMY = -1

# memory cap for vectorized multi-trial walks (positions kept in RAM)
_MAX_CHUNK_CELLS = 4_000_000


@dataclass(frozen=True)
class ReportAllocation:
    """How many reports each node holds after the final round."""

    counts: np.ndarray = field(repr=False)
    l2_norm: float = 0.0

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "l2_norm", float(np.sqrt(np.dot(counts, counts))))

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_final_nodes(cls, final_nodes: np.ndarray, n_nodes: int) -> "ReportAllocation":
        return cls(counts=np.bincount(final_nodes, minlength=n_nodes))


@dataclass(frozen=True)
class WalkTrace:
    """Final node of each report after ``rounds`` exchange rounds.

    ``final_nodes[j]`` is where the report injected at node j ended up.
    """

    final_nodes: np.ndarray = field(repr=False)
    rounds: int = 0
    seed: int | None = None

    @property
    def n(self) -> int:
        return self.final_nodes.shape[0]

    def allocation(self) -> ReportAllocation:
        return ReportAllocation.from_final_nodes(self.final_nodes, self.n)


def evolve_distribution(g: Graph, p0: PositionDistribution, t: int) -> PositionDistribution:
    """Apply ``t`` exact walk steps to ``p0`` without densifying anything.

    One step sends the mass at node i in equal parts to its neighbors:
    ``p'_j = sum_{i ~ j} p_i / k_i``. Object-dtype (e.g. Fraction) inputs are
    evolved in exact arithmetic.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if p0.probs.shape[0] != g.n:
        raise ValueError("distribution size does not match graph")

    if p0.probs.dtype == object:
        probs = _evolve_exact(g, p0.probs, t)
    else:
        probs = p0.probs.astype(np.float64)
        for _ in range(t):
            probs = g.adj @ (probs / g.degrees)

    if isinstance(p0.time_step, int):
        step: int | str = p0.time_step + t
    else:
        step = p0.time_step
    return PositionDistribution(probs=probs, time_step=step)


def _evolve_exact(g: Graph, probs: np.ndarray, t: int) -> np.ndarray:
    indptr, indices = g.adj.indptr, g.adj.indices
    degs = [int(d) for d in g.degrees]
    p = list(probs)
    for _ in range(t):
        q = [p[i] / degs[i] for i in range(g.n)]
        p = [sum(q[i] for i in indices[indptr[j] : indptr[j + 1]]) for j in range(g.n)]
    out = np.empty(g.n, dtype=object)
    out[:] = p
    return out


def delta_distribution(g: Graph, node: int, exact: bool = False) -> PositionDistribution:
    """Point mass at ``node`` at time 0; ``exact=True`` uses Fractions."""
    if not 0 <= node < g.n:
        raise ValueError("node out of range")
    if exact:
        probs = np.empty(g.n, dtype=object)
        probs[:] = [Fraction(0)] * g.n
        probs[node] = Fraction(1)
    else:
        probs = np.zeros(g.n)
        probs[node] = 1.0
    return PositionDistribution(probs=probs, time_step=0)


def exact_symmetric_distribution(g: Graph, t: int) -> PositionDistribution:
    """Position distribution after ``t`` rounds on a regular graph.

    Started from a single-node point mass; on a (vertex-transitive) regular
    graph the same distribution, up to relabeling, serves every user. Random
    regular graphs satisfy this only approximately, which is the caller's
    concern; non-regular graphs are rejected outright.
    """
    if not g.is_regular():
        raise ValueError("symmetric-scenario distribution requires a regular graph")
    return evolve_distribution(g, delta_distribution(g, 0), t)


def rho_star(p: PositionDistribution) -> float:
    """Ratio of the largest to smallest non-zero position probability."""
    if p.probs.dtype == object:
        vals = [float(x) for x in p.probs if x > 0]
    else:
        vals = p.probs[p.probs > 0]
    if len(vals) == 0:
        raise ValueError("distribution has no positive entries")
    return float(np.max(vals) / np.min(vals))


def _chunk_rng(seed: int | None, chunk_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk_index,)))


def _walk_chunk(g: Graph, t: int, n_trials: int, rng: np.random.Generator) -> np.ndarray:
    """Walk all reports of ``n_trials`` independent trials for t rounds."""
    indptr, indices = g.adj.indptr, g.adj.indices
    degrees = g.degrees
    pos = np.tile(np.arange(g.n, dtype=np.int64), (n_trials, 1))
    for _ in range(t):
        offsets = rng.integers(0, degrees[pos])
        pos = indices[indptr[pos] + offsets]
    return pos


def simulate_walks(g: Graph, t: int, trials: int, seed: int | None = None) -> Iterator[WalkTrace]:
    """Yield one WalkTrace per trial; deterministic given the seed.

    Trials are simulated in fixed-size chunks with independent RNG streams
    per chunk, so results do not depend on how many trials are consumed and
    chunks could be farmed out to parallel workers without changing output.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if not g.is_connected:
        raise ValueError("walk simulation requires a connected graph")
    chunk_size = max(1, _MAX_CHUNK_CELLS // g.n)
    done = 0
    chunk_index = 0
    while done < trials:
        n_here = min(chunk_size, trials - done)
        rng = _chunk_rng(seed, chunk_index)
        pos = _walk_chunk(g, t, n_here, rng)
        for row in pos:
            yield WalkTrace(final_nodes=row, rounds=t, seed=seed)
        done += n_here
        chunk_index += 1


def simulate_allocation(
    g: Graph, t: int, trials: int, seed: int | None = None
) -> Iterator[ReportAllocation]:
    """Per-trial report counts after ``t`` rounds of exchange."""
    for trace in simulate_walks(g, t, trials, seed):
        yield trace.allocation()


def sample_single_reports(
    alloc: ReportAllocation, trace: WalkTrace, seed: int | None = None
) -> np.ndarray:
    """One submission per node: a held report chosen u.a.r., or a dummy.

    Returns an array of length n with the chosen report's ID per node, or
    ``DUMMY`` (-1) where the node holds nothing.
    """
    n = trace.n
    counts = np.bincount(trace.final_nodes, minlength=n)
    if not np.array_equal(counts, alloc.counts):
        raise ValueError("allocation is inconsistent with the trace")
    rng = np.random.default_rng(seed)
    order = np.argsort(trace.final_nodes, kind="stable")
    starts = np.concatenate(([0], np.cumsum(counts)))
    chosen = np.full(n, DUMMY, dtype=np.int64)
    holders = np.flatnonzero(counts > 0)
    picks = starts[holders] + rng.integers(0, counts[holders])
    chosen[holders] = order[picks]
    return chosen


def allocation_l2_bound(p, n: int, delta: float) -> float:
    """High-probability bound on the allocation's L2 norm.

    ``sqrt((n^2 - n) * sum_p2) + sqrt(n * log(1/delta))`` holds with
    probability at least 1 - delta over the random exchange, where ``p`` is
    the shared landing distribution (PositionDistribution or its sum of
    squares as a scalar).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    sum_p2 = p.sum_squared() if isinstance(p, PositionDistribution) else float(p)
    return math.sqrt((n * n - n) * sum_p2) + math.sqrt(n * math.log(1.0 / delta))


def expected_dummy_count(p: PositionDistribution, n_reports: int | None = None) -> float:
    """Expected number of empty-handed nodes: ``sum_i (1 - P_i)^n``."""
    if n_reports is None:
        n_reports = p.n
    probs = p.probs.astype(np.float64) if p.probs.dtype == object else p.probs
    return float(np.sum((1.0 - probs) ** n_reports))


def random_regular_graph(
    n: int, k: int, seed: int | None = None, require_connected: bool = True
) -> Graph:
    """Random k-regular graph via stub pairing with rejection.

    Stubs are matched one at a time, redrawing any match that would create a
    self-loop or duplicate edge; if the tail of the matching gets stuck the
    whole pairing restarts. Deterministic given the seed.
    """
    if n * k % 2 != 0:
        raise ValueError("n * k must be even")
    if not 0 < k < n:
        raise ValueError("need 0 < k < n")
    rng = np.random.default_rng(seed)
    for _ in range(200):
        edges = _pair_stubs(n, k, rng)
        if edges is None:
            continue
        g = from_edges(np.array(edges, dtype=np.int64), node_ids=np.arange(n))
        if require_connected and not g.is_connected:
            continue
        return g
    raise RuntimeError(f"could not generate a {k}-regular graph on {n} nodes")


def _pair_stubs(n: int, k: int, rng: np.random.Generator) -> list | None:
    stubs = np.repeat(np.arange(n), k)
    rng.shuffle(stubs)
    stubs = stubs.tolist()
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    while stubs:
        a = stubs.pop()
        for _ in range(50):
            i = int(rng.integers(0, len(stubs)))
            b = stubs[i]
            key = (a, b) if a < b else (b, a)
            if a != b and key not in seen:
                stubs[i] = stubs[-1]
                stubs.pop()
                seen.add(key)
                edges.append(key)
                break
        else:
            return None
    return edges
