"""Simulated multi-round report exchange and where reports end up.

Every node injects one report; each round every held report hops to a
uniformly random neighbor. The exchange is exactly n independent random
walks, so the empirical landing histogram should track the exactly evolved
distribution, and the allocation's L2 norm should respect its tail bound.
"""

import numpy as np

from walkshuffle import (
    allocation_l2_bound,
    delta_distribution,
    evolve_distribution,
    random_regular_graph,
    simulate_allocation,
    simulate_walks,
    spectral_summary,
    stationary_distribution,
    sum_p_squared_bound,
)

g = random_regular_graph(100, 6, seed=11)
spec = spectral_summary(g)
t = spec.mixing_time
print(f"graph: 6-regular n={g.n}, mixing time {t}")

print("\n=== exact evolution vs Monte Carlo landings of report 0 ===")
exact = evolve_distribution(g, delta_distribution(g, 0), t)
trials = 20_000
counts = np.zeros(g.n)
for trace in simulate_walks(g, t, trials, seed=0):
    counts[trace.final_nodes[0]] += 1
l1 = np.abs(counts / trials - exact.probs).sum()
print(f"L1(empirical, exact) over {trials} trials: {l1:.4f}")

print("\n=== allocation after the final round ===")
allocs = list(simulate_allocation(g, t, 2000, seed=1))
l2 = np.array([a.l2_norm for a in allocs])
counts = np.array([a.counts for a in allocs])
print(f"every trial conserves reports (sum == n): {bool((counts.sum(axis=1) == g.n).all())}")
print(f"||L||_2: mean={l2.mean():.2f}, max={l2.max():.2f} (sqrt(n)={np.sqrt(g.n):.2f})")

pi = stationary_distribution(g)
s2 = sum_p_squared_bound(pi, spec.gap, t)
for delta in (0.1, 0.01):
    bound = allocation_l2_bound(s2, g.n, delta)
    frac = (l2 > bound).mean()
    print(f"tail bound at delta={delta}: {bound:.2f}; violated in {frac:.2%} of trials")
