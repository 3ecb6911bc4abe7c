"""Tour of the graph layer: loading, irregularity, spectra, and mixing.

Builds a few canonical graphs plus a random regular one, prints their
walk-related summaries, and shows how fast a distribution forgets its
starting point.
"""

from walkshuffle import (
    check_ergodic,
    complete_graph,
    cycle_graph,
    graph_summary,
    random_regular_graph,
    spectral_summary,
    star_graph,
    stationary_distribution,
    tv_upper_bound,
)

print("=== ergodicity: connected and not bipartite ===")
for label, g in [
    ("triangle", complete_graph(3)),
    ("4-cycle", cycle_graph(4)),
    ("star(3)", star_graph(3)),
    ("random 8-regular n=500", random_regular_graph(500, 8, seed=1)),
]:
    connected, bipartite = check_ergodic(g)
    print(f"{label:>24}: connected={connected} bipartite={bipartite} "
          f"=> ergodic={connected and not bipartite}")

print("\n=== irregularity: gamma = n * sum(pi^2), 1.0 iff regular ===")
for label, g in [
    ("star(9)", star_graph(9)),
    ("random 8-regular", random_regular_graph(500, 8, seed=1)),
    ("two hubs + ring", cycle_graph(100)),
]:
    s = graph_summary(g)
    print(f"{label:>18}: n={s.n:4d} m={s.m:5d} gamma={s.gamma:.4f}")

print("\n=== spectral gap controls mixing ===")
g = random_regular_graph(1000, 8, seed=3)
spec = spectral_summary(g)
print(f"8-regular n=1000: alpha2={spec.alpha2:.4f} alpha_n={spec.alpha_n:.4f} "
      f"gap={spec.gap:.4f} mixing_time={spec.mixing_time}")

pi = stationary_distribution(g)
print(f"stationary pi is uniform: pi_0={pi.probs[0]:.6f} = 1/n={1/g.n:.6f}")

print("\nworst-case distance to stationarity, sqrt(n)*(1-gap)^t:")
for t in (0, spec.mixing_time // 2, spec.mixing_time, 2 * spec.mixing_time):
    print(f"  t={t:4d}: TV <= {tv_upper_bound(g.n, spec.gap, t):.3e}")
