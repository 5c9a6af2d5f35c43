"""
Planted biclique nodes carry more sampling weight
=================================================

The weight W(i) of a left node averages (Per/(p^m m!))^2 over all
balanced pairs containing i.  For a background node its mean tends to
exp(1/p - 1); planting a K x K biclique lifts the planted nodes by
about exp(1/p - 1) (1/p - 1) 2K/n.
"""
import math

import numpy as np

from gbsclique import theory
from gbsclique.weights import expected_weight_enumerated, expected_weight_structural_mc

p, n, m = 0.5, 100, 5
print("limit E[W] =", theory.expected_weight(p))

# at fixed m the background mean is a truncated series, not e itself
print("exact background mean at m=5:", expected_weight_enumerated(n, m, 0, p, False))
print("sum_{j<=5} 1/j!            :", sum(1 / math.factorial(j) for j in range(m + 1)))

# planted minus background, three ways
for K in (5, 10, 20):
    exact = (expected_weight_enumerated(n, m, K, p, True)
             - expected_weight_enumerated(n, m, K, p, False))
    on, se1 = expected_weight_structural_mc(n, m, K, p, True, 200_000, seed=K)
    off, se2 = expected_weight_structural_mc(n, m, K, p, False, 200_000, seed=K)
    print(f"K={K:2d}  exact {exact:.4f}  mc {on - off:.4f} +- {math.hypot(se1, se2):.4f}"
          f"  limit {theory.weight_bias(p, K, n):.4f}")

# the gap grows roughly linearly in K; at K=20 higher-order terms show up
