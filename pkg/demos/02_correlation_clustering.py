"""Correlation clustering of a random user drop.

Places users uniformly in a 120-degree sector, thresholds the DOL matrix
into a signed advice graph, solves the LP relaxation and rounds it with
the pivoting scheme, then compares the result against the exhaustive
optimum (small enough here to enumerate).
"""

import numpy as np

from jsdm.channel import AntennaArray, UserProfile, one_ring_covariance
from jsdm.clustering import (AdviceGraph, Clustering, disagreement_cost,
                             round_pivot, solve_cc_lp)
from jsdm.similarity import similarity_matrix

rng = np.random.default_rng(42)
array = AntennaArray.ula(32)
spread = np.deg2rad(5.0)
K = 8

azimuths = np.sort(rng.uniform(np.deg2rad(-60), np.deg2rad(60), K))
covs = [one_ring_covariance(array, UserProfile(a, spread, user_id=i))
        for i, a in enumerate(azimuths)]
sim = similarity_matrix(covs)
print("azimuths (deg):", np.round(np.rad2deg(azimuths), 1))

dol_th = 0.6
graph = AdviceGraph.from_similarity(sim, dol_th)
positive = int((graph.sign > 0).sum() // 2)
print(f"advice graph at DOL_th={dol_th}: {positive} positive edges of "
      f"{K * (K - 1) // 2}")

x, lp_objective = solve_cc_lp(graph)
print(f"LP relaxation objective (lower bound on disagreements): {lp_objective:.3f}")

best = min((round_pivot(x, graph, np.random.default_rng([1, s])) for s in range(10)),
           key=lambda c: disagreement_cost(c, graph))
print(f"best-of-10 pivot rounding: cost {disagreement_cost(best, graph)}, "
      f"clusters {best.clusters}")


def exhaustive_optimum():
    labels = np.zeros(K, dtype=int)
    best_cost = None

    def rec(i, maxlab):
        nonlocal best_cost
        if i == K:
            cost = disagreement_cost(Clustering(labels), graph)
            best_cost = cost if best_cost is None else min(best_cost, cost)
            return
        for lab in range(maxlab + 2):
            labels[i] = lab
            rec(i + 1, max(maxlab, lab))

    rec(1, 0)
    return best_cost


print(f"exhaustive optimum over all partitions: {exhaustive_optimum()}")
print("LP bound <= optimum <= rounded cost, with no cluster count given a priori.")
