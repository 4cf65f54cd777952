"""Correlation clustering of users from the DOL similarity matrix.

A threshold turns the similarity matrix into a complete signed "advice"
graph: +1 edges advise putting two users in one cluster, -1 edges advise
separating them.  The partition minimizing the total disagreements
(negative edges inside clusters plus positive edges across) is found
approximately by solving the LP relaxation with triangle inequalities and
rounding fractional separations with the randomized pivoting scheme; the
piecewise rounding curve (a=0.19, b=0.5095) carries an expected
2.06-approximation guarantee.  A direct pivoting variant on the signed
graph is the fallback above the LP size cap.

The number of clusters is never an input; it emerges from the advice
graph.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .errors import ContractViolation, NumericalError, SizeCapError

PIVOT_A = 0.19
PIVOT_B = 0.5095
LP_SIZE_CAP = 40


@dataclass
class AdviceGraph:
    """Complete signed graph over users: sign[i, j] in {+1, -1}, 0 diagonal."""

    sign: np.ndarray

    def __post_init__(self):
        self.sign = np.asarray(self.sign, dtype=np.int8)

    @property
    def num_vertices(self):
        return self.sign.shape[0]

    @classmethod
    def from_similarity(cls, similarity, dol_th):
        """+1 edge where s_ij strictly exceeds dol_th, -1 otherwise."""
        if not 0.0 < dol_th < 1.0:
            raise ContractViolation("dol_th must lie in (0, 1)")
        s = np.asarray(similarity)
        sign = np.where(s > dol_th, 1, -1).astype(np.int8)
        np.fill_diagonal(sign, 0)
        return cls(sign)


@dataclass
class Clustering:
    """Exact partition of {0..K-1}: labels[i] is the cluster id of user i."""

    labels: np.ndarray

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int)

    @property
    def num_clusters(self):
        return int(self.labels.max()) + 1 if self.labels.size else 0

    @property
    def clusters(self):
        return [[int(v) for v in np.flatnonzero(self.labels == c)]
                for c in range(self.num_clusters)]

    @classmethod
    def from_sets(cls, sets, num_vertices):
        labels = np.full(num_vertices, -1, dtype=int)
        for cid, members in enumerate(sets):
            for v in members:
                labels[v] = cid
        if (labels < 0).any():
            raise ContractViolation("cluster sets do not cover all vertices")
        return cls(labels)


def _pair_index(k):
    """Map (u, v) with u < v to a flat LP variable index."""
    idx = {}
    for n, (u, v) in enumerate(combinations(range(k), 2)):
        idx[(u, v)] = n
    return idx


def solve_cc_lp(graph, size_cap=LP_SIZE_CAP):
    """LP relaxation of the disagreement-minimization problem.

    Variables x_uv in [0, 1] (0 = same cluster) under all triangle
    inequalities.  Returns the symmetric fractional matrix and the LP
    objective, which lower-bounds the disagreement cost of every integral
    clustering.
    """
    k = graph.num_vertices
    if k > size_cap:
        raise SizeCapError(
            "LP has O(K^3) triangle constraints; K=%d exceeds cap %d" % (k, size_cap))
    if k < 2:
        return np.zeros((k, k)), 0.0

    idx = _pair_index(k)
    nvar = len(idx)
    cost = np.zeros(nvar)
    n_negative = 0
    for (u, v), n in idx.items():
        if graph.sign[u, v] > 0:
            cost[n] = 1.0
        else:
            cost[n] = -1.0
            n_negative += 1

    rows, cols, vals = [], [], []
    row = 0
    for u, v, w in combinations(range(k), 3):
        uv, uw, vw = idx[(u, v)], idx[(u, w)], idx[(v, w)]
        # each inequality: one pair distance <= sum of the other two
        for target, others in ((uw, (uv, vw)), (vw, (uv, uw)), (uv, (uw, vw))):
            rows += [row, row, row]
            cols += [target, others[0], others[1]]
            vals += [1.0, -1.0, -1.0]
            row += 1
    a_ub = sp.csr_matrix((vals, (rows, cols)), shape=(row, nvar))

    res = linprog(cost, A_ub=a_ub, b_ub=np.zeros(row), bounds=(0.0, 1.0),
                  method="highs")
    if not res.success:
        raise NumericalError("correlation-clustering LP failed: %s" % res.message)

    x = np.zeros((k, k))
    for (u, v), n in idx.items():
        x[u, v] = x[v, u] = min(max(res.x[n], 0.0), 1.0)
    objective = float(res.fun + n_negative)
    return x, objective


def f_plus(x, a=PIVOT_A, b=PIVOT_B):
    """Rounding curve applied to fractional separations on positive edges."""
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore"):
        mid = ((x - a) / (b - a)) ** 2
    out = np.where(x < a, 0.0, np.where(x >= b, 1.0, mid))
    return float(out) if out.ndim == 0 else out


def round_pivot(x, graph, rng, a=PIVOT_A, b=PIVOT_B):
    """Randomized pivot rounding of the LP solution.

    p_uv = f_plus(x_uv) on positive edges, x_uv on negative edges, read as
    the probability of separating u and v.  Repeatedly pick a uniformly
    random pivot among the remaining vertices and pull in each remaining
    vertex u with probability 1 - p_{pivot,u}.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    k = graph.num_vertices
    p = np.where(graph.sign > 0, f_plus(x, a, b), x)
    remaining = list(range(k))
    sets = []
    while remaining:
        pivot = remaining[rng.integers(len(remaining))]
        draws = rng.random(len(remaining))
        cluster = [u for u, d in zip(remaining, draws)
                   if u == pivot or d < 1.0 - p[pivot, u]]
        sets.append(cluster)
        remaining = [u for u in remaining if u not in set(cluster)]
    return Clustering.from_sets(sets, k)


def kwik_cluster(graph, rng):
    """Pivoting directly on the signed graph: the pivot's positive
    neighbors join its cluster.  Scalable fallback above the LP cap."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    k = graph.num_vertices
    remaining = list(range(k))
    sets = []
    while remaining:
        pivot = remaining[rng.integers(len(remaining))]
        cluster = [u for u in remaining
                   if u == pivot or graph.sign[pivot, u] > 0]
        sets.append(cluster)
        remaining = [u for u in remaining if u not in set(cluster)]
    return Clustering.from_sets(sets, k)


def disagreement_cost(clustering, graph):
    """Negative edges inside clusters plus positive edges across them."""
    labels = clustering.labels
    k = graph.num_vertices
    cost = 0
    for u in range(k):
        for v in range(u + 1, k):
            same = labels[u] == labels[v]
            if same and graph.sign[u, v] < 0:
                cost += 1
            elif not same and graph.sign[u, v] > 0:
                cost += 1
    return cost


def cluster_users(similarity, dol_th, rng, lp_size_cap=LP_SIZE_CAP,
                  num_roundings=10):
    """Full clustering pipeline for one threshold.

    Below the LP size cap: solve the LP once and keep the best of
    `num_roundings` pivot roundings by disagreement cost.  Above the cap:
    best of `num_roundings` direct signed-graph pivotings.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    graph = AdviceGraph.from_similarity(similarity, dol_th)
    if graph.num_vertices <= lp_size_cap:
        x, _ = solve_cc_lp(graph, size_cap=lp_size_cap)
        candidates = [round_pivot(x, graph, rng) for _ in range(num_roundings)]
    else:
        candidates = [kwik_cluster(graph, rng) for _ in range(num_roundings)]
    costs = [disagreement_cost(c, graph) for c in candidates]
    return candidates[int(np.argmin(costs))]


def adapt_threshold(evaluator, step):
    """Threshold adaptation loop: start at 1.0, decrement by `step`,
    re-evaluate the scheduling objective, stop at the first decrease and
    return the previous threshold.  Never tests below `step`."""
    if not 0.0 < step <= 0.2:
        raise ContractViolation("step must lie in (0, 0.2]")
    th = 1.0
    prev_score = evaluator(th)
    i = 1
    while True:
        nxt = 1.0 - i * step
        if nxt < step - 1e-12:
            return th
        score = evaluator(nxt)
        if score < prev_score:
            return th
        th, prev_score = nxt, score
        i += 1
