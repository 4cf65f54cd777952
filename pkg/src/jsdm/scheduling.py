"""Graph-based user scheduling: elimination, grouping, verification.

The scheduler works on a weighted directed interference graph whose
vertices are users and whose edge weight from user k' of group g' to user
k of group g is the normalized interference

    e(g'_k', g_k) = zeta_bar_{g'}^2 Upsilon_{g,g'} / zeta_bar_g^2 .

Step 1 (elimination) repeatedly deletes the heaviest incoming edge of any
vertex whose SIR, read as one over the sum of its alive incoming weights,
sits below its tolerance.  Deletions are consistent: every vertex of a
group deletes users of an interfering group in the same fixed order.
Under approximate block diagonalization the precoders are rebuilt after
every deleting pass from the eigenspaces of the groups that still have a
mutually alive edge, the fixed points are re-solved and the weights
refreshed; the loop ends with the first pass that deletes nothing.  Under
covariance matching the weights are static and one pass suffices.

Step 2 (grouping) keeps an undirected edge where both directions
survived, and covers the vertices with cliques by greedily coloring the
complement graph with maximal independent sets (min-degree pivot, seeded
tie break).

Step 3 (verification) revisits every user and every color: a user
adjacent to all current members of another color joins it as an outlier,
so a harmless user may transmit in several schedules.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, DegenerateEquivalent
from .precoding import APPROX_BD, MATCHED, approx_bd_precoders, matched_precoders
from .sinr import solve_system


class GroupSystem:
    """Centroids + stream counts of all candidate groups, with a solver
    for precoders and fixed points on any active subset.

    For the matched approach the per-group state never depends on the
    active set, so one full solve is reused for every subset.
    """

    def __init__(self, centroids, streams, n_t, approach=MATCHED,
                 energy_fraction=0.9999, tol=1e-10, max_iter=500):
        if approach not in (MATCHED, APPROX_BD):
            raise ContractViolation("unknown precoder approach %r" % (approach,))
        self.centroids = dict(centroids)
        self.streams = dict(streams)
        self.n_t = n_t
        self.approach = approach
        self.energy_fraction = energy_fraction
        self.tol = tol
        self.max_iter = max_iter
        self._cache = {}

    def solve(self, active_gids, interference_sets=None, streams_override=None):
        """Precoders and fixed points for the given active groups.

        interference_sets optionally restricts, per group, which other
        groups enter its interference matrix (approx_bd only).
        streams_override replaces the per-group stream counts (schedules
        holding only part of a group serve one stream per member).
        """
        active = tuple(sorted(active_gids))
        if not active:
            raise ContractViolation("active set must be nonempty")
        if interference_sets is None:
            interference_sets = {g: [h for h in active if h != g] for g in active}
        streams = {g: self.streams[g] for g in active}
        if streams_override:
            streams.update({g: streams_override[g] for g in active
                            if g in streams_override})
        key = (active, tuple((g, tuple(sorted(interference_sets[g])))
                             for g in active),
               tuple(streams[g] for g in active))
        if key in self._cache:
            return self._cache[key]
        cents = {g: self.centroids[g] for g in active}
        if self.approach == MATCHED:
            precoders = matched_precoders(cents)
        else:
            precoders = approx_bd_precoders(cents, streams, self.n_t,
                                            interference_sets=interference_sets)
        solution = solve_system(precoders,
                                {g: c.covariance for g, c in cents.items()},
                                streams, tol=self.tol, max_iter=self.max_iter)
        self._cache[key] = (precoders, solution)
        return precoders, solution


@dataclass
class InterferenceGraph:
    """Directed normalized-interference graph over candidate users."""

    users: list                  # vertex ids, ascending
    group_of: dict               # user id -> group id
    weights: dict                # (source gid, target gid) -> weight
    alive: np.ndarray            # alive[i, j]: edge users[i] -> users[j]
    precoders: object = None     # snapshot behind the current weights
    solution: object = None
    passes: int = 0

    def index(self, user):
        return self.users.index(user)

    def incoming_sum(self, j):
        gj = self.group_of[self.users[j]]
        total = 0.0
        for i, u in enumerate(self.users):
            if self.alive[i, j]:
                total += self.weights[(self.group_of[u], gj)]
        return total

    def vertex_sir(self, j):
        total = self.incoming_sum(j)
        return math.inf if total <= 0.0 else 1.0 / total


def _edge_weights(solution):
    w = {}
    for (g, g1), ups in solution.upsilon.items():
        # interference flows g1 -> g
        w[(g1, g)] = solution.zeta_bar_sq(g1) * ups / solution.zeta_bar_sq(g)
    return w


def build_graph(system, users_by_group):
    """Initial interference graph over all candidate users, with weights
    from the all-active fixed points."""
    gids = sorted(users_by_group)
    precoders, solution = system.solve(gids)
    users = sorted(u for g in gids for u in users_by_group[g])
    group_of = {u: g for g in gids for u in users_by_group[g]}
    n = len(users)
    alive = np.zeros((n, n), dtype=bool)
    for i, u in enumerate(users):
        for j, v in enumerate(users):
            if i != j and group_of[u] != group_of[v]:
                alive[i, j] = True
    return InterferenceGraph(users, group_of, _edge_weights(solution), alive,
                             precoders, solution)


def _neighbor_groups(graph):
    """Group-level mutual-survival neighbor map."""
    gids = sorted(set(graph.group_of.values()))
    neighbors = {g: set() for g in gids}
    n = len(graph.users)
    for i in range(n):
        for j in range(i + 1, n):
            if graph.alive[i, j] and graph.alive[j, i]:
                gi = graph.group_of[graph.users[i]]
                gj = graph.group_of[graph.users[j]]
                neighbors[gi].add(gj)
                neighbors[gj].add(gi)
    return {g: sorted(nb) for g, nb in neighbors.items()}


def _elimination_pass(graph, alpha_of):
    """One ascending sweep; returns the number of deleted edges."""
    deleted = 0
    users = graph.users
    for j, v in enumerate(users):
        gv = graph.group_of[v]
        while graph.vertex_sir(j) < alpha_of(v):
            # heaviest alive incoming group, ties to the lowest group id
            best_g, best_w = None, -1.0
            for i, u in enumerate(users):
                if not graph.alive[i, j]:
                    continue
                gu = graph.group_of[u]
                w = graph.weights[(gu, gv)]
                if w > best_w + 1e-15 or (abs(w - best_w) <= 1e-15
                                          and (best_g is None or gu < best_g)):
                    best_g, best_w = gu, w
            if best_g is None:
                break
            # same representative order on every visit: ascending user id
            for i, u in enumerate(users):
                if graph.group_of[u] == best_g and graph.alive[i, j]:
                    graph.alive[i, j] = False
                    deleted += 1
                    break
    return deleted


def eliminate(graph, alpha, system=None):
    """Elimination step.  alpha is a scalar tolerance or a dict per user.

    With the matched precoder the weights are static and a single pass is
    final.  With approximate block diagonalization each deleting pass
    triggers a precoder rebuild restricted to mutually surviving neighbor
    groups, a fixed-point re-solve and a weight refresh, until a pass
    deletes nothing.
    """
    if np.isscalar(alpha):
        alpha_of = lambda u: float(alpha)
    else:
        alpha_of = lambda u: float(alpha[u])
    if any(alpha_of(u) <= 0 for u in graph.users):
        raise ContractViolation("alpha must be positive")

    rebuild = system is not None and system.approach == APPROX_BD
    while True:
        deleted = _elimination_pass(graph, alpha_of)
        graph.passes += 1
        if deleted == 0 or not rebuild:
            return graph
        neighbors = _neighbor_groups(graph)
        active = sorted(set(graph.group_of.values()))
        while True:
            try:
                precoders, solution = system.solve(active,
                                                   interference_sets=neighbors)
                break
            except DegenerateEquivalent as exc:
                # a group annihilated by its neighbors' nulling cannot
                # transmit in this company: isolate it (it may still get
                # scheduled alone) and re-solve without it
                gid = getattr(exc, "gid", None)
                if gid is None or gid not in active:
                    raise
                _isolate_group(graph, gid)
                active = [g for g in active if g != gid]
                neighbors = {g: [h for h in nb if h != gid]
                             for g, nb in neighbors.items() if g != gid}
                if not active:
                    return graph
        graph.weights = _edge_weights(solution)
        graph.precoders, graph.solution = precoders, solution


def _isolate_group(graph, gid):
    for i, u in enumerate(graph.users):
        if graph.group_of[u] == gid:
            graph.alive[i, :] = False
            graph.alive[:, i] = False


def to_undirected(graph):
    """Compatibility adjacency: both directions survived elimination."""
    return np.logical_and(graph.alive, graph.alive.T)


def color_complement(adjacency, rng):
    """Clique cover of the compatibility graph via greedy coloring of its
    complement with maximal independent sets.

    Picks a minimum-complement-degree vertex among the remaining ones
    (seeded random tie break), adds it to the current color and discards
    its complement neighbors, until the color is maximal; repeats until
    every vertex is colored.  Returns a list of vertex-index lists.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    n = adjacency.shape[0]
    complement = ~adjacency
    np.fill_diagonal(complement, False)
    uncolored = set(range(n))
    colors = []
    while uncolored:
        remaining = set(uncolored)
        color = []
        while remaining:
            rem = sorted(remaining)
            degrees = [sum(1 for v in rem if complement[u, v]) for u in rem]
            low = min(degrees)
            ties = [u for u, d in zip(rem, degrees) if d == low]
            w = ties[rng.integers(len(ties))] if len(ties) > 1 else ties[0]
            color.append(w)
            remaining.discard(w)
            remaining -= {v for v in remaining if complement[w, v]}
        colors.append(sorted(color))
        uncolored -= set(colors[-1])
    return colors


@dataclass
class ScheduleSet:
    """Colored user families; outliers appear in several schedules."""

    schedules: list                                # list of sorted user-id lists
    membership: dict = field(default_factory=dict)  # user id -> [1-based indices]

    def __post_init__(self):
        if not self.membership:
            for s, members in enumerate(self.schedules, start=1):
                for u in members:
                    self.membership.setdefault(u, []).append(s)

    @property
    def num_schedules(self):
        return len(self.schedules)

    @property
    def users(self):
        return sorted(self.membership)


def assign_outliers(colors, adjacency, users):
    """Verification step: a user adjacent to every current member of a
    color joins that color.  Deduplicates identical schedules."""
    index_of = {u: i for i, u in enumerate(users)}
    grown = [list(c) for c in colors]
    for i, u in enumerate(users):
        for c in grown:
            if i in c:
                continue
            if all(adjacency[i, m] for m in c):
                c.append(i)
    unique = []
    for c in grown:
        members = sorted(users[i] for i in c)
        if members not in unique:
            unique.append(members)
    return ScheduleSet(unique)


def select_schedule(schedule_set, weights, rate_fn):
    """Index of the schedule maximizing the weighted sum rate.

    rate_fn maps a schedule (user-id list) to a dict user -> rate; ties
    break to the lowest index.
    """
    best, best_utility = 0, -math.inf
    for idx, members in enumerate(schedule_set.schedules):
        rates = rate_fn(members)
        utility = sum(weights[u] * rates[u] for u in members)
        if utility > best_utility + 1e-12:
            best, best_utility = idx, utility
    return best


def update_weights(slot, num_schedules, membership):
    """Round-robin weighting: weight 2 on the slots matching (modulo the
    schedule count) any 1-based schedule index the user belongs to."""
    if num_schedules < 1:
        raise ContractViolation("need at least one schedule")
    return {u: 2.0 if any((slot - s) % num_schedules == 0 for s in sched_ids)
            else 1.0
            for u, sched_ids in membership.items()}


def jain_index(rates):
    """Fairness index in [1/K, 1]: (sum r)^2 / (K sum r^2)."""
    rates = np.asarray(list(rates), dtype=float)
    if rates.size == 0:
        raise ContractViolation("need at least one rate")
    total_sq = float(np.sum(rates) ** 2)
    denom = rates.size * float(np.sum(rates ** 2))
    if denom == 0.0:
        return 1.0   # all-zero allocation is (degenerately) equal
    return total_sq / denom
