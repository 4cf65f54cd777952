"""Scenario configuration, simulation loops and experiment drivers.

A scenario places users uniformly in the sector, builds one-ring
covariances, clusters them at a DOL threshold (or adapts the threshold),
then for every SIR tolerance in the sweep builds the schedule set and
simulates round-robin weighted slots.  Per-user rates are averaged over
all slots (zero-rate unscheduled slots included) and reported as sum rate
and Jain fairness per (seed, SNR, tolerance).

Groups whose centroid effective rank is below their user count cannot
serve all members one stream each (b_g >= S_g is impossible for either
precoder), so they are excluded from scheduling and their users sit at
zero rate; this is exactly the failure mode that punishes too-low
clustering thresholds.

CSV emission is deterministic: identical config and seeds give
byte-identical files.  The elapsed_ms column is therefore normalized to 0
in files (wall-clock timing goes to the run report instead).
"""

import csv
import io
import math
import time
from dataclasses import dataclass, fields, replace

import numpy as np

from .channel import AntennaArray, CovarianceMatrix, UserProfile, one_ring_covariance
from .clustering import Clustering, adapt_threshold, cluster_users
from .errors import ConfigError, DegenerateEquivalent, JsdmError
from .hardness import (brute_force_decision, build_instance, feasible_params,
                       format_dimacs, lemma_conditions, parse_dimacs,
                       sat_brute_force)
from .precoding import APPROX_BD, MATCHED, group_centroid, matched_precoders
from .scheduling import (GroupSystem, assign_outliers, build_graph, color_complement,
                         eliminate, jain_index, select_schedule, to_undirected,
                         update_weights, ScheduleSet)
from .similarity import similarity_matrix
from .sinr import PER_GROUP, PER_USER, deterministic_sinr, monte_carlo_sinr, solve_system

RESULT_COLUMNS = ("experiment", "seed", "snr_db", "alpha", "dol_th", "approach",
                  "sum_rate", "jain_index", "num_schedules", "num_clusters",
                  "elapsed_ms")

# rng stream tags, one per randomized stage
_RNG_PLACEMENT, _RNG_CLUSTER, _RNG_COLOR, _RNG_MC = 0, 1, 2, 3


@dataclass
class ScenarioConfig:
    """Desk-scale defaults; paper-scale (n_t=128, num_users=80) runs in
    minutes behind the same knobs."""

    n_t: int = 32
    num_users: int = 12
    sector_min_deg: float = -60.0
    sector_max_deg: float = 60.0
    angular_spread_deg: float = 5.0
    snr_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    dol_th: float = 0.9
    adaptive_threshold: bool = False
    threshold_step: float = 0.05
    threshold_sweep: tuple = (0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95)
    alpha_sweep: tuple = (0.5, 1.0, 2.0, 4.0, 8.0, 16.0)
    approach: str = APPROX_BD
    num_slots: int = 200
    seeds: tuple = (1, 2, 3, 4, 5)
    interference_sum: str = PER_GROUP
    energy_fraction: float = 0.9999
    lp_size_cap: int = 40
    num_roundings: int = 10
    quadrature_points: int = 512
    mc_draws: int = 500

    def __post_init__(self):
        if self.approach not in (MATCHED, APPROX_BD):
            raise ConfigError("approach must be %r or %r" % (MATCHED, APPROX_BD))
        if self.interference_sum not in (PER_GROUP, PER_USER):
            raise ConfigError("interference_sum must be %r or %r"
                              % (PER_GROUP, PER_USER))
        if not self.snr_db:
            raise ConfigError("snr_db grid must be nonempty")
        for name in ("n_t", "num_users", "num_slots", "quadrature_points"):
            if getattr(self, name) <= 0:
                raise ConfigError("%s must be positive" % name)
        if self.num_users > self.n_t:
            raise ConfigError("need num_users <= n_t to schedule all users")


def _coerce(raw, reference):
    """Parse a config string according to the default value's type."""
    if isinstance(reference, bool):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError("expected boolean, got %r" % raw)
    if isinstance(reference, int):
        return int(raw)
    if isinstance(reference, float):
        return float(raw)
    if isinstance(reference, tuple):
        parts = [p for p in raw.replace(",", " ").split() if p]
        element = reference[0] if reference else 1.0
        return tuple(int(p) if isinstance(element, int) and not isinstance(element, bool)
                     else float(p) for p in parts)
    return raw


def load_config(path=None, overrides=None):
    """key=value file plus command-line overrides -> ScenarioConfig."""
    defaults = ScenarioConfig()
    values = {}
    known = {f.name: getattr(defaults, f.name) for f in fields(ScenarioConfig)}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError("%s:%d: expected key=value" % (path, lineno))
                key, raw = (p.strip() for p in line.split("=", 1))
                if key not in known:
                    raise ConfigError("%s:%d: unknown key %r" % (path, lineno, key))
                values[key] = _coerce(raw, known[key])
    for key, raw in (overrides or {}).items():
        if key not in known:
            raise ConfigError("unknown config key %r" % key)
        values[key] = _coerce(raw, known[key]) if isinstance(raw, str) else raw
    try:
        return ScenarioConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass
class ResultRow:
    experiment: str
    seed: int
    snr_db: float
    alpha: float
    dol_th: float
    approach: str
    sum_rate: float
    jain_index: float
    num_schedules: int
    num_clusters: int
    elapsed_ms: float

    def as_csv_fields(self, zero_elapsed=True):
        return [self.experiment, str(self.seed), _fmt(self.snr_db),
                _fmt(self.alpha), _fmt(self.dol_th), self.approach,
                _fmt(self.sum_rate), _fmt(self.jain_index),
                str(self.num_schedules), str(self.num_clusters),
                "0" if zero_elapsed else _fmt(self.elapsed_ms)]


def _fmt(value):
    if value != value:   # NaN guard; should not happen
        return "nan"
    return repr(float(value))


def write_rows(rows, path):
    """Deterministic CSV: stable sort, dot decimals, \\n newlines,
    elapsed_ms normalized to 0."""
    rows = sorted(rows, key=lambda r: (r.experiment, r.seed, r.snr_db,
                                       r.alpha, r.dol_th, r.approach))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for row in rows:
        writer.writerow(row.as_csv_fields())
    data = buf.getvalue().encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(data)
    return path


class Scenario:
    """One seeded realization: users, covariances, clustering, schedules."""

    def __init__(self, config, seed):
        self.config = config
        self.seed = seed
        self.array = AntennaArray.ula(config.n_t)
        rng = np.random.default_rng([seed, _RNG_PLACEMENT])
        lo = math.radians(config.sector_min_deg)
        hi = math.radians(config.sector_max_deg)
        spread = math.radians(config.angular_spread_deg)
        self.users = [UserProfile(az, spread, user_id=i)
                      for i, az in enumerate(rng.uniform(lo, hi, config.num_users))]
        self.covs = [one_ring_covariance(self.array, u, config.quadrature_points)
                     for u in self.users]
        self.similarity = similarity_matrix(self.covs)

    def cluster(self, dol_th):
        """Clustering at one threshold; >= 1 means all singletons (the
        advice graph would be all-negative)."""
        if dol_th >= 1.0:
            return Clustering(np.arange(self.config.num_users))
        return cluster_users(self.similarity, dol_th,
                             np.random.default_rng([self.seed, _RNG_CLUSTER]),
                             lp_size_cap=self.config.lp_size_cap,
                             num_roundings=self.config.num_roundings)

    def grouping(self, clustering):
        """Centroids and user lists per schedulable group.

        Groups whose centroid rank cannot carry one stream per member are
        unschedulable under atomic grouping and are reported separately.
        """
        cfg = self.config
        users_by_group, centroids, streams, dropped = {}, {}, {}, []
        for gid, members in enumerate(clustering.clusters):
            cent = group_centroid([self.covs[u] for u in members], tuple(members),
                                  energy_fraction=cfg.energy_fraction)
            # rank == members would fully load the group (m_bar -> 0)
            if cent.rank <= len(members):
                dropped.append(list(members))
                continue
            users_by_group[gid] = list(members)
            centroids[gid] = cent
            streams[gid] = len(members)
        return users_by_group, centroids, streams, dropped

    def schedule_set(self, system, users_by_group, alpha):
        """Elimination + coloring + verification for one tolerance.

        alpha <= 0 switches the SIR filter off: one schedule containing
        every candidate user (the no-scheduling baseline).
        """
        if alpha <= 0.0:
            everyone = sorted(u for us in users_by_group.values() for u in us)
            return ScheduleSet([everyone])
        pool = dict(users_by_group)
        while True:
            try:
                graph = build_graph(system, pool)
                break
            except DegenerateEquivalent as exc:
                # group annihilated in the all-active snapshot: it cannot
                # be part of any joint schedule under this precoder
                gid = getattr(exc, "gid", None)
                if gid is None or gid not in pool:
                    raise
                del pool[gid]
                if not pool:
                    return ScheduleSet([[]])
        eliminate(graph, alpha, system)
        adjacency = to_undirected(graph)
        # same-group users never interfere; keep groups mergeable
        for i, u in enumerate(graph.users):
            for j, v in enumerate(graph.users):
                if i != j and graph.group_of[u] == graph.group_of[v]:
                    adjacency[i, j] = True
        colors = color_complement(adjacency,
                                  np.random.default_rng([self.seed, _RNG_COLOR]))
        return assign_outliers(colors, adjacency, graph.users)


def _schedule_rates(system, users_by_group, schedule, power, interference_sum):
    """Deterministic per-user rates of one schedule (partial groups get
    one stream per scheduled member).

    A schedule whose equivalent system degenerates (some group fully
    loaded, m_bar -> 0) is scored with zero rates, the deterministic
    limit, so it is never selected over a working schedule.
    """
    group_of = {u: g for g, us in users_by_group.items() for u in us}
    by_group = {}
    for u in schedule:
        by_group.setdefault(group_of[u], []).append(u)
    if not by_group:
        return {}
    streams = {g: len(us) for g, us in by_group.items()}
    try:
        _, solution = system.solve(sorted(by_group), streams_override=streams)
    except DegenerateEquivalent:
        return {u: 0.0 for u in schedule}
    report = deterministic_sinr(by_group, solution, power, interference_sum)
    return report.rate


def _realized_rates(system, users_by_group, schedule, covs, power, rng):
    """One fading realization of a schedule: actual per-user channels
    through the group precoders, exact ZF, realized log rates.

    This is where a sloppy clustering threshold hurts: members of a loose
    group draw channels from their own covariances, not the centroid the
    precoder was built for.
    """
    group_of = {u: g for g, us in users_by_group.items() for u in us}
    by_group = {}
    for u in schedule:
        by_group.setdefault(group_of[u], []).append(u)
    streams = {g: len(us) for g, us in by_group.items()}
    try:
        precoders, _ = system.solve(sorted(by_group), streams_override=streams)
    except DegenerateEquivalent:
        return {u: 0.0 for u in schedule}
    report = monte_carlo_sinr(by_group, precoders,
                              {u: covs[u] for u in schedule}, power, 1, rng)
    return report.rate


def simulate_slots(system, users_by_group, schedule_set, power, num_slots,
                   num_users, interference_sum, covs=None, rng=None):
    """Round-robin weighted slot loop; returns per-user average rates.

    Schedule selection always uses the cheap deterministic rates.  When
    covariances and an rng are supplied, each slot is scored with one
    finite-sample realization (fresh Rayleigh channels, exact ZF);
    otherwise the deterministic rates are accumulated directly.
    """
    cache = {}

    def rate_fn(members):
        key = tuple(members)
        if key not in cache:
            cache[key] = _schedule_rates(system, users_by_group, members,
                                         power, interference_sum)
        return cache[key]

    finite_sample = covs is not None and rng is not None
    accumulated = np.zeros(num_users)
    num_schedules = schedule_set.num_schedules
    for slot in range(1, num_slots + 1):
        weights = update_weights(slot, num_schedules, schedule_set.membership)
        chosen = select_schedule(schedule_set, weights, rate_fn)
        members = schedule_set.schedules[chosen]
        if finite_sample and members:
            slot_rates = _realized_rates(system, users_by_group, members,
                                         covs, power, rng)
        else:
            slot_rates = rate_fn(members)
        for u, rate in slot_rates.items():
            accumulated[u] += rate
    return accumulated / num_slots


def run_scenario(config, experiment="run"):
    """Full pipeline: one row per (seed, snr, alpha), plus a baseline row
    (alpha = 0, SIR filter off) and a ':best' duplicate of the best-alpha
    row per (seed, snr).  Module errors propagate tagged with the
    experiment cell they occurred in."""
    rows = []
    for seed in config.seeds:
        try:
            rows.extend(_run_seed(config, experiment, seed))
        except JsdmError as exc:
            exc.args = ("%s [experiment=%s seed=%d]" % (exc, experiment, seed),)
            raise
    return rows


def _run_seed(config, experiment, seed):
    rows = []
    scenario = Scenario(config, seed)
    dol_th = _effective_threshold(config, scenario)
    clustering = scenario.cluster(dol_th)
    users_by_group, centroids, streams, _ = scenario.grouping(clustering)
    if not centroids:
        raise ConfigError("no schedulable group; raise dol_th")
    system = GroupSystem(centroids, streams, config.n_t, config.approach,
                         energy_fraction=config.energy_fraction,
                         max_iter=5000)
    sched_sets = {alpha: scenario.schedule_set(system, users_by_group, alpha)
                  for alpha in config.alpha_sweep}
    baseline_set = scenario.schedule_set(system, users_by_group, 0.0)
    for snr in config.snr_db:
        power = 10.0 ** (snr / 10.0)
        candidates = []
        for alpha in list(config.alpha_sweep) + [0.0]:
            sset = baseline_set if alpha <= 0.0 else sched_sets[alpha]
            start = time.perf_counter()
            avg = simulate_slots(system, users_by_group, sset, power,
                                 config.num_slots, config.num_users,
                                 config.interference_sum,
                                 covs=scenario.covs,
                                 rng=_slot_rng(seed, snr, alpha))
            elapsed = 1e3 * (time.perf_counter() - start)
            if alpha <= 0.0:
                rows.append(ResultRow(
                    experiment + ":noscheduling", seed, snr, 0.0, dol_th,
                    config.approach, float(avg.sum()), jain_index(avg), 1,
                    clustering.num_clusters, elapsed))
            else:
                candidates.append(ResultRow(
                    experiment, seed, snr, alpha, dol_th, config.approach,
                    float(avg.sum()), jain_index(avg),
                    sched_sets[alpha].num_schedules,
                    clustering.num_clusters, elapsed))
        rows.extend(candidates)
        best = max(candidates, key=lambda r: r.sum_rate)
        rows.append(replace(best, experiment=experiment + ":best"))
    return rows


def _slot_rng(seed, snr, alpha, tag=0):
    """Independent, reproducible stream per (seed, snr, alpha) cell."""
    return np.random.default_rng([seed, _RNG_MC, tag,
                                  int(round(snr * 1000.0)) + (1 << 20),
                                  int(round(alpha * 1000.0)) + (1 << 20)])


def _effective_threshold(config, scenario):
    if not config.adaptive_threshold:
        return config.dol_th
    snr = max(config.snr_db)
    power = 10.0 ** (snr / 10.0)
    alpha = sorted(config.alpha_sweep)[len(config.alpha_sweep) // 2]

    def score(th):
        clustering = scenario.cluster(th)
        users_by_group, centroids, streams, _ = scenario.grouping(clustering)
        if not centroids:
            return 0.0
        system = GroupSystem(centroids, streams, config.n_t, config.approach,
                             energy_fraction=config.energy_fraction,
                             max_iter=5000)
        sset = scenario.schedule_set(system, users_by_group, alpha)
        avg = simulate_slots(system, users_by_group, sset, power,
                             config.num_slots, config.num_users,
                             config.interference_sum, covs=scenario.covs,
                             rng=_slot_rng(scenario.seed, power, alpha,
                                           tag=int(round(th * 1000.0))))
        return float(avg.sum())

    return adapt_threshold(score, config.threshold_step)


def figure_rate(config, out_dir):
    rows = run_scenario(config, experiment="rate")
    return write_rows(rows, "%s/figure_rate.csv" % out_dir)


def figure_fairness(config, out_dir):
    rows = run_scenario(config, experiment="fairness")
    return write_rows(rows, "%s/figure_fairness.csv" % out_dir)


def figure_precoders(config, out_dir):
    rows = []
    for approach in (MATCHED, APPROX_BD):
        rows.extend(run_scenario(replace(config, approach=approach),
                                 experiment="precoders:" + approach))
    return write_rows(rows, "%s/figure_precoders.csv" % out_dir)


def figure_threshold(config, out_dir):
    """Sum rate across the threshold sweep at the configured SNR grid
    (intended: one low and one high SNR)."""
    rows = []
    for th in config.threshold_sweep:
        sub = replace(config, dol_th=th, adaptive_threshold=False)
        rows.extend(run_scenario(sub, experiment="threshold"))
    return write_rows(rows, "%s/figure_threshold.csv" % out_dir)


def flat_overlap_covariances(n_t=32, rank=16, overlap=4, shared_gain=0.08,
                             private_gain=2.0, seed=99):
    """Two flat-spectrum covariances on random subspaces sharing `overlap`
    weak common modes: the well-conditioned regime where the large-system
    SINR approximation is falsifiable at desk scale."""
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n_t, n_t))
                        + 1j * rng.standard_normal((n_t, n_t)))
    shared = q[:, :overlap]
    private1 = q[:, overlap:rank]
    private2 = q[:, rank:2 * rank - overlap]
    shared_part = shared_gain * (shared @ shared.conj().T)
    r1 = private_gain * (private1 @ private1.conj().T) + shared_part
    r2 = private_gain * (private2 @ private2.conj().T) + shared_part
    return CovarianceMatrix.from_entries(r1), CovarianceMatrix.from_entries(r2)


def validate_sinr(config=None, snrs=(0.0, 10.0, 20.0), draws=500, seed=20260810):
    """Deterministic vs Monte-Carlo SINR on a two-group, 4+4-user matched
    scenario at n_t=32; reports the worst per-user relative error per SNR
    for both interference-sum conventions."""
    draws = config.mc_draws if config is not None else draws
    r1, r2 = flat_overlap_covariances()
    covs = {i: r1 for i in range(4)} | {i: r2 for i in range(4, 8)}
    cents = {0: group_centroid([r1] * 4, tuple(range(4))),
             1: group_centroid([r2] * 4, tuple(range(4, 8)))}
    precoders = matched_precoders(cents)
    solution = solve_system(precoders, {g: c.covariance for g, c in cents.items()},
                            {0: 4, 1: 4})
    schedule = {0: [0, 1, 2, 3], 1: [4, 5, 6, 7]}
    report = {"snr_db": list(snrs), "draws": draws, "max_rel_err": {}, }
    for mode in (PER_GROUP, PER_USER):
        errs = []
        for snr in snrs:
            power = 10.0 ** (snr / 10.0)
            det = deterministic_sinr(schedule, solution, power, mode)
            mc = monte_carlo_sinr(schedule, precoders, covs, power, draws, seed)
            errs.append(max(abs(det.sinr[u] - mc.sinr[u]) / mc.sinr[u]
                            for u in mc.sinr))
        report["max_rel_err"][mode] = errs
    per_mode = report["max_rel_err"]
    report["verdict"] = PER_GROUP if max(per_mode[PER_GROUP]) < max(per_mode[PER_USER]) \
        else PER_USER
    return report


def reduction_verify(cnf_path, delta=0.05):
    """End-to-end reduction check for one DIMACS file."""
    with open(cnf_path, "r", encoding="utf-8") as fh:
        formula = parse_dimacs(fh.read())
    rho, beta = feasible_params(formula.num_vars, formula.num_clauses, delta)
    lemmas = lemma_conditions(rho, beta, delta, formula.num_vars,
                              formula.num_clauses)
    instance = build_instance(formula, rho, beta, delta)
    best, gamma, decision = brute_force_decision(instance)
    truth = sat_brute_force(formula)
    return {
        "cnf": format_dimacs(formula).strip(),
        "num_vars": formula.num_vars,
        "num_clauses": formula.num_clauses,
        "rho": rho, "beta": beta, "delta": delta,
        "lemma_conditions": list(lemmas),
        "max_objective": best,
        "gamma": gamma,
        "decision": decision,
        "sat_oracle": truth,
        "equivalent": decision == truth,
    }
