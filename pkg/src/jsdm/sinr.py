"""Deterministic-equivalent SINR machinery and its Monte-Carlo oracle.

In the large-system regime the post-ZF SINR of every user in group g
concentrates around a deterministic value driven only by second-order
statistics.  Writing R_bar_g = B_g^H R_g B_g, the per-group quantities
come from the fixed point

    m_bar_g = (1/b_g) tr(R_bar_g T_g),
    T_g     = ((S_g/b_g) R_bar_g / m_bar_g + I)^{-1},

the equivalent ZF normalization is zeta_bar_g^2 = m_bar_g * b_g, and the
inter-group coupling is

    Upsilon_{g,g'} = (S_{g'}/b_{g'}) * n_{g',g} / m_bar_{g'}^2,
    n_{g',g} = [(1/b') tr(R_bar' T' B'^H R_g B' T')]
               / [1 - (S'/b') tr(R_bar' T' R_bar' T') / (b' m_bar'^2)].

With that convention the total interference group g' inflicts on a user
of group g is (P/S) zeta_bar'^2 Upsilon_{g,g'} already summed over the
streams of g' (the S'/b' prefactor carries the stream count), which the
finite-sample oracle below confirms; `interference_sum="per_user"`
instead multiplies the term by the number of scheduled users of g'.

The Monte-Carlo oracle draws Rayleigh channels, builds the exact ZF inner
precoders and measures the realized SINR, providing the independent check
for every deterministic value in this module.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

from .channel import draw_channels
from .errors import ContractViolation, DegenerateEquivalent, NumericalError
from .precoding import zf_inner

PER_GROUP = "per_group"
PER_USER = "per_user"


@dataclass
class GroupState:
    """Solved fixed point of one group under a fixed precoder snapshot."""

    gid: object
    b: int
    s: int
    m_bar: float
    t_matrix: np.ndarray
    r_bar: np.ndarray
    basis: np.ndarray

    @property
    def zeta_bar_sq(self):
        return self.m_bar * self.b


@dataclass
class FixedPointSolution:
    """Per-group fixed points plus the pairwise coupling map.

    upsilon[(g, g1)] is the coupling of interference from source group g1
    onto target group g.
    """

    states: dict
    upsilon: dict

    def zeta_bar_sq(self, gid):
        return self.states[gid].zeta_bar_sq


@dataclass
class RateReport:
    """Per-user SINR and spectral efficiency; unscheduled users sit at 0."""

    sinr: dict

    @property
    def rate(self):
        return {u: math.log2(1.0 + s) for u, s in self.sinr.items()}

    def sum_rate(self):
        return sum(self.rate.values())


def solve_fixed_point(r_bar, num_streams, dim, tol=1e-10, max_iter=500):
    """Fixed-point iteration for (m_bar, T) of a single group.

    Starts at m_bar = 1, applies 0.5 damping when the update direction
    oscillates, stops when the relative change drops below tol.  A
    collapse of m_bar towards zero (full loading S = b of an identity-like
    covariance) is reported as a degenerate system instead of a solution.
    """
    r_bar = np.asarray(r_bar)
    if dim < num_streams:
        raise ContractViolation("need S_g <= b_g for zero forcing")
    trace = np.trace(r_bar).real
    if trace <= 0.0:
        raise ContractViolation("R_bar must be PSD and nonzero")
    # positive fixed point exists iff rank(R_bar) > S: the secular form
    # sum_i (S/b) lam_i / ((S/b) lam_i + m) = S has no root otherwise
    lam = np.linalg.eigvalsh(r_bar)
    meaningful = int(np.sum(lam > 1e-9 * lam[-1]))
    if meaningful <= num_streams:
        raise DegenerateEquivalent(
            "m_bar collapses to 0: %d meaningful covariance modes for %d "
            "streams (full loading)" % (meaningful, num_streams))
    eye = np.eye(dim)
    load = num_streams / dim
    m = 1.0
    prev_delta = 0.0
    for iteration in range(1, max_iter + 1):
        t = np.linalg.inv(load * r_bar / m + eye)
        m_new = np.trace(r_bar @ t).real / dim
        delta = m_new - m
        if delta * prev_delta < 0.0:
            m_new = 0.5 * (m_new + m)   # damp oscillation
            delta = m_new - m
        prev_delta = delta
        converged = abs(delta) / max(m_new, 1e-300) < tol
        m = m_new
        if converged:
            if m < 1e-8 * trace / dim:
                raise DegenerateEquivalent(
                    "m_bar collapsed to %g; the group is effectively fully "
                    "loaded" % m)
            log.debug("fixed point converged in %d iterations (m_bar=%g)",
                      iteration, m)
            t = np.linalg.inv(load * r_bar / m + eye)
            return m, t
    if m < 1e-2 * trace / dim:
        # the iteration is crawling towards a vanishing root: the group is
        # effectively fully loaded and the equivalent gain is nil
        raise DegenerateEquivalent(
            "m_bar heading to collapse (%g after %d iterations)" % (m, max_iter))
    raise NumericalError("fixed point did not converge in %d iterations" % max_iter)


def coupling(source, target_cov_entries):
    """Coupling Upsilon_{g,g'} of interference from `source` (group g',
    a solved GroupState) onto the group with covariance `target_cov_entries`."""
    b_mat = source.basis
    cross = b_mat.conj().T @ np.asarray(target_cov_entries) @ b_mat
    rt = source.r_bar @ source.t_matrix
    numerator = np.trace(rt @ cross @ source.t_matrix).real / source.b
    denominator = 1.0 - (source.s / source.b) * np.trace(rt @ rt).real \
        / (source.b * source.m_bar ** 2)
    if denominator <= 1e-12:
        raise NumericalError("deterministic equivalent broke down "
                             "(coupling denominator <= 0)")
    n = numerator / denominator
    return (source.s / source.b) * n / source.m_bar ** 2


def solve_system(precoders, group_covs, streams, tol=1e-10, max_iter=500):
    """Solve all per-group fixed points and the full coupling map for one
    active-set snapshot.

    Parameters
    ----------
    precoders : OuterPrecoderSet over the active groups
    group_covs : dict group id -> CovarianceMatrix (group centroids)
    streams : dict group id -> S_g
    """
    states = {}
    for gid in sorted(precoders.basis):
        b_mat = precoders.basis[gid]
        entries = group_covs[gid].entries if hasattr(group_covs[gid], "entries") \
            else np.asarray(group_covs[gid])
        r_bar = b_mat.conj().T @ entries @ b_mat
        r_bar = 0.5 * (r_bar + r_bar.conj().T)
        try:
            m, t = solve_fixed_point(r_bar, streams[gid], precoders.dims[gid],
                                     tol=tol, max_iter=max_iter)
        except DegenerateEquivalent as exc:
            exc.gid = gid
            raise
        states[gid] = GroupState(gid, precoders.dims[gid], streams[gid],
                                 m, t, r_bar, b_mat)
    upsilon = {}
    for g in states:
        entries = group_covs[g].entries if hasattr(group_covs[g], "entries") \
            else np.asarray(group_covs[g])
        for g1 in states:
            if g1 != g:
                upsilon[(g, g1)] = coupling(states[g1], entries)
    return FixedPointSolution(states, upsilon)


def deterministic_sinr(schedule, solution, power, interference_sum=PER_GROUP):
    """Deterministic per-user SINR for one schedule.

    schedule maps group id -> iterable of scheduled user ids; every group
    appearing must have a solved state in `solution`.  Power is the total
    downlink budget split equally over all scheduled streams.
    """
    if interference_sum not in (PER_GROUP, PER_USER):
        raise ContractViolation("interference_sum must be per_group or per_user")
    schedule = {g: list(users) for g, users in schedule.items()}
    sched = {g: users for g, users in schedule.items() if users}
    total_streams = sum(len(u) for u in sched.values())
    report = RateReport({})
    if total_streams == 0 or power <= 0.0:
        for users in schedule.values():
            for u in users:
                report.sinr[u] = 0.0
        return report
    per_stream = power / total_streams
    for g, users in sched.items():
        interference = 0.0
        for g1, users1 in sched.items():
            if g1 == g:
                continue
            term = per_stream * solution.zeta_bar_sq(g1) * solution.upsilon[(g, g1)]
            if interference_sum == PER_USER:
                term *= len(users1)
            interference += term
        value = per_stream * solution.zeta_bar_sq(g) / (interference + 1.0)
        for u in users:
            report.sinr[u] = value
    return report


def sir(solution, active_gids, g):
    """Deterministic signal-to-interference ratio of group g against the
    active groups; +inf when nothing interferes."""
    denom = sum(solution.zeta_bar_sq(g1) * solution.upsilon[(g, g1)]
                for g1 in active_gids if g1 != g)
    if denom <= 0.0:
        return math.inf
    return solution.zeta_bar_sq(g) / denom


def monte_carlo_sinr(schedule, precoders, user_covs, power, draws, rng):
    """Finite-sample oracle: empirical mean post-ZF SINR per user.

    For every draw, Rayleigh channels are generated for all scheduled
    users, the exact ZF inner precoder of every active group is built on
    the effective channel, and the realized SINR of each user is read off
    the received-signal decomposition.  Fixed seed gives identical output.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    schedule = {g: list(users) for g, users in schedule.items()}
    sched = {g: users for g, users in schedule.items() if users}
    total_streams = sum(len(u) for u in sched.values())
    if total_streams == 0:
        return RateReport({})
    per_stream = power / total_streams
    gids = sorted(sched)
    acc = {u: 0.0 for users in sched.values() for u in users}

    for _ in range(draws):
        channels = {}   # gid -> N_t x S_g
        for g in gids:
            cols = [draw_channels(user_covs[u], 1, rng)[:, 0] for u in sched[g]]
            channels[g] = np.stack(cols, axis=1)
        inner = {}
        for g in gids:
            h_eff = precoders.basis[g].conj().T @ channels[g]
            inner[g] = zf_inner(h_eff, precoders.basis[g])
        for g in gids:
            for k, u in enumerate(sched[g]):
                h = channels[g][:, k]
                interference = 0.0
                for g1 in gids:
                    if g1 == g:
                        continue
                    row = h.conj() @ (precoders.basis[g1] @ inner[g1].matrix)
                    interference += per_stream * float(np.sum(np.abs(row) ** 2))
                acc[u] += per_stream * inner[g].zeta_sq / (interference + 1.0)

    return RateReport({u: total / draws for u, total in acc.items()})
