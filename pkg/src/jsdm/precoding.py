"""Outer and inner precoder construction.

Each cluster of users is represented by its covariance centroid (the
arithmetic mean of the member covariances).  Two outer precoder designs
are supported:

* approximate block diagonalization ("approx_bd"): for each active group,
  stack the strongest eigenvectors of every other active group into an
  interference matrix, project the group covariance onto the orthogonal
  complement of that span, and match the strongest modes of the projected
  covariance.  How many interfering modes are included is governed by the
  inclusion factor, the largest integer c with
  N_t >= sum_g min(r_g, c * S_g).

* covariance matching ("matched"): B_g is simply the group eigenbasis
  U_g, independent of all other groups; interference is left entirely to
  the scheduler.

The inner stage is plain zero forcing on the effective channel
H_eff = B^H H with the power normalization that keeps the per-group
transmit power equal to the group's stream count.
"""

from dataclasses import dataclass

import numpy as np

from .channel import CovarianceMatrix
from .errors import ContractViolation, DimensionalityBottleneck, NumericalError

NULLSPACE_RTOL = 1e-9
APPROX_BD = "approx_bd"
MATCHED = "matched"


@dataclass
class GroupCentroid:
    """Covariance centroid of one user group."""

    covariance: CovarianceMatrix
    member_ids: tuple

    @property
    def rank(self):
        return self.covariance.effective_rank

    @property
    def eigenbasis(self):
        return self.covariance.eigenvectors

    @property
    def eigenvalues(self):
        return self.covariance.eigenvalues

    @property
    def size(self):
        return len(self.member_ids)


@dataclass
class OuterPrecoderSet:
    """Semi-unitary outer precoders B_g for one active-group snapshot."""

    approach: str
    basis: dict       # group id -> N_t x b_g complex
    dims: dict        # group id -> b_g
    inclusion_factor: int = 0


@dataclass
class InnerPrecoder:
    """Zero-forcing inner precoder and its power normalization."""

    matrix: np.ndarray   # b_g x S_g
    zeta_sq: float


def group_centroid(member_covs, member_ids=None, energy_fraction=0.9999):
    """Arithmetic-mean covariance of the group members."""
    if not member_covs:
        raise ContractViolation("a group needs at least one member")
    entries = [c.entries if hasattr(c, "entries") else np.asarray(c)
               for c in member_covs]
    mean = sum(entries) / len(entries)
    if member_ids is None:
        member_ids = tuple(range(len(entries)))
    cov = CovarianceMatrix.from_entries(mean, energy_fraction)
    return GroupCentroid(cov, tuple(member_ids))


def inclusion_factor(ranks, streams, n_t):
    """Largest integer c >= 1 with N_t >= sum_g min(r_g, c * S_g).

    The sum saturates once c * S_g >= r_g everywhere, so the search is
    capped at max_g ceil(r_g / S_g).
    """
    ranks = list(ranks)
    streams = list(streams)
    if any(s < 1 for s in streams):
        raise ContractViolation("every active group needs at least one stream")
    cap = max(int(np.ceil(r / s)) for r, s in zip(ranks, streams))
    best = 0
    for c in range(1, cap + 1):
        if n_t >= sum(min(r, c * s) for r, s in zip(ranks, streams)):
            best = c
        else:
            break
    if best == 0:
        raise DimensionalityBottleneck(
            "even one included mode per stream exceeds N_t=%d" % n_t)
    return best


def _null_space_basis(columns, n_t):
    """Orthonormal basis of the orthogonal complement of span(columns)."""
    if columns.shape[1] == 0:
        return np.eye(n_t, dtype=complex)
    u, s, _ = np.linalg.svd(columns, full_matrices=True)
    rank = int(np.sum(s > NULLSPACE_RTOL * s[0]))
    return u[:, rank:]


def approx_bd_precoders(centroids, streams, n_t, interference_sets=None):
    """Approximate block diagonalization for one active-group snapshot.

    Parameters
    ----------
    centroids : dict group id -> GroupCentroid (the active groups)
    streams : dict group id -> S_g (scheduled streams per group)
    n_t : number of transmit antennas
    interference_sets : optional dict group id -> iterable of group ids
        whose eigenspaces enter that group's interference matrix; defaults
        to all other active groups.  The scheduler narrows this to the
        surviving neighbor groups during elimination.
    """
    gids = sorted(centroids)
    ranks = {g: centroids[g].rank for g in gids}
    if interference_sets is None:
        interference_sets = {g: [h for h in gids if h != g] for g in gids}

    basis, dims = {}, {}
    min_c = None
    for g in gids:
        others = sorted(set(interference_sets.get(g, ())) - {g})
        local = [g] + others
        c = inclusion_factor([ranks[h] for h in local],
                             [streams[h] for h in local], n_t)
        min_c = c if min_c is None else min(min_c, c)
        r_star = {h: min(ranks[h], c * streams[h]) for h in others}
        interference = np.hstack(
            [centroids[h].eigenbasis[:, :r_star[h]] for h in others]
        ) if others else np.zeros((n_t, 0), dtype=complex)
        spare = n_t - sum(r_star.values())
        if spare <= 0:
            raise DimensionalityBottleneck(
                "included interference modes fill all %d dimensions for group %s"
                % (n_t, g))
        e0 = _null_space_basis(interference, n_t)
        projected = e0.conj().T @ centroids[g].covariance.entries @ e0
        projected = 0.5 * (projected + projected.conj().T)
        lam, vec = np.linalg.eigh(projected)
        order = np.argsort(lam)[::-1]
        b_g = min(ranks[g], spare)
        if b_g < streams[g]:
            raise DimensionalityBottleneck(
                "group %s: effective dimension %d below %d streams"
                % (g, b_g, streams[g]))
        basis[g] = e0 @ vec[:, order[:b_g]]
        dims[g] = b_g
    return OuterPrecoderSet(APPROX_BD, basis, dims, inclusion_factor=min_c)


def matched_precoders(centroids):
    """Covariance matching: B_g = U_g, independent of other groups."""
    basis = {g: c.eigenbasis.copy() for g, c in centroids.items()}
    dims = {g: c.rank for g, c in centroids.items()}
    return OuterPrecoderSet(MATCHED, basis, dims)


def zf_inner(h_eff, outer_basis):
    """Zero-forcing inner precoder on the effective channel.

    P = zeta * H_eff (H_eff^H H_eff)^{-1}, with zeta chosen so that the
    transmitted group power Tr(B P P^H B^H) equals the stream count.
    """
    h_eff = np.asarray(h_eff)
    num_streams = h_eff.shape[1]
    sv = np.linalg.svd(h_eff, compute_uv=False)
    if sv[-1] <= 1e-10 * sv[0]:
        raise NumericalError("effective channel is rank deficient; cannot zero-force")
    gram = h_eff.conj().T @ h_eff
    unnormalized = np.linalg.solve(gram, h_eff.conj().T).conj().T  # b x S
    power = np.linalg.norm(outer_basis @ unnormalized) ** 2
    zeta_sq = num_streams / power
    return InnerPrecoder(np.sqrt(zeta_sq) * unnormalized, float(zeta_sq))
