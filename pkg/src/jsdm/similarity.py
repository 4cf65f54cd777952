"""Covariance similarity measures used for user grouping.

The primary measure is the degree of overlap (DOL) between two covariance
matrices,

    dol(R1, R2) = Tr(R1^H R2) / (||R1||_F ||R2||_F),

a matrix extension of cosine similarity.  It lives in [0, 1] for PSD
inputs: 0 for orthogonal covariance supports, 1 for collinear matrices.
It weighs eigendirections by their energy, so disagreement in weak modes
costs little.

The squared-projector chordal distance is kept as the conventional
baseline metric; it is unnormalized and scales with subspace rank.
"""

import numpy as np

from .errors import ContractViolation

ORTHONORMAL_TOL = 1e-8


def dol(r1, r2):
    """Degree of overlap of two same-size covariance matrices, in [0, 1]."""
    r1 = np.asarray(r1)
    r2 = np.asarray(r2)
    if r1.shape != r2.shape:
        raise ContractViolation("covariance matrices must have equal shape")
    n1 = np.linalg.norm(r1)
    n2 = np.linalg.norm(r2)
    if n1 == 0.0 or n2 == 0.0:
        raise ContractViolation("DOL is undefined for a zero covariance")
    return float(np.vdot(r1, r2).real / (n1 * n2))


def similarity_matrix(covariances):
    """Symmetric K x K DOL matrix of a covariance list (unit diagonal)."""
    entries = [c.entries if hasattr(c, "entries") else np.asarray(c)
               for c in covariances]
    k = len(entries)
    s = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            s[i, j] = s[j, i] = dol(entries[i], entries[j])
    return s


def chordal_distance(u1, u2):
    """Squared Frobenius distance of the two subspace projectors,
    ||U1 U1^H - U2 U2^H||_F^2 = r1 + r2 - 2 ||U1^H U2||_F^2."""
    u1 = np.asarray(u1)
    u2 = np.asarray(u2)
    for u in (u1, u2):
        gram = u.conj().T @ u
        if np.max(np.abs(gram - np.eye(u.shape[1]))) > ORTHONORMAL_TOL:
            raise ContractViolation("subspace basis columns must be orthonormal")
    cross = np.linalg.norm(u1.conj().T @ u2) ** 2
    return float(u1.shape[1] + u2.shape[1] - 2.0 * cross)
