"""One-ring channel statistics and Rayleigh channel draws.

A user at azimuth theta with angular spread Delta seen from a uniform
linear array produces the classic one-ring covariance

    [R]_{m,p} = 1/(2*Delta) * integral_{theta-Delta}^{theta+Delta}
                exp(j * k(a)^T (u_m - u_p)) da

with wave vector k(a) = -(2*pi/lambda) * (cos a, sin a)^T and antenna
positions u_m in the 2-D plane.  The integrand is the outer product of the
steering vector a(alpha) with itself, so the quadrature approximation
A W A^H is Hermitian PSD by construction and its diagonal integrates the
constant 1 exactly.

Channels are Rayleigh: h ~ CN(0, R), generated through the truncated
eigenbasis as h = U Lambda^{1/2} w with w standard complex Gaussian.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, NumericalError

HERMITIAN_TOL = 1e-10


@dataclass
class AntennaArray:
    """Base-station array geometry.

    positions holds one 2-D coordinate per antenna, in units where the
    wavelength is `wavelength`.  The default factory builds a ULA along
    the y axis so that the broadside direction is the x axis, matching a
    120-degree sector centered on the x axis.
    """

    num_antennas: int
    positions: np.ndarray
    wavelength: float = 1.0

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        if self.positions.shape != (self.num_antennas, 2):
            raise ContractViolation(
                "positions must be (num_antennas, 2), got %s" % (self.positions.shape,))
        if self.wavelength <= 0:
            raise ContractViolation("wavelength must be positive")

    @classmethod
    def ula(cls, num_antennas, spacing=0.5, wavelength=1.0):
        """Uniform linear array along the y axis with `spacing` in
        wavelength units (0.5 = half-wavelength)."""
        pos = np.zeros((num_antennas, 2))
        pos[:, 1] = np.arange(num_antennas) * spacing * wavelength
        return cls(num_antennas, pos, wavelength)


@dataclass
class UserProfile:
    """Geometry of a single user terminal."""

    azimuth: float            # radians
    angular_spread: float     # radians, > 0
    pathloss_scale: float = 1.0
    user_id: int = -1

    def __post_init__(self):
        if self.angular_spread <= 0:
            raise ContractViolation("angular_spread must be > 0")
        if self.pathloss_scale <= 0:
            raise ContractViolation("pathloss_scale must be > 0")


@dataclass
class CovarianceMatrix:
    """Hermitian PSD covariance with cached truncated eigendecomposition.

    eigenvectors is N_t x r with orthonormal columns, eigenvalues is the
    descending vector of the r retained (positive) eigenvalues, and
    effective_rank == r is the smallest count of leading eigenvalues
    capturing at least `energy_fraction` of the trace.
    """

    entries: np.ndarray
    eigenvectors: np.ndarray = field(repr=False, default=None)
    eigenvalues: np.ndarray = field(repr=False, default=None)
    effective_rank: int = 0

    @classmethod
    def from_entries(cls, entries, energy_fraction=0.9999):
        u, lam, r = eigendecompose(entries, energy_fraction)
        return cls(np.asarray(entries), u, lam, r)

    @property
    def dim(self):
        return self.entries.shape[0]

    def scaled(self, kappa, energy_fraction=0.9999):
        """Covariance scaled by a positive pathloss factor."""
        return CovarianceMatrix.from_entries(kappa * self.entries, energy_fraction)


def _simpson_weights(lo, hi, num_points):
    """Composite Simpson weights on an odd number of equispaced nodes.

    The weights sum to (hi - lo) exactly, so constants are integrated
    without quadrature error.
    """
    if num_points % 2 == 0:
        num_points += 1
    nodes = np.linspace(lo, hi, num_points)
    h = (hi - lo) / (num_points - 1)
    w = np.ones(num_points)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return nodes, w * (h / 3.0)


def one_ring_covariance(array, user, quadrature_points=512):
    """One-ring covariance of `user` seen from `array`, scaled by the
    user's pathloss factor kappa.

    Parameters
    ----------
    array : AntennaArray
    user : UserProfile
    quadrature_points : node count for composite Simpson (rounded up to
        odd); must be >= 64.

    Returns
    -------
    CovarianceMatrix with trace N_t * kappa and unit (kappa) diagonal.
    """
    if quadrature_points < 64:
        raise ContractViolation("quadrature_points must be >= 64")
    lo = user.azimuth - user.angular_spread
    hi = user.azimuth + user.angular_spread
    alphas, weights = _simpson_weights(lo, hi, quadrature_points)

    # steering matrix: A[m, q] = exp(j k(alpha_q)^T u_m)
    k = -(2.0 * np.pi / array.wavelength) * np.stack(
        [np.cos(alphas), np.sin(alphas)])          # 2 x Q
    a = np.exp(1j * (array.positions @ k))         # N_t x Q
    scale = user.pathloss_scale * weights / (2.0 * user.angular_spread)
    raw = (a * scale) @ a.conj().T
    entries = 0.5 * (raw + raw.conj().T)           # exactly Hermitian
    if not np.all(np.isfinite(entries.view(float))):
        raise NumericalError("one-ring quadrature produced non-finite entries")
    return CovarianceMatrix.from_entries(entries)


def eigendecompose(entries, energy_fraction=0.9999):
    """Truncated EVD of a Hermitian PSD matrix.

    Returns (U, lam, r) where lam is descending, U has orthonormal
    columns and r is the smallest count of leading eigenvalues whose sum
    reaches `energy_fraction` of the trace.  Raises ContractViolation for
    non-Hermitian input.
    """
    entries = np.asarray(entries)
    if not 0.0 < energy_fraction <= 1.0:
        raise ContractViolation("energy_fraction must be in (0, 1]")
    if np.max(np.abs(entries - entries.conj().T)) > HERMITIAN_TOL:
        raise ContractViolation("covariance matrix is not Hermitian")
    lam, u = np.linalg.eigh(entries)
    lam = lam[::-1]
    u = u[:, ::-1]
    trace = lam.sum()
    if trace <= 0.0:
        return u[:, :0], lam[:0], 0
    r = int(np.searchsorted(np.cumsum(lam), energy_fraction * trace) + 1)
    r = min(r, entries.shape[0])
    # drop numerically nonpositive eigenvalues that may sneak in for
    # energy_fraction == 1 on rank-deficient input
    while r > 0 and lam[r - 1] <= 0.0:
        r -= 1
    return u[:, :r], lam[:r].copy(), r


def draw_channel(cov, rng):
    """One Rayleigh channel realization h ~ CN(0, R).

    rng is a seed or a numpy Generator.  A fixed seed gives a
    bit-identical vector across runs.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    r = cov.effective_rank
    if r == 0:
        return np.zeros(cov.dim, dtype=complex)
    w = (rng.standard_normal(r) + 1j * rng.standard_normal(r)) / np.sqrt(2.0)
    return cov.eigenvectors @ (np.sqrt(cov.eigenvalues) * w)


def draw_channels(cov, num_draws, rng):
    """num_draws independent columns h_i ~ CN(0, R), as an N_t x num_draws array."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    r = cov.effective_rank
    if r == 0:
        return np.zeros((cov.dim, num_draws), dtype=complex)
    w = (rng.standard_normal((r, num_draws))
         + 1j * rng.standard_normal((r, num_draws))) / np.sqrt(2.0)
    return cov.eigenvectors @ (np.sqrt(cov.eigenvalues)[:, None] * w)
