"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, NumericalError -> 3,
SizeCapError -> 4.
"""


class JsdmError(Exception):
    """Base class for all package errors."""


class ConfigError(JsdmError):
    """Invalid scenario configuration or malformed input file."""


class ContractViolation(JsdmError):
    """An argument broke a documented precondition (non-Hermitian input,
    non-orthonormal basis, zero-norm covariance, ...)."""


class NumericalError(JsdmError):
    """A numerical routine failed: quadrature returned non-finite values,
    a fixed point did not converge, an LP solver gave up, a matrix that
    must be invertible was singular."""


class SizeCapError(JsdmError):
    """Problem size exceeds a configured cap (LP vertex cap, brute-force
    enumeration cap)."""


class DimensionalityBottleneck(NumericalError):
    """Outer precoder construction left fewer effective dimensions than
    streams to serve (b_g < S_g)."""


class DegenerateEquivalent(NumericalError):
    """The deterministic-equivalent fixed point collapses to m_bar = 0:
    the effective covariance has no more meaningful modes than streams,
    so the large-system ZF gain vanishes."""
