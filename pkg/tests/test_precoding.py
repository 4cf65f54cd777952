import numpy as np
import pytest

from jsdm.channel import AntennaArray, CovarianceMatrix, UserProfile, one_ring_covariance
from jsdm.errors import ContractViolation, DimensionalityBottleneck, NumericalError
from jsdm.precoding import (approx_bd_precoders, group_centroid, inclusion_factor,
                            matched_precoders, zf_inner)

ARRAY = AntennaArray.ula(32)


def ring(theta_deg, spread_deg=5.0):
    return one_ring_covariance(ARRAY, UserProfile(np.deg2rad(theta_deg),
                                                  np.deg2rad(spread_deg)))


def projector_cov(cols, n_t=32, gain=1.0):
    eye = np.eye(n_t, dtype=complex)
    u = eye[:, cols]
    return CovarianceMatrix.from_entries(gain * (u @ u.conj().T))


def test_centroid_single_member_is_that_covariance():
    cov = ring(10.0)
    cent = group_centroid([cov], (0,))
    assert np.array_equal(cent.covariance.entries, cov.entries)


def test_centroid_identical_members():
    cov = ring(-5.0)
    cent = group_centroid([cov, cov], (0, 1))
    assert np.allclose(cent.covariance.entries, cov.entries)


def test_centroid_trace_is_mean_of_traces():
    a, b = ring(0.0), ring(20.0)
    cent = group_centroid([a, b], (0, 1))
    expected = 0.5 * (np.trace(a.entries) + np.trace(b.entries)).real
    assert np.trace(cent.covariance.entries).real == pytest.approx(expected)


def test_inclusion_factor_two_groups():
    assert inclusion_factor([10, 10], [4, 4], 16) == 2


def test_inclusion_factor_saturation_cap():
    # sum of ranks fits: saturates at max ceil(r/S)
    assert inclusion_factor([4, 6], [2, 3], 16) == 2


def test_inclusion_factor_single_group():
    assert inclusion_factor([7], [2], 8) == 4


def test_inclusion_factor_rejects_zero_streams():
    with pytest.raises(ContractViolation):
        inclusion_factor([4], [0], 8)


def test_approx_bd_single_group_matches_eigenbasis():
    cent = group_centroid([ring(0.0)], (0,))
    pre = approx_bd_precoders({0: cent}, {0: 2}, 32)
    b = pre.basis[0]
    assert pre.dims[0] == min(cent.rank, 32)
    # spans the same leading eigenspace
    overlap = np.linalg.norm(b.conj().T @ cent.eigenbasis[:, :pre.dims[0]])
    assert overlap == pytest.approx(np.sqrt(pre.dims[0]), rel=1e-8)


def test_approx_bd_orthogonal_groups_zero_leakage():
    c0 = group_centroid([projector_cov(range(0, 6))], (0,))
    c1 = group_centroid([projector_cov(range(6, 12))], (1,))
    pre = approx_bd_precoders({0: c0, 1: c1}, {0: 2, 1: 2}, 32)
    for g, other in ((0, c1), (1, c0)):
        leak = np.trace(pre.basis[g].conj().T @ other.covariance.entries
                        @ pre.basis[g]).real
        assert abs(leak) < 1e-12


def test_approx_bd_nulls_included_interference_modes():
    c0 = group_centroid([ring(0.0)], (0,))
    c1 = group_centroid([ring(6.0)], (1,))
    pre = approx_bd_precoders({0: c0, 1: c1}, {0: 1, 1: 1}, 32)
    c = pre.inclusion_factor
    r_star = min(c1.rank, c)
    included = c1.eigenbasis[:, :r_star]
    assert np.linalg.norm(included.conj().T @ pre.basis[0]) < 1e-7


def test_approx_bd_overlapping_groups_leak_less_than_matched():
    c0 = group_centroid([ring(0.0)], (0,))
    c1 = group_centroid([ring(6.0)], (1,))
    streams = {0: 1, 1: 1}
    bd = approx_bd_precoders({0: c0, 1: c1}, streams, 32)
    matched = matched_precoders({0: c0, 1: c1})
    r2 = c1.covariance.entries
    leak_bd = np.trace(bd.basis[0].conj().T @ r2 @ bd.basis[0]).real / bd.dims[0]
    leak_matched = np.trace(matched.basis[0].conj().T @ r2
                            @ matched.basis[0]).real / matched.dims[0]
    assert leak_bd > 0.0
    assert leak_bd < leak_matched


def test_approx_bd_guarantees_stream_room():
    cents = {g: group_centroid([ring(t)], (g,))
             for g, t in enumerate((-40.0, -15.0, 5.0, 25.0, 45.0))}
    streams = {g: 2 for g in cents}
    pre = approx_bd_precoders(cents, streams, 32)
    for g in cents:
        assert pre.dims[g] >= streams[g]
        gram = pre.basis[g].conj().T @ pre.basis[g]
        assert np.max(np.abs(gram - np.eye(pre.dims[g]))) < 1e-8


def test_approx_bd_dimensionality_bottleneck_raises():
    # a group whose covariance rank cannot carry its streams
    cents = {0: group_centroid([projector_cov(range(0, 2), n_t=16)], (0,)),
             1: group_centroid([projector_cov(range(4, 10), n_t=16)], (1,))}
    with pytest.raises(DimensionalityBottleneck):
        approx_bd_precoders(cents, {0: 3, 1: 2}, 16)


def test_matched_precoder_properties():
    cent = group_centroid([ring(12.0)], (0,))
    pre = matched_precoders({0: cent})
    b = pre.basis[0]
    assert pre.dims[0] == cent.rank
    assert np.max(np.abs(b.conj().T @ b - np.eye(cent.rank))) < 1e-10
    projected = b.conj().T @ cent.covariance.entries @ b
    assert np.allclose(projected, np.diag(cent.eigenvalues), atol=1e-8)


def test_matched_precoder_independent_of_company():
    cents = {g: group_centroid([ring(t)], (g,))
             for g, t in enumerate((-30.0, 0.0, 30.0))}
    alone = matched_precoders({1: cents[1]})
    together = matched_precoders(cents)
    assert np.array_equal(alone.basis[1], together.basis[1])


def test_zf_orthonormal_channel():
    # orthonormal effective channel: P = zeta * H_eff, and the power rule
    # S / tr(B H (H^H H)^-2 H^H B^H) collapses to S / S = 1
    rng = np.random.default_rng(2)
    b_mat = np.linalg.qr(rng.standard_normal((16, 8))
                         + 1j * rng.standard_normal((16, 8)))[0]
    h_eff = np.linalg.qr(rng.standard_normal((8, 4))
                         + 1j * rng.standard_normal((8, 4)))[0]
    inner = zf_inner(h_eff, b_mat)
    assert inner.zeta_sq == pytest.approx(1.0, rel=1e-10)
    assert np.allclose(inner.matrix, np.sqrt(inner.zeta_sq) * h_eff, atol=1e-10)


def test_zf_identity_and_power():
    rng = np.random.default_rng(3)
    b_mat = np.linalg.qr(rng.standard_normal((32, 8))
                         + 1j * rng.standard_normal((32, 8)))[0]
    h_eff = rng.standard_normal((8, 4)) + 1j * rng.standard_normal((8, 4))
    inner = zf_inner(h_eff, b_mat)
    zeta = np.sqrt(inner.zeta_sq)
    product = h_eff.conj().T @ inner.matrix
    assert np.max(np.abs(product - zeta * np.eye(4))) < 1e-8
    power = np.linalg.norm(b_mat @ inner.matrix) ** 2
    assert power == pytest.approx(4.0, abs=1e-8)


def test_zf_rejects_rank_deficient_channel():
    h = np.ones((8, 3), dtype=complex)
    with pytest.raises(NumericalError):
        zf_inner(h, np.eye(8, dtype=complex))
