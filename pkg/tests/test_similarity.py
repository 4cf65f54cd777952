import numpy as np
import pytest

from jsdm.channel import AntennaArray, UserProfile, one_ring_covariance
from jsdm.errors import ContractViolation
from jsdm.similarity import chordal_distance, dol, similarity_matrix

ARRAY_128 = AntennaArray.ula(128)


def cov(theta_deg, spread_deg=5.0, n_t=128):
    arr = ARRAY_128 if n_t == 128 else AntennaArray.ula(n_t)
    return one_ring_covariance(arr, UserProfile(np.deg2rad(theta_deg),
                                                np.deg2rad(spread_deg)))


def test_self_similarity_is_one():
    r = cov(10.0).entries
    assert dol(r, r) == pytest.approx(1.0, abs=1e-12)


def test_disjoint_support_is_zero():
    r1 = np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex)
    r2 = np.diag([0.0, 0.0, 2.0, 3.0]).astype(complex)
    assert dol(r1, r2) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("theta0,sep,expected", [
    (0.0, 1.0, 0.9280),
    (0.0, 3.0, 0.7275),
    (30.0, 1.0, 0.9313),
    (30.0, 3.0, 0.7311),
])
def test_reference_separation_values(theta0, sep, expected):
    value = dol(cov(theta0).entries, cov(theta0 + sep).entries)
    assert value == pytest.approx(expected, abs=0.005)


@pytest.mark.parametrize("theta0,bound", [(0.0, 1e-3), (30.0, 1e-3)])
def test_wide_separation_is_negligible(theta0, bound):
    assert dol(cov(theta0).entries, cov(theta0 + 30.0).entries) <= bound


def test_symmetry_and_scale_invariance():
    r1, r2 = cov(0.0).entries, cov(4.0).entries
    assert dol(r1, r2) == pytest.approx(dol(r2, r1), rel=1e-12)
    assert dol(3.7 * r1, 0.2 * r2) == pytest.approx(dol(r1, r2), rel=1e-10)


def test_bounds_on_random_psd_pairs():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        b = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        value = dol(a @ a.conj().T, b @ b.conj().T)
        assert -1e-12 <= value <= 1.0 + 1e-12


def test_monotone_decrease_with_separation():
    base = cov(0.0).entries
    values = [dol(base, cov(sep).entries) for sep in (1.0, 3.0, 5.0, 10.0, 20.0, 30.0)]
    assert all(values[i + 1] <= values[i] + 1e-9 for i in range(len(values) - 1))


def test_zero_norm_rejected():
    with pytest.raises(ContractViolation):
        dol(np.zeros((4, 4)), np.eye(4))


def test_similarity_matrix_properties():
    covs = [cov(t, n_t=32) for t in (-10.0, 0.0, 10.0)]
    s = similarity_matrix(covs)
    assert np.allclose(s, s.T)
    assert np.allclose(np.diag(s), 1.0)
    assert np.all((s > -1e-12) & (s < 1 + 1e-12))


def test_chordal_identical_subspaces():
    u = np.linalg.qr(np.random.default_rng(3).standard_normal((10, 4)))[0]
    assert chordal_distance(u, u) == pytest.approx(0.0, abs=1e-10)


def test_chordal_orthogonal_subspaces():
    eye = np.eye(10)
    assert chordal_distance(eye[:, :3], eye[:, 3:6]) == pytest.approx(6.0)


def test_chordal_grows_with_separation():
    base = cov(0.0)
    values = [chordal_distance(base.eigenvectors, cov(sep).eigenvectors)
              for sep in (1.0, 3.0, 10.0, 30.0)]
    assert all(values[i + 1] > values[i] for i in range(len(values) - 1))


def test_chordal_rejects_non_orthonormal():
    with pytest.raises(ContractViolation):
        chordal_distance(np.ones((5, 2)), np.eye(5)[:, :2])
