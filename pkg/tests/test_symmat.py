import numpy as np
import pytest

from cmainj.errors import DecompositionFailure, InvalidMatrix, StaleDecomposition
from cmainj.symmat import (
    EPS_FLOOR_REL,
    apply_root,
    decompose,
    mahalanobis_norm,
    mahalanobis_norms,
    symmetrize,
)


def random_spd(rng, n, scale=1.0):
    a = rng.standard_normal((n, n))
    return scale * (a.T @ a) + np.eye(n)


def test_decompose_identity():
    dec = decompose(np.eye(3))
    assert np.allclose(dec.eigenvalues, [1.0, 1.0, 1.0])
    assert np.allclose(np.abs(dec.basis), np.eye(3))


def test_decompose_diagonal():
    dec = decompose(np.diag([4.0, 1.0]))
    assert np.allclose(dec.eigenvalues, [1.0, 4.0])  # ascending
    # axis-aligned basis up to sign/permutation
    assert np.allclose(np.abs(dec.basis), [[0.0, 1.0], [1.0, 0.0]])


def test_decompose_reconstruction_spd5():
    rng = np.random.default_rng(11)
    a = rng.standard_normal((5, 5))
    c = a.T @ a + np.eye(5)
    dec = decompose(c)
    rebuilt = (dec.basis * dec.eigenvalues) @ dec.basis.T
    assert np.max(np.abs(rebuilt - c)) / np.max(np.abs(c)) < 1e-10
    # orthonormal basis
    assert np.max(np.abs(dec.basis.T @ dec.basis - np.eye(5))) < 1e-10


def test_decompose_rejects_nonfinite():
    c = np.eye(2)
    c[0, 1] = np.nan
    with pytest.raises(InvalidMatrix):
        decompose(c)
    with pytest.raises(InvalidMatrix):
        decompose(np.ones((2, 3)))


def test_decompose_rejects_nonpositive():
    with pytest.raises(DecompositionFailure):
        decompose(-np.eye(3))


def test_eigenvalue_floor():
    c = np.diag([1.0, 1e-30])
    dec = decompose(c)
    assert dec.eigenvalues[0] >= EPS_FLOOR_REL * dec.eigenvalues[-1]
    assert np.all(np.isfinite(dec.invroot))


def test_apply_root_identity():
    dec = decompose(np.eye(2))
    assert np.allclose(apply_root(dec, [3.0, 4.0], -0.5), [3.0, 4.0])


def test_apply_root_diagonal_cases():
    dec = decompose(np.diag([4.0, 1.0]))
    assert np.allclose(apply_root(dec, [1.0, 0.0], -0.5), [0.5, 0.0])
    assert np.allclose(apply_root(dec, [2.0, 3.0], 0.5), [4.0, 3.0])


def test_apply_root_stale_stamp():
    dec = decompose(np.eye(2), stamp=3)
    apply_root(dec, [1.0, 0.0], 0.5, expect_stamp=3)
    with pytest.raises(StaleDecomposition):
        apply_root(dec, [1.0, 0.0], 0.5, expect_stamp=4)


def test_apply_root_bad_power():
    dec = decompose(np.eye(2))
    with pytest.raises(ValueError):
        apply_root(dec, [1.0, 0.0], 1.0)


@pytest.mark.parametrize("n", [2, 5, 10, 20])
def test_root_roundtrip_many(n):
    # 250 matrices per dimension: +1/2 then -1/2 is the identity
    rng = np.random.default_rng(100 + n)
    for _ in range(250):
        dec = decompose(random_spd(rng, n, scale=rng.uniform(0.1, 10.0)))
        z = rng.standard_normal(n)
        back = apply_root(dec, apply_root(dec, z, 0.5), -0.5)
        assert np.linalg.norm(back - z) <= 1e-8 * max(1.0, np.linalg.norm(z))


def test_mahalanobis_identity():
    dec = decompose(np.eye(2))
    assert mahalanobis_norm(dec, [3.0, 4.0]) == pytest.approx(5.0)


def test_mahalanobis_diagonal():
    dec = decompose(np.diag([4.0, 1.0]))
    assert mahalanobis_norm(dec, [2.0, 0.0]) == pytest.approx(1.0)
    assert mahalanobis_norm(dec, [2.0, 3.0]) == pytest.approx(np.sqrt(10.0))


def test_mahalanobis_of_transformed_step():
    # ||C^{-1/2} (C^{1/2} z)|| == ||z||
    rng = np.random.default_rng(7)
    for n in (2, 5, 10, 20):
        dec = decompose(random_spd(rng, n))
        z = rng.standard_normal(n)
        y = apply_root(dec, z, 0.5)
        assert mahalanobis_norm(dec, y) == pytest.approx(np.linalg.norm(z), rel=1e-8)


def test_batch_norms_match_scalar():
    rng = np.random.default_rng(8)
    dec = decompose(random_spd(rng, 6))
    ys = rng.standard_normal((9, 6))
    batch = mahalanobis_norms(dec, ys)
    for i in range(9):
        assert batch[i] == pytest.approx(mahalanobis_norm(dec, ys[i]), rel=1e-12)


def test_symmetrize():
    a = np.array([[1.0, 2.0], [0.0, 3.0]])
    s = symmetrize(a)
    assert np.array_equal(s, s.T)
    assert s[0, 1] == pytest.approx(1.0)
