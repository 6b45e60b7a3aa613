import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opnorm import numkernel as nk
from opnorm.exceptions import NonCommutingError, NotHermitianError, NotNormalError, NotSquareError
from opnorm.gelfand import random_unitary

from .oracles import pivoted_cholesky_psd, sampled_spectral_norm


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


# hermitian_eig

def test_eig_diagonal_sorted_with_permutation_basis():
    dec = nk.hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(dec.eigenvalues, [1, 2, 3])
    P = np.abs(dec.basis)
    np.testing.assert_allclose(P, np.eye(3)[:, [1, 2, 0]], atol=1e-14)


def test_eig_identity():
    dec = nk.hermitian_eig(np.eye(4))
    np.testing.assert_allclose(dec.eigenvalues, np.ones(4))
    np.testing.assert_allclose(np.abs(dec.basis), np.eye(4), atol=1e-14)


def test_eig_gram_matrix_psd_and_reconstructs():
    rng = np.random.default_rng(1)
    A = rand_complex(rng, 5, 5)
    M = A.conj().T @ A
    dec = nk.hermitian_eig(M)
    assert dec.eigenvalues.min() >= -nk.EIG_TOL
    assert np.abs(dec.reconstruct() - M).max() <= nk.EIG_TOL * max(1, np.abs(M).max())


def test_eig_rejects_non_hermitian_and_non_square():
    with pytest.raises(NotHermitianError):
        nk.hermitian_eig(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotSquareError):
        nk.hermitian_eig(np.ones((2, 3)))


# is_psd

def test_is_psd_identity():
    assert nk.is_psd(np.eye(2)).is_psd


def test_is_psd_negative_entry_witness_e2():
    res = nk.is_psd(np.diag([0.0, -1e-3]), tol=1e-10)
    assert not res.is_psd
    np.testing.assert_allclose(np.abs(res.witness), [0, 1], atol=1e-14)
    assert res.min_eigenvalue == pytest.approx(-1e-3)


def test_is_psd_gram_agrees_with_cholesky_oracle():
    rng = np.random.default_rng(2)
    for _ in range(50):
        A = rand_complex(rng, 4, 6)
        M = A @ A.conj().T
        assert nk.is_psd(M).is_psd
        assert pivoted_cholesky_psd(M)


def test_is_psd_one_by_one_is_sign_test():
    assert nk.is_psd(np.array([[0.0]])).is_psd
    assert not nk.is_psd(np.array([[-1e-3]])).is_psd


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 6), st.integers(0, 6))
def test_is_psd_matches_oracle_property(seed, d, rank):
    rng = np.random.default_rng(seed)
    rank = min(rank, d)
    A = rand_complex(rng, d, rank)
    M = A @ A.conj().T
    if rng.uniform() < 0.5:
        v = rand_complex(rng, d)
        M = M - rng.uniform(0.1, 2.0) * np.outer(v, v.conj())
    assert nk.is_psd(M).is_psd == pivoted_cholesky_psd(M)


# spectral_norm / spectral_radius

def test_spectral_norm_examples():
    assert nk.spectral_norm(np.diag([1.0, 2.0, 3.0])) == pytest.approx(3.0)
    assert nk.spectral_norm(np.array([[0, 1], [0, 0]])) == pytest.approx(1.0)


def test_spectral_norm_vs_sampling_oracle():
    rng = np.random.default_rng(3)
    for _ in range(5):
        M = rng.standard_normal((4, 4))
        s = nk.spectral_norm(M)
        sampled = sampled_spectral_norm(M, 100_000, 5)
        assert sampled <= s + 1e-12
        assert s - sampled <= 1e-3 * s


def test_spectral_norm_complex_is_upper_bound_of_samples():
    rng = np.random.default_rng(3)
    M = rand_complex(rng, 4, 4)
    assert sampled_spectral_norm(M, 100_000, 5) <= nk.spectral_norm(M) + 1e-12


def test_spectral_radius_examples():
    assert nk.spectral_radius(np.diag([1, 2j])) == pytest.approx(2.0)
    assert nk.spectral_radius(np.array([[0, 1], [0, 0]])) == 0.0


def test_normal_matrices_norm_equals_radius():
    rng = np.random.default_rng(4)
    for d in range(1, 9):
        U = random_unitary(rng, d)
        N = (U * rand_complex(rng, d)) @ U.conj().T
        assert abs(nk.spectral_norm(N) - nk.spectral_radius(N)) <= 1e-8


def test_batched_norms_match_single():
    rng = np.random.default_rng(5)
    stack = rand_complex(rng, 10, 3, 3)
    np.testing.assert_allclose(nk.spectral_norms(stack), [nk.spectral_norm(A) for A in stack])


# numerical_radius

def test_numerical_radius_examples():
    assert nk.numerical_radius(np.diag([1, 1j]), "exact-normal") == pytest.approx(1.0)
    assert nk.numerical_radius(np.zeros((3, 3))) == 0.0


def test_numerical_radius_jordan_block():
    J = np.array([[0, 1], [0, 0]])
    w = nk.numerical_radius(J, "sampled", count=1_000_000, seed=0)
    assert 0.499 <= w <= 0.5
    assert w < nk.spectral_norm(J)


def test_numerical_radius_exact_normal_rejects_nonnormal():
    with pytest.raises(NotNormalError):
        nk.numerical_radius(np.array([[0, 1], [0, 0]]), "exact-normal")


def test_numerical_radius_monotone_in_count():
    rng = np.random.default_rng(6)
    M = rand_complex(rng, 3, 3)
    vals = [nk.numerical_radius(M, "sampled", count=c, seed=9) for c in (100, 1000, 20000)]
    assert vals == sorted(vals)
    assert vals[-1] <= nk.spectral_norm(M) + 1e-12


# is_normal

def test_is_normal_examples():
    rng = np.random.default_rng(7)
    A = rand_complex(rng, 4, 4)
    assert nk.is_normal(A + A.conj().T)
    assert not nk.is_normal(np.array([[0, 1], [0, 0]]))
    U = nk.hermitian_eig(A + A.conj().T).basis
    assert np.abs(U.conj().T @ U - np.eye(4)).max() <= 1e-12
    assert nk.is_normal(U)


# simultaneous_diagonalize

def test_simdiag_single_diagonal():
    D = np.diag([1.0, 2.0, 2.0])
    U, diags = nk.simultaneous_diagonalize([D])
    assert np.abs(U.conj().T @ U - np.eye(3)).max() <= 1e-12
    assert np.abs(U.conj().T @ D @ U - np.diag(diags[0])).max() <= 1e-12
    np.testing.assert_allclose(sorted(diags[0].real), [1, 2, 2], atol=1e-12)


def test_simdiag_normal_and_adjoint():
    rng = np.random.default_rng(8)
    V = random_unitary(rng, 5)
    A = (V * rand_complex(rng, 5)) @ V.conj().T
    U, (da, db) = nk.simultaneous_diagonalize([A, A.conj().T], seed=1)
    np.testing.assert_allclose(db, da.conj(), atol=1e-9)
    for G, dg in ((A, da), (A.conj().T, db)):
        assert np.abs(U.conj().T @ G @ U - np.diag(dg)).max() <= 1e-9


def test_simdiag_conjugated_pair_with_degeneracy():
    rng = np.random.default_rng(9)
    V = random_unitary(rng, 4)
    A = V @ np.diag([1, 2, 2, 1]) @ V.conj().T
    B = V @ np.diag([5, 5, 7, 6]) @ V.conj().T
    U, diags = nk.simultaneous_diagonalize([A, B], tol=1e-9, seed=3)
    for G, dg in zip((A, B), diags):
        R = U.conj().T @ G @ U
        assert np.abs(R - np.diag(np.diag(R))).max() <= 1e-9


def test_simdiag_rejects_noncommuting_and_nonnormal():
    with pytest.raises(NotNormalError):
        nk.simultaneous_diagonalize([np.array([[0, 1], [0, 0]])])
    with pytest.raises(NonCommutingError) as info:
        nk.simultaneous_diagonalize([np.diag([1.0, 2.0]), np.array([[0, 1.0], [1.0, 0]])])
    assert info.value.pair == (0, 1)
