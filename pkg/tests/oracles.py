"""Independent reference computations used to cross-check the library.

None of these call into ``opnorm``; they are deliberately simple and slow.
"""

from __future__ import annotations

import itertools

import numpy as np


def pivoted_cholesky_psd(M: np.ndarray, tol: float = 1e-10) -> bool:
    """PSD test by diagonally pivoted Cholesky (LDL-style) elimination.

    At each step the largest remaining diagonal entry is the pivot. If it is
    below ``-tol * scale`` the matrix is indefinite; if the whole remaining
    block is within ``tol * scale`` of zero the matrix is PSD (rank-deficient).
    """
    A = np.array(M, dtype=np.complex128)
    A = 0.5 * (A + A.conj().T)
    n = A.shape[0]
    scale = max(1.0, float(np.abs(A).max())) if n else 1.0
    for _ in range(n):
        d = A.diagonal().real
        p = int(np.argmax(d))
        if d.min() < -tol * scale:
            return False
        if d[p] <= tol * scale:
            # remaining block has a (numerically) zero diagonal: PSD only if it is ~0
            return bool(np.abs(A).max() <= np.sqrt(tol) * scale)
        col = A[:, p] / np.sqrt(d[p])
        A = A - np.outer(col, col.conj())
        A[p, :] = 0
        A[:, p] = 0
    return True


def sign_vector_sup_norm(T: np.ndarray) -> float:
    """``max ||T f||_inf`` over all ``f in {+-1}^k`` (exact for real ``T``)."""
    T = np.asarray(T)
    S = np.array(list(itertools.product((1.0, -1.0), repeat=T.shape[1])))
    return float(np.abs(T @ S.T).max())


def sampled_spectral_norm(M: np.ndarray, count: int, seed: int) -> float:
    """``max ||M v||`` over random unit ``v`` (real ``v`` for real ``M``)."""
    rng = np.random.default_rng(seed)
    d = M.shape[1]
    V = rng.standard_normal((count, d))
    if np.iscomplexobj(M):
        V = V + 1j * rng.standard_normal((count, d))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    return float(np.linalg.norm(V @ M.T, axis=1).max())


def cone_sampling_preserves(T: np.ndarray, count: int, seed: int, tol: float = 1e-12) -> bool:
    """Does ``T f >= -tol`` (and real) hold for ``count`` random nonnegative ``f``?

    The samples include every basis vector, then sparse and dense random
    nonnegative vectors.
    """
    rng = np.random.default_rng(seed)
    k = T.shape[1]
    F = [np.eye(k)]
    for _ in range(max(0, count - k) // 100 + 1):
        mask = rng.uniform(size=(100, k)) < rng.uniform(0.05, 1.0, size=(100, 1))
        F.append((mask * rng.exponential(size=(100, k))).T)
    fs = np.hstack(F)[:, :max(count, k)]
    img = T @ fs
    return bool(np.all(img.real >= -tol) and np.all(np.abs(img.imag) <= tol))
