"""Dense complex-matrix kernels.

Operators are plain two-dimensional ``numpy`` arrays of dtype ``complex128``.
Everything here is deterministic given an explicit seed and keeps no state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import numpy.typing as npt

from .exceptions import (
    ConvergenceError,
    NonCommutingError,
    NotHermitianError,
    NotNormalError,
    NotSquareError,
)

HERM_TOL = 1e-10
EIG_TOL = 1e-10
PSD_TOL = 1e-10
NORMAL_TOL = 1e-10
SIMDIAG_TOL = 1e-9

_GAP_TOL = 1e-8
_MAX_RETRIES = 5
_SAMPLE_CHUNK = 8192


def as_operator(M: npt.ArrayLike) -> np.ndarray:
    """Return ``M`` as a finite complex 2-D array (a copy is not forced)."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2:
        raise ValueError(f"operator must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("operator has non-finite entries")
    return A


def _square(M: npt.ArrayLike) -> np.ndarray:
    A = as_operator(M)
    if A.shape[0] != A.shape[1]:
        raise NotSquareError(f"expected a square operator, got shape {A.shape}")
    return A


def _maxabs(A: np.ndarray) -> float:
    return float(np.max(np.abs(A))) if A.size else 0.0


def hermitian_defect(M: npt.ArrayLike) -> float:
    """Largest entrywise distance between ``M`` and its adjoint."""
    A = _square(M)
    return _maxabs(A - A.conj().T)


def is_hermitian(M: npt.ArrayLike, tol: float = HERM_TOL) -> bool:
    A = _square(M)
    return hermitian_defect(A) <= tol * max(1.0, _maxabs(A))


def _hermitian(M: npt.ArrayLike, tol: float = HERM_TOL) -> np.ndarray:
    A = _square(M)
    defect = hermitian_defect(A)
    if defect > tol * max(1.0, _maxabs(A)):
        raise NotHermitianError(f"operator is not Hermitian (defect {defect:.3e})")
    return A


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order and a unitary basis of eigenvectors."""

    eigenvalues: np.ndarray
    basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U = self.basis
        return (U * self.eigenvalues) @ U.conj().T


def hermitian_eig(M: npt.ArrayLike, tol: float = EIG_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian operator.

    The result is validated against the reconstruction residual
    ``||M - U diag(w) U^H|| <= tol * max(1, ||M||)`` and the unitarity
    residual ``||U^H U - I|| <= tol``; :class:`ConvergenceError` is raised
    otherwise.
    """
    A = _hermitian(M)
    d = A.shape[0]
    if d == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0), dtype=np.complex128))
    # symmetrize so roundoff in the strict triangle cannot leak into eigh
    H = 0.5 * (A + A.conj().T)
    try:
        w, U = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(str(exc)) from exc
    U = U.astype(np.complex128, copy=False)
    scale = max(1.0, spectral_norm(A))
    recon = np.linalg.norm(A - (U * w) @ U.conj().T, 2)
    unit = np.linalg.norm(U.conj().T @ U - np.eye(d), 2)
    # LAPACK residuals scale like d * eps; allow that headroom on top of tol
    slack = max(tol, 64 * d * np.finfo(float).eps)
    if recon > slack * scale or unit > slack:
        raise ConvergenceError(
            f"eigendecomposition residuals too large (recon {recon:.2e}, unitarity {unit:.2e})"
        )
    return EigenDecomposition(w, U)


class PSDResult(NamedTuple):
    is_psd: bool
    witness: np.ndarray | None
    min_eigenvalue: float


def is_psd(M: npt.ArrayLike, tol: float = PSD_TOL) -> PSDResult:
    """Test positive semidefiniteness.

    ``M`` passes iff its smallest eigenvalue is at least
    ``-tol * max(1, ||M||)``. On failure the witness ``h`` is a unit vector
    with ``(Mh, h) < 0``.
    """
    A = _hermitian(M)
    if A.shape[0] == 0:
        return PSDResult(True, None, 0.0)
    if A.shape[0] == 1:
        lam = float(A[0, 0].real)
        ok = lam >= -tol * max(1.0, abs(lam))
        return PSDResult(ok, None if ok else np.ones(1, dtype=np.complex128), lam)
    eig = hermitian_eig(A)
    lam = float(eig.eigenvalues[0])
    scale = max(1.0, float(np.max(np.abs(eig.eigenvalues))))
    if lam >= -tol * scale:
        return PSDResult(True, None, lam)
    return PSDResult(False, eig.basis[:, 0].copy(), lam)


def min_eigenvalues(stack: np.ndarray) -> np.ndarray:
    """Smallest eigenvalue of each Hermitian matrix in a ``(n, d, d)`` stack."""
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.shape[-1] == 0:
        return np.zeros(stack.shape[0])
    herm = 0.5 * (stack + np.conj(np.swapaxes(stack, -1, -2)))
    return np.linalg.eigvalsh(herm)[..., 0]


def spectral_norm(M: npt.ArrayLike) -> float:
    """Largest singular value; 0 for the zero matrix."""
    A = as_operator(M)
    if A.size == 0:
        if A.shape == (0, 0):
            return 0.0
        raise ValueError("spectral norm of an empty matrix is undefined")
    return float(np.linalg.norm(A, 2))


def spectral_norms(stack: np.ndarray) -> np.ndarray:
    """Spectral norm of every matrix in a ``(n, r, c)`` stack."""
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.shape[0] == 0:
        return np.zeros(0)
    if stack.shape[-1] == 0 or stack.shape[-2] == 0:
        return np.zeros(stack.shape[0])
    return np.linalg.svd(stack, compute_uv=False)[..., 0]


def spectral_norm_witness(M: npt.ArrayLike) -> tuple[float, np.ndarray]:
    """Spectral norm together with a unit vector attaining it."""
    A = as_operator(M)
    if A.shape[1] == 0:
        raise ValueError("no witness exists on a zero-dimensional space")
    _, s, Vh = np.linalg.svd(A)
    value = float(s[0]) if s.size else 0.0
    return value, Vh[0].conj().copy()


def spectral_radius(M: npt.ArrayLike) -> float:
    A = _square(M)
    if A.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def is_normal(M: npt.ArrayLike, tol: float = NORMAL_TOL) -> bool:
    """True iff ``||M^H M - M M^H|| <= tol * max(1, ||M||^2)``."""
    A = _square(M)
    if A.shape[0] == 0:
        return True
    comm = A.conj().T @ A - A @ A.conj().T
    return spectral_norm(comm) <= tol * max(1.0, spectral_norm(A) ** 2)


def _unit_vectors(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    Z = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def numerical_radius(
    M: npt.ArrayLike,
    strategy: str = "sampled",
    count: int = 100_000,
    seed: int | None = 0,
) -> float:
    """Numerical radius ``sup |(Mh, h)|`` over unit vectors ``h``.

    Parameters
    ----------
    M : array_like
        Square operator.
    strategy : {"exact-normal", "sampled"}
        ``"exact-normal"`` returns the largest eigenvalue modulus and requires
        ``M`` to be normal. ``"sampled"`` maximizes over ``count`` random unit
        vectors and returns a lower bound.
    count, seed : int
        Sample budget and seed for the sampled strategy. Samples are drawn
        in fixed-size chunks from a single stream, so a larger ``count``
        with the same seed sees a superset of the points and the estimate
        is nondecreasing in ``count``.
    """
    A = _square(M)
    d = A.shape[0]
    if strategy == "exact-normal":
        if not is_normal(A):
            raise NotNormalError("exact-normal strategy requires a normal operator")
        return spectral_radius(A)
    if strategy != "sampled":
        raise ValueError(f"unknown strategy {strategy!r}")
    if count < 1:
        raise ValueError("count must be >= 1")
    if d == 0 or not np.any(A):
        return 0.0
    rng = np.random.default_rng(seed)
    best = 0.0
    remaining = count
    while remaining > 0:
        H = _unit_vectors(rng, _SAMPLE_CHUNK, d)[: min(remaining, _SAMPLE_CHUNK)]
        vals = np.abs(np.einsum("ni,ij,nj->n", H.conj(), A, H))
        best = max(best, float(vals.max()))
        remaining -= _SAMPLE_CHUNK
    return best


def _commutator_norm(A: np.ndarray, B: np.ndarray) -> float:
    return spectral_norm(A @ B - B @ A)


def _offdiag_residual(U: np.ndarray, G: np.ndarray) -> tuple[np.ndarray, float]:
    D = U.conj().T @ G @ U
    diag = np.diag(D).copy()
    return diag, spectral_norm(D - np.diag(diag))


def _refine_blocks(U: np.ndarray, parts: Sequence[np.ndarray], level: int = 0) -> np.ndarray:
    """Split clusters of the current basis by diagonalizing the next part inside them."""
    if level == len(parts) or U.shape[1] <= 1:
        return U
    sub = U.conj().T @ parts[level] @ U
    w, V = np.linalg.eigh(0.5 * (sub + sub.conj().T))
    U = U @ V
    out = np.empty_like(U)
    start = 0
    scale = max(1.0, float(np.max(np.abs(w))))
    for stop in range(1, len(w) + 1):
        if stop == len(w) or w[stop] - w[stop - 1] > _GAP_TOL * scale:
            out[:, start:stop] = _refine_blocks(U[:, start:stop], parts, level + 1)
            start = stop
    return out


def simultaneous_diagonalize(
    generators: Sequence[npt.ArrayLike],
    tol: float = SIMDIAG_TOL,
    seed: int | None = 0,
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Common unitary eigenbasis of pairwise commuting normal operators.

    A random real combination of the Hermitian and skew-Hermitian parts of
    the generators is diagonalized. If some generator is not diagonal in that
    basis (nearly equal eigenvalues of the combination mixed distinct joint
    eigenspaces) a fresh combination is tried, up to five times, before
    falling back to cluster-by-cluster refinement.

    Returns
    -------
    basis : ndarray
        Unitary ``U`` with columns spanning common eigenvectors.
    diagonals : list of ndarray
        ``diag(U^H G U)`` for each generator ``G``.
    """
    gens = [_square(G) for G in generators]
    if not gens:
        raise ValueError("at least one generator is required")
    d = gens[0].shape[0]
    for i, G in enumerate(gens):
        if G.shape != (d, d):
            raise ValueError(f"generator {i} has shape {G.shape}, expected {(d, d)}")
        if not is_normal(G, tol):
            raise NotNormalError(f"generator {i} is not normal", index=i)
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            c = _commutator_norm(gens[i], gens[j])
            scale = max(1.0, spectral_norm(gens[i]) * spectral_norm(gens[j]))
            if c > tol * scale:
                raise NonCommutingError(
                    f"generators {i} and {j} do not commute (commutator norm {c:.3e})",
                    pair=(i, j),
                    commutator_norm=c,
                )
    if d == 0:
        return np.zeros((0, 0), dtype=np.complex128), [np.zeros(0, dtype=np.complex128) for _ in gens]

    parts: list[np.ndarray] = []
    for G in gens:
        parts.append(0.5 * (G + G.conj().T))
        parts.append((G - G.conj().T) / 2j)
    scales = [max(1.0, spectral_norm(G)) for G in gens]

    def _accept(U: np.ndarray) -> list[np.ndarray] | None:
        diags = []
        for G, s in zip(gens, scales):
            diag, res = _offdiag_residual(U, G)
            if res > tol * s:
                return None
            diags.append(diag)
        return diags

    rng = np.random.default_rng(seed)
    for _ in range(_MAX_RETRIES + 1):
        coeffs = rng.uniform(0.5, 1.5, size=len(parts)) * rng.choice([-1.0, 1.0], size=len(parts))
        C = sum(c * P / max(1.0, spectral_norm(P)) for c, P in zip(coeffs, parts))
        _, U = np.linalg.eigh(0.5 * (C + C.conj().T))
        U = U.astype(np.complex128, copy=False)
        diags = _accept(U)
        if diags is not None:
            return U, diags

    U = _refine_blocks(np.eye(d, dtype=np.complex128), parts)
    diags = _accept(U)
    if diags is None:
        raise ConvergenceError("simultaneous diagonalization did not reach the requested tolerance")
    return U, diags
