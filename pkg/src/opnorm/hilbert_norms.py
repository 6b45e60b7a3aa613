"""Norms with values in the positive operators on ``H = C^d``.

A map ``F`` from a normed space ``X`` into Hermitian ``d x d`` matrices is
such a norm when ``F(x)`` is positive semidefinite, ``F(x + y) <= F(x) + F(y)``
in the Loewner order, ``F(lam x) = |lam| F(x)``, and ``F(x) = 0`` only for
``x = 0``. The checkers here test those statements on random samples; a
passing report means "no violation among N samples", never more.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import numpy.typing as npt

from .exceptions import NotSquareError, SingularOperatorError
from .numkernel import (
    as_operator,
    min_eigenvalues,
    spectral_norms,
)
from .reports import AxiomReport, AxiomResult
from .spaces import NormedSpaceModel, OperatorValuedNorm, diag_stack, lp_space

INJECTIVITY_TOL = 1e-10
AXIOM_TOL = 1e-9

_CHUNK = 1024
_ASCENT_ITERS = 100


@dataclass(eq=False)
class LHValuedNorm(OperatorValuedNorm):
    """Operator-valued norm into ``L(C^d)``.

    ``inner_weight`` scales the inner product of ``H`` (``(u, v) = w sum u_i
    conj(v_i)``). A constant weight changes neither adjoints, positivity nor
    operator norms, so it is carried only as metadata.
    """

    inner_weight: float = 1.0

    codomain = "hilbert"

    @property
    def hilbert_dim(self) -> int:
        return self.size

    def operator_norms(self, stack: np.ndarray) -> np.ndarray:
        return spectral_norms(stack)


def trivial_norm(space: NormedSpaceModel, hilbert_dim: int) -> LHValuedNorm:
    """``x -> ||x|| I_d``."""
    if hilbert_dim < 1:
        raise ValueError("hilbert_dim must be >= 1")
    eye = np.eye(hilbert_dim, dtype=np.complex128)
    return LHValuedNorm(
        domain=space,
        size=hilbert_dim,
        evaluator=lambda x: space.norm(x) * eye,
        descriptor=f"trivial_norm({space.label}, d={hilbert_dim})",
        batch_evaluator=lambda X: space.norms(X)[:, None, None] * eye,
    )


def grid_function_space(n: int, label: str) -> NormedSpaceModel:
    space = lp_space(n, np.inf, field="complex")
    space.label = label
    return space


def mult_norm_l2(grid_size: int) -> LHValuedNorm:
    """Multiplication operators ``f -> |g| f`` on a discretized ``L^2`` of the circle.

    The domain holds functions sampled at ``grid_size`` equally spaced points
    of the unit circle with the sup norm; ``H`` is ``C^n`` with the
    normalized-measure inner product ``(1/n) sum u_i conj(v_i)``.
    """
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1")
    space = grid_function_space(grid_size, f"sup-norm functions on {grid_size} circle points")
    return LHValuedNorm(
        domain=space,
        size=grid_size,
        evaluator=lambda g: np.diag(np.abs(g)).astype(np.complex128),
        descriptor=f"mult_norm_l2({grid_size})",
        batch_evaluator=lambda G: diag_stack(np.abs(G)),
        inner_weight=1.0 / grid_size,
    )


def compose_norm(F: LHValuedNorm, T: npt.ArrayLike, inj_tol: float = INJECTIVITY_TOL) -> LHValuedNorm:
    """``h -> F(T h)`` for an injective operator ``T`` on the domain of ``F``.

    Raises :class:`SingularOperatorError` when ``sigma_min(T) <= inj_tol * ||T||``,
    since definiteness cannot survive a numerical kernel.
    """
    T = as_operator(T)
    d = F.domain.dim
    if T.shape[0] != T.shape[1]:
        raise NotSquareError(f"T must be square, got shape {T.shape}")
    if T.shape[0] != d:
        raise ValueError(f"T has size {T.shape[0]}, domain has dimension {d}")
    if F.domain.field == "real" and np.any(T.imag):
        raise ValueError("complex T does not act on a real domain")
    if d:
        s = np.linalg.svd(T, compute_uv=False)
        if s[-1] <= inj_tol * s[0] or s[0] == 0:
            raise SingularOperatorError(
                f"T is numerically singular (sigma_min {s[-1]:.3e}, ||T|| {s[0]:.3e})"
            )
    if F.domain.field == "real":
        T = T.real.copy()
    return LHValuedNorm(
        domain=F.domain,
        size=F.size,
        evaluator=lambda h: F(T @ h),
        descriptor=f"compose_norm({F.descriptor}, T)",
        batch_evaluator=lambda H: F.evaluate_many(H @ T.T),
        inner_weight=F.inner_weight,
    )


def shifted_norm(F: LHValuedNorm, shift: float) -> LHValuedNorm:
    """``x -> F(x) - shift I`` for ``x != 0``; used to exercise the checkers."""
    eye = np.eye(F.size, dtype=np.complex128)

    def evaluator(x: np.ndarray) -> np.ndarray:
        if not np.any(x):
            return np.zeros_like(eye)
        return F(x) - shift * eye

    return LHValuedNorm(
        domain=F.domain,
        size=F.size,
        evaluator=evaluator,
        descriptor=f"shifted_norm({F.descriptor}, {shift:g})",
        batch_evaluator=lambda X: F.evaluate_many(X) - shift * np.any(X, axis=1)[:, None, None] * eye,
        inner_weight=F.inner_weight,
    )


def homogeneity_scalars(space: NormedSpaceModel, rng: np.random.Generator) -> list[complex]:
    """Fixed boundary scalars (0 and unimodular ones) plus two random ones."""
    if space.field == "real":
        fixed: list[complex] = [0.0, -1.0, 1.0, 2.5, -0.3]
    else:
        theta = rng.uniform(0, 2 * np.pi)
        fixed = [0.0, -1.0, 1j, 2.5, complex(np.cos(theta), np.sin(theta))]
    return fixed + list(space.random_scalars(rng, 2))


def _sample_points(F: OperatorValuedNorm, rng: np.random.Generator, n: int) -> np.ndarray:
    basis = np.eye(F.domain.dim, dtype=np.complex128)
    return np.vstack([basis, F.domain.random_vectors(rng, n).astype(np.complex128)])


def _homogeneity(F: OperatorValuedNorm, X: np.ndarray, FX: np.ndarray, norms: np.ndarray,
                 rng: np.random.Generator, tol: float,
                 evaluate: Callable[[np.ndarray], np.ndarray] | None = None) -> AxiomResult:
    """``evaluate`` replaces ``F.evaluate_many`` when ``FX`` is in another representation."""
    evaluate = F.evaluate_many if evaluate is None else evaluate
    lams = np.array([homogeneity_scalars(F.domain, rng) for _ in range(len(X))], dtype=np.complex128)
    scale = np.maximum(1.0, norms)
    worst, witness, checked = 0.0, None, 0
    for j in range(lams.shape[1]):
        lam = lams[:, j]
        diff = evaluate(lam[:, None] * X) - np.abs(lam).reshape((-1,) + (1,) * (FX.ndim - 1)) * FX
        err = max_entries(diff)
        r = err / scale
        checked += len(X)
        i = int(np.argmax(r)) if len(r) else 0
        if len(r) and r[i] > worst:
            worst = float(r[i])
            if worst > tol:
                witness = {"x": X[i], "lambda": complex(lam[i]), "max_entry_error": float(err[i])}
    return AxiomResult("homogeneity", worst <= tol, checked, worst, witness)


def max_entries(FX: np.ndarray) -> np.ndarray:
    """Largest entry modulus of each item of a stack (matrices or diagonals)."""
    if FX.size == 0:
        return np.zeros(len(FX))
    return np.abs(FX).reshape(len(FX), -1).max(axis=1)


def _definiteness(F: OperatorValuedNorm, X: np.ndarray, fx: np.ndarray, tol: float) -> AxiomResult:
    """``fx[i]`` is the largest entry modulus of ``F(X[i])``."""
    zero = F(np.zeros(F.domain.dim))
    z = float(np.max(np.abs(zero))) if zero.size else 0.0
    if z > tol:
        return AxiomResult("definiteness", False, 1, z, {"x": np.zeros(F.domain.dim), "max_entry": z})
    xn = F.domain.norms(X)
    # F(x) counts as zero when its entries are below tol relative to ||x||
    ratio = fx / np.where(xn > 0, xn, 1.0)
    details = {"min_ratio": float(ratio.min()) if len(ratio) else None}
    bad = np.flatnonzero(ratio <= tol)
    if bad.size:
        i = int(bad[0])
        return AxiomResult("definiteness", False, len(X) + 1, z,
                           {"x": X[i], "max_entry": float(fx[i]), "norm_x": float(xn[i])}, details=details)
    return AxiomResult("definiteness", True, len(X) + 1, z, details=details)


def check_lh_axioms(
    F: LHValuedNorm,
    sample_count: int = 500,
    seed: int | None = 0,
    tol: float = AXIOM_TOL,
    pair_count: int | None = None,
) -> AxiomReport:
    """Sample-based check of positivity, Loewner triangle, homogeneity, definiteness.

    Residuals are normalized so each axiom holds iff its worst residual is at
    most ``tol``:

    * positivity: ``-lambda_min(F(x)) / max(1, ||F(x)||)``;
    * triangle: ``-lambda_min(F(x) + F(y) - F(x + y)) / max(1, ||F(x)|| + ||F(y)||)``;
    * homogeneity: ``max|F(lam x) - |lam| F(x)| / max(1, ||F(x)||)`` for
      ``lam`` in 0, -1, a unimodular value, 2.5 and random scalars;
    * definiteness: ``F(0)`` must vanish within ``tol`` and ``max|F(x)| / ||x||``
      must exceed ``tol`` for every sampled nonzero ``x`` (basis vectors
      included).
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    pair_count = sample_count if pair_count is None else pair_count
    rng = np.random.default_rng(seed)
    X = _sample_points(F, rng, sample_count)
    FX = F.evaluate_many(X)
    herm = np.max(np.abs(FX - np.conj(np.swapaxes(FX, 1, 2))), axis=(1, 2)) if F.size else np.zeros(len(X))
    norms = spectral_norms(FX)

    axioms: dict[str, AxiomResult] = {}

    lam = min_eigenvalues(FX)
    pos = -lam / np.maximum(1.0, norms)
    herm_r = herm / np.maximum(1.0, norms)
    worst = float(max(pos.max(), herm_r.max())) if len(X) else 0.0
    witness = None
    if herm_r.max() > tol:
        i = int(np.argmax(herm_r))
        witness = {"x": X[i], "hermitian_defect": float(herm[i])}
    elif pos.max() > tol:
        i = int(np.argmax(pos))
        h = np.linalg.eigh(0.5 * (FX[i] + FX[i].conj().T))[1][:, 0]
        witness = {"x": X[i], "h": h, "quadratic_form": float(np.real(h.conj() @ FX[i] @ h))}
    axioms["positivity"] = AxiomResult("positivity", witness is None, len(X), worst, witness)

    Xa = F.domain.random_vectors(rng, pair_count).astype(np.complex128)
    Xb = F.domain.random_vectors(rng, pair_count).astype(np.complex128)
    Fa, Fb, Fab = F.evaluate_many(Xa), F.evaluate_many(Xb), F.evaluate_many(Xa + Xb)
    D = Fa + Fb - Fab
    scale = np.maximum(1.0, spectral_norms(Fa) + spectral_norms(Fb))
    tri = -min_eigenvalues(D) / scale
    worst = float(tri.max()) if pair_count else 0.0
    witness = None
    if worst > tol:
        i = int(np.argmax(tri))
        h = np.linalg.eigh(0.5 * (D[i] + D[i].conj().T))[1][:, 0]
        witness = {"x": Xa[i], "y": Xb[i], "h": h, "quadratic_form": float(np.real(h.conj() @ D[i] @ h))}
    axioms["triangle"] = AxiomResult("triangle", witness is None, pair_count, worst, witness)

    axioms["homogeneity"] = _homogeneity(F, X, FX, norms, rng, tol)
    axioms["definiteness"] = _definiteness(F, X, max_entries(FX), tol)
    return AxiomReport(F.descriptor, axioms, len(X), pair_count, seed, tol)


def boundedness_estimate(
    F: OperatorValuedNorm,
    sphere_samples: int = 2000,
    seed: int | None = 0,
    polish: int = 0,
) -> float:
    """Sampled ``sup ||F(x)||`` over the unit sphere of the domain.

    Samples come from one seeded stream in fixed-size chunks, so for a fixed
    seed the plain estimate (``polish=0``) is nondecreasing in
    ``sphere_samples``. With ``polish=k`` the ``k`` best samples are further
    improved by a seeded random-search ascent on the sphere; the result
    stays a lower bound on the true supremum.
    """
    if F.domain.dim == 0:
        raise ValueError("boundedness is undefined on a zero-dimensional domain")
    if sphere_samples < 1:
        raise ValueError("sphere_samples must be >= 1")
    rng = np.random.default_rng(seed)
    best_vals: list[np.ndarray] = []
    best_pts: list[np.ndarray] = []
    remaining = sphere_samples
    while remaining > 0:
        U = F.domain.unit_sphere(rng, _CHUNK)[: min(remaining, _CHUNK)]
        vals = F.operator_norms(F.evaluate_many(U))
        best_vals.append(vals)
        best_pts.append(U)
        remaining -= _CHUNK
    vals = np.concatenate(best_vals)
    pts = np.vstack(best_pts)
    estimate = float(vals.max())
    if polish > 0:
        polish_rng = np.random.default_rng(None if seed is None else seed + 1)
        top = np.argsort(vals)[::-1][:polish]
        estimate = max(estimate, _ascend(F, pts[top], vals[top], polish_rng))
    return estimate


def _vertex_rounding(space: NormedSpaceModel, X: np.ndarray) -> np.ndarray | None:
    """Nearby extreme points of the unit ball, where a convex function peaks."""
    if space.kind != "p":
        return None
    if np.isinf(space.p):
        a = np.abs(X)
        return np.where(a > 0, X / np.where(a > 0, a, 1.0), 1.0)
    if space.p == 1:
        out = np.zeros_like(X)
        j = np.argmax(np.abs(X), axis=1)
        rows = np.arange(len(X))
        out[rows, j] = X[rows, j]
        return out
    return None


def _ascend(F: OperatorValuedNorm, X: np.ndarray, values: np.ndarray, rng: np.random.Generator,
            iters: int = _ASCENT_ITERS, population: int = 16) -> float:
    """Random-search ascent of ``||F(.)||`` on the unit sphere from each row of ``X``.

    The starts run side by side. Perturbations come at four relative
    scales; a start's step halves after three rounds without progress. For
    l_inf and l_1 domains every candidate is also rounded to an extreme
    point of the ball, since ``||F(.)||`` is convex and attains its maximum
    there. Returns the best value found.
    """
    X = np.array(X, dtype=np.complex128)
    values = np.array(values, dtype=float)
    k, d = X.shape
    step = np.full(k, 0.1)
    fails = np.zeros(k, dtype=int)
    scales = np.array([1.0, 0.3, 0.1, 0.03])[np.arange(population) % 4]
    for _ in range(iters):
        active = step >= 1e-12
        if not active.any():
            break
        noise = F.domain.gaussian(rng, k * population).reshape(k, population, d)
        cand = X[:, None, :] + (step[:, None] * scales[None, :])[:, :, None] * noise
        cand = cand.reshape(k * population, d)
        rounded = _vertex_rounding(F.domain, cand)
        if rounded is not None:
            cand = np.concatenate([cand.reshape(k, population, d), rounded.reshape(k, population, d)], axis=1)
            cand = cand.reshape(-1, d)
        per = cand.shape[0] // k
        n = F.domain.norms(cand)
        vals = np.full(len(cand), -np.inf)
        ok = n > 0
        cand[ok] /= n[ok, None]
        vals[ok] = F.operator_norms(F.evaluate_many(cand[ok]))
        vals = vals.reshape(k, per)
        j = np.argmax(vals, axis=1)
        best = vals[np.arange(k), j]
        better = active & (best > values)
        X[better] = cand.reshape(k, per, d)[better, j[better]]
        values[better] = best[better]
        fails = np.where(better, 0, fails + 1)
        halve = fails >= 3
        step = np.where(halve, step * 0.5, step)
        fails[halve] = 0
    return float(values.max())


def well_conditioned_operators(d: int, count: int, seed: int | None, cond: float = 10.0,
                               field: str = "complex") -> Sequence[np.ndarray]:
    """Random ``d x d`` operators with condition number ``cond``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        out.append(random_with_condition(rng, d, cond, field))
    return out


def random_with_condition(rng: np.random.Generator, d: int, cond: float, field: str = "complex") -> np.ndarray:
    def orth() -> np.ndarray:
        Z = rng.standard_normal((d, d))
        if field == "complex":
            Z = Z + 1j * rng.standard_normal((d, d))
        Q, R = np.linalg.qr(Z)
        return Q * (np.diag(R) / np.abs(np.diag(R)))

    s = np.geomspace(1.0, 1.0 / cond, d) if d > 1 else np.ones(d)
    return (orth() * s) @ orth().conj().T
