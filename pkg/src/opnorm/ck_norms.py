"""Norms with values in the operators on ``C(K)`` for a finite point set ``K``.

Functions on ``K`` are complex vectors with the sup norm. Positivity of an
operator means it maps nonnegative functions to nonnegative functions; on a
finite ``K`` that is exactly entrywise nonnegativity of the matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from .exceptions import NotSquareError
from .hilbert_norms import (AXIOM_TOL, _definiteness, _homogeneity, _sample_points, grid_function_space,
                            max_entries)
from .numkernel import as_operator
from .reports import AxiomReport, AxiomResult
from .spaces import OperatorValuedNorm, diag_stack

_STACK_ENTRIES = 1 << 21
_DIAGONAL_PROBE = 16


@dataclass
class FiniteCK:
    """A finite compact space: ``point_count`` labelled points."""

    point_count: int
    labels: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.point_count < 1:
            raise ValueError("point_count must be >= 1")
        if not self.labels:
            self.labels = [f"p{i}" for i in range(self.point_count)]
        if len(self.labels) != self.point_count:
            raise ValueError("need one label per point")

    def sup_norm(self, f: npt.ArrayLike) -> float:
        f = np.asarray(f)
        return float(np.max(np.abs(f))) if f.size else 0.0


def op_norm_sup(T: npt.ArrayLike) -> float:
    """Operator norm on ``(C^k, sup)``: the largest absolute row sum."""
    A = as_operator(T)
    if A.shape[0] != A.shape[1]:
        raise NotSquareError(f"expected a square operator, got shape {A.shape}")
    if A.shape[0] == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(A), axis=1)))


def op_norms_sup(stack: np.ndarray) -> np.ndarray:
    stack = np.asarray(stack)
    if stack.shape[-1] == 0:
        return np.zeros(stack.shape[0])
    return np.max(np.sum(np.abs(stack), axis=2), axis=1)


class ConeResult(NamedTuple):
    preserving: bool
    witness: np.ndarray | None


def cone_preserving(T: npt.ArrayLike, tol: float = 1e-12) -> ConeResult:
    """Does ``T`` map nonnegative functions to nonnegative functions?

    True iff every entry has real part ``>= -tol`` and imaginary part within
    ``tol``. On failure the witness is the basis function ``e_j`` whose image
    has a negative or non-real value.
    """
    A = as_operator(T)
    if A.shape[0] != A.shape[1]:
        raise NotSquareError(f"expected a square operator, got shape {A.shape}")
    bad = (A.real < -tol) | (np.abs(A.imag) > tol)
    if not bad.any():
        return ConeResult(True, None)
    j = int(np.flatnonzero(bad.any(axis=0))[0])
    e = np.zeros(A.shape[1])
    e[j] = 1.0
    return ConeResult(False, e)


def nonnegative_functions(rng: np.random.Generator, k: int, m: int) -> np.ndarray:
    """``m`` random nonnegative functions on ``k`` points, with random supports.

    Supports are Bernoulli masks whose density is itself uniform, so sparse
    functions (those that expose single negative entries) are common.
    """
    density = rng.uniform(0.0, 1.0, size=(m, 1))
    mask = rng.uniform(size=(m, k)) < density
    empty = ~mask.any(axis=1)
    mask[empty, rng.integers(0, k, size=int(empty.sum()))] = True
    return mask * rng.exponential(1.0, size=(m, k))


@dataclass(eq=False)
class CKValuedNorm(OperatorValuedNorm):
    ck: FiniteCK | None = None

    codomain = "ck"

    def __post_init__(self) -> None:
        if self.ck is None:
            self.ck = FiniteCK(self.size)
        if self.ck.point_count != self.size:
            raise ValueError("operator size must equal the number of points of K")

    def operator_norms(self, stack: np.ndarray) -> np.ndarray:
        return op_norms_sup(stack)


def mult_norm_ck(grid_size: int) -> CKValuedNorm:
    """``g -> M_g`` with ``M_g f = |g| f`` on ``C`` of a ``grid_size``-point grid of [0, 1]."""
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1")
    pts = np.linspace(0.0, 1.0, grid_size) if grid_size > 1 else np.zeros(1)
    ck = FiniteCK(grid_size, [f"t={t:.6g}" for t in pts])
    return CKValuedNorm(
        domain=grid_function_space(grid_size, f"bounded functions on {grid_size} points of [0,1]"),
        size=grid_size,
        evaluator=lambda g: np.diag(np.abs(g)).astype(np.complex128),
        descriptor=f"mult_norm_ck({grid_size})",
        batch_evaluator=lambda G: diag_stack(np.abs(G)),
        diagonal_evaluator=np.abs,
        ck=ck,
    )


def negated_entry_norm(F: CKValuedNorm, index: int = 0) -> CKValuedNorm:
    """``F`` with the sign of one diagonal entry flipped; used to exercise the checkers."""

    def evaluator(x: np.ndarray) -> np.ndarray:
        A = F(x).copy()
        A[index, index] = -A[index, index]
        return A

    def batch(X: np.ndarray) -> np.ndarray:
        A = F.evaluate_many(X)
        A[:, index, index] = -A[:, index, index]
        return A

    diagonals = None
    if F.diagonal_evaluator is not None:
        def diagonals(X: np.ndarray) -> np.ndarray:
            V = F.diagonals_many(X)
            V[:, index] = -V[:, index]
            return V

    return CKValuedNorm(domain=F.domain, size=F.size, evaluator=evaluator,
                        descriptor=f"negated_entry_norm({F.descriptor}, {index})",
                        batch_evaluator=batch, diagonal_evaluator=diagonals, ck=F.ck)


class _DenseOps:
    """Checker arithmetic on full operator stacks."""

    name = "dense"

    def __init__(self, F: CKValuedNorm):
        self.evaluate = F.evaluate_many

    norms = staticmethod(op_norms_sup)
    cone = staticmethod(cone_preserving)

    @staticmethod
    def apply(D: np.ndarray, fs: np.ndarray) -> np.ndarray:
        return D @ fs


class _DiagonalOps:
    """Same arithmetic for diagonal operators stored as their diagonals."""

    name = "diagonal"

    def __init__(self, F: CKValuedNorm):
        self.evaluate = F.diagonals_many

    @staticmethod
    def norms(V: np.ndarray) -> np.ndarray:
        return max_entries(V)

    @staticmethod
    def cone(d: np.ndarray, tol: float) -> ConeResult:
        bad = (d.real < -tol) | (np.abs(d.imag) > tol)
        if not bad.any():
            return ConeResult(True, None)
        e = np.zeros(d.shape[0])
        e[int(np.flatnonzero(bad)[0])] = 1.0
        return ConeResult(False, e)

    @staticmethod
    def apply(V: np.ndarray, fs: np.ndarray) -> np.ndarray:
        return V[:, :, None] * fs[None]


def _choose_ops(F: CKValuedNorm, X: np.ndarray, tol: float) -> tuple[_DenseOps | _DiagonalOps, float | None]:
    """Use the diagonal form only if it reproduces the dense values on a probe batch."""
    if F.diagonal_evaluator is None:
        return _DenseOps(F), None
    probe = X[:_DIAGONAL_PROBE]
    dense = F.evaluate_many(probe)
    gap = max_entries(dense - diag_stack(F.diagonals_many(probe))) / np.maximum(1.0, op_norms_sup(dense))
    worst = float(gap.max()) if len(gap) else 0.0
    return (_DiagonalOps(F) if worst <= tol else _DenseOps(F)), worst


def check_ck_axioms(
    F: CKValuedNorm,
    x_samples: int = 500,
    f_samples: int = 100,
    seed: int | None = 0,
    tol: float = AXIOM_TOL,
) -> AxiomReport:
    """Sample-based check of the four axioms for a ``C(K)``-valued norm.

    Positivity uses :func:`cone_preserving` on ``F(x)`` with tolerance
    ``tol * max(1, ||F(x)||)``. For the triangle axiom every difference
    ``D = F(x) + F(y) - F(x + y)`` is first tested for cone preservation
    (route ``"cone"``, sufficient); independently ``D f >= 0`` is verified on
    ``f_samples`` random nonnegative functions, and where the cone test fails
    the offending basis function is added to those samples (route
    ``"sampled"``). Homogeneity and definiteness are measured with the
    sup-induced operator norm.

    Norms that declare a diagonal form are checked on diagonals, after the
    diagonal form has been compared with the dense values on a probe batch;
    the comparison is reported under ``positivity.details``.
    """
    if x_samples < 1 or f_samples < 1:
        raise ValueError("sample counts must be >= 1")
    rng = np.random.default_rng(seed)
    X = _sample_points(F, rng, x_samples)
    Xa = F.domain.random_vectors(rng, x_samples).astype(np.complex128)
    Xb = F.domain.random_vectors(rng, x_samples).astype(np.complex128)
    fs = nonnegative_functions(rng, F.size, f_samples).T
    ops, probe_gap = _choose_ops(F, X, tol)
    # large K (sampled dual balls) would make the full operator stacks huge
    chunk = max(1, _STACK_ENTRIES // max(1, F.size * F.size)) if ops.name == "dense" else len(X)
    axioms: dict[str, AxiomResult] = {}

    pos_worst, pos_witness = 0.0, None
    hom = AxiomResult("homogeneity", True, 0, 0.0)
    fx = np.empty(len(X))
    for lo in range(0, len(X), chunk):
        Xc = X[lo:lo + chunk]
        FX = ops.evaluate(Xc)
        norms = ops.norms(FX)
        fx[lo:lo + len(Xc)] = max_entries(FX)
        for i, A in enumerate(FX):
            s = max(1.0, norms[i])
            r = max(float(-A.real.min()), float(np.abs(A.imag).max()), 0.0) / s if A.size else 0.0
            pos_worst = max(pos_worst, r)
            if pos_witness is None:
                res = ops.cone(A, tol * s)
                if not res.preserving:
                    pos_witness = {"x": Xc[i], "f": res.witness, "image": ops.apply(A[None], res.witness[:, None])[0, :, 0]}
        h = _homogeneity(F, Xc, FX, norms, rng, tol, evaluate=ops.evaluate)
        hom = AxiomResult("homogeneity", hom.passed and h.passed, hom.checked + h.checked,
                          max(hom.worst_residual, h.worst_residual), hom.witness or h.witness)
    details = {"representation": ops.name}
    if probe_gap is not None:
        details["diagonal_form_max_residual"] = probe_gap
    axioms["positivity"] = AxiomResult("positivity", pos_witness is None, len(X), pos_worst, pos_witness,
                                       details=details)

    route = {"cone": 0, "sampled": 0}
    worst, witness = 0.0, None
    for lo in range(0, x_samples, chunk):
        A, B = Xa[lo:lo + chunk], Xb[lo:lo + chunk]
        Fa, Fb = ops.evaluate(A), ops.evaluate(B)
        D = Fa + Fb - ops.evaluate(A + B)
        scale = np.maximum(1.0, ops.norms(Fa) + ops.norms(Fb))
        images = ops.apply(D, fs)
        for i in range(len(A)):
            s = scale[i]
            res = ops.cone(D[i], tol * s)
            img = images[i]
            f_used = fs
            if res.preserving:
                route["cone"] += 1
            else:
                route["sampled"] += 1
                img = np.column_stack([img, ops.apply(D[i:i + 1], res.witness[:, None])[0]])
                f_used = np.column_stack([fs, res.witness])
            viol = np.maximum(-img.real, np.abs(img.imag)) / s
            r = float(viol.max()) if viol.size else 0.0
            worst = max(worst, r)
            if r > tol and witness is None:
                j = int(np.argmax(viol.max(axis=0)))
                witness = {"x": A[i], "y": B[i], "f": f_used[:, j], "image": img[:, j]}
    axioms["triangle"] = AxiomResult("triangle", witness is None, x_samples, worst, witness, route=route)

    axioms["homogeneity"] = hom
    axioms["definiteness"] = _definiteness(F, X, fx, tol)
    return AxiomReport(F.descriptor, axioms, len(X), x_samples, seed, tol)
