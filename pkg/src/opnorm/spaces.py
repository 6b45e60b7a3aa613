"""Finite-dimensional normed spaces and the operator-valued norm base type."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, ClassVar

import numpy as np
import numpy.typing as npt


def _conjugate_exponent(p: float) -> float:
    if p == 1:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1.0)


@dataclass(eq=False)
class NormedSpaceModel:
    """``K^dim`` (``K`` real or complex) with a norm oracle.

    ``kind`` selects the oracle:

    * ``"p"`` -- the usual p-norm, ``1 <= p <= inf``;
    * ``"polytope"`` -- ``max_j |<phi_j, x>|`` where the rows of
      ``functionals`` are the extreme points of the (symmetric) dual ball;
    * ``"functional-sup"`` -- the same formula for an arbitrary spanning
      family of functionals, with no exactness claim about the dual ball.

    Functionals act bilinearly, ``<phi, x> = sum_i phi_i x_i``.
    """

    dim: int
    kind: str = "p"
    p: float = 2.0
    functionals: np.ndarray | None = None
    field: str = "complex"
    label: str = ""

    KINDS: ClassVar[tuple[str, ...]] = ("p", "polytope", "functional-sup")

    def __post_init__(self) -> None:
        if int(self.dim) != self.dim or self.dim < 0:
            raise ValueError("dim must be a nonnegative integer")
        self.dim = int(self.dim)
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.field not in ("real", "complex"):
            raise ValueError("field must be 'real' or 'complex'")
        if self.kind == "p":
            self.p = float(self.p)
            if not self.p >= 1:
                raise ValueError("p must lie in [1, inf]")
        else:
            if self.functionals is None:
                raise ValueError(f"{self.kind} norm requires functionals")
            phi = np.atleast_2d(np.asarray(self.functionals))
            phi = phi.astype(np.float64 if np.isrealobj(phi) else np.complex128)
            if phi.shape[1] != self.dim:
                raise ValueError("functionals must have dim columns")
            if self.dim and np.linalg.matrix_rank(phi) < self.dim:
                raise ValueError("functionals do not separate points: the norm would be degenerate")
            self.functionals = phi
        if not self.label:
            self.label = self._default_label()

    def _default_label(self) -> str:
        if self.kind == "p":
            p = "inf" if np.isinf(self.p) else f"{self.p:g}"
            return f"l{p}({self.dim})"
        return f"{self.kind}({self.dim}, {len(self.functionals)} functionals)"

    @property
    def dtype(self) -> type:
        return np.float64 if self.field == "real" else np.complex128

    def norm(self, x: npt.ArrayLike) -> float:
        return float(self.norms(np.asarray(x)[None, :])[0])

    def norms(self, X: npt.ArrayLike) -> np.ndarray:
        """Norms of the rows of ``X``."""
        X = np.asarray(X)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise ValueError(f"expected vectors of length {self.dim}")
        if self.dim == 0:
            return np.zeros(X.shape[0])
        if self.kind == "p":
            return np.linalg.norm(X, ord=self.p, axis=1)
        return np.max(np.abs(X @ self.functionals.T), axis=1)

    def dual_norm(self, phi: npt.ArrayLike) -> float | None:
        """Exact dual norm of a covector, or ``None`` when no closed form is known."""
        phi = np.asarray(phi).ravel()
        if self.kind == "p":
            return float(np.linalg.norm(phi, ord=_conjugate_exponent(self.p)))
        if self.kind == "polytope" and self.field == "real" and np.isrealobj(phi):
            return _polytope_dual_norm(self.functionals, phi)
        return None

    def random_vectors(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Gaussian directions with log-uniform magnitudes in ``[1e-2, 1e2]``."""
        X = self.gaussian(rng, n)
        nrm = self.norms(X)
        nrm[nrm == 0] = 1.0
        mags = 10.0 ** rng.uniform(-2.0, 2.0, size=n)
        return X / nrm[:, None] * mags[:, None]

    def unit_sphere(self, rng: np.random.Generator, n: int) -> np.ndarray:
        X = self.gaussian(rng, n)
        nrm = self.norms(X)
        nrm[nrm == 0] = 1.0
        return X / nrm[:, None]

    def gaussian(self, rng: np.random.Generator, n: int) -> np.ndarray:
        X = rng.standard_normal((n, self.dim))
        if self.field == "complex":
            X = X + 1j * rng.standard_normal((n, self.dim))
        return X

    def random_scalars(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.field == "real":
            return rng.standard_normal(n) * 2.0
        return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * 2.0


def _polytope_dual_norm(extremes: np.ndarray, phi: np.ndarray) -> float:
    """Gauge of ``phi`` w.r.t. ``conv(+-extremes)``, solved as a linear program."""
    from scipy.optimize import linprog

    m = extremes.shape[0]
    # phi = sum_j (a_j - b_j) e_j, minimize sum(a + b) with a, b >= 0
    A_eq = np.hstack([extremes.T, -extremes.T])
    res = linprog(np.ones(2 * m), A_eq=A_eq, b_eq=phi, bounds=(0, None), method="highs")
    if res.status != 0:
        return float("inf")
    return float(res.fun)


def lp_space(dim: int, p: float = 2.0, field: str = "complex") -> NormedSpaceModel:
    return NormedSpaceModel(dim=dim, kind="p", p=p, field=field)


def polytope_space(dual_extreme_points: npt.ArrayLike, field: str = "real", label: str = "") -> NormedSpaceModel:
    phi = np.atleast_2d(np.asarray(dual_extreme_points))
    return NormedSpaceModel(dim=phi.shape[1], kind="polytope", functionals=phi, field=field, label=label)


def functional_sup_space(functionals: npt.ArrayLike, field: str = "complex", label: str = "") -> NormedSpaceModel:
    phi = np.atleast_2d(np.asarray(functionals))
    return NormedSpaceModel(dim=phi.shape[1], kind="functional-sup", functionals=phi, field=field, label=label)


@dataclass(eq=False)
class OperatorValuedNorm:
    """A map from a normed space into square operators.

    Subclasses fix the codomain: positive operators on a Hilbert space or
    cone-preserving operators on a finite ``C(K)``.
    """

    domain: NormedSpaceModel
    size: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    descriptor: str = ""
    # optional vectorized form of ``evaluator``: (n, dim) -> (n, size, size)
    batch_evaluator: Callable[[np.ndarray], np.ndarray] | None = None
    # set only when every value is a diagonal operator: (n, dim) -> (n, size) diagonals
    diagonal_evaluator: Callable[[np.ndarray], np.ndarray] | None = None

    codomain: ClassVar[str] = ""

    def __call__(self, x: npt.ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128).ravel()
        if x.shape[0] != self.domain.dim:
            raise ValueError(f"expected a vector of length {self.domain.dim}, got {x.shape[0]}")
        A = np.asarray(self.evaluator(x), dtype=np.complex128)
        if A.shape != (self.size, self.size):
            raise ValueError(f"evaluator returned shape {A.shape}, expected {(self.size, self.size)}")
        return A

    def evaluate_many(self, X: npt.ArrayLike) -> np.ndarray:
        X = np.asarray(X, dtype=np.complex128)
        if X.ndim != 2 or X.shape[1] != self.domain.dim:
            raise ValueError(f"expected vectors of length {self.domain.dim}")
        if self.batch_evaluator is not None:
            out = np.asarray(self.batch_evaluator(X), dtype=np.complex128)
            if out.shape != (X.shape[0], self.size, self.size):
                raise ValueError(f"batch evaluator returned shape {out.shape}")
            return out
        out = np.empty((X.shape[0], self.size, self.size), dtype=np.complex128)
        for i, x in enumerate(X):
            out[i] = self(x)
        return out

    def diagonals_many(self, X: npt.ArrayLike) -> np.ndarray:
        if self.diagonal_evaluator is None:
            raise TypeError(f"{self.descriptor or 'this norm'} has no diagonal form")
        X = np.asarray(X, dtype=np.complex128)
        out = np.asarray(self.diagonal_evaluator(X), dtype=np.complex128)
        if out.shape != (X.shape[0], self.size):
            raise ValueError(f"diagonal evaluator returned shape {out.shape}")
        return out

    def operator_norm(self, A: npt.ArrayLike) -> float:
        return float(self.operator_norms(np.asarray(A)[None])[0])

    def operator_norms(self, stack: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def value_norm(self, x: npt.ArrayLike) -> float:
        """``||F(x)||`` in the codomain's operator norm."""
        return self.operator_norm(self(x))


def diag_stack(V: np.ndarray) -> np.ndarray:
    """Stack of diagonal matrices from the rows of ``V``."""
    n, k = V.shape
    out = np.zeros((n, k, k), dtype=np.complex128)
    idx = np.arange(k)
    out[:, idx, idx] = V
    return out
