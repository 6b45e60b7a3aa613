"""Gelfand theory for commutative *-algebras of matrices.

The algebra generated by commuting normal matrices (together with the
identity and adjoints) is modelled by its minimal spectral projections
``P_1, ..., P_c``: every element is ``sum_i c_i P_i``. Its characters are
the evaluations ``f -> <f u_i, u_i>`` at a common eigenvector ``u_i`` from
each joint eigenspace, and the Gelfand transform sends ``f`` to the vector
of its character values. None of the defining identities are assumed; the
``check_*`` functions measure them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
import numpy.typing as npt

from .ck_norms import CKValuedNorm, FiniteCK, op_norm_sup
from .exceptions import NotInAlgebraError
from .numkernel import SIMDIAG_TOL, as_operator, simultaneous_diagonalize, spectral_norm, spectral_norms
from .reports import CheckReport
from .serialize import matrix_to_json, vector_to_json
from .spaces import diag_stack, lp_space

MERGE_TOL = 1e-8
MEMBERSHIP_TOL = 1e-8
IDENTITY_TOL = 1e-9


@dataclass(eq=False)
class CommutativeStarAlgebra:
    ambient_dim: int
    generators: list[np.ndarray]
    diagonalizing_basis: np.ndarray
    classes: list[list[int]]
    joint_spectrum: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.classes)

    @property
    def basis_elements(self) -> list[np.ndarray]:
        U = self.diagonalizing_basis
        return [U[:, c] @ U[:, c].conj().T for c in self.classes]

    def element(self, coeffs: npt.ArrayLike) -> np.ndarray:
        """``sum_i coeffs[i] P_i``."""
        c = np.asarray(coeffs, dtype=np.complex128).ravel()
        if c.shape[0] != self.dim:
            raise ValueError(f"expected {self.dim} coefficients")
        U = self.diagonalizing_basis
        diag = np.empty(self.ambient_dim, dtype=np.complex128)
        for ci, cls in zip(c, self.classes):
            diag[cls] = ci
        return (U * diag) @ U.conj().T

    def projection_residual(self, f: npt.ArrayLike) -> tuple[np.ndarray, float]:
        """Coordinates of the orthogonal projection of ``f`` onto the algebra, and the residual norm."""
        f = as_operator(f)
        U = self.diagonalizing_basis
        D = U.conj().T @ f @ U
        coeffs = np.array([np.trace(D[np.ix_(c, c)]) / len(c) for c in self.classes])
        return coeffs, spectral_norm(f - self.element(coeffs))

    def coordinates(self, f: npt.ArrayLike, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        coeffs, res = self.projection_residual(f)
        if res > tol * max(1.0, spectral_norm(f)):
            raise NotInAlgebraError(f"operator is not in the algebra (residual {res:.3e})", res)
        return coeffs

    def contains(self, f: npt.ArrayLike, tol: float = MEMBERSHIP_TOL) -> bool:
        _, res = self.projection_residual(f)
        return res <= tol * max(1.0, spectral_norm(f))

    def random_elements(self, rng: np.random.Generator, n: int) -> np.ndarray:
        C = rng.standard_normal((n, self.dim)) + 1j * rng.standard_normal((n, self.dim))
        return np.array([self.element(c) for c in C])


def _merge_slots(values: np.ndarray, tol: float) -> list[list[int]]:
    """Union slots whose joint eigenvalue tuples agree within ``tol`` (max-abs)."""
    d = values.shape[0]
    parent = list(range(d))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(d):
        for j in range(i + 1, d):
            if np.max(np.abs(values[i] - values[j])) <= tol:
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(d):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def build_algebra(
    generators: Sequence[npt.ArrayLike],
    tol: float = SIMDIAG_TOL,
    seed: int | None = 0,
    merge_tol: float = MERGE_TOL,
) -> CommutativeStarAlgebra:
    """Unital *-algebra generated by pairwise commuting normal matrices.

    Slots of the common eigenbasis with equal joint eigenvalue tuples (within
    ``merge_tol``) form one class; classes are ordered lexicographically by
    their joint eigenvalues (real part, then imaginary part).
    """
    gens = [as_operator(G) for G in generators]
    U, diags = simultaneous_diagonalize(gens, tol=tol, seed=seed)
    d = U.shape[0]
    values = np.column_stack(diags) if d else np.zeros((0, len(gens)), dtype=np.complex128)
    classes = _merge_slots(values, merge_tol)
    spectrum = np.array([values[c].mean(axis=0) for c in classes]).reshape(len(classes), len(gens))
    order = sorted(range(len(classes)),
                   key=lambda i: tuple(v for z in spectrum[i] for v in (round(z.real, 7), round(z.imag, 7))))
    return CommutativeStarAlgebra(
        ambient_dim=d,
        generators=gens,
        diagonalizing_basis=U,
        classes=[classes[i] for i in order],
        joint_spectrum=spectrum[order],
    )


@dataclass(eq=False)
class Character:
    """Evaluation at the representative eigenvector ``u`` of one joint eigenspace."""

    index: int
    vector: np.ndarray

    def __call__(self, f: npt.ArrayLike) -> complex:
        f = as_operator(f)
        return complex(self.vector.conj() @ f @ self.vector)


def characters(algebra: CommutativeStarAlgebra, tol: float = MERGE_TOL) -> list[Character]:
    """One character per joint-spectrum class, evaluated at the class's first slot.

    Raises ``ValueError`` when slots inside a class disagree on a generator by
    more than ``tol``; rebuild the algebra with another seed or a looser
    ``merge_tol`` in that case.
    """
    U = algebra.diagonalizing_basis
    out = []
    for i, cls in enumerate(algebra.classes):
        for G in algebra.generators:
            vals = np.einsum("ij,ik,kj->j", U[:, cls].conj(), G, U[:, cls])
            if np.max(np.abs(vals - vals[0])) > tol * max(1.0, spectral_norm(G)):
                raise ValueError(f"class {i} is degenerate: its slots disagree on a generator")
        out.append(Character(i, U[:, cls[0]].copy()))
    return out


def gelfand_transform(algebra: CommutativeStarAlgebra, f: npt.ArrayLike,
                      chars: Sequence[Character] | None = None) -> np.ndarray:
    """``(Gamma f)_i = phi_i(f)``; ``f`` must lie in the algebra."""
    f = as_operator(f)
    algebra.coordinates(f)
    chars = characters(algebra) if chars is None else chars
    return np.array([phi(f) for phi in chars], dtype=np.complex128)


def character_table(algebra: CommutativeStarAlgebra) -> dict[str, Any]:
    """JSON export: the generators, and each character's values on them."""
    chars = characters(algebra)
    return {
        "generators": [matrix_to_json(G) for G in algebra.generators],
        "characters": {str(phi.index): vector_to_json([phi(G) for G in algebra.generators]) for phi in chars},
    }


def _transform_many(chars: Sequence[Character], F: np.ndarray) -> np.ndarray:
    V = np.column_stack([phi.vector for phi in chars])
    return np.einsum("ij,nik,kj->nj", V.conj(), F, V)


def check_characters(algebra: CommutativeStarAlgebra, pairs: int = 100, seed: int | None = 0,
                     tol: float = 1e-9) -> CheckReport:
    """``phi(1) = 1`` and ``|phi(fg) - phi(f) phi(g)| <= tol * max(1, ||f|| ||g||)`` for every character."""
    chars = characters(algebra)
    rng = np.random.default_rng(seed)
    eye = np.eye(algebra.ambient_dim)
    unit = np.array([abs(phi(eye) - 1) for phi in chars])
    A, B = algebra.random_elements(rng, pairs), algebra.random_elements(rng, pairs)
    GA, GB, GAB = _transform_many(chars, A), _transform_many(chars, B), _transform_many(chars, A @ B)
    scale = np.maximum(1.0, spectral_norms(A) * spectral_norms(B))[:, None]
    res = np.abs(GAB - GA * GB) / scale
    worst = float(res.max()) if res.size else 0.0
    passed = bool(unit.max() <= IDENTITY_TOL and worst <= tol)
    witness = None
    if not passed:
        if unit.max() > IDENTITY_TOL:
            witness = {"character": int(np.argmax(unit)), "phi_of_identity_error": float(unit.max())}
        else:
            n, j = np.unravel_index(np.argmax(res), res.shape)
            witness = {"character": int(j), "f": A[n], "g": B[n], "residual": float(res[n, j])}
    details = {"characters": len(chars), "identity_max_error": float(unit.max()), "tol": tol}
    return CheckReport("characters", passed, pairs * len(chars), -worst, witness, details)


def check_homomorphism(algebra: CommutativeStarAlgebra, pairs: int = 100, seed: int | None = 0,
                       tol: float = 1e-9) -> CheckReport:
    """``Gamma(f + g) = Gamma f + Gamma g`` and ``Gamma(fg) = Gamma f * Gamma g`` entrywise."""
    chars = characters(algebra)
    rng = np.random.default_rng(seed)
    A, B = algebra.random_elements(rng, pairs), algebra.random_elements(rng, pairs)
    GA, GB = _transform_many(chars, A), _transform_many(chars, B)
    scale = np.maximum(1.0, spectral_norms(A) * spectral_norms(B))[:, None]
    add = np.abs(_transform_many(chars, A + B) - GA - GB) / scale
    mul = np.abs(_transform_many(chars, A @ B) - GA * GB) / scale
    worst = float(max(add.max(), mul.max()))
    passed = worst <= tol
    witness = None
    if not passed:
        n = int(np.argmax(np.maximum(add, mul).max(axis=1)))
        witness = {"f": A[n], "g": B[n], "additive_residual": float(add[n].max()),
                   "multiplicative_residual": float(mul[n].max())}
    return CheckReport("homomorphism", passed, pairs, -worst, witness, {"tol": tol})


def check_contractive(algebra: CommutativeStarAlgebra, samples: int = 200, seed: int | None = 0,
                      tol: float = 1e-9) -> CheckReport:
    """``||Gamma f||_inf <= ||f|| + tol`` on random algebra elements.

    ``details["equality_max_residual"]`` records ``| ||Gamma f||_inf - ||f|| |``;
    every element here is normal, so that should vanish too.
    """
    chars = characters(algebra)
    rng = np.random.default_rng(seed)
    F = np.concatenate([algebra.random_elements(rng, samples),
                        np.eye(algebra.ambient_dim)[None], np.zeros((1, algebra.ambient_dim, algebra.ambient_dim))])
    sup = np.abs(_transform_many(chars, F)).max(axis=1)
    nrm = spectral_norms(F)
    slack = nrm + tol - sup
    passed = bool(np.all(slack >= 0))
    i = int(np.argmin(slack))
    witness = None if passed else {"f": F[i], "transform_sup": float(sup[i]), "norm": float(nrm[i])}
    details = {"tol": tol, "equality_max_residual": float(np.abs(sup - nrm).max())}
    return CheckReport("contractive", passed, len(F), float(slack.min() - tol), witness, details)


def check_isometric(algebra: CommutativeStarAlgebra, samples: int = 200, seed: int | None = 0,
                    tol: float = 1e-9) -> CheckReport:
    """Isometry ``||Gamma f||_inf = ||f||`` plus surjectivity onto functions on the characters.

    Surjectivity: for random target vectors ``v`` the element
    ``sum_i v_i P_i`` must have transform ``v`` within ``tol``.
    """
    chars = characters(algebra)
    rng = np.random.default_rng(seed)
    F = algebra.random_elements(rng, samples)
    sup = np.abs(_transform_many(chars, F)).max(axis=1)
    nrm = spectral_norms(F)
    iso = np.abs(sup - nrm) / np.maximum(1.0, nrm)
    targets = rng.standard_normal((samples, algebra.dim)) + 1j * rng.standard_normal((samples, algebra.dim))
    recon = _transform_many(chars, np.array([algebra.element(v) for v in targets]))
    onto = np.abs(recon - targets).max(axis=1)
    worst = float(max(iso.max(), onto.max()))
    passed = worst <= tol
    witness = None
    if iso.max() > tol:
        i = int(np.argmax(iso))
        witness = {"f": F[i], "transform_sup": float(sup[i]), "norm": float(nrm[i])}
    elif onto.max() > tol:
        i = int(np.argmax(onto))
        witness = {"target": targets[i], "attained": recon[i]}
    details = {"tol": tol, "isometry_max_residual": float(iso.max()),
               "surjectivity_max_residual": float(onto.max())}
    return CheckReport("isometric", passed, 2 * samples, -worst, witness, details)


def multiplicative_ovnorm(algebra: CommutativeStarAlgebra) -> CKValuedNorm:
    """``b -> M_{|Gamma b|}`` on ``C`` of the character set.

    The domain is the algebra in coordinates over its spectral projections;
    since the projections are orthogonal, ``||sum c_i P_i|| = max |c_i|``
    and the domain carries the sup norm on coordinates. Use
    :meth:`CommutativeStarAlgebra.coordinates` to evaluate at a matrix.
    """
    chars = characters(algebra)
    ck = FiniteCK(algebra.dim, [f"phi{i}" for i in range(algebra.dim)])
    domain = lp_space(algebra.dim, np.inf, field="complex")
    domain.label = f"commutative *-algebra of dimension {algebra.dim} in M_{algebra.ambient_dim}"

    def evaluator(c: np.ndarray) -> np.ndarray:
        b = algebra.element(c)
        return np.diag(np.abs([phi(b) for phi in chars])).astype(np.complex128)

    def diagonals(C: np.ndarray) -> np.ndarray:
        elems = np.array([algebra.element(c) for c in C])
        return np.abs(_transform_many(chars, elems))

    return CKValuedNorm(domain=domain, size=algebra.dim, evaluator=evaluator,
                        descriptor=f"multiplicative_ovnorm(dim={algebra.dim})",
                        batch_evaluator=lambda C: diag_stack(diagonals(C)),
                        diagonal_evaluator=diagonals, ck=ck)


def check_multiplicative(algebra: CommutativeStarAlgebra, F: CKValuedNorm | None = None,
                         pairs: int = 100, seed: int | None = 0, tol: float = 1e-9) -> CheckReport:
    """``||F(ab) - F(a) F(b)|| <= tol`` (sup-induced norm) and ``||F(b)|| = ||b||`` on random pairs."""
    F = multiplicative_ovnorm(algebra) if F is None else F
    rng = np.random.default_rng(seed)
    A, B = algebra.random_elements(rng, pairs), algebra.random_elements(rng, pairs)
    res = np.empty(pairs)
    iso = np.empty(pairs)
    for i in range(pairs):
        ca, cb = algebra.coordinates(A[i]), algebra.coordinates(B[i])
        Fa, Fb = F(ca), F(cb)
        res[i] = op_norm_sup(F(algebra.coordinates(A[i] @ B[i])) - Fa @ Fb)
        iso[i] = abs(op_norm_sup(Fa) - spectral_norm(A[i])) / max(1.0, spectral_norm(A[i]))
    worst = float(max(res.max(), iso.max()))
    passed = worst <= tol
    witness = None
    if not passed:
        i = int(np.argmax(np.maximum(res, iso)))
        witness = {"a": A[i], "b": B[i], "multiplicative_residual": float(res[i]), "norm_residual": float(iso[i])}
    details = {"tol": tol, "multiplicative_max_residual": float(res.max()), "norm_max_residual": float(iso.max())}
    return CheckReport("multiplicative", passed, pairs, -worst, witness, details)


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_commuting_generators(rng: np.random.Generator, d: int, count: int = 1,
                                distinct: int | None = None) -> list[np.ndarray]:
    """``count`` commuting normal matrices ``U diag(v_j) U^H`` sharing a random unitary.

    Each generator takes ``distinct`` (random if None) complex eigenvalues,
    assigned to slots at random, so repeated eigenvalues are common.
    """
    U = random_unitary(rng, d)
    gens = []
    for _ in range(count):
        k = int(rng.integers(1, d + 1)) if distinct is None else distinct
        vals = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        slots = np.concatenate([np.arange(k), rng.integers(0, k, size=d - k)])[:d]
        rng.shuffle(slots)
        gens.append((U * vals[slots]) @ U.conj().T)
    return gens
