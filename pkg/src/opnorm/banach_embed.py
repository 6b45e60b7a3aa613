"""Isometric embedding of a finite-dimensional Banach space into ``C(K)``.

``K`` is a finite subset of the dual unit ball and ``b`` is sent to the
function ``phi -> phi(b)`` on ``K``. Because every ``phi`` has dual norm at
most one, ``max_K |phi(b)| <= ||b||`` always; equality needs ``K`` to contain
enough of the dual ball. For polyhedral norms the extreme points of the
dual ball suffice and the embedding is exact. For smooth norms only a
sampled ``K`` is possible and the isometry defect is measured (and, for the
Euclidean plane, bounded in closed form).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from .ck_norms import CKValuedNorm, FiniteCK
from .exceptions import DiscretizationError
from .serialize import jsonable, vector_to_json
from .spaces import NormedSpaceModel, diag_stack

MAX_L1_EXACT_DIM = 16
DUAL_NORM_TOL = 1e-9
CERTIFY_SAMPLES = 10_000
EXACT_TOL = 1e-12
# sampled covectors are pulled inside the dual sphere by a few ulps so that
# rounding in phi(b) can never make max |phi(b)| exceed ||b||
_INWARD = 1.0 - 8 * np.finfo(float).eps


@dataclass(eq=False)
class DualBallDiscretization:
    space: NormedSpaceModel
    functionals: np.ndarray
    kind: str
    guarantee: str
    defect_bound: float | None = None
    max_dual_norm: float | None = None

    @property
    def count(self) -> int:
        return self.functionals.shape[0]

    def to_json(self) -> dict[str, Any]:
        return jsonable({
            "space": self.space.label,
            "kind": self.kind,
            "guarantee": self.guarantee,
            "defect_bound": self.defect_bound,
            "functionals": [vector_to_json(phi) for phi in self.functionals],
        })


def _sign_covectors(n: int) -> np.ndarray:
    return np.array(list(itertools.product([1.0, -1.0], repeat=n)))


def _coordinate_covectors(n: int) -> np.ndarray:
    out = np.zeros((2 * n, n))
    for i in range(n):
        out[2 * i, i] = 1.0
        out[2 * i + 1, i] = -1.0
    return out


def discretize_dual_ball(
    space: NormedSpaceModel,
    strategy: str = "exact",
    count: int = 360,
    seed: int | None = 0,
) -> DualBallDiscretization:
    """Finite subset of the dual unit ball of ``space``.

    ``strategy="exact"`` enumerates the dual extreme points: all ``2^n`` sign
    covectors for ``l1`` (real, ``n <= 16``), the ``2n`` signed coordinate
    functionals for ``l_inf``, and the defining functionals of a polytope
    norm. ``strategy="sampled"`` draws ``count`` covectors on the dual unit
    sphere; for the real Euclidean plane they are equally spaced (with a
    seeded rotation) and carry the guarantee
    ``||b|| - max_K |phi(b)| <= (1 - cos(pi / count)) ||b||``. Sampled
    covectors sit 8 ulps inside the dual sphere, so the measured defect is
    never negative through rounding.
    """
    n = space.dim
    if n < 1:
        raise DiscretizationError("space must have dimension >= 1")
    if strategy == "exact":
        if space.kind == "p" and space.p == 1:
            if space.field != "real":
                raise DiscretizationError("complex l1 has no finite set of dual extreme points")
            if n > MAX_L1_EXACT_DIM:
                raise DiscretizationError(f"exact l1 enumeration limited to dim <= {MAX_L1_EXACT_DIM}")
            phi = _sign_covectors(n)
        elif space.kind == "p" and np.isinf(space.p):
            phi = _coordinate_covectors(n)
        elif space.kind == "polytope":
            phi = np.array(space.functionals)
        else:
            raise DiscretizationError(f"no extreme-point enumeration known for {space.label}")
        return DualBallDiscretization(space, phi, "exact-extreme-points", "exact", 0.0, 1.0)

    if strategy != "sampled":
        raise DiscretizationError(f"unknown strategy {strategy!r}")
    if count < 1:
        raise DiscretizationError("count must be >= 1")
    rng = np.random.default_rng(seed)
    if space.kind == "p" and space.p == 2 and n == 2 and space.field == "real":
        theta = rng.uniform(0, 2 * np.pi / count) + 2 * np.pi * np.arange(count) / count
        phi = _INWARD * np.column_stack([np.cos(theta), np.sin(theta)])
        return DualBallDiscretization(space, phi, "sampled", "defect-bound", float(1 - np.cos(np.pi / count)), 1.0)
    raw = space.gaussian(rng, count)
    dn = np.array([_dual_norm(space, v, rng) for v in raw])
    phi = _INWARD * raw / dn[:, None]
    return DualBallDiscretization(space, phi, "sampled", "none", None, 1.0)


def _dual_norm(space: NormedSpaceModel, phi: np.ndarray, rng: np.random.Generator,
               samples: int = CERTIFY_SAMPLES) -> float:
    exact = space.dual_norm(phi)
    if exact is not None:
        return exact
    # lower bound from sampled maximization on the primal sphere
    U = space.unit_sphere(rng, samples)
    return float(np.abs(U @ phi).max())


def from_functionals(
    space: NormedSpaceModel,
    functionals: npt.ArrayLike,
    seed: int | None = 0,
    samples: int = CERTIFY_SAMPLES,
) -> DualBallDiscretization:
    """Wrap user-supplied covectors after certifying ``||phi||_* <= 1 + 1e-9``.

    Each covector is maximized over ``samples`` random unit vectors of the
    space; where the dual norm has a closed form (p-norms) or an exact
    linear-programming value (polytope norms) that value is checked too.
    """
    phi = np.atleast_2d(np.asarray(functionals))
    if phi.shape[1] != space.dim:
        raise DiscretizationError(f"functionals must have length {space.dim}")
    rng = np.random.default_rng(seed)
    U = space.unit_sphere(rng, samples)
    sampled = np.abs(U @ phi.T).max(axis=0)
    exact = [space.dual_norm(v) for v in phi]
    worst = 0.0
    for i, (s, e) in enumerate(zip(sampled, exact)):
        value = max(s, e if e is not None else 0.0)
        worst = max(worst, value)
        if value > 1 + DUAL_NORM_TOL:
            raise DiscretizationError(f"functional {i} has dual norm {value:.6g} > 1")
    return DualBallDiscretization(space, phi, "user-supplied", "none", None, float(worst))


def beta_embed(disc: DualBallDiscretization, b: npt.ArrayLike) -> np.ndarray:
    """The function ``phi_i -> phi_i(b)`` on ``K``."""
    b = np.asarray(b)
    if b.ndim != 1 or b.shape[0] != disc.space.dim:
        raise ValueError(f"expected a vector of length {disc.space.dim}")
    return disc.functionals @ b


def dual_ball_norm(disc: DualBallDiscretization) -> CKValuedNorm:
    """``b -> M_{|beta b|}``, multiplication by ``|phi_i(b)|`` on ``C(K)``."""
    ck = FiniteCK(disc.count, [f"phi{i}" for i in range(disc.count)])
    return CKValuedNorm(
        domain=disc.space,
        size=disc.count,
        evaluator=lambda b: np.diag(np.abs(disc.functionals @ b)).astype(np.complex128),
        descriptor=f"dual_ball_norm({disc.space.label}, {disc.kind}, m={disc.count})",
        batch_evaluator=lambda B: diag_stack(np.abs(B @ disc.functionals.T)),
        diagonal_evaluator=lambda B: np.abs(B @ disc.functionals.T),
        ck=ck,
    )


@dataclass
class EmbeddingReport:
    """Measured isometry defect ``||b|| - ||F(b)||`` over sampled ``b``."""

    samples: int
    max_defect: float
    min_defect: float
    max_relative_defect: float
    defect_bound: float | None
    guarantee: str
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return jsonable({
            "samples": self.samples,
            "max_defect": self.max_defect,
            "min_defect": self.min_defect,
            "max_relative_defect": self.max_relative_defect,
            "defect_bound": self.defect_bound,
            "guarantee": self.guarantee,
            "status": "pass" if self.passed else "fail",
            "note": "K is a finite subset of the dual unit ball; the defect measures what the finite K loses",
        })


def isometry_defect(disc: DualBallDiscretization, samples: int = 1000, seed: int | None = 0) -> EmbeddingReport:
    """Measure ``||b|| - max_i |phi_i(b)|`` on random ``b``.

    Passing requires ``defect >= -1e-12`` everywhere (no functional may beat
    the norm) and, for exact discretizations, ``defect <= 1e-12``; with a
    defect-bound guarantee, ``defect <= bound * ||b||``. Without a guarantee
    only the one-sided condition is enforced.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    B = disc.space.random_vectors(rng, samples)
    nb = disc.space.norms(B)
    fb = np.abs(B @ disc.functionals.T).max(axis=1)
    defect = nb - fb
    rel = defect / np.where(nb > 0, nb, 1.0)
    passed = bool(defect.min() >= -EXACT_TOL)
    if disc.guarantee == "exact":
        passed = passed and bool(defect.max() <= EXACT_TOL)
    elif disc.guarantee == "defect-bound":
        passed = passed and bool(np.all(defect <= disc.defect_bound * nb + EXACT_TOL))
    return EmbeddingReport(samples, float(defect.max()), float(defect.min()), float(rel.max()),
                           disc.defect_bound, disc.guarantee, passed)
