"""Sampled verification of the metric consequences of an ``L(H)``-valued norm.

Covered here: subadditivity of ``||F(.)||``, the reverse triangle inequality
``||F(x) - F(y)|| <= ||F(x - y)||``, the linear continuity modulus of a
bounded norm at 0, and propagation of Cauchy sequences through ``F``
(completeness with respect to ``F``).

For a bounded ``F`` homogeneity already gives ``||F(x)|| <= M ||x||``, so
"continuous at 0" and "complete with respect to F" are certified together by
one Lipschitz chain::

    ||F(x_m) - F(x_k)|| <= ||F(x_m - x_k)|| <= M ||x_m - x_k||

No bounded norm that is discontinuous at 0 exists to test the converse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import numpy.typing as npt

from .exceptions import CauchySpecError
from .hilbert_norms import boundedness_estimate
from .reports import CheckReport
from .serialize import jsonable
from .spaces import OperatorValuedNorm

SLACK_TOL = 1e-9
EQUALITY_TOL = 1e-12
TAIL_TARGET = 1e-8
DEFAULT_RADII = tuple(10.0 ** -k for k in range(7))
MAX_SEQUENCE_LENGTH = 100
RESOLVABLE_DISTANCE = 1e-8


def _pairs(F: OperatorValuedNorm, n: int, seed: int | None) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    X = F.domain.random_vectors(rng, n).astype(np.complex128)
    Y = F.domain.random_vectors(rng, n).astype(np.complex128)
    return X, Y


def _norms_of(F: OperatorValuedNorm, X: np.ndarray) -> np.ndarray:
    return F.operator_norms(F.evaluate_many(X))


def check_norm_subadditivity(
    F: OperatorValuedNorm, pairs: int = 1000, seed: int | None = 0, tol: float = SLACK_TOL
) -> CheckReport:
    """``||F(x + y)|| <= ||F(x)|| + ||F(y)||`` on random pairs.

    The degenerate cases ``y = 0`` (equality) and ``y = x`` (where
    homogeneity forces ``||F(2x)|| = 2 ||F(x)||``) are measured on the same
    ``x`` samples and reported in ``details``.
    """
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    X, Y = _pairs(F, pairs, seed)
    nx, ny, nxy = _norms_of(F, X), _norms_of(F, Y), _norms_of(F, X + Y)
    slack = nx + ny - nxy
    scale = np.maximum(1.0, nx + ny)
    i = int(np.argmin(slack / scale))
    passed = bool(np.all(slack >= -tol * scale))
    witness = None if passed else {"x": X[i], "y": Y[i], "lhs": nxy[i], "rhs": nx[i] + ny[i]}

    zero_norm = F.operator_norm(F(np.zeros(F.domain.dim)))
    eq_zero = np.abs(nx + zero_norm - nx) / np.maximum(1.0, nx)
    eq_double = np.abs(_norms_of(F, 2 * X) - 2 * nx) / np.maximum(1.0, nx)
    details = {
        "tol": tol,
        "y_zero_max_residual": float(eq_zero.max()),
        "y_equal_x_max_residual": float(eq_double.max()),
    }
    passed = passed and details["y_zero_max_residual"] <= EQUALITY_TOL and details["y_equal_x_max_residual"] <= EQUALITY_TOL
    return CheckReport("norm_subadditivity", passed, pairs, float(slack[i]), witness, details)


def check_reverse_triangle(
    F: OperatorValuedNorm, pairs: int = 1000, seed: int | None = 0, tol: float = SLACK_TOL
) -> CheckReport:
    """``||F(x) - F(y)|| <= ||F(x - y)||`` on random pairs, plus ``x = y`` and ``y = 0``."""
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    X, Y = _pairs(F, pairs, seed)
    FX, FY = F.evaluate_many(X), F.evaluate_many(Y)
    lhs = F.operator_norms(FX - FY)
    rhs = _norms_of(F, X - Y)
    slack = rhs - lhs
    scale = np.maximum(1.0, rhs)
    i = int(np.argmin(slack / scale))
    passed = bool(np.all(slack >= -tol * scale))
    witness = None if passed else {"x": X[i], "y": Y[i], "lhs": lhs[i], "rhs": rhs[i]}

    nx = F.operator_norms(FX)
    F0 = F(np.zeros(F.domain.dim))
    same = F.operator_norms(FX - FX)
    zero_lhs = F.operator_norms(FX - F0[None])
    details = {
        "tol": tol,
        "x_equal_y_max_lhs": float(same.max()),
        "y_zero_max_residual": float((np.abs(zero_lhs - nx) / np.maximum(1.0, nx)).max()),
    }
    passed = passed and details["x_equal_y_max_lhs"] <= EQUALITY_TOL and details["y_zero_max_residual"] <= EQUALITY_TOL
    return CheckReport("reverse_triangle", passed, pairs, float(slack[i]), witness, details)


@dataclass
class ContinuityTable:
    """Sampled ``sup ||F(x)||`` on spheres of decreasing radius."""

    radii: np.ndarray
    moduli: np.ndarray
    bound: float
    samples_per_radius: int
    passed: bool
    worst_slack: float

    def to_dict(self) -> dict:
        return jsonable({
            "radii": self.radii,
            "moduli": self.moduli,
            "bound": self.bound,
            "samples_per_radius": self.samples_per_radius,
            "status": "pass" if self.passed else "fail",
            "worst_slack": self.worst_slack,
        })


def default_bound(F: OperatorValuedNorm, seed: int | None) -> float:
    """Bound estimate used by the certificates: 4000 sphere samples, 8 polished."""
    return boundedness_estimate(F, 4000, seed, polish=8)


def continuity_modulus(
    F: OperatorValuedNorm,
    radii: Sequence[float] = DEFAULT_RADII,
    samples_per_radius: int = 200,
    seed: int | None = 0,
    bound: float | None = None,
    tol: float = SLACK_TOL,
) -> ContinuityTable:
    """Sampled modulus of continuity at 0.

    Each entry is the largest ``||F(x)||`` over ``samples_per_radius`` random
    ``x`` with ``||x|| = r``. The table passes when every entry obeys
    ``modulus <= bound * r * (1 + tol) + tol``; ``bound`` defaults to
    :func:`default_bound`.
    """
    r = np.asarray(radii, dtype=float)
    if r.ndim != 1 or r.size == 0 or np.any(r <= 0) or np.any(np.diff(r) >= 0):
        raise ValueError("radii must be positive and strictly decreasing")
    if bound is None:
        bound = default_bound(F, seed)
    rng = np.random.default_rng(None if seed is None else seed + 7)
    moduli = np.empty_like(r)
    for i, radius in enumerate(r):
        U = F.domain.unit_sphere(rng, samples_per_radius)
        moduli[i] = _norms_of(F, radius * U).max()
    slack = bound * r * (1 + tol) + tol - moduli
    return ContinuityTable(r, moduli, float(bound), samples_per_radius,
                           bool(np.all(slack >= 0)), float(slack.min()))


@dataclass
class CauchySequenceSpec:
    """Recipe for a Cauchy sequence in the domain.

    * ``geometric``: ``x_n = x0 * ratio**n``, with
      ``||x_m - x_k|| <= ||x0|| ratio**min(m, k) / (1 - ratio)``.
    * ``convergent``: ``x_n = limit + (x0 - limit) * ratio**n * cos(n * theta)``,
      with ``||x_m - x_k|| <= 2 ||x0 - limit|| ratio**min(m, k)``.
    * ``custom``: explicit ``points``; accepted when the oscillation of the
      last half stays within ``1e-6 * max(1, max ||x_n||)``.
    """

    kind: str
    length: int = 24
    x0: np.ndarray | None = None
    ratio: float = 0.5
    limit: np.ndarray | None = None
    theta: float = 1.0
    points: np.ndarray | None = field(default=None, repr=False)

    def generate(self) -> np.ndarray:
        if self.kind == "custom":
            if self.points is None:
                raise CauchySpecError("custom sequence needs points")
            return np.asarray(self.points, dtype=np.complex128)
        if self.x0 is None:
            raise CauchySpecError(f"{self.kind} sequence needs x0")
        if not 0 < self.ratio < 1:
            raise CauchySpecError("ratio must lie in (0, 1)")
        if not 1 <= self.length <= MAX_SEQUENCE_LENGTH:
            raise CauchySpecError(f"length must lie in [1, {MAX_SEQUENCE_LENGTH}]")
        x0 = np.asarray(self.x0, dtype=np.complex128)
        n = np.arange(self.length)
        if self.kind == "geometric":
            return x0[None, :] * (self.ratio ** n)[:, None]
        if self.kind == "convergent":
            lim = np.zeros_like(x0) if self.limit is None else np.asarray(self.limit, dtype=np.complex128)
            w = self.ratio ** n * np.cos(n * self.theta)
            return lim[None, :] + (x0 - lim)[None, :] * w[:, None]
        raise CauchySpecError(f"unknown sequence kind {self.kind!r}")

    def modulus(self, norm_x0: float, index: int) -> float | None:
        """Stated bound on ``||x_m - x_k||`` for ``m, k >= index``."""
        if self.kind == "geometric":
            return norm_x0 * self.ratio ** index / (1 - self.ratio)
        if self.kind == "convergent":
            return 2 * norm_x0 * self.ratio ** index
        return None


def _anchor_norm(F: OperatorValuedNorm, spec: CauchySequenceSpec) -> float:
    x0 = np.asarray(spec.x0, dtype=np.complex128)
    if spec.kind == "convergent" and spec.limit is not None:
        x0 = x0 - np.asarray(spec.limit, dtype=np.complex128)
    return F.domain.norm(x0)


def validate_cauchy(F: OperatorValuedNorm, spec: CauchySequenceSpec) -> np.ndarray:
    """Generate the sequence and confirm it meets its own Cauchy bound."""
    xs = spec.generate()
    if xs.ndim != 2 or xs.shape[1] != F.domain.dim:
        raise CauchySpecError(f"sequence points must have length {F.domain.dim}")
    if len(xs) > MAX_SEQUENCE_LENGTH:
        raise CauchySpecError(f"at most {MAX_SEQUENCE_LENGTH} points are supported")
    m, k = np.triu_indices(len(xs), 1)
    dist = F.domain.norms(xs[m] - xs[k]) if len(m) else np.zeros(0)
    if spec.kind == "custom":
        half = len(xs) // 2
        tail = xs[half:]
        tm, tk = np.triu_indices(len(tail), 1)
        osc = float(F.domain.norms(tail[tm] - tail[tk]).max()) if len(tm) else 0.0
        scale = max(1.0, float(F.domain.norms(xs).max())) if len(xs) else 1.0
        if osc > 1e-6 * scale:
            raise CauchySpecError(f"custom sequence tail oscillation {osc:.3e} is not small")
        return xs
    a = _anchor_norm(F, spec)
    bound = np.array([spec.modulus(a, int(i)) for i in m])
    if np.any(dist > bound * (1 + 1e-12) + 1e-300):
        raise CauchySpecError("generated sequence violates its Cauchy bound")
    return xs


def cauchy_propagation(
    F: OperatorValuedNorm,
    spec: CauchySequenceSpec,
    bound: float | None = None,
    seed: int | None = 0,
    tol: float = SLACK_TOL,
) -> CheckReport:
    """Check that ``F`` carries a Cauchy sequence to a Cauchy sequence of operators.

    For every pair ``m < k`` both links of
    ``||F(x_m) - F(x_k)|| <= ||F(x_m - x_k)|| <= M ||x_m - x_k||`` are
    verified (relative tolerance ``tol``), with ``M`` the bound estimate.
    The worst ratio ``||F(x_m) - F(x_k)|| / ||x_m - x_k||`` is reported over
    pairs whose distance exceeds ``1e-8`` relative to the points' size. When
    the sequence's own modulus falls below ``1e-8 / max(1, M)`` at some index
    within its length, the image oscillation beyond that index must be below
    ``1e-8``.
    """
    xs = validate_cauchy(F, spec)
    if bound is None:
        bound = default_bound(F, seed)
    FX = F.evaluate_many(xs)
    m, k = np.triu_indices(len(xs), 1)
    if len(m) == 0:
        return CheckReport("cauchy_propagation", True, 0, 0.0, None, {"bound": bound})
    image = F.operator_norms(FX[m] - FX[k])
    diffs = xs[m] - xs[k]
    through = _norms_of(F, diffs)
    dom = F.domain.norms(diffs)

    slack1 = through - image
    slack2 = bound * dom * (1 + tol) - through
    ok1 = slack1 >= -tol * np.maximum(1.0, through)
    ok2 = slack2 >= 0
    # below this the image distance is rounding noise from the point magnitudes
    size = np.maximum(F.domain.norms(xs[m]), F.domain.norms(xs[k]))
    nz = dom > RESOLVABLE_DISTANCE * np.maximum(1.0, size)
    worst_ratio = float((image[nz] / dom[nz]).max()) if nz.any() else 0.0
    passed = bool(ok1.all() and ok2.all())
    witness = None
    if not passed:
        i = int(np.flatnonzero(~(ok1 & ok2))[0])
        witness = {"m": int(m[i]), "k": int(k[i]), "image_distance": image[i],
                   "norm_of_difference_image": through[i], "domain_distance": dom[i]}

    details: dict = {"bound": bound, "worst_ratio": worst_ratio, "kind": spec.kind, "length": len(xs)}
    if spec.kind != "custom":
        a = _anchor_norm(F, spec)
        target = TAIL_TARGET / max(1.0, bound)
        tail = next((i for i in range(len(xs)) if spec.modulus(a, i) <= target), None)
        details["tail_index"] = tail
        if tail is not None:
            sel = m >= tail
            osc = float(image[sel].max()) if sel.any() else 0.0
            details["tail_oscillation"] = osc
            if osc > TAIL_TARGET:
                passed = False
                witness = witness or {"tail_index": tail, "tail_oscillation": osc}
    return CheckReport("cauchy_propagation", passed, int(len(m)), float(min(slack1.min(), slack2.min())),
                       witness, details)


def cauchy_battery(F: OperatorValuedNorm, seed: int | None, geometric: int = 20,
                   convergent: int = 20, length: int = 24) -> list[CauchySequenceSpec]:
    """Seeded battery of geometric and convergent sequences in the domain of ``F``."""
    rng = np.random.default_rng(seed)
    specs = []
    for _ in range(geometric):
        x0 = F.domain.random_vectors(rng, 1)[0]
        specs.append(CauchySequenceSpec("geometric", length, x0=x0, ratio=float(rng.uniform(0.05, 0.6))))
    for _ in range(convergent):
        x0, lim = F.domain.random_vectors(rng, 2)
        specs.append(CauchySequenceSpec("convergent", length, x0=x0, limit=lim,
                                        ratio=float(rng.uniform(0.05, 0.6)),
                                        theta=float(rng.uniform(0.0, np.pi))))
    return specs


def completeness_certificate(
    F: OperatorValuedNorm,
    seed: int | None = 0,
    radii: Sequence[float] = DEFAULT_RADII,
    samples_per_radius: int = 200,
    geometric: int = 20,
    convergent: int = 20,
    length: int = 24,
    tol: float = SLACK_TOL,
) -> CheckReport:
    """Combined certificate that a bounded ``F`` is continuous at 0 and ``X`` is complete w.r.t. ``F``.

    Part (a) is the continuity table (``||F(x)|| <= M ||x||`` on spheres of
    every radius); part (b) runs :func:`cauchy_propagation` over a seeded
    battery of Cauchy sequences. Completeness is a statement about all
    Cauchy sequences; the report only claims the battery.
    """
    bound = default_bound(F, seed)
    table = continuity_modulus(F, radii, samples_per_radius, seed, bound=bound, tol=tol)
    battery_seed = None if seed is None else seed + 13
    results = [cauchy_propagation(F, s, bound=bound, tol=tol)
               for s in cauchy_battery(F, battery_seed, geometric, convergent, length)]
    failed = [i for i, r in enumerate(results) if not r.passed]
    passed = table.passed and not failed
    witness = None
    if not table.passed:
        witness = {"continuity": table.to_dict()}
    elif failed:
        witness = {"sequence": failed[0], "report": results[failed[0]].to_dict()}
    details = {
        "bound": bound,
        "continuity": table.to_dict(),
        "sequences": len(results),
        "sequences_failed": len(failed),
        "worst_ratio": max((r.details.get("worst_ratio", 0.0) for r in results), default=0.0),
        "pairs_checked": sum(r.checked for r in results),
        "scope": f"continuity on {len(table.radii)} radii; completeness on a battery of {len(results)} sequences",
    }
    worst = min([table.worst_slack] + [r.worst_slack for r in results])
    return CheckReport("completeness_certificate", passed, details["pairs_checked"], float(worst), witness, details)
