"""Structured pass/fail results shared by the checkers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .serialize import jsonable


@dataclass
class AxiomResult:
    """Outcome of one axiom over all samples.

    ``worst_residual`` is the most adverse measured quantity, normalized so
    that the axiom holds iff it is at most the report's ``tol`` (for example
    the negated smallest eigenvalue of ``F(x)`` over ``max(1, ||F(x)||)``).
    Definiteness is the exception: its residual is the size of ``F(0)`` and
    the smallest ``||F(x)|| / ||x||`` ratio is kept in ``details``. A failing
    result always carries a witness that reproduces the violation.
    """

    name: str
    passed: bool
    checked: int
    worst_residual: float
    witness: dict[str, Any] | None = None
    route: dict[str, int] | None = None
    details: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        out = {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "checked": self.checked,
            "worst_residual": self.worst_residual,
            "witness": self.witness,
        }
        if self.route is not None:
            out["route"] = self.route
        if self.details is not None:
            out["details"] = self.details
        return jsonable(out)


@dataclass
class AxiomReport:
    descriptor: str
    axioms: dict[str, AxiomResult]
    sample_count: int
    pair_count: int
    seed: int | None
    tol: float

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.axioms.values())

    def failures(self) -> list[str]:
        return [name for name, a in self.axioms.items() if not a.passed]

    def to_dict(self) -> dict[str, Any]:
        return jsonable(
            {
                "descriptor": self.descriptor,
                "status": "pass" if self.passed else "fail",
                "claim": f"passed on {self.sample_count} samples and {self.pair_count} pairs"
                if self.passed
                else f"violated: {', '.join(self.failures())}",
                "sample_count": self.sample_count,
                "pair_count": self.pair_count,
                "seed": self.seed,
                "tol": self.tol,
                "axioms": {k: v.to_dict() for k, v in self.axioms.items()},
            }
        )


@dataclass
class CheckReport:
    """Result of a sampled inequality or identity check.

    ``worst_slack`` is the smallest observed ``rhs - lhs``. Small negative
    values are roundoff and pass as long as they stay within the tolerance
    recorded in ``details``.
    """

    name: str
    passed: bool
    checked: int
    worst_slack: float
    witness: dict[str, Any] | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return jsonable(
            {
                "name": self.name,
                "status": "pass" if self.passed else "fail",
                "checked": self.checked,
                "worst_slack": self.worst_slack,
                "witness": self.witness,
                "details": self.details,
            }
        )
