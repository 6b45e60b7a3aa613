"""Verification suites run by the command-line harness.

A suite takes its parsed config entry and a seed, builds whatever norm or
algebra it needs, runs the relevant checkers and returns a list of named
check results. Parsing validates names and parameters up front so a bad
config fails before anything runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from . import analysis, banach_embed, ck_norms, gelfand, hilbert_norms, numkernel
from .reports import AxiomReport, CheckReport
from .serialize import matrix_from_json
from .spaces import NormedSpaceModel, OperatorValuedNorm, lp_space


class ConfigError(ValueError):
    """Invalid configuration, with the JSON path of the offending value."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


# ---------------------------------------------------------------- parameters

def _int(obj: dict, key: str, where: str, default: int | None = None, minimum: int = 1) -> int:
    v = obj.get(key, default)
    if v is None:
        raise ConfigError(f"{where}.{key}", "required")
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where}.{key}", f"expected an integer, got {v!r}")
    if v < minimum:
        raise ConfigError(f"{where}.{key}", f"must be >= {minimum}")
    return v


def _tol(obj: dict, key: str, where: str, default: float) -> float:
    v = obj.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0 or not np.isfinite(v):
        raise ConfigError(f"{where}.{key}", f"tolerance must be a positive number, got {v!r}")
    return float(v)


def _float(obj: dict, key: str, where: str, default: float) -> float:
    v = obj.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
        raise ConfigError(f"{where}.{key}", f"expected a finite number, got {v!r}")
    return float(v)


def _check_keys(obj: Any, allowed: set[str], where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(where, "expected an object")
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ConfigError(f"{where}.{extra[0]}", "unknown key")
    return obj


def _matrix(obj: Any, where: str) -> np.ndarray:
    try:
        return matrix_from_json(obj, where)
    except ValueError as exc:
        # matrix_from_json messages start with the exact location
        loc, _, message = str(exc).partition(": ")
        raise ConfigError(loc, message) from None


def parse_space(obj: Any, where: str) -> NormedSpaceModel:
    obj = _check_keys(obj, {"dim", "p", "field", "dual_extreme_points"}, where)
    field = obj.get("field", "complex")
    if field not in ("real", "complex"):
        raise ConfigError(f"{where}.field", "must be 'real' or 'complex'")
    if "dual_extreme_points" in obj:
        pts = obj["dual_extreme_points"]
        try:
            phi = np.array(pts, dtype=float)
            if phi.ndim != 2:
                raise ValueError
            return NormedSpaceModel(dim=phi.shape[1], kind="polytope", functionals=phi, field=field)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.dual_extreme_points", f"invalid polytope: {exc}") from None
    dim = _int(obj, "dim", where)
    p = obj.get("p", 2)
    if p == "inf":
        p = np.inf
    if isinstance(p, bool) or not isinstance(p, (int, float)) or not p >= 1:
        raise ConfigError(f"{where}.p", "p must be a number >= 1 or 'inf'")
    return lp_space(dim, float(p), field)


# ---------------------------------------------------------------- norms

@dataclass
class NormSpec:
    name: str
    params: dict
    where: str


_NORM_PARAMS: dict[str, set[str]] = {
    "trivial_norm": {"space", "hilbert_dim"},
    "mult_norm_l2": {"grid_size"},
    "compose_norm": {"base", "T", "cond"},
    "shifted_norm": {"base", "shift"},
    "mult_norm_ck": {"grid_size"},
    "negated_entry_norm": {"base", "index"},
    "dual_ball_norm": {"space", "strategy", "count"},
    "multiplicative_ovnorm": {"algebra"},
}
LH_NORMS = {"trivial_norm", "mult_norm_l2", "compose_norm", "shifted_norm"}
CK_NORMS = {"mult_norm_ck", "negated_entry_norm", "dual_ball_norm", "multiplicative_ovnorm"}


def parse_norm(obj: Any, where: str, codomain: str | None = None) -> NormSpec:
    if not isinstance(obj, dict):
        raise ConfigError(where, "expected a norm object with a 'name'")
    name = obj.get("name")
    if name not in _NORM_PARAMS:
        raise ConfigError(f"{where}.name", f"unknown constructor {name!r}")
    if codomain == "hilbert" and name not in LH_NORMS:
        raise ConfigError(f"{where}.name", f"{name} is not a Hilbert-space-valued norm")
    if codomain == "ck" and name not in CK_NORMS:
        raise ConfigError(f"{where}.name", f"{name} is not a C(K)-valued norm")
    params = _check_keys({k: v for k, v in obj.items() if k != "name"}, _NORM_PARAMS[name], where)
    # validate eagerly; construction itself happens at run time
    if name == "trivial_norm":
        parse_space(params.get("space", {"dim": 3}), f"{where}.space")
        _int(params, "hilbert_dim", where, 2)
    elif name in ("mult_norm_l2", "mult_norm_ck"):
        _int(params, "grid_size", where)
    elif name == "compose_norm":
        base = parse_norm(params.get("base", {"name": "mult_norm_l2", "grid_size": 4}), f"{where}.base", "hilbert")
        if "T" in params:
            _matrix(params["T"], f"{where}.T")
        _tol(params, "cond", where, 10.0)
        params = dict(params, base=base)
    elif name == "shifted_norm":
        params = dict(params, base=parse_norm(params.get("base"), f"{where}.base", "hilbert"))
        _float(params, "shift", where, 0.01)
    elif name == "negated_entry_norm":
        params = dict(params, base=parse_norm(params.get("base"), f"{where}.base", "ck"))
        _int(params, "index", where, 0, minimum=0)
    elif name == "dual_ball_norm":
        parse_space(params.get("space", {"dim": 2, "p": 1, "field": "real"}), f"{where}.space")
        if params.get("strategy", "exact") not in ("exact", "sampled"):
            raise ConfigError(f"{where}.strategy", "must be 'exact' or 'sampled'")
        _int(params, "count", where, 360)
    elif name == "multiplicative_ovnorm":
        parse_algebra(params.get("algebra", {}), f"{where}.algebra")
    return NormSpec(name, params, where)


def build_norm(spec: NormSpec, seed: int) -> OperatorValuedNorm:
    p, name = spec.params, spec.name
    if name == "trivial_norm":
        return hilbert_norms.trivial_norm(parse_space(p.get("space", {"dim": 3}), spec.where), p.get("hilbert_dim", 2))
    if name == "mult_norm_l2":
        return hilbert_norms.mult_norm_l2(p["grid_size"])
    if name == "compose_norm":
        base = build_norm(p["base"], seed)
        if "T" in p:
            T = matrix_from_json(p["T"])
        else:
            T = hilbert_norms.random_with_condition(np.random.default_rng(seed), base.domain.dim,
                                                    p.get("cond", 10.0), base.domain.field)
        return hilbert_norms.compose_norm(base, T)
    if name == "shifted_norm":
        return hilbert_norms.shifted_norm(build_norm(p["base"], seed), p.get("shift", 0.01))
    if name == "mult_norm_ck":
        return ck_norms.mult_norm_ck(p["grid_size"])
    if name == "negated_entry_norm":
        return ck_norms.negated_entry_norm(build_norm(p["base"], seed), p.get("index", 0))
    if name == "dual_ball_norm":
        space = parse_space(p.get("space", {"dim": 2, "p": 1, "field": "real"}), spec.where)
        disc = banach_embed.discretize_dual_ball(space, p.get("strategy", "exact"), p.get("count", 360), seed)
        return banach_embed.dual_ball_norm(disc)
    if name == "multiplicative_ovnorm":
        return gelfand.multiplicative_ovnorm(build_algebra_from(p.get("algebra", {}), seed))
    raise AssertionError(name)  # pragma: no cover - parse_norm rejects unknown names


# ---------------------------------------------------------------- algebras

def parse_algebra(obj: Any, where: str) -> dict:
    obj = _check_keys(obj, {"generators", "dim", "count"}, where)
    if "generators" in obj:
        gens = obj["generators"]
        if not isinstance(gens, list) or not gens:
            raise ConfigError(f"{where}.generators", "expected a non-empty list of matrices")
        for i, g in enumerate(gens):
            _matrix(g, f"{where}.generators[{i}]")
    else:
        _int(obj, "dim", where, 6)
        _int(obj, "count", where, 1)
    return obj


def build_algebra_from(obj: dict, seed: int) -> gelfand.CommutativeStarAlgebra:
    if "generators" in obj:
        gens = [matrix_from_json(g) for g in obj["generators"]]
    else:
        rng = np.random.default_rng(seed)
        gens = gelfand.random_commuting_generators(rng, obj.get("dim", 6), obj.get("count", 1))
    return gelfand.build_algebra(gens, seed=seed)


# ---------------------------------------------------------------- suites

@dataclass
class SuiteSpec:
    suite: str
    position: int
    params: dict
    raw: dict


CheckList = list[tuple[str, "AxiomReport | CheckReport | Any"]]


def _run_axioms_lh(spec: SuiteSpec, seed: int) -> CheckList:
    F = build_norm(spec.params["norm"], seed)
    p = spec.params
    return [("axioms", hilbert_norms.check_lh_axioms(F, p["samples"], seed, p["tol"], p["pairs"]))]


def _run_axioms_ck(spec: SuiteSpec, seed: int) -> CheckList:
    F = build_norm(spec.params["norm"], seed)
    p = spec.params
    return [("axioms", ck_norms.check_ck_axioms(F, p["samples"], p["f_samples"], seed, p["tol"]))]


def _run_triangle_of_norms(spec: SuiteSpec, seed: int) -> CheckList:
    F = build_norm(spec.params["norm"], seed)
    p = spec.params
    return [
        ("subadditivity", analysis.check_norm_subadditivity(F, p["pairs"], seed, p["tol"])),
        ("reverse_triangle", analysis.check_reverse_triangle(F, p["pairs"], seed + 1, p["tol"])),
    ]


def _run_normal_radius(spec: SuiteSpec, seed: int) -> CheckList:
    p = spec.params
    rng = np.random.default_rng(seed)
    worst, witness = 0.0, None
    for _ in range(p["matrices"]):
        d = int(rng.integers(1, p["max_dim"] + 1))
        U = gelfand.random_unitary(rng, d)
        N = (U * (rng.standard_normal(d) + 1j * rng.standard_normal(d))) @ U.conj().T
        gap = abs(numkernel.spectral_norm(N) - numkernel.spectral_radius(N))
        if gap > worst:
            worst = gap
            if gap > p["tol"]:
                witness = {"matrix": N, "gap": gap}
    normal = CheckReport("normal_norm_equals_radius", witness is None, p["matrices"], p["tol"] - worst, witness,
                         {"tol": p["tol"], "max_gap": worst})

    J = np.array([[0, 1], [0, 0]], dtype=complex)
    w = numkernel.numerical_radius(J, "sampled", p["radius_samples"], seed)
    nrm = numkernel.spectral_norm(J)
    ok = 0.499 <= w <= 0.5 and abs(nrm - 1) <= 1e-12
    jordan = CheckReport("nonnormal_jordan_block", ok, p["radius_samples"], 0.5 - w, None if ok else {"w": w},
                         {"numerical_radius": w, "spectral_norm": nrm, "interval": [0.499, 0.5]})

    worst_cs, wit = np.inf, None
    for _ in range(p["matrices"] // 5 or 1):
        d = int(rng.integers(1, p["max_dim"] + 1))
        M = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        w = numkernel.numerical_radius(M, "sampled", 2000, int(rng.integers(2**31)))
        s = numkernel.spectral_norm(M) + 1e-9 - w
        if s < worst_cs:
            worst_cs = s
            if s < 0:
                wit = {"matrix": M, "numerical_radius": w}
    bound = CheckReport("numerical_radius_below_norm", wit is None, p["matrices"] // 5 or 1, float(worst_cs), wit)
    return [("normal", normal), ("jordan", jordan), ("cauchy_schwarz", bound)]


def _run_completeness(spec: SuiteSpec, seed: int) -> CheckList:
    F = build_norm(spec.params["norm"], seed)
    p = spec.params
    return [("certificate", analysis.completeness_certificate(
        F, seed, samples_per_radius=p["samples"], geometric=p["sequences"], convergent=p["sequences"],
        length=p["length"], tol=p["tol"]))]


def _run_gelfand(spec: SuiteSpec, seed: int) -> CheckList:
    A = build_algebra_from(spec.params["algebra"], seed)
    p = spec.params
    return [
        ("characters", gelfand.check_characters(A, p["pairs"], seed, p["tol"])),
        ("homomorphism", gelfand.check_homomorphism(A, p["pairs"], seed + 1, p["tol"])),
        ("contractive", gelfand.check_contractive(A, p["samples"], seed + 2, p["tol"])),
        ("isometric", gelfand.check_isometric(A, p["samples"], seed + 3, p["tol"])),
    ]


def _run_multiplicative_norm(spec: SuiteSpec, seed: int) -> CheckList:
    A = build_algebra_from(spec.params["algebra"], seed)
    p = spec.params
    F = gelfand.multiplicative_ovnorm(A)
    return [
        ("axioms", ck_norms.check_ck_axioms(F, p["samples"], 100, seed, p["tol"])),
        ("multiplicative", gelfand.check_multiplicative(A, F, p["pairs"], seed + 1, p["tol"])),
    ]


def _run_dual_ball_embedding(spec: SuiteSpec, seed: int) -> CheckList:
    p = spec.params
    space = parse_space(p["space"], f"suites[{spec.position}].space")
    disc = banach_embed.discretize_dual_ball(space, p["strategy"], p["count"], seed)
    F = banach_embed.dual_ball_norm(disc)
    return [
        ("isometry_defect", banach_embed.isometry_defect(disc, p["samples"], seed)),
        ("axioms", ck_norms.check_ck_axioms(F, min(p["samples"], 500), 100, seed + 1, p["tol"])),
    ]


@dataclass(frozen=True)
class SuiteInfo:
    runner: Callable[[SuiteSpec, int], CheckList]
    claim: str
    needs: str  # "norm-hilbert", "norm-ck", "norm", "algebra", "space", ""
    defaults: dict
    notes: str = ""


SUITES: dict[str, SuiteInfo] = {
    "axioms-lh": SuiteInfo(
        _run_axioms_lh,
        "F(x) >= 0; F(x+y) <= F(x)+F(y) (Loewner order); F(lam x) = |lam| F(x); F(x) = 0 iff x = 0",
        "norm-hilbert", {"samples": 500, "pairs": 500, "tol": 1e-9},
        "Axioms of a norm with values in the positive operators on a Hilbert space, checked on samples."),
    "axioms-ck": SuiteInfo(
        _run_axioms_ck,
        "F(x) maps f >= 0 to F(x)f >= 0; (F(x)+F(y)-F(x+y))f >= 0 for f >= 0; F(lam x) = |lam| F(x); F(x) = 0 iff x = 0",
        "norm-ck", {"samples": 500, "f_samples": 100, "tol": 1e-9},
        "Axioms of a norm with values in the operators on C(K); positivity means cone preservation."),
    "prop5": SuiteInfo(
        _run_triangle_of_norms,
        "||F(x+y)|| <= ||F(x)|| + ||F(y)|| and ||F(x) - F(y)|| <= ||F(x-y)||",
        "norm", {"pairs": 1000, "tol": 1e-9},
        "Subadditivity of the operator norm of F and the reverse triangle inequality."),
    "prop6": SuiteInfo(
        _run_normal_radius,
        "for normal T, ||T|| = sup{|(Th,h)| : ||h|| <= 1}",
        "", {"matrices": 100, "max_dim": 8, "radius_samples": 1_000_000, "tol": 1e-8},
        "Norm equals numerical radius for normal matrices; the 2x2 Jordan block shows normality is needed."),
    "theorem-b1": SuiteInfo(
        _run_completeness,
        "a bounded F is continuous at 0 iff X is complete with respect to F (Cauchy sequences map to Cauchy sequences)",
        "norm-hilbert", {"samples": 200, "sequences": 20, "length": 24, "tol": 1e-9},
        "Reported as one Lipschitz certificate: ||F(x_m)-F(x_k)|| <= ||F(x_m-x_k)|| <= M ||x_m-x_k||, "
        "with M a polished sampled bound, over a battery of geometric and convergent sequences."),
    "gelfand": SuiteInfo(
        _run_gelfand,
        "characters are multiplicative with phi(1) = 1; the Gelfand transform is a homomorphism, "
        "contractive, and an isometry onto C(M_B) for a unital self-adjoint commutative algebra",
        "algebra", {"samples": 200, "pairs": 100, "tol": 1e-9},
        "Generators must be normal and pairwise commuting; they are simultaneously diagonalized and "
        "the algebra is the span of the joint spectral projections."),
    "cor-a9": SuiteInfo(
        _run_multiplicative_norm,
        "F(b) = M_{|Gamma b|} is a bounded C(M_B)-valued norm with F(ab) = F(a)F(b) and ||F(b)|| = ||b||",
        "algebra", {"samples": 200, "pairs": 100, "tol": 1e-9},
        "Generators must be normal and pairwise commuting."),
    "embed-a6": SuiteInfo(
        _run_dual_ball_embedding,
        "F(b) = M_{|beta b|} on C(K), K the dual unit ball, is a C(K)-valued norm with ||F(b)|| = ||b||",
        "space", {"samples": 1000, "strategy": "exact", "count": 360, "tol": 1e-9},
        "Dual-ball embedding. Exact (defect <= 1e-12) for l1 and l_inf via dual extreme points and for "
        "polytope norms; sampled discretizations report the measured defect, with the closed-form bound "
        "1 - cos(pi/m) only for the real Euclidean plane and no guarantee otherwise."),
}

CONSTRUCTOR_DOCS: dict[str, str] = {
    "trivial_norm": "x -> ||x|| I_d. Parameters: space {dim, p, field}, hilbert_dim (default 2).",
    "mult_norm_l2": "g -> diag(|g|) on C^n with the normalized-measure inner product; domain: sup-norm "
                    "functions on n circle points. Parameters: grid_size.",
    "compose_norm": "h -> F(T h) for an injective T (sigma_min > 1e-10 ||T||). Parameters: base (Hilbert norm, "
                    "default mult_norm_l2(4)), T (matrix JSON) or cond (random T with that condition number, default 10).",
    "shifted_norm": "x -> F(x) - shift I for x != 0; violates positivity on purpose. Parameters: base, shift (0.01).",
    "mult_norm_ck": "g -> M_g, (M_g f) = |g| f on C of an n-point grid of [0,1]. Parameters: grid_size.",
    "negated_entry_norm": "F with one diagonal entry negated; violates positivity on purpose. Parameters: base, index.",
    "dual_ball_norm": "b -> M_{|beta b|} with beta b = (phi_i(b)) over a finite subset of the dual unit ball. "
                      "Parameters: space {dim, p, field} or {dual_extreme_points}, strategy exact|sampled, count.",
    "multiplicative_ovnorm": "b -> M_{|Gamma b|} on C of the character set of a commutative *-algebra. "
                             "Parameters: algebra {generators: [matrix JSON...]} or {dim, count} for random "
                             "commuting normal generators. Generators must be normal and pairwise commuting.",
}


def parse_suite(obj: Any, position: int) -> SuiteSpec:
    where = f"suites[{position}]"
    if not isinstance(obj, dict):
        raise ConfigError(where, "expected an object")
    name = obj.get("suite")
    if name not in SUITES:
        raise ConfigError(f"{where}.suite", f"unknown suite {name!r}")
    info = SUITES[name]
    allowed = {"suite"} | set(info.defaults)
    if info.needs.startswith("norm"):
        allowed.add("norm")
    elif info.needs == "algebra":
        allowed.add("algebra")
    elif info.needs == "space":
        allowed.add("space")
    _check_keys(obj, allowed, where)
    params: dict[str, Any] = {}
    for key, default in info.defaults.items():
        if key == "tol":
            params[key] = _tol(obj, key, where, default)
        elif key == "strategy":
            v = obj.get(key, default)
            if v not in ("exact", "sampled"):
                raise ConfigError(f"{where}.{key}", "must be 'exact' or 'sampled'")
            params[key] = v
        else:
            params[key] = _int(obj, key, where, default)
    if info.needs.startswith("norm"):
        codomain = {"norm-hilbert": "hilbert", "norm-ck": "ck"}.get(info.needs)
        if "norm" not in obj:
            raise ConfigError(f"{where}.norm", "required")
        params["norm"] = parse_norm(obj["norm"], f"{where}.norm", codomain)
    elif info.needs == "algebra":
        params["algebra"] = parse_algebra(obj.get("algebra", {}), f"{where}.algebra")
    elif info.needs == "space":
        params["space"] = obj.get("space", {"dim": 2, "p": 1, "field": "real"})
        parse_space(params["space"], f"{where}.space")
    return SuiteSpec(name, position, params, obj)
