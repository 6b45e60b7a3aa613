"""Command-line harness: ``opnorm run <config>``, ``opnorm describe <name>``, ``opnorm version``.

Config is a JSON file::

    {"seed": 42, "format": "json", "output": "report.json",
     "suites": [{"suite": "prop5", "norm": {"name": "mult_norm_l2", "grid_size": 8}}]}

Suite ``i`` runs with the seed drawn from
``SeedSequence(master_seed, spawn_key=(i,))``, so adding or reordering suites
never changes the randomness of the others. ``OPNORM_SEED`` overrides the
master seed. Exit status is 0 when every suite passes, 1 when any fails and
2 on invalid input or I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import __version__
from .exceptions import OpNormError
from .reports import AxiomReport, CheckReport
from .serialize import dumps, jsonable
from .suites import CONSTRUCTOR_DOCS, SUITES, ConfigError, SuiteSpec, parse_suite

SCHEMA_VERSION = 1
TIMING_KEYS = frozenset({"wall_time_s", "total_wall_time_s"})

EXIT_PASS, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


@dataclass
class SuiteConfig:
    seed: int
    suites: list[SuiteSpec]
    output: str | None = None
    format: str = "json"
    raw: dict = field(default_factory=dict)


def parse_config(obj: Any, seed_override: str | None = None) -> SuiteConfig:
    if not isinstance(obj, dict):
        raise ConfigError("config", "expected a JSON object")
    extra = sorted(set(obj) - {"seed", "suites", "output", "format"})
    if extra:
        raise ConfigError(extra[0], "unknown key")
    seed = obj.get("seed", 0)
    if seed_override is not None:
        try:
            seed = int(seed_override)
        except ValueError:
            raise ConfigError("OPNORM_SEED", f"not an integer: {seed_override!r}") from None
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed", "master seed must be a non-negative integer")
    fmt = obj.get("format", "json")
    if fmt not in ("json", "text"):
        raise ConfigError("format", "must be 'json' or 'text'")
    output = obj.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output", "must be a path string")
    suites = obj.get("suites", [])
    if not isinstance(suites, list):
        raise ConfigError("suites", "expected a list")
    specs = [parse_suite(s, i) for i, s in enumerate(suites)]
    raw = dict(obj, seed=seed)
    return SuiteConfig(seed, specs, output, fmt, raw)


def suite_seed(master: int, position: int) -> int:
    return int(np.random.SeedSequence(master, spawn_key=(position,)).generate_state(1, np.uint32)[0])


def _residual_and_witness(name: str, result: Any) -> tuple[list[float], list[dict]]:
    """Per-check residuals (larger is worse; > 0 usually means a violation)."""
    residuals, witnesses = [], []
    if isinstance(result, AxiomReport):
        for ax in result.axioms.values():
            residuals.append(ax.worst_residual)
            if ax.witness is not None:
                witnesses.append({"check": f"{name}.{ax.name}", "witness": ax.witness})
    elif isinstance(result, CheckReport):
        residuals.append(-result.worst_slack)
        if result.witness is not None:
            witnesses.append({"check": name, "witness": result.witness})
    else:
        d = result.to_dict()
        residuals.append(d.get("max_relative_defect", 0.0))
    return residuals, witnesses


def run_suite(spec: SuiteSpec, seed: int) -> dict[str, Any]:
    info = SUITES[spec.suite]
    start = time.perf_counter()
    checks = info.runner(spec, seed)
    elapsed = time.perf_counter() - start
    residuals: list[float] = []
    witnesses: list[dict] = []
    results = {}
    passed = True
    for name, res in checks:
        r, w = _residual_and_witness(name, res)
        residuals += r
        witnesses += w
        passed = passed and bool(res.passed)
        results[name] = res.to_dict()
    finite = [x for x in residuals if np.isfinite(x)]
    return {
        "name": spec.suite,
        "position": spec.position,
        "claim": info.claim,
        "seed": seed,
        "status": "pass" if passed else "fail",
        "residual": {"max": max(finite) if finite else None,
                     "mean": float(np.mean(finite)) if finite else None},
        "witnesses": witnesses,
        "checks": results,
        "wall_time_s": elapsed,
    }


def run(config: SuiteConfig) -> tuple[dict[str, Any], int]:
    start = time.perf_counter()
    suites = [run_suite(s, suite_seed(config.seed, s.position)) for s in config.suites]
    failed = [s["name"] for s in suites if s["status"] != "pass"]
    report = {
        "schema": SCHEMA_VERSION,
        "tool": {"name": "opnorm", "version": __version__},
        "config": config.raw,
        "status": "fail" if failed else "pass",
        "suite_count": len(suites),
        "failed_suites": failed,
        "suites": suites,
        "total_wall_time_s": time.perf_counter() - start,
    }
    if not suites:
        report["note"] = "zero suites configured; passes vacuously"
    return jsonable(report), EXIT_FAIL if failed else EXIT_PASS


def strip_timing(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def render_text(report: dict[str, Any]) -> str:
    lines = [f"opnorm {report['tool']['version']}  seed={report['config']['seed']}  "
             f"overall={report['status'].upper()}  suites={report['suite_count']}"]
    if report.get("note"):
        lines.append(report["note"])
    for s in report["suites"]:
        r = s["residual"]
        lines.append(f"[{s['position']}] {s['status'].upper():4s} {s['name']:<11s} "
                     f"max_residual={r['max']!s:<24} {s['wall_time_s']:.2f}s")
        lines.append(f"      claim: {s['claim']}")
        for w in s["witnesses"][:3]:
            lines.append(f"      witness in {w['check']}")
    return "\n".join(lines) + "\n"


def describe(name: str) -> str:
    if name in SUITES:
        info = SUITES[name]
        defaults = ", ".join(f"{k}={v}" for k, v in info.defaults.items())
        needs = {"norm-hilbert": "norm (Hilbert-operator-valued constructor)",
                 "norm-ck": "norm (C(K)-operator-valued constructor)",
                 "norm": "norm (any constructor)",
                 "algebra": "algebra {generators: [...]} or {dim, count}",
                 "space": "space {dim, p, field} or {dual_extreme_points}",
                 "": "nothing"}[info.needs]
        return (f"suite {name}\n  verifies: {info.claim}\n  input: {needs}\n"
                f"  defaults: {defaults}\n  {info.notes}\n")
    if name in CONSTRUCTOR_DOCS:
        return f"constructor {name}\n  {CONSTRUCTOR_DOCS[name]}\n"
    raise KeyError(name)


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="opnorm", description="Operator-valued norm verification harness.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run the suites listed in a JSON config")
    p_run.add_argument("config")
    p_run.add_argument("-o", "--output", help="write the report here (overrides the config)")
    p_run.add_argument("--format", choices=["json", "text"], help="override the config format")
    p_desc = sub.add_parser("describe", help="describe a suite or constructor")
    p_desc.add_argument("name")
    sub.add_parser("version", help="print the tool version")
    args = parser.parse_args(argv)

    if args.command == "version":
        print(f"opnorm {__version__}")
        return EXIT_PASS

    if args.command == "describe":
        try:
            sys.stdout.write(describe(args.name))
        except KeyError:
            known = ", ".join(sorted(SUITES) + sorted(CONSTRUCTOR_DOCS))
            print(f"error: unknown suite or constructor {args.name!r}; known: {known}", file=sys.stderr)
            return EXIT_INVALID
        return EXIT_PASS

    try:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        config = parse_config(raw, os.environ.get("OPNORM_SEED"))
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: line {exc.lineno} column {exc.colno}: {exc.msg}", file=sys.stderr)
        return EXIT_INVALID
    except (ConfigError, OpNormError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.output:
        config.output = args.output
    if args.format:
        config.format = args.format

    try:
        report, code = run(config)
    except (OpNormError, ValueError) as exc:
        # construction failures (singular T, non-commuting generators, ...) are input errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = dumps(report) + "\n" if config.format == "json" else render_text(report)
    try:
        _write(text, config.output)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
