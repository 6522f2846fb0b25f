"""Command-line runner: ``deltaramsey run`` and ``deltaramsey suite``.

Exit codes: 0 success, 1 task or battery failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Optional

import jsonschema
import numpy as np

from . import _budget, filters, measure, ramsey, recurrence, suite, vdc
from .calculus import finite_products, fp_search, iterated_derivative
from .errors import DeltaRamseyError, InvalidInput, InvalidSemigroup, MalformedTable
from .semigroup import Semigroup, from_descriptor

log = logging.getLogger("deltaramsey")

TASKS = ("derive", "delta", "recur", "tree", "ramsey", "qrec", "vdc", "audit", "density")

_INTS = {"type": "array", "items": {"type": "integer", "minimum": 0}}

CONFIG_SCHEMA: dict = {
    "type": "object",
    "required": ["task", "semigroup"],
    "additionalProperties": False,
    "properties": {
        "task": {"enum": list(TASKS)},
        "semigroup": {
            "type": "object",
            "oneOf": [
                {"required": ["catalog"]},
                {"required": ["file"]},
                {"required": ["table"]},
            ],
            "properties": {
                "catalog": {"type": "string"},
                "file": {"type": "string"},
                "table": {"type": "array", "items": _INTS},
                "size": {"type": "integer", "minimum": 1},
                "identity": {"type": ["integer", "null"]},
                "name": {"type": "string"},
            },
        },
        "oracle": {
            "type": "object",
            "required": ["kind"],
            "properties": {"kind": {"enum": ["uniform", "frechet", "density", "ip_star", "point",
                                              "counting", "upper_density"]}},
        },
        "measure": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["counting", "upper_density"]},
                "windows": {"type": "array", "minItems": 1,
                            "items": {"type": "array", "items": {"type": "integer"},
                                      "minItems": 2, "maxItems": 2}},
            },
        },
        "params": {"type": "object"},
        "seed": {"type": "integer"},
        "budget": {
            "type": "object",
            "properties": {"nodes": {"type": "integer", "minimum": 1}},
            "additionalProperties": False,
        },
    },
}


class ConfigError(Exception):
    pass


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config does not match schema at {where}: {exc.message}") from None
    return cfg


# -- task implementations --------------------------------------------------------

def _set(G: Semigroup, params: dict, key: str = "set", default_full: bool = False):
    if key not in params:
        if default_full:
            return G.full()
        raise InvalidInput(f"params.{key} is required")
    return G.set(params[key])


def _oracle(cfg: dict, G: Semigroup) -> filters.FilterOracle:
    if "oracle" not in cfg:
        raise InvalidInput("this task needs an oracle")
    return filters.from_descriptor(cfg["oracle"], G)


def _measure(cfg: dict, G: Semigroup) -> measure.SubadditiveMeasure:
    if "measure" not in cfg:
        raise InvalidInput("this task needs a measure")
    return measure.measure_from_descriptor(cfg["measure"], G)


def _relation(desc: Any, G: Semigroup) -> ramsey.Relation:
    n = G.size
    if isinstance(desc, str):
        preds = {
            "true": lambda a, b: True,
            "false": lambda a, b: False,
            "neq": lambda a, b: a != b,
        }
        if desc not in preds:
            raise InvalidInput(f"unknown relation shorthand {desc!r}")
        return ramsey.Relation.from_predicate(n, preds[desc])
    rel = ramsey.Relation.from_json(desc)
    if rel.size != n:
        raise InvalidInput("relation size differs from the semigroup")
    return rel


def task_derive(cfg, G, params, rng, budget):
    A = _set(G, params)
    steps = params.get("steps", [])
    out = {"set": A.to_list(), "steps": steps,
           "derivative": iterated_derivative(G, A, steps).to_list()}
    if "fp" in params:
        out["finite_products"] = finite_products(G, params["fp"]).to_list()
    if "fp_search" in params:
        found = fp_search(G, A, int(params["fp_search"]), budget)
        out["fp_search"] = None if found is None else list(found)
    rows = [{"step": i, "h": h, "set": " ".join(map(str, iterated_derivative(G, A, steps[: i + 1])))}
            for i, h in enumerate(steps)]
    return out, rows


def task_delta(cfg, G, params, rng, budget):
    o = _oracle(cfg, G)
    A = _set(G, params)
    n = int(params.get("n", 1))
    D = recurrence.delta_set(G, A, n, o)
    return {"set": A.to_list(), "n": n, "delta": D.to_list(), "verdict": o.verdict(D).value,
            "oracle": o.descriptor()}, [{"g": g, "in_delta": g in D} for g in G.elements()]


def task_recur(cfg, G, params, rng, budget):
    o = _oracle(cfg, G)
    A = _set(G, params)
    prof = recurrence.recurrence_profile(G, A, o, int(params.get("bound", 3)))
    out = {**prof.to_json(), "oracle": o.descriptor()}
    rows = [{"n": d["n"], "delta": " ".join(map(str, d["delta"])), "verdict": d["verdict"]}
            for d in out["degrees"]]
    return out, rows


def task_tree(cfg, G, params, rng, budget):
    o = _oracle(cfg, G)
    A = _set(G, params)
    t = recurrence.derivation_tree(G, A, o, int(params.get("max_depth", 2)), budget)
    out = {**t.to_json(), "oracle": o.descriptor()}
    rows = [{"path": " ".join(map(str, nd["path"])), "leaf": nd["leaf"], "truncated": nd["truncated"]}
            for nd in out["nodes"]]
    return out, rows


def task_ramsey(cfg, G, params, rng, budget):
    o = _oracle(cfg, G)
    R = _relation(params.get("relation", "true"), G)
    A = _set(G, params, default_full=True)
    n = int(params.get("n", 2))
    hyp = ramsey.hypothesis_check(G, R, o)
    t = ramsey.delta_ramsey_witness(G, R, n, o, A=A, budget=budget)
    problems = ramsey.verify_transcript(G, R, A, t, o)
    out = {"hypothesis": hyp.to_json(), "transcript": t.to_json(), "verifier": problems,
           "oracle": o.descriptor()}
    if params.get("brute_force", False):
        clique = ramsey.brute_force_clique(R, A, n, budget)
        out["brute_force"] = None if clique is None else list(clique)
    rows = [{"i": i, "g_i": g} for i, g in enumerate(t.witness)]
    if problems:
        raise _TaskFailure("transcript failed verification", out)
    return out, rows


def task_qrec(cfg, G, params, rng, budget):
    mu = _measure(cfg, G)
    A = _set(G, params)
    r = measure.quantitative_recurrence(mu, G, A)
    out = r.to_json()
    rows = [{"h": h, "mu_derivative": str(v), "good": h in r.good_h} for h, v in enumerate(r.values)]
    return out, rows


def task_vdc(cfg, G, params, rng, budget):
    o = _oracle(cfg, G)
    fam_spec = params.get("family", {"kind": "perturbed_orthonormal"})
    if fam_spec.get("kind") == "perturbed_orthonormal":
        fam, Q = vdc.perturbed_orthonormal_family(
            G.size, int(fam_spec.get("dim", G.size)), float(fam_spec.get("delta", 1e-3)), rng)
    else:
        fam = vdc.VectorFamily.from_json(fam_spec)
    f = np.asarray(params["f"], dtype=float) if "f" in params else rng.standard_normal(fam.dim)
    eps = float(params.get("eps", 0.5))
    run = vdc.vdc_experiment(G, fam, f, o, eps, params.get("hyp_eps"), params.get("delta"),
                             int(params.get("depth", 3)))
    out = run.to_json()
    coef = fam.coefficients(f)
    rows = [{"g": g, "coefficient": float(np.real(c)), "bad": g in run.conclusion.bad_set}
            for g, c in enumerate(coef)]
    if run.anomaly:
        raise _TaskFailure("chain anomaly", out)
    return out, rows


def task_audit(cfg, G, params, rng, budget):
    mu = _measure(cfg, G)
    prof = measure.delta_measure_audit(mu, G, int(params.get("sample_budget", 2000)),
                                       int(cfg.get("seed", 0)))
    out = prof.to_json()
    rows = [{"axiom": k, "checked": v["checked"], "holds": v["holds"],
             "violations": len(v["violations"])} for k, v in out["axioms"].items()]
    return out, rows


def task_density(cfg, G, params, rng, budget):
    mu = _measure(cfg, G)
    A = _set(G, params)
    N = int(params.get("N", 3))
    cert = measure.fp_shift_corollary_check(mu, G, A, N)
    out = {"mu_A": str(mu(A)), **cert.to_json()}
    rows = [{"length": p["length"], "Q": " ".join(map(str, p["Q"])), "positive": p["positive"],
             "shift": p["shift"]} for p in out["prefixes"]]
    return out, rows


class _TaskFailure(Exception):
    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


TASK_FUNCS = {
    "derive": task_derive, "delta": task_delta, "recur": task_recur, "tree": task_tree,
    "ramsey": task_ramsey, "qrec": task_qrec, "vdc": task_vdc, "audit": task_audit,
    "density": task_density,
}


def run_config(cfg: dict, seed: Optional[int] = None) -> tuple[dict, list[dict], int]:
    """Execute a validated config; returns (report, csv rows, exit code).

    Raises :class:`ConfigError` if the semigroup cannot be built.
    """
    seed = int(cfg.get("seed", 0) if seed is None else seed)
    try:
        G = from_descriptor(cfg["semigroup"])
    except (MalformedTable, InvalidSemigroup, InvalidInput, OSError, KeyError) as exc:
        raise ConfigError(f"bad semigroup: {exc}") from None
    budget = cfg.get("budget", {}).get("nodes")
    budget = _budget.resolve(budget, G.size)
    rng = np.random.default_rng(seed)
    report: dict = {
        "task": cfg["task"],
        "config": cfg,
        "config_hash": config_hash(cfg),
        "seed": seed,
        "semigroup": G.descriptor(),
        "result": None,
        "error": None,
    }
    t0 = time.perf_counter()
    code = 0
    rows: list[dict] = []
    try:
        result, rows = TASK_FUNCS[cfg["task"]](cfg, G, cfg.get("params", {}), rng, budget)
        report["result"] = result
    except _TaskFailure as exc:
        report["result"] = exc.result
        report["error"] = {"type": "TaskFailure", "message": str(exc)}
        code = 1
    except (DeltaRamseyError, KeyError, ValueError) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = 1
    report["timing"] = {"seconds": round(time.perf_counter() - t0, 6)}
    return report, rows, code


def payload(report: dict) -> dict:
    """Report without timing: the part that must reproduce exactly."""
    return {k: v for k, v in report.items() if k != "timing"}


def _write_csv(path: Path, rows: list[dict]):
    if not rows:
        return
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        report, rows, code = run_config(cfg, args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{cfg['task']}-{report['config_hash'][:12]}"
    path = out / f"{stem}.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True, default=str))
    if args.csv:
        _write_csv(out / f"{stem}.csv", rows)
    status = "ok" if code == 0 else f"failed: {report['error']['message']}"
    print(f"{cfg['task']}: {status} -> {path}")
    return code


def cmd_suite(args) -> int:
    try:
        results = suite.run_suite(args.select, args.seed)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    if args.determinism:
        results.append(suite.determinism_check(args.select, args.seed, previous=results))
    for r in results:
        print(r.line())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        agg = {
            "select": args.select,
            "seed": args.seed,
            "matrix": {r.name: r.ok for r in results},
            "batteries": [json.loads(r.payload_json()) for r in results],
        }
        (out / f"suite-{args.select}.json").write_text(json.dumps(agg, indent=2, sort_keys=True))
        timing = {r.name: round(r.seconds, 4) for r in results}
        (out / f"suite-{args.select}.timing.json").write_text(json.dumps(timing, indent=2))
    return 0 if all(r.ok for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="deltaramsey", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one experiment config")
    r.add_argument("--config", required=True)
    r.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    r.add_argument("--out", default=".")
    r.add_argument("--csv", action="store_true", help="also write a CSV table")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("suite", help="run acceptance batteries")
    s.add_argument("--select", default="all", choices=[*suite.BATTERIES, "all"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.add_argument("--determinism", action="store_true",
                   help="re-run each battery and compare payloads")
    s.set_defaults(func=cmd_suite)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
