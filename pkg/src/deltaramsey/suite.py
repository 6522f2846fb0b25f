"""Acceptance batteries.

Each battery returns a :class:`BatteryResult` whose ``payload`` is a
deterministic function of the seed; wall-clock time is kept apart so payloads
can be compared byte for byte across runs.
"""

from __future__ import annotations

import itertools
import json
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .calculus import derivative, finite_products
from .errors import ExtractionStuck, NoWitnessFound, TheoremViolation
from .filters import FrechetOracle, PointOracle, UniformOracle, greedy_ip_extract
from .measure import counting_measure, quantitative_recurrence
from .ramsey import (
    Relation,
    brute_force_clique,
    delta_ramsey_witness,
    hypothesis_check,
    verify_transcript,
)
from .recurrence import delta_set, is_n_recurrent, respects_recurrence_check
from .semigroup import Semigroup, catalog_groups, cyclic
from .sets import ElementSet, all_subsets
from .vdc import (
    VectorFamily,
    bessel_error_chain,
    perturbed_orthonormal_family,
    rotation_action,
    triple_identity_check,
    vdc_experiment,
    vdc_hypothesis,
)

log = logging.getLogger(__name__)

MAX_EXAMPLES = 10


@dataclass
class BatteryResult:
    name: str
    criterion: int
    passed: bool
    payload: dict
    seconds: float = 0.0
    limit_seconds: float | None = None

    @property
    def within_time(self) -> bool:
        return self.limit_seconds is None or self.seconds < self.limit_seconds

    @property
    def ok(self) -> bool:
        return self.passed and self.within_time

    def payload_json(self) -> str:
        return json.dumps(
            {"name": self.name, "criterion": self.criterion, "passed": self.passed,
             "payload": self.payload},
            sort_keys=True,
        )

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        t = f"{self.seconds:.2f}s"
        if self.limit_seconds is not None:
            t += f" (limit {self.limit_seconds:g}s)"
        return f"[{status}] criterion {self.criterion} {self.name}: {self.payload.get('summary', '')} [{t}]"


def _rng(seed: int, criterion: int) -> np.random.Generator:
    return np.random.default_rng([seed, criterion])


class _Tally:
    def __init__(self):
        self.checked = 0
        self.violations = 0
        self.examples: list = []

    def check(self, ok: bool, example):
        self.checked += 1
        if not ok:
            self.violations += 1
            if len(self.examples) < MAX_EXAMPLES:
                self.examples.append(example)

    def to_json(self) -> dict:
        return {"checked": self.checked, "violations": self.violations, "examples": self.examples}


# -- 1: derivative algebra ------------------------------------------------------

def algebra_battery(seed: int = 0) -> BatteryResult:
    G = cyclic(4)
    laws = {k: _Tally() for k in ("mixed", "superassociative", "subcommute", "subassociative")}
    subsets = list(all_subsets(4))
    for A in subsets:
        for g, h in itertools.product(G.elements(), repeat=2):
            dgh = derivative(G, derivative(G, A, h), g)
            dhg = derivative(G, derivative(G, A, g), h)
            laws["mixed"].check(dgh == dhg, {"A": A.to_list(), "g": g, "h": h})
            laws["superassociative"].check(
                dhg <= derivative(G, A, G.multiply(h, g)), {"A": A.to_list(), "g": g, "h": h}
            )
    for oracle in (UniformOracle(4), FrechetOracle(4, 1)):
        tag = oracle.descriptor()
        for A in subsets:
            for n in range(4):
                Dn = delta_set(G, A, n, oracle)
                for g in G.elements():
                    laws["subcommute"].check(
                        delta_set(G, derivative(G, A, g), n, oracle) <= derivative(G, Dn, g),
                        {"oracle": tag, "A": A.to_list(), "n": n, "g": g},
                    )
            for n, m in itertools.product(range(4), repeat=2):
                if n + m > 3:
                    continue
                laws["subassociative"].check(
                    delta_set(G, A, n + m, oracle) <= delta_set(G, delta_set(G, A, m, oracle), n, oracle),
                    {"oracle": tag, "A": A.to_list(), "n": n, "m": m},
                )
    total = sum(t.violations for t in laws.values())
    payload = {"laws": {k: t.to_json() for k, t in laws.items()},
               "summary": f"{total} violations over {sum(t.checked for t in laws.values())} checks"}
    return BatteryResult("algebra", 1, total == 0, payload, limit_seconds=10)


# -- 2: corollary and main property ------------------------------------------------

def corollary_battery(seed: int = 0) -> BatteryResult:
    G = cyclic(5)
    oracle = FrechetOracle(5, 1)
    cor, main = _Tally(), _Tally()
    for A in all_subsets(5):
        D1 = delta_set(G, A, 1, oracle)
        for n in range(1, 4):
            cor.check(
                delta_set(G, A, n, oracle) <= delta_set(G, D1, n - 1, oracle),
                {"A": A.to_list(), "n": n},
            )
            if not is_n_recurrent(G, A, n, oracle):
                continue
            for g in delta_set(G, A, n, oracle):
                main.check(
                    delta_set(G, derivative(G, A, g), 1, oracle) <= derivative(G, D1, g),
                    {"A": A.to_list(), "n": n, "g": g},
                )
    total = cor.violations + main.violations
    payload = {"corollary": cor.to_json(), "main_property": main.to_json(),
               "summary": f"{total} violations over {cor.checked + main.checked} checks"}
    return BatteryResult("corollary", 2, total == 0, payload)


# -- 3: quantitative recurrence ----------------------------------------------------

QREC_SAMPLES = 10_000


def qrec_spot_value() -> dict:
    G = cyclic(5)
    return quantitative_recurrence(counting_measure(G), G, G.set([0, 1])).to_json()


def qrec_battery(seed: int = 0, samples: int = QREC_SAMPLES) -> BatteryResult:
    rng = _rng(seed, 3)
    per_group = {}
    total_viol = 0
    for G in catalog_groups(12):
        mu = counting_measure(G)
        tally = _Tally()
        if G.size <= 8:
            sets = (A for A in all_subsets(G.size) if A)
            mode = "exhaustive"
        else:
            draws = rng.integers(1, 1 << G.size, size=samples)
            sets = (ElementSet(G.size, int(b)) for b in draws)
            mode = f"random {samples}"
        for A in sets:
            try:
                r = quantitative_recurrence(mu, G, A)
                ok = bool(r.good_h)
            except TheoremViolation:
                ok = False
            tally.check(ok, {"A": A.to_list()})
        per_group[G.name] = {"mode": mode, **tally.to_json()}
        total_viol += tally.violations
    spot = qrec_spot_value()
    spot_ok = spot["bound"] == "4/75" and spot["good_h"] == [0, 1, 4]
    payload = {"groups": per_group, "spot": spot, "spot_ok": spot_ok,
               "summary": f"{total_viol} violations; spot value {'ok' if spot_ok else 'WRONG'}"}
    return BatteryResult("qrec", 3, total_viol == 0 and spot_ok, payload, limit_seconds=60)


# -- 4: Delta-Ramsey -------------------------------------------------------------

RAMSEY_GROUPS = (5, 7, 11)
RAMSEY_INSTANCES = 100
RAMSEY_DEGREES = (1, 2, 3)


def random_hypothesis_relation(G: Semigroup, rng: np.random.Generator, p: float = 0.5) -> Relation:
    """Irreflexive random relation with ``R(g, g h)`` forced for every
    ``h != identity`` and all ``g`` but one random exception per ``h``.

    Under ``frechet(n, 1)`` on a group this makes ``H`` the non-identity
    elements, which is Large.
    """
    n = G.size
    adj = rng.random((n, n)) < p
    np.fill_diagonal(adj, False)
    for h in G.elements():
        if h == G.identity:
            continue
        miss = int(rng.integers(0, n))
        for g in G.elements():
            if g != miss:
                adj[g, G.multiply(g, h)] = True
    np.fill_diagonal(adj, False)
    return Relation(adj)


def ramsey_battery(seed: int = 0, instances: int = RAMSEY_INSTANCES) -> BatteryResult:
    rng = _rng(seed, 4)
    groups = {}
    bad = 0
    for N in RAMSEY_GROUPS:
        G = cyclic(N)
        oracle = FrechetOracle(N, 1)
        stats = {"instances": 0, "hypothesis_failed": 0, "cliques": 0, "extracted": 0,
                 "verifier_violations": 0, "contradictions": 0, "examples": []}
        for i in range(instances):
            R = random_hypothesis_relation(G, rng)
            if not hypothesis_check(G, R, oracle).holds:
                stats["hypothesis_failed"] += 1
                continue
            for n in RAMSEY_DEGREES:
                stats["instances"] += 1
                clique = brute_force_clique(R, G.full(), n)
                stats["cliques"] += clique is not None
                try:
                    t = delta_ramsey_witness(G, R, n, oracle)
                except NoWitnessFound:
                    t = None
                if t is not None:
                    stats["extracted"] += 1
                    problems = verify_transcript(G, R, None, t, oracle)
                    if problems:
                        stats["verifier_violations"] += 1
                        if len(stats["examples"]) < MAX_EXAMPLES:
                            stats["examples"].append({"instance": i, "n": n, "problems": problems[:5]})
                if (t is not None) != (clique is not None):
                    stats["contradictions"] += 1
                    if len(stats["examples"]) < MAX_EXAMPLES:
                        stats["examples"].append({
                            "instance": i, "n": n, "clique": None if clique is None else list(clique),
                            "extracted": t is not None, "relation": R.to_json()})
        groups[G.name] = stats
        bad += stats["verifier_violations"] + stats["contradictions"] + stats["hypothesis_failed"]
    payload = {"groups": groups, "degrees": list(RAMSEY_DEGREES),
               "summary": ", ".join(
                   f"{k}: {v['extracted']}/{v['cliques']} extracted, {v['contradictions']} contradictions, "
                   f"{v['verifier_violations']} verifier violations" for k, v in groups.items())}
    return BatteryResult("ramsey", 4, bad == 0, payload, limit_seconds=120)


# -- 5: greedy IP extraction --------------------------------------------------------

def greedy_battery(seed: int = 0) -> BatteryResult:
    G = cyclic(16)
    oracle = FrechetOracle(16, 1)
    cases = [G.full()] + [G.full() - G.set([m]) for m in G.elements()]
    results = []
    failures = 0
    for A in cases:
        missing = (~A).to_list()
        try:
            ext = greedy_ip_extract(G, A, oracle, 3)
            fp_ok = all(x in A for x in finite_products(G, ext.generators))
            results.append({"missing": missing, "generators": list(ext.generators), "fp_inside": fp_ok})
            failures += not fp_ok
        except ExtractionStuck as exc:
            failures += 1
            results.append({"missing": missing, "stuck": str(exc),
                            "partial": exc.partial.to_json() if exc.partial else None})
    payload = {"cases": results, "summary": f"{failures} failures over {len(cases)} cofinite sets"}
    return BatteryResult("greedy", 5, failures == 0, payload)


# -- 6: van der Corput numerics ------------------------------------------------------

VDC_FAMILIES = 50
VDC_DELTA = 1e-3


def vdc_battery(seed: int = 0, families: int = VDC_FAMILIES) -> BatteryResult:
    rng = _rng(seed, 6)
    G = cyclic(32)
    oracle = FrechetOracle(32, 1)
    anomalies = 0
    chains = 0
    flag_mismatch = 0
    line_failures = 0
    triggered = 0
    rows = []
    for k in range(families):
        fam, Q = perturbed_orthonormal_family(32, 16, VDC_DELTA, rng)
        hyp = vdc_hypothesis(G, fam, oracle, 0.1)
        n = int(rng.integers(1, 17))
        idx = sorted(rng.choice(16, size=n, replace=False).tolist())
        # residues 0..15 are distinct, so the chosen rows are delta-orthogonal
        sub = fam.vectors[idx]
        probes = {
            "random": rng.standard_normal(16),
            "aligned": sub.sum(axis=0),
            "spike": Q[:, idx[0]] * 0.5,
        }
        # adversarial: near-copies of one vector violate delta-orthogonality
        m = int(rng.integers(3, 9))
        base = Q[:, int(rng.integers(0, 16))]
        dup = np.array([base + 1e-4 * rng.standard_normal(16) for _ in range(m)])
        dup /= np.maximum(1.0, np.linalg.norm(dup, axis=1))[:, None]
        cases = [(name, sub, f) for name, f in probes.items()] + [("near-duplicates", dup, base)]
        for name, vecs, f in cases:
            c = bessel_error_chain(vecs, f, VDC_DELTA)
            chains += 1
            expected = float(np.dot(f, f)) < c.n * c.eps ** 2 / 2
            flag_mismatch += c.contradiction != expected
            triggered += c.contradiction
            if c.preconditions_hold and not c.chain_holds:
                line_failures += 1
            anomalies += c.anomaly or (c.contradiction != expected)
            rows.append({
                "family": k, "case": name, "n": c.n,
                "preconditions": c.preconditions_hold, "chain_holds": c.chain_holds,
                "contradiction": c.contradiction, "anomaly": c.anomaly,
                "lines": [round(x, 12) for x in c.lines],
            })
        rows.append({"family": k, "hypothesis_good_h": len(hyp.good_h), "hypothesis": hyp.holds})
    # end-to-end runs on a carrier small enough for every stage to execute
    Z8 = cyclic(8)
    e2e = []
    for name, vecs, f, orc in [
        ("orthonormal, frechet", np.eye(8), np.eye(8)[0] + np.eye(8)[1], FrechetOracle(8, 1)),
        ("orthonormal, uniform", np.eye(8), np.eye(8)[0], UniformOracle(8)),
        ("constant, frechet", np.tile(np.eye(8)[0], (8, 1)), np.eye(8)[0], FrechetOracle(8, 1)),
    ]:
        run = vdc_experiment(Z8, VectorFamily(vecs), f, orc, 0.5)
        anomalies += run.anomaly
        e2e.append({"case": name, **run.to_json()})
    payload = {
        "chains": chains, "anomalies": anomalies, "line_failures": line_failures,
        "flag_mismatches": flag_mismatch, "contradictions_triggered": triggered,
        "rows": rows, "end_to_end": e2e,
        "summary": f"{anomalies} anomalies over {chains} chains ({triggered} contradiction flags)",
    }
    return BatteryResult("vdc", 6, anomalies == 0, payload)


# -- 7: double-to-triple identity -----------------------------------------------------

def triple_battery(seed: int = 0, instances: int = 100) -> BatteryResult:
    rng = _rng(seed, 7)
    worst = 0.0
    rows = []
    for i in range(instances):
        N = int(rng.choice([8, 16, 24, 32]))
        m = int(rng.choice([d for d in (2, 4, 8) if N % d == 0]))
        unit = N // m
        act = rotation_action(m, N, unit * int(rng.integers(0, m)), unit * int(rng.integers(0, m)))
        f1, f2 = rng.standard_normal(N), rng.standard_normal(N)
        g, h = int(rng.integers(0, m)), int(rng.integers(0, m))
        r = triple_identity_check(act, f1, f2, g, h)
        worst = max(worst, r.residual)
        rows.append({"N": N, "m": m, "g": g, "h": h, "residual": float(f"{r.residual:.3e}")})
    ok = worst < 1e-9
    payload = {"instances": rows, "worst": float(f"{worst:.3e}"),
               "summary": f"worst residual {worst:.2e} over {instances} instances"}
    return BatteryResult("triple", 7, ok, payload)


# -- 8: respects recurrence ---------------------------------------------------------

def respects_battery(seed: int = 0, max_n: int = 2) -> BatteryResult:
    rows = []
    sound_ok = True
    for n in range(1, 6):
        G = cyclic(n)
        oracles = [UniformOracle(n)] + [FrechetOracle(n, k) for k in range(n) if 2 * k < n]
        for o in oracles:
            rep = respects_recurrence_check(o, G, max_n)
            sound_ok &= rep.holds
            rows.append({**rep.to_json(), "violations": rep.violations[:3],
                         "violation_count": len(rep.violations)})
    broken = respects_recurrence_check(PointOracle(5), cyclic(5), max_n)
    flagged = not broken.holds and bool(broken.violations)
    failing = [r["oracle"] for r in rows if not r["holds"]]
    payload = {
        "oracles": rows,
        "broken_fixture": {**broken.to_json(), "violations": broken.violations[:3]},
        "summary": (f"{len(rows) - len(failing)}/{len(rows)} sound oracles pass; "
                    f"broken fixture {'flagged' if flagged else 'NOT flagged'}"
                    + (f"; failing: {failing}" if failing else "")),
    }
    return BatteryResult("respects", 8, sound_ok and flagged, payload)


BATTERIES: dict[str, Callable[..., BatteryResult]] = {
    "algebra": algebra_battery,
    "corollary": corollary_battery,
    "qrec": qrec_battery,
    "ramsey": ramsey_battery,
    "greedy": greedy_battery,
    "vdc": vdc_battery,
    "triple": triple_battery,
    "respects": respects_battery,
}


def run_battery(name: str, seed: int = 0) -> BatteryResult:
    fn = BATTERIES[name]
    t0 = time.perf_counter()
    res = fn(seed=seed)
    res.seconds = time.perf_counter() - t0
    log.info("%s", res.line())
    return res


def run_suite(select: str = "all", seed: int = 0) -> list[BatteryResult]:
    names = list(BATTERIES) if select == "all" else [select]
    for n in names:
        if n not in BATTERIES:
            raise KeyError(f"unknown battery {n!r}; choose from {sorted(BATTERIES)} or 'all'")
    return [run_battery(n, seed) for n in names]


def determinism_check(
    select: str = "all", seed: int = 0, previous: Optional[list[BatteryResult]] = None
) -> BatteryResult:
    """Run the selected batteries again and compare payload bytes.

    Results of an earlier run with the same seed can be passed as
    ``previous`` to avoid a third execution.
    """
    names = list(BATTERIES) if select == "all" else [select]
    first = {r.name: r for r in previous or []}
    t0 = time.perf_counter()
    mismatched = []
    for n in names:
        a = (first[n] if n in first else run_battery(n, seed)).payload_json()
        b = run_battery(n, seed).payload_json()
        if a != b:
            mismatched.append(n)
    payload = {"batteries": names, "mismatched": mismatched,
               "summary": f"{len(names) - len(mismatched)}/{len(names)} payloads byte-identical"}
    return BatteryResult("determinism", 9, not mismatched, payload, time.perf_counter() - t0)
