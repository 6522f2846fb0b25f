"""Finitely subadditive measures, their null/conull filter and recurrence checks.

All values are exact :class:`~fractions.Fraction` objects. Every measure here
is defined on the full power set of the carrier; ``in_algebra`` exists so
fixtures can model smaller algebras.
"""

from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .calculus import derivative, finite_products, iterated_derivative
from .errors import InvalidInput, PreconditionViolated, TheoremViolation, Unsupported
from .filters import FilterOracle, Verdict
from .recurrence import delta_set
from .semigroup import Semigroup
from .sets import ElementSet, all_subsets

EXHAUSTIVE_LIMIT = 8


class SubadditiveMeasure(ABC):
    """``value`` maps sets of the algebra to ``[0, 1]``."""

    kind = "abstract"

    @property
    @abstractmethod
    def size(self) -> int: ...

    @abstractmethod
    def value(self, A: ElementSet) -> Fraction: ...

    def in_algebra(self, A: ElementSet) -> bool:
        return True

    def __call__(self, A: ElementSet) -> Fraction:
        if A.universe_size != self.size:
            raise InvalidInput("set does not live on this carrier")
        if not self.in_algebra(A):
            raise InvalidInput(f"{A.to_list()} is outside the measure's algebra")
        return self.value(A)

    def is_null(self, A: ElementSet) -> bool:
        """Contained in some measurable set of measure zero."""
        if self.in_algebra(A):
            return self(A) == 0
        rest = (~A).to_list()
        for k in range(len(rest) + 1):
            for extra in itertools.combinations(rest, k):
                B = A | ElementSet.of(self.size, extra)
                if self.in_algebra(B) and self(B) == 0:
                    return True
        return False

    def is_conull(self, A: ElementSet) -> bool:
        return self.is_null(~A)

    def descriptor(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class CountingMeasure(SubadditiveMeasure):
    """Normalized counting measure ``|A| / n``."""

    n: int
    kind = "counting"

    @property
    def size(self):
        return self.n

    def value(self, A):
        return Fraction(len(A), self.n)

    def descriptor(self):
        return {"kind": self.kind, "n": self.n}


@dataclass(frozen=True)
class UpperDensity(SubadditiveMeasure):
    """Largest relative count over a fixed family of windows ``[lo, hi)``."""

    n: int
    windows: tuple[tuple[int, int], ...]
    kind = "upper_density"

    def __post_init__(self):
        wins = tuple((int(lo), int(hi)) for lo, hi in self.windows)
        if not wins:
            raise InvalidInput("upper density needs at least one window")
        for lo, hi in wins:
            if not 0 <= lo < hi <= self.n:
                raise InvalidInput(f"window [{lo}, {hi}) is empty or leaves [0, {self.n})")
        object.__setattr__(self, "windows", wins)
        object.__setattr__(
            self, "_masks", tuple(((1 << hi) - 1) ^ ((1 << lo) - 1) for lo, hi in wins)
        )

    @property
    def size(self):
        return self.n

    def value(self, A):
        return max(
            Fraction((A.bits & m).bit_count(), hi - lo)
            for m, (lo, hi) in zip(self._masks, self.windows)
        )

    def descriptor(self):
        return {"kind": self.kind, "n": self.n, "windows": [list(w) for w in self.windows]}


@dataclass(frozen=True, eq=False)
class FunctionMeasure(SubadditiveMeasure):
    """Arbitrary set function, for adversarial fixtures."""

    n: int
    fn: Callable[[ElementSet], Fraction]
    name: str = "function"
    algebra: Optional[Callable[[ElementSet], bool]] = None
    kind = "function"

    @property
    def size(self):
        return self.n

    def value(self, A):
        return Fraction(self.fn(A))

    def in_algebra(self, A):
        return True if self.algebra is None else bool(self.algebra(A))

    def descriptor(self):
        return {"kind": self.kind, "n": self.n, "name": self.name}


@dataclass(frozen=True)
class MeasureOracle(FilterOracle):
    """The filter of conull sets: Small iff null, Large iff conull."""

    mu: SubadditiveMeasure
    kind = "measure"

    @property
    def size(self):
        return self.mu.size

    @property
    def exact(self):
        return True

    def verdict(self, A):
        self._check(A)
        if self.mu.is_null(A):
            return Verdict.SMALL
        if self.mu.is_conull(A):
            return Verdict.LARGE
        return Verdict.NEITHER

    def descriptor(self):
        return {"kind": self.kind, "measure": self.mu.descriptor()}


def counting_measure(group: Semigroup) -> CountingMeasure:
    if not group.is_group:
        raise Unsupported(f"{group.name} is not a group")
    return CountingMeasure(group.size)


class DensityReading(NamedTuple):
    value: Fraction
    windows: int


def upper_density(A: ElementSet, windows: Sequence[Sequence[int]]) -> DensityReading:
    """``max_k |A & F_k| / |F_k|`` over the supplied windows."""
    if not windows:
        raise InvalidInput("empty window list")
    mu = UpperDensity(A.universe_size, tuple(tuple(w) for w in windows))
    return DensityReading(mu(A), len(mu.windows))


def measure_from_descriptor(desc: dict, G: Semigroup) -> SubadditiveMeasure:
    kind = desc.get("kind")
    if kind == "counting":
        return counting_measure(G)
    if kind == "upper_density":
        return UpperDensity(G.size, tuple(tuple(w) for w in desc["windows"]))
    raise InvalidInput(f"unknown measure kind {kind!r}")


def _frac(x: Fraction) -> str:
    return str(x)


# -- axiom audit --------------------------------------------------------------

@dataclass
class AxiomReport:
    name: str
    checked: int = 0
    violations: list[dict] = field(default_factory=list)
    cap: int = 20

    @property
    def holds(self) -> bool:
        return self.checked > 0 and not self.violations

    def record(self, witness: dict):
        if len(self.violations) < self.cap:
            self.violations.append(witness)

    def to_json(self) -> dict:
        return {"name": self.name, "checked": self.checked, "holds": self.holds,
                "violations": self.violations}


@dataclass
class DeltaMeasureProfile:
    measure: dict
    mode: str
    axioms: dict[str, AxiomReport]

    @property
    def almost_invariance_report(self) -> AxiomReport:
        return self.axioms["iv_almost_invariant"]

    @property
    def translate_additivity_report(self) -> AxiomReport:
        return self.axioms["v_additive_on_translates"]

    @property
    def is_subadditive_measure(self) -> bool:
        return all(self.axioms[k].holds for k in ("i_normalized", "ii_monotone", "iii_subadditive"))

    @property
    def is_delta_measure(self) -> bool:
        return all(r.holds for r in self.axioms.values())

    def to_json(self) -> dict:
        return {
            "measure": self.measure,
            "mode": self.mode,
            "axioms": {k: r.to_json() for k, r in self.axioms.items()},
            "is_delta_measure": self.is_delta_measure,
        }


def delta_measure_audit(
    mu: SubadditiveMeasure, G: Semigroup, sample_budget: int = 2000, seed: int = 0
) -> DeltaMeasureProfile:
    """Check axioms (i) through (v) of a Delta-measure.

    Exhaustive over all sets, pairs and translate families when the carrier
    has at most 8 elements; otherwise ``sample_budget`` random draws per axiom
    from a generator seeded with ``seed``.
    """
    if mu.size != G.size:
        raise InvalidInput("measure and semigroup sizes differ")
    n = G.size
    oracle = MeasureOracle(mu)
    exhaustive = n <= EXHAUSTIVE_LIMIT
    rng = np.random.default_rng(seed)

    def rand_set() -> ElementSet:
        return ElementSet.from_mask(rng.random(n) < 0.5)

    sets = list(all_subsets(n)) if exhaustive else [rand_set() for _ in range(sample_budget)]
    sets = [A for A in sets if mu.in_algebra(A)]
    ax = {k: AxiomReport(k) for k in (
        "i_normalized", "ii_monotone", "iii_subadditive", "iv_almost_invariant",
        "v_additive_on_translates")}

    r = ax["i_normalized"]
    r.checked = 2
    if mu(G.empty()) != 0:
        r.record({"set": [], "value": _frac(mu(G.empty()))})
    if mu(G.full()) != 1:
        r.record({"set": G.full().to_list(), "value": _frac(mu(G.full()))})

    if exhaustive:
        pairs = itertools.product(sets, repeat=2)
    else:
        pairs = ((rand_set(), rand_set()) for _ in range(sample_budget))
    for A, B in pairs:
        if not (mu.in_algebra(A) and mu.in_algebra(B) and mu.in_algebra(A | B)):
            continue
        a, b = mu(A), mu(B)
        if A <= B:
            ax["ii_monotone"].checked += 1
            if a > b:
                ax["ii_monotone"].record({"A": A.to_list(), "B": B.to_list(),
                                          "mu_A": _frac(a), "mu_B": _frac(b)})
        ax["iii_subadditive"].checked += 1
        u = mu(A | B)
        if u > a + b:
            ax["iii_subadditive"].record({"A": A.to_list(), "B": B.to_list(),
                                          "mu_union": _frac(u), "sum": _frac(a + b)})
    if not exhaustive:
        # random pairs are almost never nested; add nested ones
        for _ in range(sample_budget):
            B = rand_set()
            A = B & rand_set()
            ax["ii_monotone"].checked += 1
            if mu(A) > mu(B):
                ax["ii_monotone"].record({"A": A.to_list(), "B": B.to_list(),
                                          "mu_A": _frac(mu(A)), "mu_B": _frac(mu(B))})

    r4 = ax["iv_almost_invariant"]
    r5 = ax["v_additive_on_translates"]
    fam_rng = np.random.default_rng(seed + 1)
    for A in sets:
        translates = [G.translate_preimage(A, g) for g in G.elements()]
        r4.checked += 1
        outside = [g for g, T in enumerate(translates) if not mu.in_algebra(T)]
        if outside:
            r4.record({"A": A.to_list(), "translate_outside_algebra": outside})
            continue
        a = mu(A)
        stab = G.set(g for g, T in enumerate(translates) if mu(T) == a)
        if not oracle.is_large(stab):
            r4.record({"A": A.to_list(), "mu_A": _frac(a), "invariant_g": stab.to_list()})

        vals = [mu(T) for T in translates]
        disjoint = [[mu.is_null(translates[i] & translates[j]) for j in range(n)] for i in range(n)]
        if exhaustive:
            families = (
                [g for g in range(n) if fam >> g & 1] for fam in range(1, 1 << n)
                if (fam & (fam - 1))
            )
        else:
            families = (
                sorted(fam_rng.choice(n, size=int(fam_rng.integers(2, min(n, 6) + 1)), replace=False).tolist())
                for _ in range(4)
            )
        for fam in families:
            if not all(disjoint[i][j] for i, j in itertools.combinations(fam, 2)):
                continue
            r5.checked += 1
            union = G.empty()
            for g in fam:
                union = union | translates[g]
            lhs, rhs = mu(union), sum((vals[g] for g in fam), Fraction(0))
            if lhs != rhs:
                r5.record({"A": A.to_list(), "g": fam, "mu_union": _frac(lhs), "sum": _frac(rhs)})
    return DeltaMeasureProfile(mu.descriptor(), "exhaustive" if exhaustive else "sampled", ax)


# -- recurrence ---------------------------------------------------------------

@dataclass
class QRecReport:
    A: ElementSet
    mu_A: Fraction
    bound: Fraction
    good_h: ElementSet
    values: list[Fraction]
    ramsey_n: int

    @property
    def epsilon(self) -> Fraction:
        return self.bound

    def to_json(self) -> dict:
        return {
            "A": self.A.to_list(),
            "mu_A": _frac(self.mu_A),
            "bound": _frac(self.bound),
            "bound_float": float(self.bound),
            "good_h": self.good_h.to_list(),
            "mu_derivative": [_frac(v) for v in self.values],
            "ramsey_n": self.ramsey_n,
            "epsilon": _frac(self.epsilon),
        }


def quantitative_recurrence(mu: SubadditiveMeasure, G: Semigroup, A: ElementSet) -> QRecReport:
    """``good_h = {h : mu(derivative(A, h)) >= mu(A)**2 / 3}``.

    Also reports ``ramsey_n = ceil(3 / mu(A))``, the clique size the
    contradiction argument asks for, and ``epsilon``, the pairwise overlap
    threshold it uses.

    Raises
    ------
    PreconditionViolated
        If ``mu(A) = 0``.
    TheoremViolation
        If ``good_h`` is null for the measure.
    """
    a = mu(A)
    if a == 0:
        raise PreconditionViolated("mu(A) = 0")
    bound = a * a / 3
    values = [mu(derivative(G, A, h)) for h in G.elements()]
    good = G.set(h for h, v in enumerate(values) if v >= bound)
    report = QRecReport(A, a, bound, good, values, math.ceil(3 / a))
    if mu.is_null(good):
        raise TheoremViolation(f"good_h is null for A={A.to_list()}")
    return report


@dataclass
class UnionBoundReport:
    lhs: Fraction
    single_sum: Fraction
    pair_sum: Fraction
    eps: Optional[Fraction]

    @property
    def rhs(self) -> Fraction:
        return self.single_sum - self.pair_sum

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs

    @property
    def slack(self) -> Fraction:
        return self.lhs - self.rhs

    def to_json(self) -> dict:
        out = {"lhs": _frac(self.lhs), "rhs": _frac(self.rhs), "slack": _frac(self.slack),
               "holds": self.holds}
        if self.eps is not None:
            out["eps"] = _frac(self.eps)
        return out


def union_bound_check(
    mu: SubadditiveMeasure, G: Semigroup, A: ElementSet, gs: Sequence[int], eps=None
) -> UnionBoundReport:
    """Both sides of ``mu(U A g_i^-1) >= sum mu(A g_i^-1) - sum_{i<j} mu(A g_i^-1 & A g_j^-1)``."""
    T = [G.translate_preimage(A, g) for g in gs]
    union = G.empty()
    for t in T:
        union = union | t
    singles = sum((mu(t) for t in T), Fraction(0))
    pairs = sum((mu(T[i] & T[j]) for i, j in itertools.combinations(range(len(T)), 2)), Fraction(0))
    return UnionBoundReport(mu(union), singles, pairs, None if eps is None else Fraction(eps))


@dataclass
class PrefixCertificate:
    length: int
    Q: ElementSet
    intersection: ElementSet
    positive: bool
    shift: Optional[int]
    shift_ok: bool

    def to_json(self) -> dict:
        return {"length": self.length, "Q": self.Q.to_list(),
                "intersection": self.intersection.to_list(), "positive": self.positive,
                "shift": self.shift, "shift_ok": self.shift_ok}


@dataclass
class CorollaryCertificate:
    requested: int
    h: tuple[int, ...]
    prefixes: list[PrefixCertificate]

    @property
    def certified(self) -> int:
        """Longest prefix whose certificate fully checks out."""
        best = 0
        for p in self.prefixes:
            if not (p.positive and p.shift_ok):
                break
            best = p.length
        return best

    @property
    def complete(self) -> bool:
        return self.certified >= self.requested

    def to_json(self) -> dict:
        return {"requested": self.requested, "h": list(self.h), "certified": self.certified,
                "complete": self.complete, "prefixes": [p.to_json() for p in self.prefixes]}


def fp_shift_corollary_check(
    mu: SubadditiveMeasure, G: Semigroup, A: ElementSet, N: int
) -> CorollaryCertificate:
    """Directions ``h_0..h_{N-1}`` with every prefix product set ``Q``
    satisfying ``intersection of A h^-1 over h in Q`` positive, plus a shift
    ``g in A`` with ``g Q <= A``.

    Directions are taken from ``Delta`` of the current iterated derivative,
    identity excluded, by depth-first search in ascending order. If no path of
    length ``N`` exists the longest one found is certified instead.
    """
    if mu(A) == 0:
        raise PreconditionViolated("mu(A) = 0")
    oracle = MeasureOracle(mu)
    best: list[int] = []
    path: list[int] = []

    def dfs(cur: ElementSet) -> bool:
        nonlocal best
        if len(path) > len(best):
            best = list(path)
        if len(path) == N:
            return True
        cands = delta_set(G, cur, 1, oracle)
        if G.identity is not None:
            cands = cands - G.set([G.identity])
        for h in cands:
            path.append(h)
            if dfs(derivative(G, cur, h)):
                return True
            path.pop()
        return False

    dfs(A)
    prefixes = []
    for m in range(1, len(best) + 1):
        Q = finite_products(G, best[:m])
        inter = G.full()
        for q in Q:
            inter = inter & G.translate_preimage(A, q)
        core = iterated_derivative(G, A, best[:m])
        shift = core.min() if core else None
        ok = shift is not None and shift in A and all(G.multiply(shift, q) in A for q in Q)
        prefixes.append(PrefixCertificate(m, Q, inter, oracle.is_positive(inter), shift, ok))
    return CorollaryCertificate(N, tuple(best), prefixes)
