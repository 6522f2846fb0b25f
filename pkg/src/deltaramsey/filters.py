"""Filter oracles: finite-scale stand-ins for filters on a semigroup.

An oracle sorts every subset into Large, Small or Neither. Positive means
"not Small". Most oracles here only approximate the infinite filters they are
named after (a cofinite filter on a finite carrier is degenerate, for
instance), so each one carries a descriptor naming the approximation.
"""

from __future__ import annotations

import enum
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .calculus import derivative, fp_search
from .errors import ExtractionStuck, InvalidInput, Unsupported
from .semigroup import Semigroup, TruncatedNat
from .sets import ElementSet, all_subsets


class Verdict(enum.Enum):
    LARGE = "large"
    SMALL = "small"
    NEITHER = "neither"

    @property
    def positive(self) -> bool:
        return self is not Verdict.SMALL


class FilterOracle(ABC):
    """Classifier of subsets of a carrier of ``size`` elements.

    Subclasses implement :meth:`verdict`. ``exact`` is True when the Large
    sets form a genuine filter on the finite carrier.
    """

    kind: str = "abstract"
    exact: bool = False

    @property
    @abstractmethod
    def size(self) -> int: ...

    @abstractmethod
    def verdict(self, A: ElementSet) -> Verdict: ...

    def descriptor(self) -> dict:
        return {"kind": self.kind}

    def _check(self, A: ElementSet):
        if A.universe_size != self.size:
            raise InvalidInput(
                f"{self.kind} oracle on {self.size} elements got a set over {A.universe_size}"
            )

    def is_large(self, A: ElementSet) -> bool:
        return self.verdict(A) is Verdict.LARGE

    def is_small(self, A: ElementSet) -> bool:
        return self.verdict(A) is Verdict.SMALL

    def is_positive(self, A: ElementSet) -> bool:
        return self.verdict(A) is not Verdict.SMALL

    def __call__(self, A: ElementSet) -> Verdict:
        return self.verdict(A)


@dataclass(frozen=True)
class UniformOracle(FilterOracle):
    """Conull sets of the normalized counting measure on a finite group."""

    n: int
    kind = "uniform"
    exact = True

    @property
    def size(self):
        return self.n

    def verdict(self, A):
        self._check(A)
        if A.bits == A.mask:
            return Verdict.LARGE
        if not A:
            return Verdict.SMALL
        return Verdict.NEITHER


@dataclass(frozen=True)
class FrechetOracle(FilterOracle):
    """Truncated cofinite filter: Large iff at most ``k`` points are missing."""

    n: int
    k: int
    kind = "frechet"

    def __post_init__(self):
        if not 0 <= self.k < self.n:
            raise InvalidInput("need 0 <= k < n")
        if 2 * self.k >= self.n:
            raise InvalidInput(f"k={self.k} >= n/2: Large and Small would overlap")

    @property
    def exact(self):
        return self.k == 0

    @property
    def size(self):
        return self.n

    def verdict(self, A):
        self._check(A)
        if self.n - len(A) <= self.k:
            return Verdict.LARGE
        if len(A) <= self.k:
            return Verdict.SMALL
        return Verdict.NEITHER

    def descriptor(self):
        return {"kind": self.kind, "n": self.n, "k": self.k}


@dataclass(frozen=True)
class DensityOracle(FilterOracle):
    """Windowed density on ``[0, N)``: Large iff density >= theta."""

    N: int
    theta: Fraction
    kind = "density"

    def __post_init__(self):
        theta = Fraction(self.theta)
        object.__setattr__(self, "theta", theta)
        if not Fraction(1, 2) < theta <= 1:
            raise InvalidInput("theta must lie in (1/2, 1]")

    @property
    def exact(self):
        return self.theta == 1

    @property
    def size(self):
        return self.N

    def verdict(self, A):
        self._check(A)
        d = Fraction(len(A), self.N)
        if d >= self.theta:
            return Verdict.LARGE
        if d <= 1 - self.theta:
            return Verdict.SMALL
        return Verdict.NEITHER

    def descriptor(self):
        return {"kind": self.kind, "N": self.N, "theta": str(self.theta)}


@dataclass(frozen=True, eq=False)
class IPStarOracle(FilterOracle):
    """Bounded-depth IP*: positive iff the set holds an FP-set of length ``depth``."""

    semigroup: Semigroup
    depth: int
    budget: Optional[int] = None
    kind = "ip_star"

    def __post_init__(self):
        if self.depth < 1:
            raise InvalidInput("depth must be at least 1")

    @property
    def size(self):
        return self.semigroup.size

    def verdict(self, A):
        self._check(A)
        # SearchBudgetExceeded propagates: no silent verdict
        if fp_search(self.semigroup, A, self.depth, self.budget) is None:
            return Verdict.SMALL
        if fp_search(self.semigroup, ~A, self.depth, self.budget) is None:
            return Verdict.LARGE
        return Verdict.NEITHER

    def descriptor(self):
        return {"kind": self.kind, "depth": self.depth}


@dataclass(frozen=True)
class PointOracle(FilterOracle):
    """Large iff the set contains ``point``; Small only for the empty set.

    Not a model of anything: a fixture that fails to respect recurrence.
    """

    n: int
    point: int = 0
    kind = "point"

    @property
    def size(self):
        return self.n

    def verdict(self, A):
        self._check(A)
        if self.point in A:
            return Verdict.LARGE
        if not A:
            return Verdict.SMALL
        return Verdict.NEITHER

    def descriptor(self):
        return {"kind": self.kind, "n": self.n, "point": self.point}


def uniform_oracle(group: Semigroup) -> UniformOracle:
    if not group.is_group:
        raise Unsupported(f"{group.name} is not a group")
    return UniformOracle(group.size)


def frechet_oracle(carrier_size: int, k: int) -> FrechetOracle:
    return FrechetOracle(carrier_size, k)


def density_oracle(semigroup: TruncatedNat, theta) -> DensityOracle:
    if not isinstance(semigroup, TruncatedNat):
        raise Unsupported("the density oracle needs a TruncatedNat carrier")
    return DensityOracle(semigroup.horizon, Fraction(theta))


def ip_star_oracle(semigroup: Semigroup, depth: int, budget: Optional[int] = None) -> IPStarOracle:
    return IPStarOracle(semigroup, depth, budget)


def from_descriptor(desc: dict, semigroup: Semigroup) -> FilterOracle:
    """Oracle from a config descriptor such as ``{"kind": "frechet", "k": 1}``."""
    kind = desc.get("kind")
    if kind == "uniform":
        return uniform_oracle(semigroup)
    if kind == "frechet":
        return FrechetOracle(int(desc.get("n", semigroup.size)), int(desc["k"]))
    if kind == "density":
        return density_oracle(semigroup, Fraction(str(desc["theta"])))
    if kind == "ip_star":
        return IPStarOracle(semigroup, int(desc["depth"]), desc.get("budget"))
    if kind == "point":
        return PointOracle(semigroup.size, int(desc.get("point", 0)))
    if kind in ("counting", "upper_density", "measure"):
        from .measure import MeasureOracle, measure_from_descriptor

        return MeasureOracle(measure_from_descriptor(desc, semigroup))
    raise InvalidInput(f"unknown oracle kind {kind!r}")


# -- filter vocabulary ------------------------------------------------------

def for_almost_all(oracle: FilterOracle, where: ElementSet) -> bool:
    """``forall^F x P(x)`` where ``where`` is ``{x : P(x)}``."""
    return oracle.is_large(where)


def exists_positively(oracle: FilterOracle, where: ElementSet) -> bool:
    """``exists^F x P(x)``: the witnesses form a positive set."""
    return oracle.is_positive(where)


def equivalent(oracle: FilterOracle, A: ElementSet, B: ElementSet) -> bool:
    """``A ~_F B``: the symmetric difference is small."""
    return oracle.is_small(A ^ B)


def almost_subset(oracle: FilterOracle, A: ElementSet, B: ElementSet) -> bool:
    """``A subset_F B``: ``A - B`` is small."""
    return oracle.is_small(A - B)


def large_sets(oracle: FilterOracle, max_size: int = 8) -> list[ElementSet]:
    """Every Large subset of the carrier, by brute force (carriers <= ``max_size``)."""
    if oracle.size > max_size:
        raise InvalidInput(
            f"refusing to enumerate 2**{oracle.size} subsets (limit 2**{max_size})"
        )
    return [A for A in all_subsets(oracle.size) if oracle.is_large(A)]


def check_filter_axioms(oracle: FilterOracle, sets: Optional[Iterable[ElementSet]] = None) -> list[str]:
    """List violations of the oracle invariants over ``sets`` (default: all
    subsets, so only for small carriers)."""
    n = oracle.size
    problems = []
    if oracle.verdict(ElementSet.empty(n)) is not Verdict.SMALL:
        problems.append("empty set is not Small")
    if oracle.verdict(ElementSet.full(n)) is not Verdict.LARGE:
        problems.append("full carrier is not Large")
    pool = list(all_subsets(n) if sets is None else sets)
    large = [A for A in pool if oracle.is_large(A)]
    for A in large:
        if oracle.is_small(~A) is False:
            problems.append(f"complement of Large {A.to_list()} is not Small")
    for A in large:
        for B in pool:
            if A <= B and not oracle.is_large(B):
                problems.append(f"Large not upward closed at {A.to_list()} <= {B.to_list()}")
    for i, A in enumerate(large):
        for B in large[i:]:
            if not oracle.is_positive(A & B):
                problems.append(f"Large {A.to_list()} & {B.to_list()} is not Positive")
    return problems


# -- stabilizers and IP extraction -----------------------------------------

def stab_set(G: Semigroup, A: ElementSet, oracle: FilterOracle) -> ElementSet:
    """``{g : A g^-1 is Large}``."""
    return G.set(g for g in G.elements() if oracle.is_large(G.translate_preimage(A, g)))


@dataclass
class IPExtraction:
    generators: tuple[int, ...]
    sets: list[ElementSet] = field(default_factory=list)

    def to_json(self):
        return {"generators": list(self.generators), "sets": [s.to_list() for s in self.sets]}


def greedy_ip_extract(
    G: Semigroup, A: ElementSet, oracle: FilterOracle, length: int
) -> IPExtraction:
    """Pick ``g_i`` in ``A_i & Stab(A_i)`` (smallest index) and set
    ``A_{i+1} = derivative(A_i, g_i)``.

    Every ``A_i`` is required to be Positive. On success the finite product
    set of the generators lies inside ``A``.

    Raises
    ------
    ExtractionStuck
        When some ``A_i`` is not Positive or ``A_i & Stab(A_i)`` is empty. The
        partial :class:`IPExtraction` is attached as ``partial``.
    """
    gens: list[int] = []
    sets = [A]
    current = A
    for i in range(length):
        if not oracle.is_positive(current):
            raise ExtractionStuck(
                f"A_{i} is not positive", IPExtraction(tuple(gens), sets)
            )
        choices = current & stab_set(G, current, oracle)
        if not choices:
            raise ExtractionStuck(
                f"A_{i} & Stab(A_{i}) is empty", IPExtraction(tuple(gens), sets)
            )
        g = choices.min()
        gens.append(g)
        current = derivative(G, current, g)
        sets.append(current)
    return IPExtraction(tuple(gens), sets)
