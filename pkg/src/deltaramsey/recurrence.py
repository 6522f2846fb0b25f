"""Degrees of recurrence, derivation trees and thickness predicates.

``delta_set(G, A, n, F)`` is the set of directions ``g`` along which the
derivative of ``A`` is ``(n-1)``-recurrent; ``A`` is ``n``-recurrent when that
set is positive. Both are memoized per (semigroup, oracle) on
``(set bits, degree)``, which collapses the exponential recursion onto the
much smaller family of distinct iterated derivatives.
"""

from __future__ import annotations

import logging
import weakref
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _budget
from .calculus import derivative, finite_products, iterated_derivative
from .errors import InvalidBranch, InvalidInput, PreconditionViolated, TheoremViolation
from .filters import FilterOracle, Verdict, large_sets
from .semigroup import Semigroup
from .sets import ElementSet, all_subsets

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 8

_CACHES: "weakref.WeakKeyDictionary[Semigroup, dict]" = weakref.WeakKeyDictionary()


def _memo(G: Semigroup, oracle: FilterOracle) -> dict:
    per_group = _CACHES.setdefault(G, {})
    return per_group.setdefault(oracle, {})


def clear_caches() -> None:
    _CACHES.clear()


def _check(G: Semigroup, oracle: FilterOracle, *sets: ElementSet):
    if oracle.size != G.size:
        raise InvalidInput(f"oracle on {oracle.size} elements used with {G.name}")
    for A in sets:
        if A.universe_size != G.size:
            raise InvalidInput("set does not live on this carrier")


def _delta_bits(G: Semigroup, oracle: FilterOracle, memo: dict, bits: int, n: int) -> int:
    if n == 0:
        return bits
    key = (bits, n)
    hit = memo.get(key)
    if hit is not None:
        return hit
    A = ElementSet(G.size, bits)
    out = 0
    for g in G.elements():
        d = derivative(G, A, g).bits
        if _rec_bits(G, oracle, memo, d, n - 1):
            out |= 1 << g
    memo[key] = out
    return out


def _rec_bits(G, oracle, memo, bits: int, n: int) -> bool:
    return oracle.is_positive(ElementSet(G.size, _delta_bits(G, oracle, memo, bits, n)))


def delta_set(G: Semigroup, A: ElementSet, n: int, oracle: FilterOracle) -> ElementSet:
    """``Delta^n(A)``; degree 0 returns ``A`` itself."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    _check(G, oracle, A)
    return ElementSet(G.size, _delta_bits(G, oracle, _memo(G, oracle), A.bits, n))


def is_n_recurrent(G: Semigroup, A: ElementSet, n: int, oracle: FilterOracle) -> bool:
    if n < 0:
        raise ValueError("degree must be non-negative")
    _check(G, oracle, A)
    return _rec_bits(G, oracle, _memo(G, oracle), A.bits, n)


def recurrence_degree(G: Semigroup, A: ElementSet, oracle: FilterOracle, bound: int) -> int:
    """Largest ``n <= bound`` with ``A`` n-recurrent, or -1 if ``A`` is small."""
    best = -1
    for n in range(bound + 1):
        if not is_n_recurrent(G, A, n, oracle):
            break
        best = n
    return best


def is_delta_measurable(G: Semigroup, A: ElementSet, oracle: FilterOracle, depth: int) -> bool:
    """Small, or recurrent at every degree up to ``depth``."""
    return oracle.is_small(A) or recurrence_degree(G, A, oracle, depth) == depth


@dataclass
class RecurrenceProfile:
    set: ElementSet
    deltas: list[ElementSet]
    verdicts: list[Verdict]

    @property
    def recurrent(self) -> list[bool]:
        return [v.positive for v in self.verdicts]

    @property
    def degree(self) -> int:
        d = -1
        for ok in self.recurrent:
            if not ok:
                break
            d += 1
        return d

    def to_json(self) -> dict:
        return {
            "set": self.set.to_list(),
            "degrees": [
                {"n": n, "delta": D.to_list(), "verdict": v.value, "recurrent": v.positive}
                for n, (D, v) in enumerate(zip(self.deltas, self.verdicts))
            ],
            "degree": self.degree,
        }


def recurrence_profile(G: Semigroup, A: ElementSet, oracle: FilterOracle, bound: int) -> RecurrenceProfile:
    deltas = [delta_set(G, A, n, oracle) for n in range(bound + 1)]
    return RecurrenceProfile(A, deltas, [oracle.verdict(D) for D in deltas])


# -- derivation trees -------------------------------------------------------

@dataclass
class TreeNode:
    path: tuple[int, ...]
    set: ElementSet
    ext: ElementSet
    expanded: bool

    @property
    def leaf(self) -> bool:
        return not self.ext

    @property
    def truncated(self) -> bool:
        return bool(self.ext) and not self.expanded


@dataclass
class DerivationTree:
    """The derivation tree of ``root`` explored to ``max_depth``.

    Membership is exact for every stored path. Extension sets are computed
    even at the depth bound, so leaves at the bound are recognised; nodes with
    a non-empty extension set that were not expanded are ``truncated``.
    """

    root: ElementSet
    max_depth: int
    nodes: dict[tuple[int, ...], TreeNode] = field(default_factory=dict)
    budget_hit: bool = False

    def __contains__(self, path) -> bool:
        return tuple(path) in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def empty(self) -> bool:
        return not self.nodes

    @property
    def Depth(self) -> int:
        """Longest stored path, -1 for the empty tree."""
        return max((len(p) for p in self.nodes), default=-1)

    @property
    def depth(self) -> Optional[int]:
        """Shortest leaf, -1 for the empty tree, ``None`` if no leaf was seen."""
        if self.empty:
            return -1
        return min((len(p) for p, nd in self.nodes.items() if nd.leaf), default=None)

    @property
    def bound_binds(self) -> bool:
        return any(nd.truncated for nd in self.nodes.values())

    def ext(self, path) -> ElementSet:
        return self.nodes[tuple(path)].ext

    def branches(self) -> list[tuple[int, ...]]:
        """Stored paths without stored children."""
        return [p for p, nd in self.nodes.items() if nd.leaf or not nd.expanded]

    def to_json(self) -> dict:
        return {
            "root": self.root.to_list(),
            "max_depth": self.max_depth,
            "Depth": self.Depth,
            "depth": self.depth,
            "bound_binds": self.bound_binds,
            "budget_hit": self.budget_hit,
            "nodes": [
                {
                    "path": list(p),
                    "set": nd.set.to_list(),
                    "ext": nd.ext.to_list(),
                    "leaf": nd.leaf,
                    "truncated": nd.truncated,
                }
                for p, nd in sorted(self.nodes.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ],
        }


def derivation_tree(
    G: Semigroup,
    A: ElementSet,
    oracle: FilterOracle,
    max_depth: int,
    budget: Optional[int] = None,
) -> DerivationTree:
    """Build the derivation tree of ``A`` down to paths of length ``max_depth``.

    A path ``s`` is in the tree iff ``derivative_t(A)`` is
    ``(|s|-|t|)``-recurrent for every prefix ``t`` of ``s``. If ``budget``
    caps the node count, unexpanded nodes are marked ``truncated`` and
    ``budget_hit`` is set.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be non-negative")
    _check(G, oracle, A)
    budget = _budget.resolve(budget, G.size ** max(max_depth, 1))
    tree = DerivationTree(A, max_depth)
    if not oracle.is_positive(A):
        return tree

    # prefix chain of cached derivatives is carried along with each node
    def ext_of(chain: Sequence[ElementSet]) -> ElementSet:
        L = len(chain) - 1
        # s^x needs every prefix t (including s itself) to be (L+1-|t|)-recurrent
        if all(is_n_recurrent(G, chain[i], L + 1 - i, oracle) for i in range(L + 1)):
            return delta_set(G, chain[-1], 1, oracle)
        return G.empty()

    frontier = [((), [A])]
    tree.nodes[()] = TreeNode((), A, ext_of([A]), expanded=False)
    while frontier:
        nxt = []
        for path, chain in frontier:
            node = tree.nodes[path]
            if len(path) >= max_depth or node.leaf:
                continue
            if budget is not None and len(tree.nodes) + len(node.ext) > budget:
                tree.budget_hit = True
                continue
            for x in node.ext:
                child_set = derivative(G, chain[-1], x)
                child_chain = chain + [child_set]
                cpath = path + (x,)
                tree.nodes[cpath] = TreeNode(cpath, child_set, ext_of(child_chain), expanded=False)
                nxt.append((cpath, child_chain))
            node.expanded = True
        frontier = nxt
    return tree


def branch_fp(
    G: Semigroup, tree: DerivationTree, branch: Sequence[int], oracle: FilterOracle
) -> ElementSet:
    """Finite products of a branch prefix; they must all lie in ``Delta(A)``.

    Raises :class:`InvalidBranch` if a prefix of ``branch`` is not a stored
    path, and :class:`TheoremViolation` if the inclusion fails.
    """
    branch = tuple(branch)
    for i in range(len(branch) + 1):
        if branch[:i] not in tree.nodes:
            raise InvalidBranch(f"{branch[:i]} is not a path of the tree")
    fp = finite_products(G, branch)
    target = delta_set(G, tree.root, 1, oracle)
    if not fp <= target:
        raise TheoremViolation(
            f"FP{branch} = {fp.to_list()} not inside Delta(A) = {target.to_list()}"
        )
    return fp


# -- finite product shifts ---------------------------------------------------

@dataclass
class ShiftWitness:
    h: tuple[int, ...]
    core: ElementSet
    fp: ElementSet
    shifts_checked: int

    def to_json(self) -> dict:
        return {
            "h": list(self.h),
            "core": self.core.to_list(),
            "fp": self.fp.to_list(),
            "shifts_checked": self.shifts_checked,
        }


def fp_shift_witness(
    G: Semigroup,
    A: ElementSet,
    n: int,
    oracle: FilterOracle,
    nontrivial: bool = False,
) -> ShiftWitness:
    """Directions ``h_0..h_{n-1}`` whose iterated derivative ``core`` is positive.

    ``h_i`` is the smallest element of ``Delta^{n-i}`` of the current
    derivative (skipping the identity when ``nontrivial``). Every ``g`` in the
    core satisfies ``g * FP(h) <= A`` and ``g in A``; this is re-checked
    element by element before returning.
    """
    _check(G, oracle, A)
    if not is_n_recurrent(G, A, n, oracle):
        raise PreconditionViolated(f"set is not {n}-recurrent")
    hs: list[int] = []
    cur = A
    for i in range(n):
        cands = delta_set(G, cur, n - i, oracle)
        if nontrivial and G.identity is not None and G.identity in cands:
            cands = cands - G.set([G.identity])
        if not cands:
            raise PreconditionViolated(f"no admissible direction at step {i}")
        h = cands.min()
        hs.append(h)
        cur = derivative(G, cur, h)
    if not oracle.is_positive(cur):
        raise TheoremViolation("iterated derivative along the witness is not positive")
    fp = finite_products(G, hs)
    checked = 0
    for g in cur:
        if g not in A:
            raise TheoremViolation(f"core element {g} not in A")
        for p in fp:
            checked += 1
            if G.multiply(g, p) not in A:
                raise TheoremViolation(f"shift {g}*{p} leaves A")
    return ShiftWitness(tuple(hs), cur, fp, checked)


# -- thickness ---------------------------------------------------------------

def is_recurrently_n_thick(
    G: Semigroup, D: ElementSet, A: ElementSet, n: int, oracle: FilterOracle
) -> bool:
    """Literal recursion for "``D`` is recurrently n-thick in ``A``"."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    _check(G, oracle, D, A)
    memo: dict = {}

    def rt(D: ElementSet, A: ElementSet, n: int) -> bool:
        key = (D.bits, A.bits, n)
        if key in memo:
            return memo[key]
        if not is_n_recurrent(G, A, n, oracle):
            out = True
        elif n == 0:
            out = oracle.is_positive(A & D)
        else:
            good = 0
            for g in G.elements():
                dA = derivative(G, A, g)
                if is_n_recurrent(G, dA, n - 1, oracle) and rt(derivative(G, D, g), dA, n - 1):
                    good |= 1 << g
            out = oracle.is_positive(ElementSet(G.size, good))
        memo[key] = out
        return out

    return rt(D, A, n)


@dataclass(frozen=True)
class ThickResult:
    holds: bool
    exhaustive: bool
    family_size: int

    def __bool__(self) -> bool:
        return self.holds


def restriction_family(oracle: FilterOracle, family: Optional[Iterable[ElementSet]] = None) -> tuple[list[ElementSet], bool]:
    """Large sets ``H`` used to form the restrictions ``A & H``.

    Without an explicit family, every Large set is enumerated when the
    carrier has at most 8 elements; otherwise only the full carrier is used
    and the result is flagged as not exhaustive.
    """
    full = ElementSet.full(oracle.size)
    if family is None:
        if oracle.size <= EXHAUSTIVE_LIMIT:
            return large_sets(oracle, EXHAUSTIVE_LIMIT), True
        log.info("carrier of %d elements: restriction family is {G} only", oracle.size)
        return [full], False
    hs = list(dict.fromkeys([full, *family]))
    for H in hs:
        if not oracle.is_large(H):
            raise InvalidInput(f"restriction family member {H.to_list()} is not Large")
    return hs, False


def is_n_thick_in_delta(
    G: Semigroup,
    D: ElementSet,
    A: ElementSet,
    n: int,
    oracle: FilterOracle,
    family: Optional[Iterable[ElementSet]] = None,
) -> ThickResult:
    """Evaluate "``D`` is n-thick in ``Delta(A)``" over a restriction family.

    For every n-recurrent restriction ``A' = A & H`` the set of ``g`` in ``D``
    with ``derivative(A', g)`` (n-1)-recurrent and ``derivative(D, g)``
    (n-1)-thick in ``Delta(derivative(A', g))`` must be positive. The answer is
    exact only when ``exhaustive`` is set on the result.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    _check(G, oracle, D, A)
    hs, exhaustive = restriction_family(oracle, family)
    memo: dict = {}

    def th(D: ElementSet, A: ElementSet, n: int) -> bool:
        if n == 0:
            return True
        key = (D.bits, A.bits, n)
        if key in memo:
            return memo[key]
        out = True
        seen = set()
        for H in hs:
            At = A & H
            if At.bits in seen:
                continue
            seen.add(At.bits)
            if not is_n_recurrent(G, At, n, oracle):
                continue
            good = 0
            for g in D:
                dA = derivative(G, At, g)
                if is_n_recurrent(G, dA, n - 1, oracle) and th(derivative(G, D, g), dA, n - 1):
                    good |= 1 << g
            if not oracle.is_positive(ElementSet(G.size, good)):
                out = False
                break
        memo[key] = out
        return out

    return ThickResult(th(D, A, n), exhaustive, len(hs))


# -- respecting recurrence ---------------------------------------------------

@dataclass
class RespectsReport:
    oracle: dict
    semigroup: str
    max_n: int
    mode: str
    checked: int
    violations: list[dict]

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "oracle": self.oracle,
            "semigroup": self.semigroup,
            "max_n": self.max_n,
            "mode": self.mode,
            "checked": self.checked,
            "holds": self.holds,
            "violations": self.violations,
        }


def respects_recurrence_check(
    oracle: FilterOracle,
    G: Semigroup,
    max_n: int,
    samples: int = 2000,
    seed: int = 0,
    max_violations: int = 20,
) -> RespectsReport:
    """Scan pairs ``A`` and ``A & H`` (``H`` Large) for a change of n-recurrence.

    Exhaustive over all subsets and all Large sets on carriers of at most 6
    elements; otherwise ``samples`` random pairs drawn with ``seed``.
    """
    _check(G, oracle)
    n_el = G.size
    if n_el <= 6:
        mode = "exhaustive"
        hs = large_sets(oracle, 6)
        pairs = ((A, H) for A in all_subsets(n_el) for H in hs)
    else:
        mode = "sampled"
        rng = np.random.default_rng(seed)

        def draw():
            for _ in range(samples):
                A = ElementSet(n_el, int(sum(1 << i for i in np.flatnonzero(rng.random(n_el) < 0.5))))
                H = ElementSet.full(n_el)
                drop = rng.permutation(n_el)[: rng.integers(0, n_el // 2 + 1)]
                for i in drop:
                    cand = H - ElementSet.of(n_el, [int(i)])
                    if oracle.is_large(cand):
                        H = cand
                yield A, H

        pairs = draw()
    checked = 0
    violations: list[dict] = []
    for A, H in pairs:
        At = A & H
        for n in range(1, max_n + 1):
            checked += 1
            ra = is_n_recurrent(G, A, n, oracle)
            rt = is_n_recurrent(G, At, n, oracle)
            if ra != rt:
                if len(violations) < max_violations:
                    violations.append(
                        {"A": A.to_list(), "H": H.to_list(), "restricted": At.to_list(),
                         "n": n, "A_recurrent": ra, "restricted_recurrent": rt}
                    )
                else:
                    break
        if len(violations) >= max_violations:
            break
    return RespectsReport(oracle.descriptor(), G.name, max_n, mode, checked, violations)
