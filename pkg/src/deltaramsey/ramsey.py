"""Constructive Delta-Ramsey witnesses and an independent transcript checker.

Given a relation ``R`` with ``H = {h : {g : R(g, g h)} is Large}`` Large and an
n-recurrent set ``A``, the extractor builds directions ``h_0..h_{n-1}`` and
nested sets ``A_0 >= A_1 >= ...`` so that any ``g`` in ``A_n`` yields
``n + 1`` elements ``g_i = g h_{alpha_i}`` (``alpha_i = {n-1, ..., i}``) of
``A`` with ``R(g_j, g_i)`` whenever ``i < j``.

Index sets ``alpha`` are bitmasks over ``0..m-1``; ``h_alpha`` multiplies the
chosen directions in decreasing index order.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from . import _budget
from .calculus import derivative, iterated_derivative
from .errors import (
    HypothesisViolated,
    InvalidInput,
    NoWitnessFound,
    PreconditionViolated,
    SearchBudgetExceeded,
)
from .filters import FilterOracle
from .recurrence import EXHAUSTIVE_LIMIT, is_n_recurrent, is_n_thick_in_delta
from .semigroup import UNDEFINED, Semigroup
from .sets import ElementSet

log = logging.getLogger(__name__)


class Relation:
    """A binary relation on ``{0..n-1}`` as a dense boolean matrix (not
    necessarily symmetric)."""

    def __init__(self, adjacency):
        adj = np.asarray(adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise InvalidInput(f"adjacency must be square, got shape {adj.shape}")
        adj.setflags(write=False)
        self.adj = adj
        self.size = int(adj.shape[0])
        # pred[y]: bits of {x : R(x, y)}
        self._pred = [ElementSet.from_mask(adj[:, y]).bits for y in range(self.size)]

    def __call__(self, a: int, b: int) -> bool:
        return bool(self.adj[a, b])

    def __repr__(self) -> str:
        return f"<Relation size={self.size} edges={int(self.adj.sum())}>"

    @classmethod
    def from_edges(cls, size: int, edges: Iterable[Iterable[int]]) -> Relation:
        adj = np.zeros((size, size), dtype=bool)
        for a, b in edges:
            if not (0 <= a < size and 0 <= b < size):
                raise InvalidInput(f"edge ({a}, {b}) outside [0, {size})")
            adj[a, b] = True
        return cls(adj)

    @classmethod
    def from_predicate(cls, size: int, pred: Callable[[int, int], bool]) -> Relation:
        return cls([[bool(pred(a, b)) for b in range(size)] for a in range(size)])

    @classmethod
    def from_json(cls, data: dict) -> Relation:
        if "matrix" in data:
            return cls(data["matrix"])
        return cls.from_edges(int(data["size"]), data.get("edges", []))

    def to_json(self) -> dict:
        return {"size": self.size, "edges": np.argwhere(self.adj).tolist()}

    def shifted(self, G: Semigroup, h: Optional[int], h2: int) -> ElementSet:
        """``{g : R(g h, g h2)}``; ``h=None`` means no right factor on the
        first slot. Pairs with an undefined product are excluded."""
        if G.size != self.size:
            raise InvalidInput("relation and semigroup sizes differ")
        t = G.table
        left = np.arange(self.size) if h is None else t[:, h]
        right = t[:, h2]
        ok = (left != UNDEFINED) & (right != UNDEFINED)
        vals = np.zeros(self.size, dtype=bool)
        vals[ok] = self.adj[left[ok], right[ok]]
        return ElementSet.from_mask(vals)


@dataclass
class HypothesisReport:
    holds: bool
    H: ElementSet
    verdict: str

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {"holds": self.holds, "H": self.H.to_list(), "verdict": self.verdict}


def hypothesis_check(G: Semigroup, R: Relation, oracle: FilterOracle) -> HypothesisReport:
    """Compute ``H = {h : R(., . h) is Large}`` and whether ``H`` is Large."""
    H = G.set(h for h in G.elements() if oracle.is_large(R.shifted(G, None, h)))
    v = oracle.verdict(H)
    return HypothesisReport(oracle.is_large(H), H, v.value)


def _h_alpha(G: Semigroup, hs, alpha: int) -> Optional[int]:
    """Product of ``hs[i]`` over set bits of ``alpha``, highest index first;
    None for the empty index set."""
    acc = None
    for i in range(len(hs) - 1, -1, -1):
        if alpha >> i & 1:
            acc = hs[i] if acc is None else G.multiply(acc, hs[i])
    return acc


@dataclass
class RamseyTranscript:
    n: int
    h: tuple[int, ...]
    A_seq: list[ElementSet]
    H_seq: list[ElementSet]
    g: Optional[int] = None
    witness: Optional[tuple[int, ...]] = None
    thick: list[Optional[bool]] = field(default_factory=list)
    nodes: int = 0

    @property
    def complete(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "h": list(self.h),
            "A_seq": [A.to_list() for A in self.A_seq],
            "H_seq": [H.to_list() for H in self.H_seq],
            "g": self.g,
            "witness": None if self.witness is None else list(self.witness),
            "thick_diagnostic": self.thick,
            "nodes": self.nodes,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _witness(G: Semigroup, hs, g: int) -> tuple[int, ...]:
    n = len(hs)
    out = []
    for i in range(n + 1):
        alpha = ((1 << n) - 1) & ~((1 << i) - 1)  # {n-1, ..., i}
        p = _h_alpha(G, hs, alpha)
        out.append(g if p is None else G.multiply(g, p))
    return tuple(out)


def delta_ramsey_witness(
    G: Semigroup,
    R: Relation,
    n: int,
    oracle: FilterOracle,
    A: Optional[ElementSet] = None,
    budget: Optional[int] = None,
    diagnostics: Optional[bool] = None,
) -> RamseyTranscript:
    """Run the Delta-Ramsey construction with depth-first backtracking.

    At step ``m`` the candidates ``h`` are the elements of ``H_m`` in
    ascending order such that ``derivative(A_m, h)`` is (n-m-1)-recurrent and
    ``A_{m+1} = derivative(A_m, h) & R(., . h h_alpha)`` (every ``alpha``
    inside ``0..m-1``) is (n-m-1)-recurrent too. ``H_{m+1}`` is the derivative
    of ``H_m`` along ``h``, which keeps every ``h_alpha`` inside ``H``.

    With ``diagnostics`` (default: carriers of at most 8 elements) the
    thickness of ``H_m`` in ``Delta(A_m)`` is evaluated exhaustively and
    recorded in ``thick``; it never gates the search.

    Raises
    ------
    PreconditionViolated
        If ``A`` is not n-recurrent (in particular if it is empty).
    HypothesisViolated
        If ``H`` is not Large.
    NoWitnessFound
        If every candidate sequence is refuted; ``deepest`` holds the longest
        partial transcript.
    SearchBudgetExceeded
        If more than ``budget`` candidates are tried.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    A = G.full() if A is None else A
    if not is_n_recurrent(G, A, n, oracle):
        raise PreconditionViolated(f"A is not {n}-recurrent")
    hyp = hypothesis_check(G, R, oracle)
    if not hyp.holds:
        raise HypothesisViolated(f"H = {hyp.H.to_list()} is {hyp.verdict}, not Large")
    budget = _budget.resolve(budget, G.size ** max(n, 1))
    if diagnostics is None:
        diagnostics = G.size <= EXHAUSTIVE_LIMIT

    hs: list[int] = []
    A_seq = [A]
    H_seq = [hyp.H]
    nodes = 0
    deepest = RamseyTranscript(n, (), [A], [hyp.H])

    def dfs(m: int) -> bool:
        nonlocal nodes, deepest
        if m > len(deepest.h):
            deepest = RamseyTranscript(n, tuple(hs), list(A_seq), list(H_seq), nodes=nodes)
        if m == n:
            return bool(A_seq[n])
        Am, Hm = A_seq[m], H_seq[m]
        deg = n - m - 1
        for h in Hm:
            nodes += 1
            if budget is not None and nodes > budget:
                raise SearchBudgetExceeded(f"Delta-Ramsey search exceeded {budget} nodes", nodes)
            dA = derivative(G, Am, h)
            if not is_n_recurrent(G, dA, deg, oracle):
                continue
            nxt = dA
            for alpha in range(1 << m):
                p = _h_alpha(G, hs, alpha)
                nxt = nxt & R.shifted(G, None, h if p is None else G.multiply(h, p))
                if not nxt:
                    break
            if not is_n_recurrent(G, nxt, deg, oracle):
                continue
            hs.append(h)
            A_seq.append(nxt)
            H_seq.append(derivative(G, Hm, h))
            if dfs(m + 1):
                return True
            hs.pop()
            A_seq.pop()
            H_seq.pop()
        return False

    if not dfs(0):
        raise NoWitnessFound(f"no admissible direction sequence of length {n}", deepest)

    g = A_seq[n].min()
    t = RamseyTranscript(n, tuple(hs), list(A_seq), list(H_seq), g, _witness(G, hs, g), nodes=nodes)
    if diagnostics:
        for m in range(n + 1):
            res = is_n_thick_in_delta(G, H_seq[m], A_seq[m], n - m, oracle)
            t.thick.append(res.holds)
            if not res.holds:
                log.info("step %d: H_m is not (%d)-thick in Delta(A_m)", m, n - m)
    else:
        t.thick = [None] * (n + 1)
        log.info("thickness diagnostic skipped on a carrier of %d elements", G.size)
    return t


# -- independent checker ---------------------------------------------------

def _prod(G: Semigroup, xs: list[int]) -> Optional[int]:
    if not xs:
        return None
    acc = xs[0]
    for x in xs[1:]:
        acc = G.multiply(acc, x)
    return acc


def _precedes(beta: frozenset, alpha: frozenset) -> bool:
    """``beta < alpha``: ``max(beta) < min(alpha)`` or one of them is empty."""
    return not beta or not alpha or max(beta) < min(alpha)


def verify_transcript(
    G: Semigroup, R: Relation, A: Optional[ElementSet], t: RamseyTranscript, oracle: FilterOracle
) -> list[str]:
    """Re-check a transcript from scratch; returns the list of violations.

    Recomputes ``H`` directly from ``R`` and every ``h_alpha`` from the raw
    direction sequence, then checks the invariants of each step, the witness
    formula, membership in ``A`` and the clique condition.
    """
    A = G.full() if A is None else A
    n = t.n
    hs = list(t.h)
    problems: list[str] = []
    if len(hs) != n or len(t.A_seq) != n + 1:
        return [f"transcript has {len(hs)} directions and {len(t.A_seq)} sets for n={n}"]

    H = G.set(
        h for h in G.elements()
        if oracle.is_large(G.set(g for g in G.elements() if _rel(G, R, g, None, h)))
    )

    def h_of(alpha: frozenset) -> Optional[int]:
        return _prod(G, [hs[i] for i in sorted(alpha, reverse=True)])

    for m in range(n + 1):
        Am = t.A_seq[m]
        idx = range(m)
        subsets = [frozenset(c) for k in range(m + 1) for c in itertools.combinations(idx, k)]
        if not Am <= iterated_derivative(G, A, hs[:m]):
            problems.append(f"(m.1) A_{m} is not inside the iterated derivative of A")
        if not is_n_recurrent(G, Am, n - m, oracle):
            problems.append(f"(m.1) A_{m} is not {n - m}-recurrent")
        for alpha in subsets:
            for beta in subsets:
                if not beta or alpha & beta or not _precedes(beta, alpha):
                    continue
                ha, hb = h_of(alpha), h_of(beta)
                for g in Am:
                    if not _rel(G, R, g, ha, hb if ha is None else G.multiply(ha, hb)):
                        problems.append(
                            f"(m.2) g={g} in A_{m} fails R(.h_a, .h_a h_b) for "
                            f"alpha={sorted(alpha)}, beta={sorted(beta)}"
                        )
                        break
            if alpha and h_of(alpha) not in H:
                problems.append(f"(m.3) h_alpha for alpha={sorted(alpha)} is not in H")
    if t.H_seq and t.H_seq[-1] != iterated_derivative(G, H, hs):
        problems.append("H_n is not the iterated derivative of H")

    if t.witness is None or t.g is None:
        problems.append("no witness recorded")
        return problems
    if t.g not in t.A_seq[n]:
        problems.append(f"g={t.g} is not in A_n")
    expected = tuple(
        t.g if h_of(frozenset(range(i, n))) is None else G.multiply(t.g, h_of(frozenset(range(i, n))))
        for i in range(n + 1)
    )
    if tuple(t.witness) != expected:
        problems.append(f"witness {list(t.witness)} differs from g*h_alpha_i = {list(expected)}")
    for i, gi in enumerate(t.witness):
        if gi not in A:
            problems.append(f"membership: g_{i}={gi} is not in A")
    for j in range(len(t.witness)):
        for i in range(j):
            if not R(t.witness[j], t.witness[i]):
                problems.append(f"clique: R(g_{j}, g_{i}) fails")
    return problems


def _rel(G: Semigroup, R: Relation, g: int, h: Optional[int], h2: int) -> bool:
    """``R(g h, g h2)`` with ``h=None`` meaning ``g`` itself; False when a
    product is undefined."""
    a = g if h is None else G.table[g, h]
    b = G.table[g, h2]
    if a == UNDEFINED or b == UNDEFINED:
        return False
    return R(int(a), int(b))


def brute_force_clique(
    R: Relation, A: ElementSet, n: int, budget: Optional[int] = None
) -> Optional[tuple[int, ...]]:
    """Lexicographically first ``(g_0, ..., g_n)`` in ``A`` with
    ``R(g_j, g_i)`` for all ``i < j``, or None if none exists.

    Raises :class:`SearchBudgetExceeded` (indeterminate) past ``budget`` nodes.
    """
    if A.universe_size != R.size:
        raise InvalidInput("set and relation sizes differ")
    budget = _budget.resolve(budget, len(A) ** (n + 1))
    nodes = 0
    chosen: list[int] = []

    def dfs(cands: int) -> bool:
        nonlocal nodes
        if len(chosen) == n + 1:
            return True
        for x in ElementSet(R.size, cands):
            nodes += 1
            if budget is not None and nodes > budget:
                raise SearchBudgetExceeded(f"clique search exceeded {budget} nodes", nodes)
            chosen.append(x)
            # every later element must relate to x
            if dfs(cands & R._pred[x]):
                return True
            chosen.pop()
        return False

    if dfs(A.bits):
        return tuple(chosen)
    return None

