"""Directional derivatives of sets and finite product sets.

``derivative(G, A, g)`` is ``A & A g^-1``: the elements of ``A`` whose right
translate by ``g`` stays in ``A``. Iterated derivatives along a path
``(h0, ..., h_{m-1})`` apply ``h0`` first.
"""

from __future__ import annotations

from typing import Optional, Sequence

from . import _budget
from .errors import SearchBudgetExceeded, Unsupported
from .semigroup import Semigroup
from .sets import ElementSet


def derivative(G: Semigroup, A: ElementSet, g: int) -> ElementSet:
    return A & G.translate_preimage(A, g)


def iterated_derivative(G: Semigroup, A: ElementSet, steps: Sequence[int]) -> ElementSet:
    """Fold :func:`derivative` over ``steps`` from the left; ``()`` returns ``A``."""
    for h in steps:
        A = derivative(G, A, h)
    return A


def fp_products(G: Semigroup, seq: Sequence[int]) -> list[int]:
    """Distinct products ``g_alpha`` over non-empty index sets, in discovery order.

    Indices inside a product decrease from left to right, so the newest
    generator always multiplies on the left.
    """
    seen: dict[int, None] = {}
    for g in seq:
        new = [g] + [G.multiply(g, p) for p in seen]
        for x in new:
            seen.setdefault(x)
    return list(seen)


def finite_products(
    G: Semigroup, seq: Sequence[int], include_identity: bool = False
) -> ElementSet:
    """The finite product set ``FP(seq)``.

    The empty product is the identity and is only included on request, which
    requires ``G`` to declare one.
    """
    out = G.set(fp_products(G, seq))
    if include_identity:
        if G.identity is None:
            raise Unsupported(f"{G.name} has no identity for the empty product")
        out = out.add(G.identity)
    return out


def fp_search(
    G: Semigroup, A: ElementSet, length: int, budget: Optional[int] = None
) -> Optional[tuple[int, ...]]:
    """Find ``(g_0, ..., g_{length-1})`` with ``finite_products(...) <= A``.

    The admissible choices for ``g_m`` are exactly the iterated derivative of
    ``A`` along the generators already chosen, so the search walks derivative
    paths depth-first in ascending element order. Returns ``None`` once every
    path has been refuted.

    Raises
    ------
    SearchBudgetExceeded
        If more than ``budget`` nodes are expanded (default: unlimited for
        carriers up to 2**16, see ``DELTARAMSEY_BUDGET_NODES``).
    """
    if length < 1:
        raise ValueError("length must be at least 1")
    budget = _budget.resolve(budget, G.size)
    dead: set[tuple[int, int]] = set()
    nodes = 0

    def dfs(cands: ElementSet, remaining: int):
        nonlocal nodes
        if remaining == 0:
            return ()
        if not cands or (cands.bits, remaining) in dead:
            return None
        if remaining == 1:
            return (cands.min(),)
        for g in cands:
            nodes += 1
            if budget is not None and nodes > budget:
                raise SearchBudgetExceeded(f"fp_search exceeded {budget} nodes", nodes)
            rest = dfs(derivative(G, cands, g), remaining - 1)
            if rest is not None:
                return (g,) + rest
        dead.add((cands.bits, remaining))
        return None

    return dfs(A, length)
