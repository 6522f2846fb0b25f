"""Finite semigroups given by Cayley tables, plus a truncated model of (N, +).

Elements are dense indices ``0..n-1`` and ``table[a][b]`` is the product
``a*b``. Sets of elements are :class:`~deltaramsey.sets.ElementSet` bitmasks.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InvalidSemigroup, MalformedTable, OutOfWindow, InvalidInput
from .sets import ElementSet

UNDEFINED = -1


@dataclass(frozen=True)
class ValidationReport:
    size: int
    associative: bool
    counterexample: Optional[tuple[int, int, int]]
    identity: Optional[int]
    identity_ok: bool
    identity_counterexample: Optional[int]
    is_group: bool

    @property
    def valid(self) -> bool:
        return self.associative and self.identity_ok


def _as_table(table, partial: bool = False) -> np.ndarray:
    try:
        arr = np.asarray(table, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise MalformedTable(f"table is not an integer matrix: {exc}") from None
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise MalformedTable(f"table must be a non-empty square matrix, got shape {arr.shape}")
    n = arr.shape[0]
    low = UNDEFINED if partial else 0
    bad = np.argwhere((arr < low) | (arr >= n))
    if len(bad):
        a, b = map(int, bad[0])
        raise MalformedTable(f"entry table[{a}][{b}] = {int(arr[a, b])} outside [0, {n})")
    return arr


def _associativity_counterexample(t: np.ndarray) -> Optional[tuple[int, int, int]]:
    n = t.shape[0]
    idx = np.arange(n)
    safe = np.clip(t, 0, None)
    for a in range(n):
        ab = t[a][:, None]  # a*b, broadcast over c
        bc = t  # b*c
        left = np.where(ab >= 0, t[safe[a][:, None], idx[None, :]], UNDEFINED)
        right = np.where(bc >= 0, t[a][safe], UNDEFINED)
        # partial tables: compare only where both bracketings are defined
        bad = np.argwhere((left >= 0) & (right >= 0) & (left != right))
        if len(bad):
            b, c = map(int, bad[0])
            return a, b, c
    return None


def _inverses(t: np.ndarray, e: Optional[int]) -> Optional[list[int]]:
    if e is None:
        return None
    inv = []
    for a in range(t.shape[0]):
        right = np.flatnonzero(t[a] == e)
        cands = [int(b) for b in right if t[b, a] == e]
        if not cands:
            return None
        inv.append(cands[0])
    return inv


def validate(semigroup, identity: Optional[int] = None, partial: bool = False) -> ValidationReport:
    """Check associativity and the identity of a Cayley table.

    Without a declared identity, a two-sided identity is searched for.

    ``semigroup`` may be a :class:`Semigroup` or a raw square table. Raises
    :class:`MalformedTable` for shape or range problems; algebraic failures are
    reported, not raised.
    """
    if isinstance(semigroup, Semigroup):
        identity = semigroup.identity
        partial = semigroup.partial
        t = semigroup.table
    else:
        t = _as_table(semigroup, partial=partial)
    n = t.shape[0]
    if identity is None:
        # undeclared: report a two-sided identity if the table has one
        idx = np.arange(n)
        found = [e for e in range(n) if np.array_equal(t[e], idx) and np.array_equal(t[:, e], idx)]
        identity = found[0] if found else None
    cex = _associativity_counterexample(t)
    id_ok, id_cex = True, None
    if identity is not None:
        if not 0 <= identity < n:
            raise MalformedTable(f"identity {identity} outside [0, {n})")
        for a in range(n):
            if (t[identity, a] != a and t[identity, a] != UNDEFINED) or (
                t[a, identity] != a and t[a, identity] != UNDEFINED
            ):
                id_ok, id_cex = False, a
                break
    is_group = (
        not partial and cex is None and id_ok and _inverses(t, identity) is not None
    )
    return ValidationReport(n, cex is None, cex, identity, id_ok, id_cex, is_group)


class Semigroup:
    """A finite semigroup with an optional identity.

    Construction validates the table and raises :class:`InvalidSemigroup` if
    it is not associative or the declared identity is wrong.
    """

    partial = False

    def __init__(self, table, identity: Optional[int] = None, name: str = ""):
        t = _as_table(table, partial=self.partial)
        t.setflags(write=False)
        self._table = t
        self.size = int(t.shape[0])
        self.identity = None if identity is None else int(identity)
        self.name = name or f"semigroup[{self.size}]"
        report = validate(self)
        if not report.valid:
            raise InvalidSemigroup(f"{self.name} failed validation: {report}", report)
        self.is_group = report.is_group
        self._rows = t.tolist()
        self._cols = t.T.tolist()
        self._inv = _inverses(t, self.identity) if self.is_group else None

    @property
    def table(self) -> np.ndarray:
        return self._table

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name!r} size={self.size}>"

    def __len__(self) -> int:
        return self.size

    def elements(self) -> range:
        return range(self.size)

    def _check_element(self, g):
        if not 0 <= g < self.size:
            raise InvalidInput(f"element {g} not in carrier of size {self.size}")

    def multiply(self, g: int, h: int) -> int:
        self._check_element(g)
        self._check_element(h)
        p = self._rows[g][h]
        if p == UNDEFINED:
            raise OutOfWindow(f"{g}*{h} is outside the window of {self.name}")
        return p

    def product(self, seq: Iterable[int]) -> int:
        """Left-to-right product of a non-empty sequence."""
        it = iter(seq)
        try:
            acc = next(it)
        except StopIteration:
            raise InvalidInput("empty product") from None
        for x in it:
            acc = self.multiply(acc, x)
        return acc

    def inverse(self, g: int) -> int:
        if self._inv is None:
            raise InvalidInput(f"{self.name} is not a group")
        return self._inv[g]

    # -- sets -----------------------------------------------------------
    def set(self, elements: Iterable[int] = ()) -> ElementSet:
        return ElementSet.of(self.size, elements)

    def full(self) -> ElementSet:
        return ElementSet.full(self.size)

    def empty(self) -> ElementSet:
        return ElementSet.empty(self.size)

    def translate_preimage(self, A: ElementSet, g: int) -> ElementSet:
        """``A g^-1 = {h : h*g in A}``; undefined products are excluded."""
        self._check_element(g)
        if A.universe_size != self.size:
            raise InvalidInput("set does not live on this carrier")
        bits = A.bits
        out = 0
        if self._inv is not None:
            row_ginv = self._cols[self._inv[g]]
            # h = a * g^-1 for a in A
            while bits:
                low = bits & -bits
                out |= 1 << row_ginv[low.bit_length() - 1]
                bits ^= low
        else:
            for h, hg in enumerate(self._cols[g]):
                if hg >= 0 and bits >> hg & 1:
                    out |= 1 << h
        return ElementSet(self.size, out)

    def descriptor(self) -> dict:
        return {"name": self.name, "size": self.size, "identity": self.identity}

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "size": self.size,
            "identity": self.identity,
            "table": self._table.tolist(),
        }


class TruncatedNat(Semigroup):
    """``{0, ..., N-1}`` under addition, defined only when ``a + b < N``.

    Products leaving the window raise :class:`OutOfWindow`; they never wrap.
    """

    partial = True

    def __init__(self, horizon: int):
        if horizon < 1:
            raise InvalidInput("horizon must be positive")
        idx = np.arange(horizon)
        s = idx[:, None] + idx[None, :]
        table = np.where(s < horizon, s, UNDEFINED)
        self.horizon = int(horizon)
        super().__init__(table, identity=0, name=f"N<{horizon}")

    def descriptor(self) -> dict:
        return {"name": self.name, "size": self.size, "identity": 0, "horizon": self.horizon}


def translate_preimage(semigroup: Semigroup, A: ElementSet, g: int) -> ElementSet:
    return semigroup.translate_preimage(A, g)


def multiply(semigroup: Semigroup, g: int, h: int) -> int:
    return semigroup.multiply(g, h)


# -- catalog --------------------------------------------------------------

def cyclic(n: int) -> Semigroup:
    """The additive group Z_n."""
    if n < 1:
        raise InvalidInput("n must be positive")
    idx = np.arange(n)
    return Semigroup((idx[:, None] + idx[None, :]) % n, identity=0, name=f"Z{n}")


def _compose(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    # (p*q)(i) = p(q(i)): apply q first
    return tuple(p[i] for i in q)


def permutation_group(generators: Sequence[Sequence[int]], name: str) -> Semigroup:
    """Closure of the given permutations; index 0 is the identity.

    The remaining elements are sorted lexicographically as tuples, and the
    product is composition ``(p*q)(i) = p(q(i))``.
    """
    degree = len(generators[0])
    e = tuple(range(degree))
    seen = {e}
    frontier = [e]
    gens = [tuple(g) for g in generators]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = _compose(g, p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    perms = [e] + sorted(seen - {e})
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[_compose(p, q)] for q in perms] for p in perms]
    G = Semigroup(table, identity=0, name=name)
    G.permutations = perms
    return G


def symmetric_group_3() -> Semigroup:
    return permutation_group([(1, 0, 2), (0, 2, 1)], "S3")


def dihedral_4() -> Semigroup:
    """Symmetries of a square acting on its vertices 0..3."""
    return permutation_group([(1, 2, 3, 0), (0, 3, 2, 1)], "D4")


_QUAT = {  # unit products among 1, i, j, k as (sign, unit)
    (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
    (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
    (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
    (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
}


def quaternion_group() -> Semigroup:
    """Q8 with element ``2*u + s`` for unit ``u`` in (1, i, j, k) and sign bit ``s``."""
    table = np.zeros((8, 8), dtype=np.int64)
    for a, b in itertools.product(range(8), repeat=2):
        sa, ua = (-1 if a & 1 else 1), a >> 1
        sb, ub = (-1 if b & 1 else 1), b >> 1
        s, u = _QUAT[ua, ub]
        s *= sa * sb
        table[a, b] = 2 * u + (s < 0)
    return Semigroup(table, identity=0, name="Q8")


def direct_product(G: Semigroup, H: Semigroup) -> Semigroup:
    """``G x H`` with ``(a, b)`` stored at index ``a * |H| + b``."""
    if G.partial or H.partial:
        raise InvalidInput("direct products of partial semigroups are not supported")
    tg, th = G.table, H.table
    n, m = G.size, H.size
    a = np.arange(n * m)
    ga, ha = a // m, a % m
    table = tg[ga[:, None], ga[None, :]] * m + th[ha[:, None], ha[None, :]]
    e = None
    if G.identity is not None and H.identity is not None:
        e = G.identity * m + H.identity
    return Semigroup(table, identity=e, name=f"{G.name}x{H.name}")


CATALOG_GROUPS = ("S3", "D4", "Q8")


def catalog(name: str, **params) -> Semigroup:
    """Look up a catalog member: ``cyclic`` (param ``n``), ``S3``, ``D4``, ``Q8``,
    ``truncated_nat`` (param ``N``) or ``product`` (param ``factors``, a list
    of descriptors)."""
    key = name.lower()
    if key in ("cyclic", "z"):
        return cyclic(int(params["n"]))
    if key.startswith("z") and key[1:].isdigit():
        return cyclic(int(key[1:]))
    if key == "s3":
        return symmetric_group_3()
    if key == "d4":
        return dihedral_4()
    if key == "q8":
        return quaternion_group()
    if key in ("truncated_nat", "nat"):
        return TruncatedNat(int(params["N"]))
    if key == "product":
        factors = [from_descriptor(f) for f in params["factors"]]
        if len(factors) < 2:
            raise InvalidInput("a product needs at least two factors")
        out = factors[0]
        for f in factors[1:]:
            out = direct_product(out, f)
        return out
    raise InvalidInput(f"unknown catalog member {name!r}")


def catalog_groups(max_cyclic: int = 12) -> list[Semigroup]:
    """Cyclic groups Z_1..Z_max_cyclic followed by S3, D4 and Q8."""
    out = [cyclic(n) for n in range(1, max_cyclic + 1)]
    out += [catalog(n) for n in CATALOG_GROUPS]
    return out


# -- JSON -----------------------------------------------------------------

def from_json(data: dict) -> Semigroup:
    """Build a semigroup from ``{"name", "size", "identity", "table"}``."""
    try:
        table = data["table"]
        size = data.get("size", len(table))
    except (KeyError, TypeError) as exc:
        raise MalformedTable(f"missing field in table object: {exc}") from None
    if len(table) != size:
        raise MalformedTable(f"declared size {size} but table has {len(table)} rows")
    return Semigroup(table, identity=data.get("identity"), name=data.get("name", ""))


def load(path) -> Semigroup:
    with open(Path(path)) as fh:
        return from_json(json.load(fh))


def dump(semigroup: Semigroup, path) -> None:
    with open(Path(path), "w") as fh:
        json.dump(semigroup.to_json(), fh)


def from_descriptor(desc: dict) -> Semigroup:
    """Semigroup from a config descriptor: ``{"catalog": ...}``, ``{"file": ...}``
    or an inline table object."""
    if "catalog" in desc:
        params = {k: v for k, v in desc.items() if k != "catalog"}
        return catalog(desc["catalog"], **params)
    if "file" in desc:
        return load(desc["file"])
    if "table" in desc:
        return from_json(desc)
    raise InvalidInput(f"cannot build a semigroup from {desc!r}")
