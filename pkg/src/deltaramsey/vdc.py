"""Finite-dimensional harness for the difference-lemma machinery.

Inner products are linear in the first slot: ``<x, y> = sum x * conj(y)``.
Limits along a filter are read as verdicts on sublevel sets, so "``<e_g, f>``
tends to 0" becomes "``{g : |<e_g, f>| >= eps}`` is Small".
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidInput, NoWitnessFound, PreconditionViolated, HypothesisViolated
from .filters import FilterOracle
from .ramsey import Relation, delta_ramsey_witness, hypothesis_check, verify_transcript
from .recurrence import is_n_recurrent
from .semigroup import UNDEFINED, Semigroup
from .sets import ElementSet

ATOL = 1e-9


def inner(x: np.ndarray, y: np.ndarray) -> complex | float:
    return np.vdot(y, x)


class VectorFamily:
    """Vectors ``e_g`` indexed by the elements of a carrier.

    Parameters
    ----------
    vectors : array of shape (n_elements, dim)
        Row ``g`` is ``e_g``; real or complex.
    norm_bound : float
        Every row must have norm at most this (checked on construction).
    """

    def __init__(self, vectors, norm_bound: float = 1.0):
        v = np.asarray(vectors)
        if v.ndim != 2:
            raise InvalidInput("vectors must be a 2-d array (one row per element)")
        norms = np.linalg.norm(v, axis=1)
        worst = int(np.argmax(norms)) if len(norms) else 0
        if len(norms) and norms[worst] > norm_bound * (1 + 1e-12):
            raise InvalidInput(f"|e_{worst}| = {norms[worst]:.6g} exceeds {norm_bound}")
        self.vectors = v
        self.norm_bound = float(norm_bound)

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __getitem__(self, g: int) -> np.ndarray:
        return self.vectors[g]

    def gram(self) -> np.ndarray:
        """``gram[g, k] = <e_g, e_k>``."""
        return self.vectors @ self.vectors.conj().T

    def coefficients(self, f) -> np.ndarray:
        """``<e_g, f>`` for every ``g``."""
        return self.vectors @ np.conj(np.asarray(f))

    def to_json(self) -> dict:
        v = self.vectors
        out = {"norm_bound": self.norm_bound, "real": v.real.tolist()}
        if np.iscomplexobj(v):
            out["imag"] = v.imag.tolist()
        return out

    @classmethod
    def from_json(cls, data: dict) -> VectorFamily:
        v = np.asarray(data["real"], dtype=float)
        if "imag" in data:
            v = v + 1j * np.asarray(data["imag"], dtype=float)
        return cls(v, data.get("norm_bound", 1.0))


def perturbed_orthonormal_family(
    n_elements: int, dim: int, delta: float, rng: np.random.Generator
) -> tuple[VectorFamily, np.ndarray]:
    """``e_g`` = column ``g mod dim`` of a random orthonormal basis plus noise.

    The noise has norm ``delta / 3`` and rows are rescaled to norm at most 1,
    so rows with distinct residues have ``|<e_g, e_k>| <= delta``. Returns the
    family and the basis.
    """
    Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    rows = np.empty((n_elements, dim))
    for g in range(n_elements):
        noise = rng.standard_normal(dim)
        noise *= (delta / 3) / np.linalg.norm(noise)
        v = Q[:, g % dim] + noise
        rows[g] = v / max(1.0, np.linalg.norm(v))
    return VectorFamily(rows), Q


# -- hypothesis and conclusion ------------------------------------------------

@dataclass
class VdcHypothesis:
    good_h: ElementSet
    holds: bool
    verdict: str
    eps: float

    def to_json(self) -> dict:
        return {"good_h": self.good_h.to_list(), "holds": self.holds,
                "verdict": self.verdict, "eps": self.eps}


def vdc_hypothesis(G: Semigroup, fam: VectorFamily, oracle: FilterOracle, eps: float) -> VdcHypothesis:
    """``good_h = {h : {g : |<e_g, e_{gh}>| <= eps} is Large}``; the
    hypothesis holds iff ``good_h`` is Large. ``g`` with ``g h`` undefined
    count as failures."""
    if eps <= 0:
        raise InvalidInput("eps must be positive")
    if fam.size != G.size:
        raise InvalidInput("family and semigroup sizes differ")
    gram = np.abs(fam.gram())
    t = G.table
    good = 0
    for h in G.elements():
        col = t[:, h]
        ok = col != UNDEFINED
        small = np.zeros(G.size, dtype=bool)
        idx = np.flatnonzero(ok)
        small[idx] = gram[idx, col[idx]] <= eps
        if oracle.is_large(ElementSet.from_mask(small)):
            good |= 1 << h
    good_h = ElementSet(G.size, good)
    return VdcHypothesis(good_h, oracle.is_large(good_h), oracle.verdict(good_h).value, float(eps))


def vdc_bad_set(fam: VectorFamily, f, eps: float) -> ElementSet:
    """``{g : |<e_g, f>| >= eps}``."""
    return ElementSet.from_mask(np.abs(fam.coefficients(f)) >= eps)


@dataclass
class VdcConclusion:
    bad_set: ElementSet
    verdict: str
    holds: bool

    def to_json(self) -> dict:
        return {"bad_set": self.bad_set.to_list(), "verdict": self.verdict, "holds": self.holds}


def vdc_conclusion(fam: VectorFamily, f, oracle: FilterOracle, eps: float) -> VdcConclusion:
    """The conclusion at level ``eps`` holds iff the bad set is Small."""
    if eps <= 0:
        raise InvalidInput("eps must be positive")
    A = vdc_bad_set(fam, f, eps)
    v = oracle.verdict(A)
    return VdcConclusion(A, v.value, not v.positive)


@dataclass
class GateReport:
    signed_set: ElementSet
    signed_ok: bool
    abs_set: ElementSet
    abs_ok: bool
    depth: int

    @property
    def passes(self) -> bool:
        return self.signed_ok and self.abs_ok

    def to_json(self) -> dict:
        return {"signed_set": self.signed_set.to_list(), "signed_ok": self.signed_ok,
                "abs_set": self.abs_set.to_list(), "abs_ok": self.abs_ok,
                "depth": self.depth, "passes": self.passes}


def measurability_gate(
    G: Semigroup, fam: VectorFamily, f, oracle: FilterOracle, eps: float, depth: int
) -> GateReport:
    """Is ``{g : Re <e_g, f> >= eps}`` Small or recurrent up to ``depth``?

    The absolute-value set used by the contradiction argument is gated the
    same way.
    """
    coef = fam.coefficients(f)

    def ok(A: ElementSet) -> bool:
        return oracle.is_small(A) or all(is_n_recurrent(G, A, n, oracle) for n in range(depth + 1))

    signed = ElementSet.from_mask(np.real(coef) >= eps)
    absolute = ElementSet.from_mask(np.abs(coef) >= eps)
    return GateReport(signed, ok(signed), absolute, ok(absolute), depth)


# -- the approximate Bessel chain -----------------------------------------------

@dataclass
class BesselChain:
    n: int
    delta: float
    norm_f_sq: float
    eps: float
    lines: list[float]
    relations: list[dict]
    precondition_violations: list[dict]
    delta_condition: bool

    @property
    def preconditions_hold(self) -> bool:
        return not self.precondition_violations

    @property
    def contradiction(self) -> bool:
        """``|f|^2 < n eps^2 / 2``: the last line of the chain is negative."""
        return self.norm_f_sq < self.n * self.eps ** 2 / 2

    @property
    def chain_holds(self) -> bool:
        return all(r["holds"] for r in self.relations if r["holds"] is not None)

    @property
    def anomaly(self) -> bool:
        """The chain broke under its own hypotheses, or it proved a negative
        number non-negative."""
        if not self.preconditions_hold:
            return False
        if not self.chain_holds:
            return True
        return self.contradiction and self.delta_condition

    def to_json(self) -> dict:
        return {
            "n": self.n, "delta": self.delta, "norm_f_sq": self.norm_f_sq, "eps": self.eps,
            "lines": self.lines, "relations": self.relations,
            "precondition_violations": self.precondition_violations,
            "delta_condition": self.delta_condition, "contradiction": self.contradiction,
            "chain_holds": self.chain_holds, "anomaly": self.anomaly,
        }


def bessel_error_chain(vectors, f, delta: float, atol: float = ATOL) -> BesselChain:
    """Evaluate every line of Bessel's inequality for almost orthogonal vectors.

    With ``c_i = <f, e_i>`` and ``eps = min |c_i|`` the lines are

    0. ``0``
    1. ``|f - sum c_i e_i|^2``
    2. ``|f|^2 - 2 sum |c_i|^2 + sum_{i,j} c_i conj(c_j) <e_i, e_j>``
    3. ``|f|^2 - 2 sum |c_i|^2 + sum |c_i|^2 |e_i|^2 + sum_{i != j} |f|^2 |e_i| |e_j| |<e_i, e_j>|``
    4. ``|f|^2 - sum |c_i|^2 + n (n-1) |f|^2 delta``
    5. ``|f|^2 - n eps^2 + n (n-1) |f|^2 delta``
    6. ``|f|^2 - n eps^2 / 2``

    Relations: line 0 <= line 1 = line 2 <= line 3 <= line 4 <= line 5, and
    line 5 <= line 6 whenever ``(n-1) |f|^2 delta <= eps^2 / 2``. Lines 3 and
    later need ``|e_i| <= 1`` and ``|<e_i, e_j>| <= delta``; violated pairs are
    listed rather than raised.
    """
    E = np.atleast_2d(np.asarray(vectors))
    f = np.asarray(f)
    n = E.shape[0]
    c = np.array([inner(f, e) for e in E])
    gram = E @ E.conj().T
    norms = np.sqrt(np.real(np.diag(gram)))
    nf2 = float(np.real(inner(f, f)))
    abs_c2 = np.abs(c) ** 2
    eps = float(np.min(np.abs(c))) if n else 0.0

    viol = []
    for i in range(n):
        if norms[i] > 1 + atol:
            viol.append({"kind": "norm", "i": i, "value": float(norms[i])})
    for i, j in itertools.combinations(range(n), 2):
        if abs(gram[i, j]) > delta + atol:
            viol.append({"kind": "pair", "i": i, "j": j, "value": float(abs(gram[i, j]))})

    resid = f - c @ E
    off = ~np.eye(n, dtype=bool)
    L1 = float(np.real(inner(resid, resid)))
    L2 = float(np.real(nf2 - 2 * abs_c2.sum() + np.sum(np.outer(c, np.conj(c)) * gram)))
    L3 = float(nf2 - 2 * abs_c2.sum() + np.sum(abs_c2 * norms ** 2)
               + np.sum((nf2 * np.outer(norms, norms) * np.abs(gram))[off]))
    L4 = float(nf2 - abs_c2.sum() + n * (n - 1) * nf2 * delta)
    L5 = float(nf2 - n * eps ** 2 + n * (n - 1) * nf2 * delta)
    L6 = float(nf2 - n * eps ** 2 / 2)
    lines = [0.0, L1, L2, L3, L4, L5, L6]
    delta_cond = (n - 1) * nf2 * delta <= eps ** 2 / 2

    def le(a, b):
        return a <= b + atol

    rel = [
        {"rel": "0 <= 1", "holds": le(0.0, L1)},
        {"rel": "1 == 2", "holds": abs(L1 - L2) <= atol},
        {"rel": "2 <= 3", "holds": le(L2, L3)},
        {"rel": "3 <= 4", "holds": le(L3, L4)},
        {"rel": "4 <= 5", "holds": le(L4, L5)},
        {"rel": "5 <= 6", "holds": le(L5, L6) if delta_cond else None},
    ]
    return BesselChain(n, float(delta), nf2, eps, lines, rel, viol, bool(delta_cond))


# -- end-to-end run ---------------------------------------------------------------

@dataclass
class VdcExperiment:
    hypothesis: VdcHypothesis
    conclusion: VdcConclusion
    gate: GateReport
    eps: float
    delta: float
    n: Optional[int] = None
    stage: str = ""
    transcript: Optional[dict] = None
    chain: Optional[BesselChain] = None
    notes: list[str] = field(default_factory=list)

    @property
    def anomaly(self) -> bool:
        return self.chain is not None and self.chain.anomaly

    def to_json(self) -> dict:
        return {
            "hypothesis": self.hypothesis.to_json(),
            "conclusion": self.conclusion.to_json(),
            "gate": self.gate.to_json(),
            "eps": self.eps, "delta": self.delta, "n": self.n, "stage": self.stage,
            "transcript": self.transcript,
            "chain": None if self.chain is None else self.chain.to_json(),
            "anomaly": self.anomaly, "notes": self.notes,
        }


def vdc_experiment(
    G: Semigroup,
    fam: VectorFamily,
    f,
    oracle: FilterOracle,
    eps: float,
    hyp_eps: Optional[float] = None,
    delta: Optional[float] = None,
    depth: int = 3,
) -> VdcExperiment:
    """Run the contradiction argument on a finite family and report where it stops.

    If the bad set ``A = {g : |<e_g, f>| >= eps}`` is positive, pick the least
    ``n`` with ``|f|^2 < n eps^2 / 2`` and ``delta`` with
    ``(n-1) |f|^2 delta <= eps^2 / 2``, look for ``n`` elements of ``A`` whose
    vectors are pairwise ``delta``-orthogonal via the Delta-Ramsey extractor,
    and evaluate the Bessel chain on them. A successful extraction would make
    the chain end below zero, which is impossible; ``stage`` names the step at
    which the argument stopped instead.
    """
    hyp = vdc_hypothesis(G, fam, oracle, hyp_eps if hyp_eps is not None else eps)
    concl = vdc_conclusion(fam, f, oracle, eps)
    gate = measurability_gate(G, fam, f, oracle, eps, depth)
    out = VdcExperiment(hyp, concl, gate, float(eps), float(delta or 0.0))
    f = np.asarray(f)
    nf2 = float(np.real(inner(f, f)))
    A = concl.bad_set
    if not oracle.is_positive(A):
        out.stage = "bad set is Small: conclusion holds"
        return out
    if not gate.abs_ok:
        out.stage = "bad set fails the measurability gate"
        out.notes.append("set is positive but not recurrent up to the depth bound")
    n = math.floor(2 * nf2 / eps ** 2) + 1
    out.n = n
    if delta is None:
        delta = eps ** 2 / (2 * (n - 1) * nf2) if n > 1 and nf2 > 0 else 1.0
    out.delta = float(delta)
    if out.stage:
        return out
    gram = np.abs(fam.gram())
    R = Relation(gram <= delta)
    if not hypothesis_check(G, R, oracle).holds:
        out.stage = "delta-orthogonality relation fails the Ramsey hypothesis"
        return out
    if not is_n_recurrent(G, A, n - 1, oracle):
        out.stage = f"bad set is not {n - 1}-recurrent"
        return out
    try:
        t = delta_ramsey_witness(G, R, n - 1, oracle, A=A)
    except (NoWitnessFound, PreconditionViolated, HypothesisViolated) as exc:
        out.stage = f"no Ramsey witness: {exc}"
        return out
    out.transcript = t.to_json()
    problems = verify_transcript(G, R, A, t, oracle)
    if problems:
        out.notes.extend(problems)
    out.chain = bessel_error_chain(fam.vectors[list(t.witness)], f, delta)
    out.stage = "witness found: chain evaluated"
    return out


# -- actions on a finite probability space --------------------------------------

class FiniteAction:
    """Right action ``alpha`` and optional left action ``beta`` of ``G`` on
    ``X = {0..N-1}`` with probability vector ``nu``.

    ``alpha[x, g]`` is ``x . g`` and ``beta[g, x]`` is ``g . x``. Construction
    checks the action laws and that every map preserves ``nu``.
    """

    def __init__(self, G: Semigroup, alpha, beta=None, nu: Optional[Sequence] = None):
        alpha = np.asarray(alpha, dtype=np.int64)
        N = alpha.shape[0]
        if alpha.shape != (N, G.size):
            raise InvalidInput(f"alpha must have shape (|X|, |G|), got {alpha.shape}")
        if beta is not None:
            beta = np.asarray(beta, dtype=np.int64)
            if beta.shape != (G.size, N):
                raise InvalidInput(f"beta must have shape (|G|, |X|), got {beta.shape}")
        if nu is None:
            nu = [Fraction(1, N)] * N
        nu = [x if isinstance(x, (Fraction, float)) else Fraction(x) for x in nu]
        if len(nu) != N or any(x < 0 for x in nu) or not math.isclose(float(sum(nu)), 1.0):
            raise InvalidInput("nu must be a probability vector on X")
        self.G, self.alpha, self.beta, self.nu = G, alpha, beta, list(nu)
        self.size = N
        self._validate()

    def _validate(self):
        G, a, b, N = self.G, self.alpha, self.beta, self.size
        if a.min() < 0 or a.max() >= N:
            raise InvalidInput("alpha leaves X")
        for g, h in itertools.product(G.elements(), repeat=2):
            gh = G.table[g, h]
            if gh == UNDEFINED:
                continue
            if not np.array_equal(a[a[:, g], h], a[:, gh]):
                raise InvalidInput(f"alpha is not a right action at g={g}, h={h}")
            if b is not None and not np.array_equal(b[g, b[h]], b[gh]):
                raise InvalidInput(f"beta is not a left action at g={g}, h={h}")
        maps = [a[:, g] for g in G.elements()]
        if b is not None:
            if b.min() < 0 or b.max() >= N:
                raise InvalidInput("beta leaves X")
            maps += [b[g] for g in G.elements()]
        for m in maps:
            if len(set(m.tolist())) != N:
                raise InvalidInput("action map is not a bijection")
            if any(self.nu[int(m[x])] != self.nu[x] for x in range(N)):
                raise InvalidInput("action map does not preserve nu")

    def commute_witness(self) -> Optional[tuple[int, int, int]]:
        """``(g, x, h)`` with ``g.(x.h) != (g.x).h``, or None."""
        if self.beta is None:
            raise PreconditionViolated("no left action")
        a, b = self.alpha, self.beta
        for g, h in itertools.product(self.G.elements(), repeat=2):
            lhs = b[g, a[:, h]]
            rhs = a[b[g], h]
            bad = np.flatnonzero(lhs != rhs)
            if bad.size:
                return g, int(bad[0]), h
        return None

    def measure(self, S) -> Fraction | float:
        return sum((self.nu[x] for x in S), Fraction(0))

    def integrate(self, F: np.ndarray) -> float:
        w = np.array([float(x) for x in self.nu])
        return float(np.dot(w, F))

    # function lifts
    def lift_alpha(self, g: int, F: np.ndarray) -> np.ndarray:
        """``(g . F)(x) = F(x . g)``."""
        return F[self.alpha[:, g]]

    def lift_beta(self, F: np.ndarray, g: int) -> np.ndarray:
        """``(F . g)(x) = F(g . x)``."""
        return F[self.beta[g]]

    def lift_gamma(self, F: np.ndarray, g: int) -> np.ndarray:
        """``F`` evaluated at ``g . x . g^-1`` (left action by ``g``, right
        action by ``g^-1``), the adjoint of ``g . (F . g)`` under ``alpha``."""
        ginv = self.G.inverse(g)
        return F[self.beta[g][self.alpha[:, ginv]]]


def rotation_action(m: int, N: int, step_alpha: int, step_beta: Optional[int] = None) -> FiniteAction:
    """``Z_m`` acting on ``Z_N`` by ``x . g = x + step_alpha * g`` and
    ``g . x = x + step_beta * g`` (mod ``N``).

    Each step needs ``m * step = 0 (mod N)``. Rotations commute, so the two
    actions always do.
    """
    from .semigroup import cyclic

    for s in (step_alpha, step_beta):
        if s is not None and (m * s) % N:
            raise InvalidInput(f"step {s} does not define a Z_{m} action on Z_{N}")
    G = cyclic(m)
    xs = np.arange(N)
    gs = np.arange(m)
    alpha = (xs[:, None] + step_alpha * gs[None, :]) % N
    beta = None if step_beta is None else (xs[None, :] + step_beta * gs[:, None]) % N
    return FiniteAction(G, alpha, beta)


def regular_action(G: Semigroup) -> FiniteAction:
    """``G`` acting on itself by right and left multiplication."""
    t = G.table
    return FiniteAction(G, t, t)


@dataclass
class MixingReport:
    defects: dict[int, Fraction]
    max_defect: Fraction
    argmax: Optional[int]

    def to_json(self) -> dict:
        return {"defects": {str(g): str(d) for g, d in self.defects.items()},
                "max_defect": str(self.max_defect), "argmax": self.argmax}


def mixing_defect(
    action: FiniteAction, A: ElementSet, B: ElementSet, window: Optional[Sequence[int]] = None
) -> MixingReport:
    """``max_g |nu(A & B . g^-1) - nu(A) nu(B)|`` over ``window`` (default
    all of ``G``), where ``B . g^-1 = {x : x . g in B}``. Exact when ``nu`` is
    rational."""
    window = list(action.G.elements()) if window is None else list(window)
    nA, nB = action.measure(A), action.measure(B)
    defects = {}
    for g in window:
        pre = [x for x in A if action.alpha[x, g] in B]
        defects[g] = abs(action.measure(pre) - nA * nB)
    if not defects:
        return MixingReport({}, Fraction(0), None)
    arg = max(defects, key=lambda g: (defects[g], -g))
    return MixingReport(defects, defects[arg], arg)


@dataclass
class TripleReport:
    g: int
    h: int
    lines: list[float]
    residuals: list[float]

    @property
    def residual(self) -> float:
        return max(self.residuals)

    def to_json(self) -> dict:
        return {"g": self.g, "h": self.h, "lines": self.lines, "residuals": self.residuals,
                "residual": self.residual}


def triple_identity_check(action: FiniteAction, f1, f2, g: int, h: int) -> TripleReport:
    """Evaluate the five expressions for ``<e_g, e_{gh}>`` with
    ``e_g = (g . f1)(f2 . g)``.

    0. ``<e_g, e_{gh}>`` computed directly
    1. ``int (g.f1)(f2.g)(g.(h.f1))((f2.h).g)``
    2. ``int (g.[f1 (h.f1)]) ([f2 (f2.h)].g)``
    3. ``<g . F1, F2 . g>`` with ``F1 = f1 (h.f1)``, ``F2 = f2 (f2.h)``
    4. ``<F1, g^-1 . (F2 . g)>``
    5. ``<F1, F2 ._gamma g>``

    ``residuals[k]`` is ``|line k+1 - line k|``, one per step. The first step
    holds only when ``g h`` and ``h g`` act alike through ``beta`` (always for
    abelian ``G``). Functions are real-valued.

    Raises
    ------
    PreconditionViolated
        If ``alpha`` and ``beta`` do not commute; the message names a witness.
    """
    if action.beta is None:
        raise PreconditionViolated("triple identity needs a left action")
    w = action.commute_witness()
    if w is not None:
        gg, x, hh = w
        raise PreconditionViolated(f"actions do not commute at g={gg}, x={x}, h={hh}")
    G = action.G
    if not G.is_group:
        raise PreconditionViolated("the unitary step needs a group")
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    la, lb, I = action.lift_alpha, action.lift_beta, action.integrate
    gh = G.multiply(g, h)

    def e(k):
        return la(k, f1) * lb(f2, k)

    line0 = I(e(g) * e(gh))
    line1 = I(la(g, f1) * lb(f2, g) * la(g, la(h, f1)) * lb(lb(f2, h), g))
    F1 = f1 * la(h, f1)
    F2 = f2 * lb(f2, h)
    line2 = I(la(g, F1) * lb(F2, g))
    line3 = I(la(g, F1) * lb(F2, g))
    line4 = I(F1 * la(G.inverse(g), lb(F2, g)))
    line5 = I(F1 * action.lift_gamma(F2, g))
    # line 2 and line 3 are the same integral written two ways; both kept so
    # every displayed step has a number
    lines = [line0, line1, line2, line3, line4, line5]
    return TripleReport(g, h, lines, [abs(b - a) for a, b in zip(lines, lines[1:])])
