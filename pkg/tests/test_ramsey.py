import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deltaramsey import (
    Relation,
    brute_force_clique,
    cyclic,
    delta_ramsey_witness,
    frechet_oracle,
    hypothesis_check,
    uniform_oracle,
    verify_transcript,
)
from deltaramsey.errors import HypothesisViolated, NoWitnessFound, PreconditionViolated
from deltaramsey.suite import random_hypothesis_relation

import reference as ref


def neq(n):
    return Relation.from_predicate(n, lambda a, b: a != b)


def test_hypothesis_examples():
    G = cyclic(7)
    u = uniform_oracle(G)
    assert hypothesis_check(G, Relation.from_predicate(7, lambda a, b: True), u).holds
    r = hypothesis_check(G, Relation.from_predicate(7, lambda a, b: False), u)
    assert not r.holds and not r.H
    r = hypothesis_check(G, neq(7), u)
    assert r.H.to_list() == [1, 2, 3, 4, 5, 6] and r.verdict == "neither" and not r.holds
    assert hypothesis_check(G, neq(7), frechet_oracle(7, 1)).holds


@pytest.mark.parametrize("n", range(5))
def test_trivial_relation(n):
    G = cyclic(5)
    u = uniform_oracle(G)
    R = Relation.from_predicate(5, lambda a, b: True)
    t = delta_ramsey_witness(G, R, n, u)
    assert len(t.witness) == n + 1
    assert verify_transcript(G, R, None, t, u) == []


def test_distinct_clique_on_z7():
    G = cyclic(7)
    o = frechet_oracle(7, 1)
    R = neq(7)
    t = delta_ramsey_witness(G, R, 3, o, A=G.full())
    assert len(set(t.witness)) == 4
    assert all(R(t.witness[j], t.witness[i]) for j in range(4) for i in range(j))
    assert verify_transcript(G, R, G.full(), t, o) == []
    assert brute_force_clique(R, G.full(), 3) is not None


def test_empty_set_precondition():
    G = cyclic(5)
    with pytest.raises(PreconditionViolated):
        delta_ramsey_witness(G, neq(5), 1, frechet_oracle(5, 1), A=G.empty())


def _z7_transcript():
    G = cyclic(7)
    o = frechet_oracle(7, 1)
    R = neq(7)
    return G, o, R, delta_ramsey_witness(G, R, 2, o)


def test_verifier_flags_membership():
    G, o, R, t = _z7_transcript()
    outside = next(x for x in G.elements() if x not in t.witness)
    A = G.set(set(G.elements()) - {outside})
    w = list(t.witness)
    w[1] = outside
    bad = dataclasses.replace(t, witness=tuple(w))
    assert any(p.startswith("membership: g_1") for p in verify_transcript(G, R, A, bad, o))


def test_verifier_flags_flipped_edge():
    G, o, R, t = _z7_transcript()
    adj = R.adj.copy()
    adj[t.witness[2], t.witness[0]] = False
    problems = verify_transcript(G, Relation(adj), None, t, o)
    assert "clique: R(g_2, g_0) fails" in problems


def test_brute_force_examples():
    A = cyclic(5).full()
    assert brute_force_clique(Relation.from_predicate(5, lambda a, b: True), A, 3) == (0, 0, 0, 0)
    assert brute_force_clique(Relation.from_predicate(5, lambda a, b: False), A, 1) is None


def test_gap_relation_clique_exists_but_hypothesis_fails():
    # H = {1, 2} is not Large, so the extractor refuses rather than answering
    G = cyclic(5)
    o = frechet_oracle(5, 1)
    R = Relation.from_predicate(5, lambda a, b: (b - a) % 5 in (1, 2))
    assert brute_force_clique(R, G.full(), 2) == (0, 4, 3)
    assert hypothesis_check(G, R, o).H.to_list() == [1, 2]
    with pytest.raises(HypothesisViolated):
        delta_ramsey_witness(G, R, 2, o)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([5, 7]), st.integers(1, 3))
def test_extractor_never_contradicts_brute_force(seed, size, n):
    G = cyclic(size)
    o = frechet_oracle(size, 1)
    R = random_hypothesis_relation(G, np.random.default_rng(seed))
    exists = ref.has_clique(R.adj.tolist(), range(size), n)
    assert (brute_force_clique(R, G.full(), n) is not None) == exists
    try:
        t = delta_ramsey_witness(G, R, n, o)
    except NoWitnessFound:
        return
    assert exists
    assert verify_transcript(G, R, None, t, o) == []


def test_relation_json_round_trip():
    R = neq(4)
    assert np.array_equal(Relation.from_json(R.to_json()).adj, R.adj)
    assert np.array_equal(Relation.from_json({"matrix": R.adj.tolist()}).adj, R.adj)
