from fractions import Fraction

import pytest

from deltaramsey import catalog, cyclic, greedy_ip_extract, stab_set
from deltaramsey.errors import ExtractionStuck, InvalidInput
from deltaramsey.filters import (
    PointOracle,
    Verdict,
    check_filter_axioms,
    density_oracle,
    exists_positively,
    for_almost_all,
    frechet_oracle,
    from_descriptor,
    ip_star_oracle,
    uniform_oracle,
)
from deltaramsey.calculus import finite_products
from deltaramsey.measure import MeasureOracle, counting_measure
from deltaramsey.semigroup import TruncatedNat
from deltaramsey.sets import all_subsets


def test_measure_oracle_verdicts():
    G = cyclic(5)
    o = MeasureOracle(counting_measure(G))
    assert o.verdict(G.full()) is Verdict.LARGE
    assert o.verdict(G.empty()) is Verdict.SMALL
    assert o.verdict(G.set({0})) is Verdict.NEITHER


def test_frechet_verdicts():
    o = frechet_oracle(8, 1)
    full = set(range(8))
    G = cyclic(8)
    assert o.verdict(G.set(full - {3})) is Verdict.LARGE
    assert o.verdict(G.set({0, 5})) is Verdict.NEITHER
    o0 = frechet_oracle(8, 0)
    assert o0.verdict(G.full()) is Verdict.LARGE
    assert o0.verdict(G.set(full - {0})) is not Verdict.LARGE


def test_frechet_rejects_overlapping_classes():
    with pytest.raises(InvalidInput):
        frechet_oracle(4, 2)


def test_density_oracle():
    N = TruncatedNat(100)
    o = density_oracle(N, Fraction(9, 10))
    assert o.verdict(N.set(range(0, 100, 2))) is Verdict.NEITHER
    assert o.verdict(N.full()) is Verdict.LARGE
    assert o.verdict(N.empty()) is Verdict.SMALL
    with pytest.raises(InvalidInput):
        density_oracle(N, Fraction(1, 2))


def test_ip_star_oracle():
    N = TruncatedNat(20)
    o = ip_star_oracle(N, 2)
    assert o.verdict(N.full()) is Verdict.LARGE
    assert o.verdict(N.empty()) is Verdict.SMALL
    assert o.is_positive(N.set({1, 2, 3}))


@pytest.mark.parametrize("oracle", [uniform_oracle(cyclic(6)), frechet_oracle(6, 1), frechet_oracle(7, 2)])
def test_filter_axioms(oracle):
    assert check_filter_axioms(oracle) == []


def test_stab_examples():
    G = cyclic(5)
    u = uniform_oracle(G)
    assert stab_set(G, G.full(), u) == G.full()
    assert not stab_set(G, G.set({0, 1}), u)
    G8 = cyclic(8)
    assert stab_set(G8, G8.set(set(range(8)) - {2}), frechet_oracle(8, 1)) == G8.full()


@pytest.mark.parametrize("n,k", [(4, 1), (6, 1), (8, 1), (8, 2), (8, 3)])
def test_stab_of_large_is_large(n, k):
    G, o = cyclic(n), frechet_oracle(n, k)
    for A in all_subsets(n):
        if o.is_large(A):
            assert o.is_large(stab_set(G, A, o))


def test_quantifiers():
    o = frechet_oracle(6, 1)
    G = cyclic(6)
    assert for_almost_all(o, G.set(range(1, 6)))
    assert exists_positively(o, G.set({1, 2}))
    assert not exists_positively(o, G.set({1}))


def test_greedy_examples():
    G = cyclic(16)
    o = frechet_oracle(16, 1)
    A = G.set(set(range(16)) - {3})
    res = greedy_ip_extract(G, A, o, 2)
    assert finite_products(G, res.generators) <= A
    with pytest.raises(ExtractionStuck):
        greedy_ip_extract(G, G.empty(), o, 1)
    full = greedy_ip_extract(G, G.full(), o, 4)
    assert len(full.generators) == 4


def test_descriptors():
    G = cyclic(5)
    assert from_descriptor({"kind": "uniform"}, G).verdict(G.full()) is Verdict.LARGE
    assert from_descriptor({"kind": "frechet", "k": 1}, G).descriptor() == {"kind": "frechet", "n": 5, "k": 1}
    assert isinstance(from_descriptor({"kind": "point"}, G), PointOracle)
