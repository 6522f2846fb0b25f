import json
from fractions import Fraction
from pathlib import Path

import pytest

from deltaramsey import (
    catalog,
    counting_measure,
    cyclic,
    delta_measure_audit,
    derivation_tree,
    fp_shift_corollary_check,
    is_n_recurrent,
    quantitative_recurrence,
    union_bound_check,
    upper_density,
)
from deltaramsey.errors import PreconditionViolated, Unsupported
from deltaramsey.measure import FunctionMeasure, MeasureOracle, UpperDensity
from deltaramsey.semigroup import TruncatedNat, catalog_groups
from deltaramsey.sets import all_subsets

import reference as ref

GOLDEN = Path(__file__).parent / "golden" / "qrec_z5.json"


def test_counting_values():
    G = cyclic(5)
    mu = counting_measure(G)
    assert mu(G.full()) == 1 and mu(G.empty()) == 0
    assert mu(G.set({0, 1})) == Fraction(2, 5)


def test_counting_needs_group():
    with pytest.raises(Unsupported):
        counting_measure(TruncatedNat(5))


def test_upper_density_values():
    N = TruncatedNat(100)
    wins = [(0, 10), (0, 50), (0, 100)]
    assert upper_density(N.set(range(0, 100, 2)), wins).value == Fraction(1, 2)
    assert upper_density(N.full(), wins).value == 1
    assert upper_density(N.empty(), wins).value == 0


def test_counting_is_a_delta_measure():
    G = cyclic(6)
    prof = delta_measure_audit(counting_measure(G), G)
    assert prof.is_delta_measure and prof.mode == "exhaustive"


def test_upper_density_audit_reports_translate_failures():
    N = TruncatedNat(12)
    mu = UpperDensity(12, ((0, 4), (0, 12)))
    prof = delta_measure_audit(mu, N)
    assert prof.is_subadditive_measure
    assert not prof.translate_additivity_report.holds
    assert prof.translate_additivity_report.violations


def test_broken_measure_flagged():
    G = cyclic(6)
    mu = FunctionMeasure(6, lambda A: Fraction(1 if A else 0), name="all-or-nothing")
    prof = delta_measure_audit(mu, G)
    assert prof.axioms["ii_monotone"].holds
    assert not prof.translate_additivity_report.holds
    assert not prof.is_delta_measure


def test_qrec_spot_value_matches_golden():
    G = cyclic(5)
    r = quantitative_recurrence(counting_measure(G), G, G.set({0, 1}))
    golden = json.loads(GOLDEN.read_text())
    assert r.to_json() == golden
    assert r.bound == Fraction(4, 75) and r.good_h.to_list() == [0, 1, 4]


def test_qrec_golden_is_independent():
    # recompute the golden numbers with the reference helpers only
    t = ref.z(5)
    A = {0, 1}
    bound = ref.counting(5, A) ** 2 / 3
    good = [h for h in range(5) if ref.counting(5, ref.deriv(t, A, h)) >= bound]
    golden = json.loads(GOLDEN.read_text())
    assert golden["bound"] == str(bound) and golden["good_h"] == good


def test_qrec_edge_cases():
    G = catalog("S3")
    mu = counting_measure(G)
    for A in all_subsets(6):
        if A:
            assert 0 in quantitative_recurrence(mu, G, A).good_h
    assert quantitative_recurrence(mu, G, G.full()).good_h == G.full()
    with pytest.raises(PreconditionViolated):
        quantitative_recurrence(mu, G, G.empty())


def test_union_bound():
    G = cyclic(6)
    mu = counting_measure(G)
    A = G.set({0, 1})
    r = union_bound_check(mu, G, A, [0])
    assert r.lhs == r.rhs
    r = union_bound_check(mu, G, A, [0, 2, 4])
    assert r.pair_sum == 0 and r.lhs == r.rhs
    r = union_bound_check(mu, G, A, [0, 1, 2])
    assert r.holds and r.slack >= 0


def test_corollary_examples():
    G = cyclic(8)
    mu = counting_measure(G)
    c = fp_shift_corollary_check(mu, G, G.set({0, 1, 2, 3}), 2)
    assert c.complete
    for p in c.prefixes:
        assert p.positive and p.shift_ok
        assert all((p.shift + q) % 8 in {0, 1, 2, 3} for q in p.Q)
    assert fp_shift_corollary_check(mu, G, G.full(), 3).complete
    with pytest.raises(PreconditionViolated):
        fp_shift_corollary_check(mu, G, G.empty(), 1)


@pytest.mark.parametrize("G", [g for g in catalog_groups(8)], ids=lambda g: g.name)
def test_positive_sets_are_recurrent(G):
    o = MeasureOracle(counting_measure(G))
    for A in all_subsets(G.size):
        if A:
            assert all(is_n_recurrent(G, A, n, o) for n in range(4))


def test_positive_sets_have_no_shallow_leaves():
    for G in (cyclic(4), catalog("S3")):
        o = MeasureOracle(counting_measure(G))
        for A in all_subsets(G.size):
            if A:
                t = derivation_tree(G, A, o, 3)
                assert t.depth is None
