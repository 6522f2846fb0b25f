from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deltaramsey import (
    FiniteAction,
    VectorFamily,
    bessel_error_chain,
    catalog,
    cyclic,
    frechet_oracle,
    mixing_defect,
    triple_identity_check,
    uniform_oracle,
    vdc_conclusion,
    vdc_hypothesis,
)
from deltaramsey.errors import InvalidInput, PreconditionViolated
from deltaramsey.vdc import (
    measurability_gate,
    perturbed_orthonormal_family,
    regular_action,
    rotation_action,
    vdc_bad_set,
    vdc_experiment,
)


def test_norm_bound_enforced():
    with pytest.raises(InvalidInput):
        VectorFamily(np.array([[2.0, 0.0]]))


def test_orthogonal_family_hypothesis():
    G = cyclic(8)
    fam = VectorFamily(np.eye(8))
    o = frechet_oracle(8, 1)
    hyp = vdc_hypothesis(G, fam, o, 0.1)
    assert hyp.good_h.to_list() == list(range(1, 8))
    assert hyp.holds


def test_constant_family_fails_everywhere():
    G = cyclic(6)
    fam = VectorFamily(np.tile([1.0, 0.0], (6, 1)))
    assert not vdc_hypothesis(G, fam, uniform_oracle(G), 0.5).good_h


def test_hypothesis_matches_double_scan():
    rng = np.random.default_rng(11)
    G = cyclic(32)
    fam, _ = perturbed_orthonormal_family(32, 16, 1e-3, rng)
    o = frechet_oracle(32, 1)
    eps = 0.1
    good = []
    for h in range(32):
        ok = sum(abs(fam[g] @ fam[(g + h) % 32]) <= eps for g in range(32))
        if 32 - ok <= 1:
            good.append(h)
    assert vdc_hypothesis(G, fam, o, eps).good_h.to_list() == good


def test_conclusion_examples():
    fam = VectorFamily(np.eye(6))
    o = frechet_oracle(6, 1)
    for eps in (0.01, 0.5, 1.0):
        assert vdc_conclusion(fam, np.zeros(6), o, eps).holds
    spike = vdc_conclusion(fam, np.eye(6)[2], o, 0.5)
    assert spike.bad_set.to_list() == [2] and spike.holds
    assert not vdc_conclusion(fam, np.eye(6)[2], uniform_oracle(cyclic(6)), 0.5).holds


def test_adversarial_family_reports_both_sides():
    G = cyclic(8)
    fam = VectorFamily(np.tile([1.0, 0.0], (8, 1)))
    o = frechet_oracle(8, 1)
    run = vdc_experiment(G, fam, np.array([1.0, 0.0]), o, 0.5)
    assert not run.hypothesis.holds and not run.conclusion.holds
    assert not run.anomaly


def test_bessel_orthonormal_reduces_to_classical():
    rng = np.random.default_rng(0)
    E = np.linalg.qr(rng.standard_normal((10, 10)))[0][:, :6].T
    f = rng.standard_normal(10)
    ch = bessel_error_chain(E, f, 0.0)
    assert ch.chain_holds and ch.preconditions_hold
    assert ch.norm_f_sq >= sum((E @ f) ** 2) - 1e-12


def test_bessel_single_vector():
    ch = bessel_error_chain(np.array([[1.0, 0.0]]), np.array([0.3, 0.4]), 0.0)
    assert ch.lines[1] >= 0 and ch.chain_holds


def test_bessel_perturbed_family_holds():
    rng = np.random.default_rng(5)
    fam, _ = perturbed_orthonormal_family(8, 16, 1e-3, rng)
    f = rng.standard_normal(16)
    ch = bessel_error_chain(fam.vectors, f, 1e-3)
    assert ch.preconditions_hold and ch.chain_holds and not ch.anomaly


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_bessel_never_anomalous(seed, n):
    rng = np.random.default_rng(seed)
    fam, _ = perturbed_orthonormal_family(n, 16, 1e-3, rng)
    f = rng.standard_normal(16) * rng.uniform(0.1, 3)
    ch = bessel_error_chain(fam.vectors, f, 1e-3)
    assert not ch.anomaly


def test_gate_on_spike():
    G = cyclic(6)
    fam = VectorFamily(np.eye(6))
    gate = measurability_gate(G, fam, np.eye(6)[1], frechet_oracle(6, 1), 0.5, 3)
    assert gate.passes and gate.abs_set.to_list() == [1]


def test_end_to_end_on_z8():
    rng = np.random.default_rng(2)
    G = cyclic(8)
    fam, Q = perturbed_orthonormal_family(8, 8, 1e-3, rng)
    f = Q @ np.full(8, 0.3)
    run = vdc_experiment(G, fam, f, frechet_oracle(8, 1), 0.25, hyp_eps=0.1)
    assert run.hypothesis.holds and not run.anomaly
    assert run.stage


def test_mixing_examples():
    act = rotation_action(5, 5, 1)
    A = act.G.set({0, 1})
    full = act.G.full()
    assert mixing_defect(act, A, full).max_defect == 0
    assert mixing_defect(act, act.G.empty(), A).max_defect == 0
    rep = mixing_defect(act, A, A)
    assert rep.defects == {0: Fraction(6, 25), 1: Fraction(1, 25), 2: Fraction(4, 25),
                           3: Fraction(4, 25), 4: Fraction(1, 25)}


def test_mixing_symmetric_under_swap():
    act = regular_action(catalog("S3"))
    G = act.G
    for a, b in [({0, 1}, {2, 3, 4}), ({1, 5}, {0})]:
        A, B = G.set(a), G.set(b)
        assert mixing_defect(act, A, B).max_defect == mixing_defect(act, B, A).max_defect


def test_action_validation():
    G = cyclic(3)
    with pytest.raises(InvalidInput):
        FiniteAction(G, np.zeros((3, 3), dtype=int))
    with pytest.raises(InvalidInput):
        rotation_action(3, 5, 1)


def test_triple_trivial_cases():
    act = rotation_action(8, 32, 4, 12)
    ones = np.ones(32)
    r = triple_identity_check(act, ones, ones, 3, 5)
    assert r.lines[0] == pytest.approx(1.0) and r.residual < 1e-12
    rng = np.random.default_rng(1)
    f1, f2 = rng.standard_normal(32), rng.standard_normal(32)
    r = triple_identity_check(act, f1, f2, 0, 0)
    assert r.lines[0] == pytest.approx(np.mean(f1 ** 2 * f2 ** 2))
    assert r.residual < 1e-9


def test_triple_random_rotations():
    rng = np.random.default_rng(7)
    act = rotation_action(8, 32, 4, 8)
    for _ in range(20):
        f1, f2 = rng.standard_normal(32), rng.standard_normal(32)
        g, h = rng.integers(0, 8, size=2)
        assert triple_identity_check(act, f1, f2, int(g), int(h)).residual < 1e-9


def test_triple_needs_commuting_actions():
    # right multiplication against g.x = x g^-1 on S3
    G = catalog("S3")
    t = G.table
    beta = np.array([[t[x, G.inverse(g)] for x in G.elements()] for g in G.elements()])
    act = FiniteAction(G, t, beta)
    assert act.commute_witness() is not None
    with pytest.raises(PreconditionViolated):
        triple_identity_check(act, np.ones(6), np.ones(6), 1, 1)


def test_triple_nonabelian_first_step_only():
    act = regular_action(catalog("S3"))
    rng = np.random.default_rng(3)
    f1, f2 = rng.standard_normal(6), rng.standard_normal(6)
    worst = [0.0] * 5
    for g in range(6):
        for h in range(6):
            r = triple_identity_check(act, f1, f2, g, h)
            worst = [max(a, b) for a, b in zip(worst, r.residuals)]
    # only the direct-to-expanded step uses commutativity of G
    assert worst[0] > 1e-3
    assert max(worst[1:]) < 1e-9
