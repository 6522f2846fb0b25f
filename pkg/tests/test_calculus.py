import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deltaramsey import catalog, cyclic, derivative, finite_products, fp_search, iterated_derivative
from deltaramsey.semigroup import TruncatedNat
from deltaramsey.sets import ElementSet, all_subsets

import reference as ref


def test_derivative_examples():
    G = cyclic(6)
    A = G.set({0, 1, 2})
    assert derivative(G, A, 0) == A
    assert derivative(G, A, 1).to_list() == [0, 1]
    assert not derivative(G, G.empty(), 3)


def test_iterated_derivative_examples():
    G = cyclic(6)
    A = G.set({0, 1, 2, 3})
    assert iterated_derivative(G, A, ()) == A
    assert iterated_derivative(G, A, (1, 1)).to_list() == [0, 1]


def test_mixed_derivatives_commute_on_z4():
    G = cyclic(4)
    for A in all_subsets(4):
        for g, h in itertools.product(G.elements(), repeat=2):
            assert iterated_derivative(G, A, (g, h)) == iterated_derivative(G, A, (h, g))


@pytest.mark.parametrize("name", ["Z4", "S3", "Q8"])
def test_superassociative(name):
    G = catalog(name)
    for A in all_subsets(G.size) if G.size <= 6 else [G.set(range(0, 8, 3)), G.set({1, 2, 5, 6})]:
        for g, h in itertools.product(G.elements(), repeat=2):
            assert iterated_derivative(G, A, (g, h)) <= derivative(G, A, G.multiply(h, g))


def test_derivative_matches_reference():
    G = catalog("S3")
    t = G.table.tolist()
    for A in all_subsets(6):
        for g in G.elements():
            assert set(derivative(G, A, g)) == ref.deriv(t, set(A), g)


def test_finite_products_examples():
    N = TruncatedNat(10)
    assert finite_products(N, (1, 2)).to_list() == [1, 2, 3]
    assert not finite_products(N, ())
    S3 = catalog("S3")
    idx = {p: i for i, p in enumerate(S3.permutations)}
    a, b = idx[(1, 0, 2)], idx[(0, 2, 1)]
    assert set(finite_products(S3, (a, b))) == {a, b, S3.multiply(b, a)}


def test_finite_products_identity_flag():
    G = cyclic(5)
    assert 0 in finite_products(G, (1,), include_identity=True)
    assert 0 not in finite_products(G, (1,))


def test_fp_search_examples():
    G = cyclic(8)
    assert fp_search(G, G.full(), 2) is not None
    N = TruncatedNat(10)
    assert fp_search(N, N.set({1}), 2) is None
    found = fp_search(N, N.set({1, 2, 3}), 2)
    assert found is not None and finite_products(N, found) <= N.set({1, 2, 3})


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 9), st.integers(0, 511), st.integers(1, 3))
def test_fp_search_is_sound_and_complete(n, bits, length):
    G = cyclic(n)
    A = ElementSet(n, bits & ((1 << n) - 1))
    found = fp_search(G, A, length)
    t = G.table.tolist()
    if found is not None:
        assert ref.fp(t, list(found)) <= set(A)
    else:
        for seq in itertools.product(sorted(A), repeat=length):
            assert not ref.fp(t, list(seq)) <= set(A)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 63), st.integers(0, 63), st.integers(0, 5))
def test_derivative_monotone(a, b, g):
    G = cyclic(6)
    A, B = ElementSet(6, a), ElementSet(6, a | b)
    assert derivative(G, A, g) <= derivative(G, B, g)
