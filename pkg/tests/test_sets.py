import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from deltaramsey.errors import InvalidInput
from deltaramsey.sets import ElementSet, all_subsets

N = 12
subsets = st.frozensets(st.integers(0, N - 1))


@given(subsets, subsets)
def test_boolean_ops_match_python_sets(a, b):
    A, B = ElementSet.of(N, a), ElementSet.of(N, b)
    assert set(A | B) == a | b
    assert set(A & B) == a & b
    assert set(A - B) == a - b
    assert set(~A) == set(range(N)) - a
    assert len(A) == len(a)
    assert (A <= B) == (a <= b)


def test_from_mask():
    m = np.array([True, False, True])
    assert ElementSet.from_mask(m).to_list() == [0, 2]


def test_rejects_out_of_universe():
    with pytest.raises(InvalidInput):
        ElementSet(3, 1 << 3)


def test_all_subsets_count():
    assert len(list(all_subsets(4))) == 16


def test_universe_mismatch():
    with pytest.raises(InvalidInput):
        ElementSet.full(3) & ElementSet.full(4)
