import json

import numpy as np
import pytest

from deltaramsey import catalog, cyclic, validate
from deltaramsey.errors import InvalidInput, MalformedTable, OutOfWindow
from deltaramsey.semigroup import (
    Semigroup,
    TruncatedNat,
    catalog_groups,
    direct_product,
    from_descriptor,
    from_json,
    translate_preimage,
)
from deltaramsey.sets import all_subsets


def test_cyclic_table_is_a_group():
    rep = validate(cyclic(6).table)
    assert rep.valid and rep.identity == 0 and rep.is_group


def test_out_of_range_entry_is_malformed():
    t = [[7, 1, 2], [1, 2, 0], [2, 0, 1]]
    with pytest.raises(MalformedTable):
        validate(t)


def test_non_associative_table_reports_triple():
    rng = np.random.default_rng(3)
    while True:
        t = rng.integers(0, 3, size=(3, 3))
        rep = validate(t)
        if not rep.associative:
            break
    a, b, c = rep.counterexample
    assert t[t[a, b], c] != t[a, t[b, c]]


def test_multiply():
    G = cyclic(6)
    assert G.multiply(4, 5) == 3
    assert all(G.multiply(0, g) == g for g in G.elements())


def test_truncated_nat_never_wraps():
    N = TruncatedNat(10)
    assert N.multiply(3, 4) == 7
    with pytest.raises(OutOfWindow):
        N.multiply(7, 5)


def test_translate_preimage_examples():
    G = cyclic(6)
    A = G.set({0, 1, 2})
    assert translate_preimage(G, A, 1).to_list() == [0, 1, 5]
    assert translate_preimage(G, A, 0) == A
    assert translate_preimage(G, G.full(), 4) == G.full()


@pytest.mark.parametrize("name", ["Z4", "Z6", "S3"])
def test_preimage_composes_and_preserves_size(name):
    G = catalog(name)
    for A in all_subsets(G.size):
        for g in G.elements():
            Ag = translate_preimage(G, A, g)
            assert len(Ag) == len(A)
            for h in G.elements():
                assert translate_preimage(G, Ag, h) == translate_preimage(G, A, G.multiply(h, g))


def test_catalog_contents():
    names = [G.name for G in catalog_groups()]
    assert names[:3] == ["Z1", "Z2", "Z3"] and {"S3", "D4", "Q8"} <= set(names)
    for G in catalog_groups():
        assert validate(G.table).is_group
    assert catalog("S3").size == 6 and catalog("D4").size == 8 and catalog("Q8").size == 8


def test_non_abelian_members():
    for name in ("S3", "D4", "Q8"):
        t = catalog(name).table
        assert not np.array_equal(t, t.T)


def test_direct_product():
    P = direct_product(cyclic(2), cyclic(3))
    assert P.size == 6 and validate(P.table).is_group


def test_json_round_trip(tmp_path):
    G = catalog("S3")
    data = json.loads(json.dumps(G.to_json()))
    H = from_json(data)
    assert np.array_equal(H.table, G.table) and H.identity == G.identity
    p = tmp_path / "s3.json"
    p.write_text(json.dumps(data))
    assert np.array_equal(from_descriptor({"file": str(p)}).table, G.table)


def test_inline_descriptor_and_bad_table():
    G = from_descriptor({"table": [[0, 1], [1, 0]], "identity": 0})
    assert G.size == 2
    with pytest.raises((MalformedTable, InvalidInput)):
        from_descriptor({"table": [[0, 1], [1]]})
