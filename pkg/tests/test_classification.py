import pytest

from hyperforge.classification import (
    classification_table,
    classify_dimension2,
    enumerate_K_extensions,
    enumerate_S_extensions,
)
from hyperforge.constructions import AbelianGroupSpec, PointedGroup, contains_K, field_quotient, lyndon_extension
from hyperforge.core import is_isomorphic
from hyperforge.errors import BoundError, PreconditionError
from hyperforge.geometry import canonical_relation, rebuild_addition_from_relation

from _oracles import is_hyperfield


@pytest.mark.parametrize("n", [3, 4])
def test_no_small_extensions(n):
    assert enumerate_K_extensions(n) == []
    assert enumerate_K_extensions(n, strategy="raw") == []


def test_five_elements_are_the_two_lyndon_extensions():
    entries = enumerate_K_extensions(5)
    assert [e.describe() for e in entries] == ["K[Z/4]", "K[Z/2 x Z/2]"]
    assert is_isomorphic(entries[0].structure, field_quotient(3, 2)) is not None


def test_six_elements_contains_F16_mod_F4():
    entries = enumerate_K_extensions(6)
    assert any(is_isomorphic(e.structure, field_quotient(4, 2)) for e in entries)


@pytest.mark.parametrize("n", range(5, 10))
def test_line_strategy_agrees_with_raw_partitions(n):
    fast = enumerate_K_extensions(n, bound=12)
    raw = enumerate_K_extensions(n, strategy="raw", bound=12)
    assert len(fast) == len(raw)
    for e in fast:
        assert sum(1 for r in raw if is_isomorphic(e.structure, r.structure)) == 1


def test_counts_up_to_fifteen():
    # one K[H] per abelian group of order n - 1, plus F_27/F_3^x at n = 14
    counts = {n: len(enumerate_K_extensions(n, bound=15)) for n in range(3, 16)}
    assert counts == {3: 0, 4: 0, 5: 2, 6: 1, 7: 1, 8: 1, 9: 3, 10: 2, 11: 1, 12: 1, 13: 2, 14: 2, 15: 1}


def test_fourteen_elements_has_both_labels():
    labels = sorted(e.describe() for e in enumerate_K_extensions(14, bound=15))
    assert labels == ["F_27/F_3^x", "K[Z/13]"]


def test_entries_are_hyperfields_containing_K():
    for n in range(5, 12):
        for e in enumerate_K_extensions(n, bound=15):
            assert is_hyperfield(e.structure) and contains_K(e.structure)


def test_relation_round_trip_on_every_extension():
    for n in range(5, 16):
        for e in enumerate_K_extensions(n, bound=15):
            R = e.structure
            rebuilt = rebuild_addition_from_relation(PointedGroup.from_structure(R), canonical_relation(R))
            assert rebuilt.add == R.add


def test_bound_is_enforced():
    with pytest.raises(BoundError):
        enumerate_K_extensions(9)


def test_no_extensions_of_S():
    for n in range(4, 10):
        assert enumerate_S_extensions(n) == []
    with pytest.raises(PreconditionError):
        enumerate_S_extensions(3)


def test_parallel_runs_match():
    serial = [e.describe() for e in enumerate_K_extensions(14, bound=15, jobs=1)]
    parallel = [e.describe() for e in enumerate_K_extensions(14, bound=15, jobs=4)]
    assert serial == parallel


def test_dimension_two_classification():
    assert classify_dimension2(lyndon_extension(AbelianGroupSpec((4,)))) == ("plain", AbelianGroupSpec((4,)))
    N = lyndon_extension(AbelianGroupSpec((4,)), "nilpotent")
    assert classify_dimension2(N) == ("nilpotent", AbelianGroupSpec((4,)))
    P = lyndon_extension(AbelianGroupSpec((3,)), "idempotent_pair")
    assert classify_dimension2(P) == ("idempotent_pair", AbelianGroupSpec((3,)))
    with pytest.raises(PreconditionError):
        classify_dimension2(field_quotient(3, 3))


def test_table_format():
    lines = classification_table(4, [])
    assert lines == ["n = 4: 0 structures"]
