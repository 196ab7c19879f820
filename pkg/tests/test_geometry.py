import random

import pytest
from hypothesis import given, settings, strategies as st

from hyperforge.bits import members
from hyperforge.constructions import AbelianGroupSpec, PointedGroup, builtin, field_quotient, lyndon_extension
from hyperforge.core import is_isomorphic
from hyperforge.errors import PreconditionError, StructureError
from hyperforge.geometry import (
    DifferenceSet,
    IncidenceGeometry,
    PartialOrder,
    affine_plane,
    canonical_order,
    canonical_relation,
    check_projective_axioms,
    difference_set_search,
    equivalence_class,
    geometry_from_relations,
    geometry_of,
    incidence_group_check,
    is_desarguesian,
    kvector_from_geometry,
    near_pencil,
    order_scan,
    plane_from_difference_set,
    projective_space,
    rebuild_addition_from_order,
    rebuild_addition_from_relation,
    relation_family,
    relations_commute,
    single_line,
    steiner_triple_system,
    translations,
)

from _corpus import incidence_corpus
from _oracles import p2_holds
from test_core import ex5


def test_geometry_of_ex5_is_one_line():
    G = geometry_of(ex5())
    assert G.points == (1, 2, 3, 4) and G.lines == ((1, 2, 3, 4),)


def test_geometry_of_F27_is_PG23():
    G = geometry_of(field_quotient(3, 3))
    assert len(G.points) == 13 and len(G.lines) == 13
    assert set(G.line_sizes()) == {4}


def test_geometry_of_K_is_a_point():
    G = geometry_of(builtin("K"))
    assert G.points == (1,) and G.lines == ()


def test_kvector_from_single_line_is_ex5_addition():
    assert kvector_from_geometry(single_line(4)).add == ex5().add


def test_kvector_from_PG23_and_fano():
    assert kvector_from_geometry(projective_space(3, 2)).n == 14
    with pytest.raises(PreconditionError):
        kvector_from_geometry(projective_space(2, 2))


def test_axiom_reports():
    report = check_projective_axioms(projective_space(3, 2))
    assert all(r.passed for r in report.values())
    fano = check_projective_axioms(projective_space(2, 2))
    assert fano["P1"].passed and fano["P2"].passed and fano["P3"].passed
    assert not fano["P3'"].passed
    bad = IncidenceGeometry([1, 2, 3, 4], [[1, 2, 3], [1, 2, 4]])
    assert not check_projective_axioms(bad)["P1"].passed


def test_desargues_verdicts():
    assert is_desarguesian(projective_space(3, 2)) == "yes"
    assert is_desarguesian(projective_space(4, 2)) == "yes"
    assert is_desarguesian(single_line(5)) == "vacuous"
    assert is_desarguesian(projective_space(3, 3)) == "vacuous"


def test_incidence_groups():
    E = ex5()
    assert incidence_group_check(geometry_of(E), translations(E))
    D = difference_set_search(13, 4)[0]
    G, _, _ = plane_from_difference_set(D, want_hyperfield=False)
    shifts = [{p: (p - 1 + t) % 13 + 1 for p in G.points} for t in range(13)]
    assert incidence_group_check(G, shifts)
    # cyclic shifts are not collineations of the Fano plane in its coordinate labelling
    fano = projective_space(2, 2)
    shifts7 = [{p: (p - 1 + t) % 7 + 1 for p in fano.points} for t in range(7)]
    assert not incidence_group_check(fano, shifts7)


def test_relation_family_examples():
    F = relation_family(ex5())
    assert F.classes(1) == (frozenset({0, 1}), frozenset({2, 3, 4}))
    assert relation_family(builtin("K")).classes(1) == (frozenset({0, 1}),)
    F27 = relation_family(field_quotient(3, 3))
    assert len(F27.points) == 13
    for a in F27.points:
        sizes = sorted(len(c) for c in F27.classes(a))
        # {0, a} plus one class per line through a, each holding the line's other three points
        assert sizes == [2, 3, 3, 3, 3]
    assert relations_commute(F27)[0]


def test_relations_fail_without_P2():
    # parallel lines of an affine plane violate P2
    G = affine_plane(3)
    assert not check_projective_axioms(G)["P2"].passed
    ok, witness = relations_commute(relation_family(G))
    assert not ok and witness is not None


def test_geometry_from_relations_round_trip():
    G = projective_space(3, 2)
    assert geometry_from_relations(relation_family(G)) == G
    L = single_line(4)
    assert geometry_from_relations(relation_family(L)) == L


def test_incidence_corpus_relations_commute_iff_P2():
    corpus = incidence_corpus()
    assert len(corpus) >= 20
    verdicts = []
    for name, G in corpus:
        p2 = check_projective_axioms(G)["P2"].passed
        assert p2 == p2_holds(G), name
        assert relations_commute(relation_family(G))[0] == p2, name
        verdicts.append(p2)
    assert any(verdicts) and not all(verdicts)


def test_near_pencil_shows_why_lines_need_three_points():
    # a near-pencil satisfies P2 but has 2-point lines, and its relations do not commute
    G = near_pencil(4)
    assert check_projective_axioms(G)["P2"].passed
    assert not relations_commute(relation_family(G))[0]


def test_canonical_relation_examples():
    assert canonical_relation(ex5()) == (frozenset({0, 1}), frozenset({2, 3, 4}))
    assert canonical_relation(builtin("K")) == (frozenset({0, 1}),)
    classes = canonical_relation(field_quotient(4, 2))
    assert sorted(len(c) for c in classes) == [2, 4]
    with pytest.raises(PreconditionError):
        canonical_relation(builtin("S"))


def test_rebuild_ex5_and_F27():
    group = PointedGroup.from_structure(ex5())
    assert rebuild_addition_from_relation(group, canonical_relation(ex5())).add == ex5().add
    H = field_quotient(3, 3)
    assert rebuild_addition_from_relation(PointedGroup.from_structure(H), canonical_relation(H)).add == H.add


def test_rebuild_refuses_Z3_pair_class():
    group = PointedGroup.from_spec(AbelianGroupSpec((3,)))
    with pytest.raises(PreconditionError) as info:
        rebuild_addition_from_relation(group, [{0, 1}, {2, 3}])
    assert info.value.witness == (2, 3)


def test_canonical_order_of_S():
    P = canonical_order(builtin("S"))
    # -1 <= 0 <= 1 with indices 2, 0, 1
    assert P.leq(2, 0) and P.leq(0, 1) and P.leq(2, 1)
    assert all(P.leq(x, x) for x in range(3))
    group = PointedGroup.from_structure(builtin("S"))
    assert rebuild_addition_from_order(group, 2, P).add == builtin("S").add


@pytest.mark.parametrize("spec", [(4,), (2, 2), (6,)])
def test_order_scan_finds_nothing_beyond_S(spec):
    group = PointedGroup.from_spec(AbelianGroupSpec(spec))
    involutions = [x for x in group.nonzero if x != group.one and group.mul[x][x] == group.one]
    for eps in involutions:
        assert order_scan(group, eps) == []


def test_malformed_epsilon():
    group = PointedGroup.from_spec(AbelianGroupSpec((4,)))
    P = PartialOrder(5, tuple(1 << x for x in range(5)))
    with pytest.raises(PreconditionError):
        rebuild_addition_from_order(group, 2, P)  # 2 has order 4


def test_difference_sets():
    assert [D.elements for D in difference_set_search(13, 4)] == [(0, 1, 3, 9)]
    found = difference_set_search(7, 3)
    assert len(found) == 1
    assert (1, 2, 4) in set(equivalence_class(found[0]))
    assert difference_set_search(11, 4) == []


def test_plane_from_difference_sets():
    G, H, _ = plane_from_difference_set(DifferenceSet(13, (0, 1, 3, 9)))
    assert len(G.lines) == 13 and H is not None
    assert is_isomorphic(H, field_quotient(3, 3)) is not None
    G7, H7, reason = plane_from_difference_set(DifferenceSet(7, (1, 2, 4)))
    assert H7 is None and "P3'" in reason
    assert check_projective_axioms(G7)["P2"].passed
    with pytest.raises(PreconditionError):
        plane_from_difference_set(DifferenceSet(7, (0, 1, 2)))


@pytest.mark.parametrize("E", [ex5(), field_quotient(3, 3), field_quotient(4, 2), field_quotient(3, 4),
                                lyndon_extension(AbelianGroupSpec((2, 4)))], ids=lambda E: f"n{E.n}")
def test_kvector_round_trip(E):
    assert kvector_from_geometry(geometry_of(E)).add == E.add


@pytest.mark.parametrize("G", [projective_space(3, 2), projective_space(4, 2), projective_space(3, 3),
                                single_line(5)], ids=["PG(2,3)", "PG(2,4)", "PG(3,3)", "line5"])
def test_geometry_round_trip(G):
    assert geometry_of(kvector_from_geometry(G)) == G


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([7, 9, 13, 15]), st.integers(0, 10**6))
def test_steiner_systems_are_linear_spaces(v, seed):
    G = steiner_triple_system(v, random.Random(seed))
    report = check_projective_axioms(G)
    assert report["P1"].passed and report["P3"].passed
    assert len(G.lines) == v * (v - 1) // 6
    assert relations_commute(relation_family(G))[0] == report["P2"].passed


def test_affine_planes_fail_P2():
    for q in (3, 4):
        assert not check_projective_axioms(affine_plane(q))["P2"].passed


def test_points_must_be_positive():
    with pytest.raises(ValueError):
        IncidenceGeometry([0, 1, 2], [[0, 1, 2]])


def test_structure_error_for_non_projective_relation():
    # the idempotent-pair variant contains K but its canonical classes do not
    # commute with conjugates in the pointed-group sense (it is not a group)
    E = lyndon_extension(AbelianGroupSpec((2,)), "idempotent_pair")
    with pytest.raises((PreconditionError, StructureError)):
        canonical_relation(E)


def test_members_of_line_masks():
    G = projective_space(2, 2)
    for L, m in zip(G.lines, G.line_masks):
        assert tuple(members(m)) == L
