from itertools import product

import pytest

from hyperforge.constructions import AbelianGroupSpec, builtin, field_quotient, lyndon_extension
from hyperforge.errors import PreconditionError, StructureError
from hyperforge.homs import (
    compose,
    enumerate_homs,
    is_epimorphism,
    k_dimension,
    lift_hom,
    make_witness,
    range_dimension,
)
from hyperforge.rings import finite_field

from _oracles import homs_by_brute_force
from test_core import ex5


def test_hom_S_to_K_is_absolute_value():
    homs = enumerate_homs(builtin("S"), builtin("K"))
    assert [h.mapping for h in homs] == [(0, 1, 1)]
    assert is_epimorphism(homs[0])


def test_hom_K_to_ex5_is_inclusion():
    homs = enumerate_homs(builtin("K"), ex5())
    assert [h.mapping for h in homs] == [(0, 1)]
    assert not is_epimorphism(homs[0])


def test_identity_on_K_is_epi():
    h = make_witness(builtin("K"), builtin("K"), (0, 1))
    assert h.is_hom and h.is_epi and h.is_iso


PAIRS = [
    (builtin("K"), builtin("S")),
    (builtin("S"), builtin("K")),
    (ex5(), builtin("K")),
    (ex5(), ex5()),
    (field_quotient(4, 2), ex5()),
    (lyndon_extension(AbelianGroupSpec((2, 2))), ex5()),
    (lyndon_extension(AbelianGroupSpec((6,))), lyndon_extension(AbelianGroupSpec((2,)), "idempotent_pair")),
]


@pytest.mark.parametrize("R1,R2", PAIRS, ids=[f"{a.n}-{b.n}" for a, b in PAIRS])
def test_enumeration_matches_brute_force(R1, R2):
    assert [h.mapping for h in enumerate_homs(R1, R2)] == homs_by_brute_force(R1, R2)


def test_F27_self_maps():
    H = field_quotient(3, 3)
    homs = enumerate_homs(H, H)
    assert len(homs) == 4
    constant = tuple([0] + [1] * 13)
    assert constant in [h.mapping for h in homs]
    assert sum(h.is_iso for h in homs) == 3


def test_self_homs_closed_under_composition():
    for H in (ex5(), field_quotient(3, 3), field_quotient(4, 2)):
        homs = enumerate_homs(H, H)
        maps = {h.mapping for h in homs}
        for h1, h2 in product(homs, homs):
            c = compose(h1, h2)
            assert c.is_hom and c.mapping in maps


def test_k_dimensions():
    assert k_dimension(builtin("K")) == 1
    assert k_dimension(ex5()) == 2
    assert k_dimension(field_quotient(3, 3)) == 3
    assert k_dimension(field_quotient(4, 2)) == 2
    assert k_dimension(field_quotient(3, 4)) == 4
    with pytest.raises(StructureError):
        k_dimension(builtin("S"))


def test_lift_identity_and_frobenius():
    H = field_quotient(3, 3)
    F = finite_field(27)
    frob = tuple(int(F.power(x, 3)) for x in range(27))
    results = {}
    for h in enumerate_homs(H, H):
        results[h.mapping] = lift_hom(h)
    lifts = [r.ring_map for r in results.values() if r.kind == "lift"]
    assert tuple(range(27)) in lifts
    assert frob in lifts
    # the Frobenius is additive: (x + y)^3 = x^3 + y^3
    for x, y in product(range(27), range(27)):
        assert frob[F.add[x, y]] == F.add[frob[x], frob[y]]


def test_constant_hom_is_line_ranged():
    H = field_quotient(3, 3)
    h = make_witness(H, H, [0] + [1] * 13)
    r = lift_hom(h)
    assert r.kind == "line" and r.dimension == 1
    assert range_dimension(h) == 1


def test_lift_needs_quotient_origin():
    h = enumerate_homs(ex5(), ex5())[0]
    with pytest.raises(PreconditionError):
        lift_hom(h)


QUOTIENTS = [(3, 3), (4, 2), (3, 2)]


@pytest.mark.parametrize("src,tgt", list(product(QUOTIENTS, QUOTIENTS)))
def test_lifts_between_field_quotients(src, tgt):
    A, B = field_quotient(*src), field_quotient(*tgt)
    for h in enumerate_homs(A, B):
        r = lift_hom(h)
        if range_dimension(h) > 2:
            assert r.kind == "lift" and len(r.lifts) == 1
        else:
            assert r.kind == "line"
