import pytest
from hypothesis import given, settings, strategies as st

from hyperforge.constructions import AbelianGroupSpec, builtin, field_quotient, lyndon_extension
from hyperforge.geometry import kvector_from_geometry, projective_space
from hyperforge.io import (
    StructureParseError,
    emit_geometry,
    emit_structure,
    parse_geometry,
    parse_structure,
    read_geometry,
    read_structure,
)

from test_core import CORPUS


def test_corpus_files_parse():
    assert read_structure(CORPUS / "K.hr") == builtin("K")
    assert read_structure(CORPUS / "S.hr") == builtin("S")
    assert read_structure(CORPUS / "ex5.hr").n == 5
    assert read_structure(CORPUS / "KZ5.hr") == lyndon_extension(AbelianGroupSpec((5,)))
    assert read_geometry(CORPUS / "fano.geom") == projective_space(2, 2)


@pytest.mark.parametrize("name", ["K.hr", "S.hr", "ex5.hr", "KZ5.hr"])
def test_corpus_files_are_byte_stable(name):
    data = (CORPUS / name).read_text()
    assert emit_structure(parse_structure(data)) == data


def test_structure_without_multiplication():
    E = kvector_from_geometry(projective_space(3, 2))
    text = emit_structure(E)
    assert '"mul": null' in text and '"one": null' in text
    assert parse_structure(text) == E


def test_truncated_document():
    text = emit_structure(builtin("S"))
    with pytest.raises(StructureParseError) as info:
        parse_structure(text[: len(text) // 2])
    assert info.value.line is not None and info.value.col is not None


def test_shape_errors_point_at_the_row():
    text = emit_structure(builtin("K"))
    bad = text.replace("[[1], [0, 1]]", "[[1]]")
    with pytest.raises(StructureParseError) as info:
        parse_structure(bad)
    assert info.value.line == text.splitlines().index("    [[1], [0, 1]]") + 1


@pytest.mark.parametrize(
    "edit",
    [
        ('"size": 2', '"size": 3'),
        ('"version": "hr/1"', '"version": "hr/9"'),
        ('"zero": 0', '"zero": 7'),
        ("[[0], [1]]", "[[], [1]]"),
        ("[[0], [1]]", "[[0], [2]]"),
        ("[[1], [0, 1]]", "[[1], [1, 0]]"),
    ],
)
def test_malformed_fields(edit):
    text = emit_structure(builtin("K")).replace(*edit)
    with pytest.raises(StructureParseError):
        parse_structure(text)


def test_geometry_comments_and_errors():
    G = parse_geometry("# a line\npoints 1 2 3\n1 2 3  # only line\n")
    assert G.lines == ((1, 2, 3),)
    with pytest.raises(StructureParseError) as info:
        parse_geometry("points 1 2 3\n1 x 3\n")
    assert (info.value.line, info.value.col) == (2, 3)
    with pytest.raises(StructureParseError):
        parse_geometry("1 2 3\n4 5 6\n1 2 9\n".replace("9", "0"))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([(3, 2), (4, 2), (3, 3), (5, 2), (7, 2)]))
def test_round_trip(qm):
    H = field_quotient(*qm)
    text = emit_structure(H)
    assert parse_structure(text) == H
    assert emit_structure(parse_structure(text)) == text


def test_geometry_round_trip():
    G = projective_space(3, 2)
    assert parse_geometry(emit_geometry(G)) == G
