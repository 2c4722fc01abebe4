import dataclasses

import numpy as np
import pytest

from mobiusfold.catalog import get_model
from mobiusfold.errors import GluingMismatch
from mobiusfold.folding import ABOVE, BELOW, FoldInstruction, check_layers, fold, fold_edges, symmetry_check

from conftest import folded, rect_strip


def test_instruction_validation():
    with pytest.raises(ValueError):
        FoldInstruction(0, 0.0)
    with pytest.raises(ValueError):
        FoldInstruction(0, np.pi, "sideways")


def test_flat_fold_reflects_onto_stack():
    s = rect_strip([1.0, 1.0])
    st = fold(s, [FoldInstruction(0, np.pi, ABOVE)])
    assert st.layers == (1, 2)
    assert len(st.plane_groups) == 1
    assert np.allclose(np.sort(st.images[1][:, 0]), [0, 0, 1, 1])


def test_below_stacking_reverses_layers():
    s = rect_strip([1.0, 1.0])
    st = fold(s, [FoldInstruction(0, np.pi, BELOW)])
    assert st.layers == (2, 1)


def test_right_angle_fold_makes_two_plane_groups():
    s = rect_strip([1.0, 1.0])
    st = fold(s, [FoldInstruction(0, np.pi / 2)])
    assert len(st.plane_groups) == 2


def test_program_rejects_repeated_crease():
    s = rect_strip([1.0, 1.0])
    with pytest.raises(ValueError):
        fold(s, [FoldInstruction(0), FoldInstruction(0)])


def test_unclosed_gluing_is_a_mismatch():
    e = get_model("crisscross")
    with pytest.raises(GluingMismatch):
        fold(e.strip, e.program[:2], e.gluing)


def test_crisscross_stack():
    st = folded("crisscross")
    assert len(st.plane_groups) == 1
    assert sorted(st.layers) == [1, 2, 3, 4, 5]
    # the pin meets the faces labelled 1..5 in order
    labels = [st.strip.face_labels[f] for f in np.argsort(st.layers)]
    assert labels == ["1", "2", "3", "4", "5"]
    assert check_layers(st) == []


def test_crisscross_tacos_are_paired_creases():
    st = folded("crisscross")
    assert len(fold_edges(st)) == 5


def test_interlaced_taco_taco_fixture(interlaced_taco_taco):
    v = check_layers(interlaced_taco_taco)
    assert len(v) == 1 and v[0].kind == "taco-taco"


def test_pierced_taco_tortilla_fixture(pierced_taco_tortilla):
    v = check_layers(pierced_taco_tortilla)
    assert len(v) == 1 and v[0].kind == "taco-tortilla"


def test_cup_is_three_fold_symmetric():
    st = folded("cup")
    assert symmetry_check(st, 3)
    assert len(st.plane_groups) == 3
    assert not symmetry_check(folded("crisscross"), 3)


def test_cup_inside_faces_carry_labels_one_to_three():
    st = folded("cup")
    inside = sorted(st.strip.face_labels[f] for f in range(6) if st.layers[f] == 1)
    assert inside == ["1", "2", "3"]


def test_crisscross_a_sides_face_up():
    st = folded("crisscross")
    # the pin enters at layer 1, so up is against the stacking normal
    up = -st.group_normals[0]
    for f, (top, bottom) in enumerate(st.strip.side_colors):
        shown = top if st.face_normal(f) @ up > 0 else bottom
        assert shown.endswith("A"), (f, shown)
