import numpy as np
import pytest

from mobiusfold.catalog import NAMES, get_model
from mobiusfold.errors import NotDevelopable
from mobiusfold.strip import (CYLINDER, MOEBIUS, CreasedStrip, develop, glue_strip, map_across,
                              max_vertex_deviation, validate_strip)

from conftest import folded, rect_strip


@pytest.mark.parametrize("name", NAMES)
def test_catalog_strips_validate(name):
    e = get_model(name)
    assert validate_strip(e.strip, e.gluing).ok


def test_single_face_strip():
    s = rect_strip([2.0])
    rep = validate_strip(s, glue_strip(s))
    assert rep.ok and rep.boundary_cycle_count == 1


def test_overlapping_faces_rejected():
    s = CreasedStrip(2.0, [[(0, 0), (1.2, 0), (1.2, 1), (0, 1)], [(0.8, 0), (2, 0), (2, 1), (0.8, 1)]],
                     [((1.0, 0.0), (1.0, 1.0))])
    rep = validate_strip(s)
    assert not rep.ok
    assert any(v.invariant == "tiling" for v in rep.violations)


def test_clockwise_face_rejected():
    s = CreasedStrip(1.0, [[(0, 0), (0, 1), (1, 1), (1, 0)]], [])
    assert any(v.invariant == "face_orientation" for v in validate_strip(s).violations)


def test_crease_endpoint_off_boundary_rejected():
    s = CreasedStrip(2.0, [[(0, 0), (1, 0), (1, 0.5), (0, 1)], [(1, 0), (2, 0), (2, 1), (0, 1), (1, 0.5)]],
                     [((1.0, 0.5), (1.0, 0.0))])
    assert any(v.invariant == "crease_endpoint" for v in validate_strip(s).violations)


def test_moebius_and_cylinder_boundary_cycles():
    s = rect_strip([1.0, 1.0, 1.0])
    assert len(glue_strip(s, MOEBIUS).boundary_cycles) == 1
    assert len(glue_strip(s, CYLINDER).boundary_cycles) == 2
    assert validate_strip(s, glue_strip(s, CYLINDER)).ok


def test_crisscross_gluing_has_four_creases_and_an_end():
    e = get_model("crisscross")
    kinds = [sp.kind for sp in e.gluing.side_pairs]
    assert kinds.count("crease") == 4 and kinds.count("end") == 1
    assert len(e.gluing.midline) == 5


def test_map_across_round_trip():
    e = get_model("crisscross")
    for sp in e.gluing.side_pairs:
        a, b = e.strip.edge(sp.face_a, sp.edge_a)
        p = a + 0.3 * (b - a)
        other, q = map_across(e.strip, sp, sp.face_a, p)
        back, r = map_across(e.strip, sp, other, q)
        assert back == sp.face_a and np.allclose(r, p)


def test_moebius_end_pair_flips_height():
    e = get_model("crisscross")
    sp = e.gluing.end_pair
    _, q = map_across(e.strip, sp, 0, np.array([0.0, 0.25]))
    assert np.allclose(q, [3.0, 0.75])


@pytest.mark.parametrize("name", NAMES)
def test_develop_inverts_fold(name):
    st = folded(name)
    assert max_vertex_deviation(develop(st), st.strip) < 1e-9
