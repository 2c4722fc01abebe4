import numpy as np
import pytest

from mobiusfold.curves import InflationParams
from mobiusfold.errors import JointCollision
from mobiusfold.smooth import (FACE, JOINT, StripMesh, aspect_ratio, boundary_symmetric, build_mesh,
                               check_developable, check_embedded, is_manifold, mesh_curves, obj_text)
from mobiusfold.knots import linking_number
from mobiusfold.curves import MIDLINE, crossing_diagram

from conftest import folded, meshed


def grid_mesh(embed, nu=8, nv=4, lam=2.0):
    """Triangulated [0, lam] x [0, 1] mapped into space by ``embed(u, v)``."""
    u, v = np.meshgrid(np.linspace(0, lam, nu + 1), np.linspace(0, 1, nv + 1), indexing="ij")
    uv = np.stack([u.ravel(), v.ravel()], axis=1)
    verts = np.array([embed(a, b) for a, b in uv])
    idx = np.arange(len(uv)).reshape(nu + 1, nv + 1)
    tris = []
    for i in range(nu):
        for j in range(nv):
            a, b, c, d = idx[i, j], idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]
            tris += [(a, b, c), (a, c, d)]
    tris = np.array(tris)
    return StripMesh(verts, tris, uv[tris], tuple((FACE, 0) for _ in tris))


def test_flat_rectangle_is_developable():
    m = grid_mesh(lambda u, v: (u, v, 0.0))
    dist, defect = check_developable(m)
    assert dist == 0.0 and defect < 1e-12
    assert aspect_ratio(m) == pytest.approx(2.0)
    assert check_embedded(m)[0]


def test_cylinder_sweep_is_developable():
    r = 1.0 / np.pi   # half a turn over length 1
    m = grid_mesh(lambda u, v: (r * np.sin(u / r), v, r * (1 - np.cos(u / r))), nu=16, lam=1.0)
    dist, defect = check_developable(m)
    # chords of the circle are shorter than the arcs they replace
    assert dist < 0.01 and defect < 1e-9


def test_displaced_vertex_breaks_developability():
    m = grid_mesh(lambda u, v: (u, v, 0.0))
    verts = m.vertices.copy()
    verts[2 * 5 + 2, 2] = 0.01      # an interior vertex
    bent = StripMesh(verts, m.triangles, m.uv, m.provenance)
    dist, defect = check_developable(bent)
    assert defect > 1e-3 and dist > 1e-4


def test_folded_sheet_collides():
    m = grid_mesh(lambda u, v: (u, v, 0.0))
    verts = np.concatenate([m.vertices, m.vertices + [0.1, 0.1, 0.0]])
    tris = np.concatenate([m.triangles, m.triangles + len(m.vertices)])
    two = StripMesh(verts, tris, np.concatenate([m.uv, m.uv]), m.provenance * 2)
    ok, pair = check_embedded(two)
    assert not ok and pair[0] < pair[1]


@pytest.mark.parametrize("name", ["crisscross", "cup"])
def test_catalog_mesh_properties(name):
    m = meshed(name, 0.02)
    dist, defect = check_developable(m)
    assert dist < 1e-6 and defect < 1e-6
    assert check_embedded(m)[0]
    assert is_manifold(m)
    assert 3.0 < aspect_ratio(m) <= 3.0 + 10 * 0.02
    kinds = {k for k, _ in m.provenance}
    assert kinds == {FACE, JOINT}


def test_mesh_curves_keep_the_linking_number():
    m = meshed("crisscross", 0.02)
    curves = mesh_curves(m)
    d = crossing_diagram(curves, seed=1)
    assert linking_number(d, curves[0].name, MIDLINE) == -3


def test_cup_mesh_boundary_has_threefold_symmetry():
    st = folded("cup")
    assert boundary_symmetric(meshed("cup", 0.02), 3, st.group_normals)
    assert not boundary_symmetric(meshed("crisscross", 0.02), 3)


def test_oversized_inset_is_a_joint_collision():
    with pytest.raises(JointCollision):
        build_mesh(folded("crisscross"), InflationParams(0.02), joint_inset=0.6)


def test_mesh_samples_validated():
    with pytest.raises(ValueError):
        build_mesh(folded("crisscross"), samples=8)


def test_obj_text_layout():
    m = meshed("triangular", 0.05)
    text = obj_text(m, "triangular")
    lines = text.splitlines()
    assert lines[0] == "# triangular"
    assert sum(l.startswith("v ") for l in lines) == len(m.vertices)
    assert sum(l.startswith("vt ") for l in lines) == 3 * m.n_triangles
    faces = [l for l in lines if l.startswith("f ")]
    assert len(faces) == m.n_triangles
    v, vt = faces[0].split()[1].split("/")
    assert int(v) >= 1 and int(vt) == 1
    assert any(l.startswith("g ") for l in lines)


@pytest.mark.parametrize("name", ["triangular", "two_twist_cylinder", "trihexaflexagon"])
def test_every_catalog_model_meshes_embedded(name):
    m = meshed(name, 0.02)
    assert check_embedded(m)[0]
    dist, defect = check_developable(m)
    assert dist < 1e-6 and defect < 1e-6
    assert aspect_ratio(m) > folded(name).strip.aspect_ratio


@pytest.mark.parametrize("name", ["crisscross", "cup", "triangular", "two_twist_cylinder", "trihexaflexagon"])
def test_excess_length_is_linear_in_eps(name):
    lam = folded(name).strip.aspect_ratio
    slopes = [(aspect_ratio(meshed(name, e)) - lam) / e for e in (0.05, 0.02, 0.01, 0.005)]
    assert min(slopes) > 0
    assert max(slopes) - min(slopes) < 1e-6 * max(slopes)
