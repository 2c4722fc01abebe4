import numpy as np
import pytest

from mobiusfold.errors import DegenerateProfile
from mobiusfold.profiles import chord_profile, joint_profile, transition, u_profile


def test_transition_is_a_smooth_step():
    t = np.linspace(0, 1, 101)
    psi = transition(t)
    assert psi[0] == 0 and psi[-1] == 1
    assert np.all(np.diff(psi) >= 0)
    assert np.allclose(psi + psi[::-1], 1)
    # flat at the ends: derivative vanishes numerically
    assert transition(1e-3) < 1e-100


def test_u_profile_lower_bound():
    p = u_profile(0.0, 0.1)
    assert p.length >= np.pi * 0.1 / 2


def test_u_profile_endpoints_and_tangents():
    p = u_profile(0.0, 0.1, samples=32)
    assert np.allclose(p.points[0], [0, 0]) and np.allclose(p.points[-1], [0, 0.1])
    tan = p.tangents()
    assert np.allclose(tan[0], [1, 0], atol=1e-6)
    assert np.allclose(tan[-1], [-1, 0], atol=1e-6)


def test_u_profile_depth_adds_straight_legs():
    base = u_profile(0.0, 0.2)
    deep = u_profile(0.0, 0.2, depth=0.3)
    assert deep.length == pytest.approx(base.length + 0.6)
    assert deep.points[:, 0].max() == pytest.approx(base.points[:, 0].max() + 0.3)


def test_u_profile_errors():
    with pytest.raises(DegenerateProfile):
        u_profile(0.0, 0.0, depth=0.0)
    with pytest.raises(ValueError):
        u_profile(0.0, 1.0, depth=-0.1)
    with pytest.raises(ValueError):
        u_profile(0.0, 1.0, samples=8)


def test_u_profile_length_scales_linearly():
    lengths = [u_profile(0.0, d).length / d for d in (0.1, 0.05, 0.025)]
    assert max(lengths) / min(lengths) < 1.05


def test_u_profile_is_c1_at_junctions():
    p = u_profile(0.0, 0.2, depth=0.3, samples=64)
    tan = p.tangents()
    turn = np.degrees(np.arccos(np.clip(np.einsum("ij,ij->i", tan[1:], tan[:-1]), -1, 1)))
    assert turn.max() < 10


def test_u_profile_is_simple():
    p = u_profile(0.0, 0.2).points
    segs = list(zip(p[:-1], p[1:]))
    from mobiusfold.geometry import segment_crossing
    for i in range(len(segs)):
        for j in range(i + 2, len(segs)):
            assert segment_crossing(np.array(segs[i]), np.array(segs[j])) is None


def test_joint_profile_right_angle():
    pts, arc = joint_profile([0, 0], [1, 0], [2, 1], [0, 1])
    assert np.allclose(pts[-1], [2, 1])
    d = np.diff(pts, axis=0)
    assert np.allclose(d[-1] / np.linalg.norm(d[-1]), [0, 1], atol=1e-6)


def test_joint_profile_parallel_offset_is_degenerate():
    with pytest.raises(DegenerateProfile):
        joint_profile([0, 0], [1, 0], [1, 1], [1, 0])


def test_chord_profile_approaches_chord_length():
    long = chord_profile([0, 0], [1, 0], [2, 1], [0, 1], 0.2)[1][-1]
    short = chord_profile([0, 0], [1, 0], [2, 1], [0, 1], 0.01)[1][-1]
    assert np.sqrt(5) < short < long
    assert short - np.sqrt(5) < 0.01


def test_chord_profile_u_turn_is_symmetric():
    pts, _ = chord_profile([0, 0], [1, 0], [0, 1], [-1, 0], 0.1, samples=16)
    assert np.allclose(pts[-1], [0, 1])
    assert np.allclose(np.sort(pts[:, 0]), np.sort(pts[::-1, 0]))
    assert pts[:, 0].min() >= 0


def test_chord_profile_errors():
    with pytest.raises(DegenerateProfile):
        chord_profile([0, 0], [1, 0], [0, 1], [-1, 0], 0.6)
    with pytest.raises(DegenerateProfile):
        chord_profile([0, 0], [1, 0], [0, 1], [-1, 0], 0.0)
