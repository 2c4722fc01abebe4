"""The compiled kernels and their numpy fallbacks must agree."""

import numpy as np
import pytest

from mobiusfold import _accel, kernels
from mobiusfold.knots import GaussCode, bracket

pytestmark = pytest.mark.skipif(not _accel.NUMBA_ENABLED, reason="numba disabled")


def random_segments(rng, n):
    p = rng.random((n, 2))
    q = p + rng.normal(scale=0.3, size=(n, 2))
    nxt = (np.arange(n) + 1) % n
    prv = (np.arange(n) - 1) % n
    return p, q, nxt, prv


@pytest.mark.parametrize("seed", range(5))
def test_segment_crossings_agree(seed):
    p, q, nxt, prv = random_segments(np.random.default_rng(seed), 40)
    a = kernels._crossings_compiled(p, q, nxt, prv, 1e-9, 1e-9)
    b = kernels._crossings_numpy(p, q, nxt, prv, 1e-9, 1e-9)
    for x, y in zip(a, b):
        assert np.allclose(x, y)


@pytest.mark.parametrize("seed", range(5))
def test_triangle_collision_agrees(seed):
    rng = np.random.default_rng(seed)
    verts = rng.random((60, 3))
    tris = rng.choice(60, size=(20, 3), replace=True)
    tris = tris[[len(set(t)) == 3 for t in tris]].astype(np.int64)
    corners = verts[tris]
    lo, hi = corners.min(axis=1), corners.max(axis=1)
    order = np.argsort(lo[:, 0], kind="stable").astype(np.int64)
    i, j = kernels._first_collision(verts, tris, lo, hi, order, 1e-9)
    assert (int(i), int(j)) == kernels._first_collision_numpy(verts, tris, lo, hi, 1e-9)


def test_state_counts_agree():
    rng = np.random.default_rng(0)
    corner_edges = rng.integers(0, 8, size=(4, 4))
    a = kernels._state_counts_compiled(corner_edges, 8)
    b = kernels._state_counts_python(corner_edges, 8)
    assert np.array_equal(np.asarray(a), np.asarray(b))


def test_bracket_same_on_both_backends(monkeypatch):
    code = GaussCode.single([(0, 1, 1), (1, 0, 1), (2, 1, -1), (3, 0, -1),
                             (1, 1, 1), (0, 0, 1), (3, 1, -1), (2, 0, -1)])
    fast = bracket(code)
    monkeypatch.setattr(_accel, "NUMBA_ENABLED", False)
    assert bracket(code) == fast
