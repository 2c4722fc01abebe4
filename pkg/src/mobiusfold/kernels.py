"""Hot numeric kernels with a numba path and a numpy/Python fallback.

Three loops dominate runtime: all-pairs projected segment crossings,
all-pairs triangle intersection for embeddedness, and the 2**n bracket
state sum.  Each public function here dispatches on
``_accel.NUMBA_ENABLED``; the compiled and fallback paths must agree
exactly (tests run both).
"""

import numpy as np

from . import _accel
from ._accel import njit

CROSS_OK = 0
CROSS_DEGENERATE = 1


# ---------------------------------------------------------------------------
# segment crossings
# ---------------------------------------------------------------------------

@njit
def _pair_status(px, py, qx, qy, ux, uy, vx, vy, eps_point, eps_angle):
    """Classify one pair of 2D segments p->q and u->v.

    Returns (code, s, t) with code -1 for no contact, 0 for a transverse
    interior crossing, 1 for a degenerate contact.
    """
    rx = qx - px
    ry = qy - py
    sx = vx - ux
    sy = vy - uy
    li = np.sqrt(rx * rx + ry * ry)
    lj = np.sqrt(sx * sx + sy * sy)
    if li <= eps_point or lj <= eps_point:
        return 1, 0.0, 0.0
    if (max(px, qx) < min(ux, vx) - eps_point or max(ux, vx) < min(px, qx) - eps_point
            or max(py, qy) < min(uy, vy) - eps_point or max(uy, vy) < min(py, qy) - eps_point):
        return -1, 0.0, 0.0
    denom = rx * sy - ry * sx
    wx = ux - px
    wy = uy - py
    if abs(denom) / (li * lj) < eps_angle:
        # parallel: only collinear overlaps matter
        dist = abs(wx * ry - wy * rx) / li
        if dist > eps_point:
            return -1, 0.0, 0.0
        a = (wx * rx + wy * ry) / li
        b = ((vx - px) * rx + (vy - py) * ry) / li
        lo = min(a, b)
        hi = max(a, b)
        if hi < -eps_point or lo > li + eps_point:
            return -1, 0.0, 0.0
        return 1, 0.0, 0.0
    s = (wx * sy - wy * sx) / denom
    t = (wx * ry - wy * rx) / denom
    mi = eps_point / li
    mj = eps_point / lj
    if s < -mi or s > 1.0 + mi or t < -mj or t > 1.0 + mj:
        return -1, 0.0, 0.0
    if s < mi or s > 1.0 - mi or t < mj or t > 1.0 - mj:
        return 1, s, t
    return 0, s, t


@njit
def _crossings_compiled(p, q, nxt, prv, eps_point, eps_angle):
    n = p.shape[0]
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if nxt[i] == j or prv[i] == j:
                continue
            code, s, t = _pair_status(p[i, 0], p[i, 1], q[i, 0], q[i, 1],
                                      p[j, 0], p[j, 1], q[j, 0], q[j, 1],
                                      eps_point, eps_angle)
            if code >= 0:
                count += 1
    ii = np.empty(count, dtype=np.int64)
    jj = np.empty(count, dtype=np.int64)
    ss = np.empty(count, dtype=np.float64)
    tt = np.empty(count, dtype=np.float64)
    cc = np.empty(count, dtype=np.int64)
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if nxt[i] == j or prv[i] == j:
                continue
            code, s, t = _pair_status(p[i, 0], p[i, 1], q[i, 0], q[i, 1],
                                      p[j, 0], p[j, 1], q[j, 0], q[j, 1],
                                      eps_point, eps_angle)
            if code >= 0:
                ii[k] = i
                jj[k] = j
                ss[k] = s
                tt[k] = t
                cc[k] = code
                k += 1
    return ii, jj, ss, tt, cc


def _crossings_numpy(p, q, nxt, prv, eps_point, eps_angle):
    n = p.shape[0]
    ii, jj = np.triu_indices(n, k=1)
    keep = (nxt[ii] != jj) & (prv[ii] != jj)
    ii, jj = ii[keep], jj[keep]
    r = q[ii] - p[ii]
    s_ = q[jj] - p[jj]
    li = np.hypot(r[:, 0], r[:, 1])
    lj = np.hypot(s_[:, 0], s_[:, 1])
    lo_i = np.minimum(p[ii], q[ii])
    hi_i = np.maximum(p[ii], q[ii])
    lo_j = np.minimum(p[jj], q[jj])
    hi_j = np.maximum(p[jj], q[jj])
    box = np.all(hi_i >= lo_j - eps_point, axis=1) & np.all(hi_j >= lo_i - eps_point, axis=1)
    short = (li <= eps_point) | (lj <= eps_point)
    w = p[jj] - p[ii]
    denom = r[:, 0] * s_[:, 1] - r[:, 1] * s_[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        par = np.abs(denom) / (li * lj) < eps_angle
        dist = np.abs(w[:, 0] * r[:, 1] - w[:, 1] * r[:, 0]) / li
        a = (w[:, 0] * r[:, 0] + w[:, 1] * r[:, 1]) / li
        vq = q[jj] - p[ii]
        b = (vq[:, 0] * r[:, 0] + vq[:, 1] * r[:, 1]) / li
        overlap = ~((np.maximum(a, b) < -eps_point) | (np.minimum(a, b) > li + eps_point))
        s = (w[:, 0] * s_[:, 1] - w[:, 1] * s_[:, 0]) / denom
        t = (w[:, 0] * r[:, 1] - w[:, 1] * r[:, 0]) / denom
        mi = eps_point / li
        mj = eps_point / lj
    inside = (s >= -mi) & (s <= 1 + mi) & (t >= -mj) & (t <= 1 + mj)
    near_end = (s < mi) | (s > 1 - mi) | (t < mj) | (t > 1 - mj)
    code = np.full(ii.shape, -1, dtype=np.int64)
    trans = box & ~short & ~par & inside
    code[trans] = np.where(near_end[trans], CROSS_DEGENERATE, CROSS_OK)
    coll = box & ~short & par & (dist <= eps_point) & overlap
    code[coll] = CROSS_DEGENERATE
    code[box & short] = CROSS_DEGENERATE
    s = np.where(trans, s, 0.0)
    t = np.where(trans, t, 0.0)
    sel = code >= 0
    return (ii[sel].astype(np.int64), jj[sel].astype(np.int64),
            np.nan_to_num(s[sel]), np.nan_to_num(t[sel]), code[sel])


def segment_crossings(p, q, nxt, prv, eps_point, eps_angle):
    """All contacts between non-adjacent 2D segments ``p[i] -> q[i]``.

    ``nxt``/``prv`` give the index of the following/preceding segment on
    the same closed curve; those pairs share a vertex and are skipped.
    Returns index arrays ``i < j``, parameters ``s, t`` and a status code
    per contact (``CROSS_OK`` or ``CROSS_DEGENERATE``), sorted by (i, j).
    """
    p = np.ascontiguousarray(p, dtype=np.float64)
    q = np.ascontiguousarray(q, dtype=np.float64)
    nxt = np.ascontiguousarray(nxt, dtype=np.int64)
    prv = np.ascontiguousarray(prv, dtype=np.int64)
    if _accel.NUMBA_ENABLED:
        return _crossings_compiled(p, q, nxt, prv, float(eps_point), float(eps_angle))
    return _crossings_numpy(p, q, nxt, prv, float(eps_point), float(eps_angle))


# ---------------------------------------------------------------------------
# triangle / triangle intersection
# ---------------------------------------------------------------------------

@njit
def _point_in_tri_2d(px, py, ax, ay, bx, by, cx, cy, eps):
    d1 = (px - bx) * (ay - by) - (ax - bx) * (py - by)
    d2 = (px - cx) * (by - cy) - (bx - cx) * (py - cy)
    d3 = (px - ax) * (cy - ay) - (cx - ax) * (py - ay)
    neg = d1 < -eps or d2 < -eps or d3 < -eps
    pos = d1 > eps or d2 > eps or d3 > eps
    return not (neg and pos)


@njit
def _seg_seg_2d(ax, ay, bx, by, cx, cy, dx, dy, eps):
    rx = bx - ax
    ry = by - ay
    sx = dx - cx
    sy = dy - cy
    den = rx * sy - ry * sx
    wx = cx - ax
    wy = cy - ay
    if abs(den) < eps * eps:
        return False
    s = (wx * sy - wy * sx) / den
    t = (wx * ry - wy * rx) / den
    return -eps <= s <= 1.0 + eps and -eps <= t <= 1.0 + eps


@njit
def _seg_tri(a, b, t0, t1, t2, eps):
    e1 = t1 - t0
    e2 = t2 - t0
    n = np.cross(e1, e2)
    nn = np.sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2])
    if nn == 0.0:
        return False
    n = n / nn
    da = np.dot(a - t0, n)
    db = np.dot(b - t0, n)
    if (da > eps and db > eps) or (da < -eps and db < -eps):
        return False
    # drop the dominant normal axis for 2D tests
    ax = np.argmax(np.abs(n))
    i0 = 1 if ax == 0 else 0
    i1 = 1 if ax == 2 else 2
    if abs(da) <= eps and abs(db) <= eps:
        if _point_in_tri_2d(a[i0], a[i1], t0[i0], t0[i1], t1[i0], t1[i1], t2[i0], t2[i1], eps):
            return True
        if _point_in_tri_2d(b[i0], b[i1], t0[i0], t0[i1], t1[i0], t1[i1], t2[i0], t2[i1], eps):
            return True
        if _seg_seg_2d(a[i0], a[i1], b[i0], b[i1], t0[i0], t0[i1], t1[i0], t1[i1], eps):
            return True
        if _seg_seg_2d(a[i0], a[i1], b[i0], b[i1], t1[i0], t1[i1], t2[i0], t2[i1], eps):
            return True
        if _seg_seg_2d(a[i0], a[i1], b[i0], b[i1], t2[i0], t2[i1], t0[i0], t0[i1], eps):
            return True
        return False
    if abs(da) <= eps:
        p = a
    elif abs(db) <= eps:
        p = b
    else:
        p = a + (b - a) * (da / (da - db))
    return _point_in_tri_2d(p[i0], p[i1], t0[i0], t0[i1], t1[i0], t1[i1], t2[i0], t2[i1], eps)


@njit
def _tri_tri(A, B, eps):
    for k in range(3):
        if _seg_tri(A[k], A[(k + 1) % 3], B[0], B[1], B[2], eps):
            return True
        if _seg_tri(B[k], B[(k + 1) % 3], A[0], A[1], A[2], eps):
            return True
    return False


@njit
def _first_collision(verts, tris, lo, hi, order, eps):
    """Scan pairs in lexicographic (i, j) order; ``order`` sorts by box min x."""
    nt = tris.shape[0]
    best_i = -1
    best_j = -1
    pos = np.empty(nt, dtype=np.int64)
    for k in range(nt):
        pos[order[k]] = k
    for i in range(nt):
        if best_i >= 0 and i > best_i:
            break
        A = verts[tris[i]]
        # sweep over candidates whose x-range overlaps
        for kk in range(nt):
            j = order[kk]
            if lo[j, 0] > hi[i, 0] + eps:
                break
            if j <= i:
                continue
            if hi[j, 0] < lo[i, 0] - eps:
                continue
            if (lo[j, 1] > hi[i, 1] + eps or hi[j, 1] < lo[i, 1] - eps
                    or lo[j, 2] > hi[i, 2] + eps or hi[j, 2] < lo[i, 2] - eps):
                continue
            shared = False
            for a in range(3):
                for b in range(3):
                    if tris[i, a] == tris[j, b]:
                        shared = True
            if shared:
                continue
            if _tri_tri(A, verts[tris[j]], eps):
                if best_i < 0 or j < best_j:
                    best_i = i
                    best_j = j
    return best_i, best_j


def first_triangle_collision(verts, tris, eps):
    """Lowest-index pair of vertex-disjoint triangles that touch, or (-1, -1)."""
    verts = np.ascontiguousarray(verts, dtype=np.float64)
    tris = np.ascontiguousarray(tris, dtype=np.int64)
    if tris.shape[0] == 0:
        return -1, -1
    corners = verts[tris]
    lo = corners.min(axis=1)
    hi = corners.max(axis=1)
    order = np.argsort(lo[:, 0], kind="stable").astype(np.int64)
    if _accel.NUMBA_ENABLED:
        i, j = _first_collision(verts, tris, lo, hi, order, float(eps))
        return int(i), int(j)
    return _first_collision_numpy(verts, tris, lo, hi, eps)


def _first_collision_numpy(verts, tris, lo, hi, eps):
    nt = tris.shape[0]
    for i in range(nt):
        cand = np.arange(i + 1, nt)
        ok = np.all(lo[cand] <= hi[i] + eps, axis=1) & np.all(hi[cand] >= lo[i] - eps, axis=1)
        cand = cand[ok]
        if cand.size == 0:
            continue
        shared = (tris[cand][:, :, None] == tris[i][None, None, :]).any(axis=(1, 2))
        A = verts[tris[i]]
        for j in cand[~shared]:
            if _tri_tri(A, verts[tris[j]], eps):
                return i, int(j)
    return -1, -1


# ---------------------------------------------------------------------------
# bracket state sum
# ---------------------------------------------------------------------------

@njit
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit
def _state_counts_compiled(corner_edges, n_edges):
    n = corner_edges.shape[0]
    counts = np.zeros((n + 1, n_edges + 2), dtype=np.int64)
    parent = np.empty(n_edges, dtype=np.int64)
    for mask in range(1 << n):
        for e in range(n_edges):
            parent[e] = e
        na = 0
        for c in range(n):
            h0 = corner_edges[c, 0]
            h1 = corner_edges[c, 1]
            h2 = corner_edges[c, 2]
            h3 = corner_edges[c, 3]
            if (mask >> c) & 1:
                # B smoothing joins (h0,h1) and (h2,h3)
                x, y = _find(parent, h0), _find(parent, h1)
                parent[x] = y
                x, y = _find(parent, h2), _find(parent, h3)
                parent[x] = y
            else:
                na += 1
                x, y = _find(parent, h1), _find(parent, h2)
                parent[x] = y
                x, y = _find(parent, h3), _find(parent, h0)
                parent[x] = y
        loops = 0
        for e in range(n_edges):
            if _find(parent, e) == e:
                loops += 1
        counts[na, loops] += 1
    return counts


def _state_counts_python(corner_edges, n_edges):
    n = corner_edges.shape[0]
    counts = np.zeros((n + 1, n_edges + 2), dtype=np.int64)
    for mask in range(1 << n):
        parent = list(range(n_edges))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        na = 0
        for c in range(n):
            h0, h1, h2, h3 = (int(v) for v in corner_edges[c])
            pairs = ((h0, h1), (h2, h3)) if (mask >> c) & 1 else ((h1, h2), (h3, h0))
            if not (mask >> c) & 1:
                na += 1
            for x, y in pairs:
                parent[find(x)] = find(y)
        loops = sum(1 for e in range(n_edges) if find(e) == e)
        counts[na, loops] += 1
    return counts


def state_counts(corner_edges, n_edges):
    """Histogram of Kauffman states by (#A-smoothings, #loops).

    ``corner_edges[c]`` lists the edge ids at crossing ``c`` in
    counter-clockwise order starting from the outgoing over-strand.
    """
    corner_edges = np.ascontiguousarray(corner_edges, dtype=np.int64).reshape(-1, 4)
    if _accel.NUMBA_ENABLED:
        return _state_counts_compiled(corner_edges, int(n_edges))
    return _state_counts_python(corner_edges, int(n_edges))
