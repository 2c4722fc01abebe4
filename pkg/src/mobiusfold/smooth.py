"""Smooth embedded approximation: offset faces joined by swept U-joints.

Every face is placed at its inflated height and every glued edge whose two
sides are apart in space gets a joint surface, the product of a planar
profile with a sub-interval of the edge.  Such a prism is developable, so
the whole mesh carries exact development coordinates.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from . import kernels
from .curves import BOUNDARY, BOUNDARY2, MIDLINE, InflationParams, SpaceCurve, glued_route, inflate
from .errors import DegenerateProfile, JointCollision, OpenCurve
from .folding import FoldedState, candidate_axes, rotates_onto_itself
from .geometry import DEFAULT_TOL, Tolerance, unit
from .profiles import chord_profile
from .strip import edge_param, map_across

FACE = "face"
JOINT = "joint"
TURN_RATIOS = (0.02, 0.05, 0.1, 0.2, 0.3, 0.45)


@dataclass(frozen=True, eq=False)
class StripMesh:
    """Triangle mesh with development coordinates for every triangle corner.

    ``uv`` is stored per corner rather than per vertex because the strip is
    cut open once at its glued ends, so vertices on that seam have two
    development positions.
    """

    vertices: np.ndarray          # (V, 3)
    triangles: np.ndarray         # (T, 3)
    uv: np.ndarray                # (T, 3, 2)
    provenance: Tuple[Tuple[str, int], ...]   # (FACE, face) or (JOINT, side pair index)
    midline: Optional[np.ndarray] = None
    turn_ratio: Optional[float] = None
    joint_lengths: Tuple[float, ...] = ()
    boundary_starts: Tuple[Tuple[np.ndarray, np.ndarray], ...] = ()

    @property
    def n_triangles(self):
        return len(self.triangles)

    def vertex_uv(self):
        """One development position per vertex (the last corner written wins on the seam)."""
        out = np.zeros((len(self.vertices), 2))
        out[self.triangles.ravel()] = self.uv.reshape(-1, 2)
        return out


@dataclass
class _Joint:
    index: int          # side pair index
    f: int              # face the joint leaves from (earlier in development order)
    g: int
    ef: int             # edge of f
    A0: np.ndarray      # 3D start of the edge on f (edge parameter 0)
    A1: np.ndarray
    u: np.ndarray       # in-plane outward direction on f
    w: np.ndarray       # second frame axis of the cross-section plane
    pts: np.ndarray     # profile in the (u, w) frame
    arc: np.ndarray
    ts: np.ndarray      # ruling parameters along the edge of f
    n_dev: np.ndarray   # development outward normal of the edge of f

    @property
    def length(self):
        return float(self.arc[-1])

    def row(self, t):
        base = self.A0 + t * (self.A1 - self.A0)
        return base + np.outer(self.pts[:, 0], self.u) + np.outer(self.pts[:, 1], self.w)


class _Builder:
    def __init__(self, state, params, joint_inset, s, samples, rulings, tol):
        self.state = state
        self.strip = state.strip
        self.gluing = state.gluing
        self.params = params
        self.inset = joint_inset
        self.s = s
        self.samples = samples
        self.rulings = rulings
        self.tol = tol
        self.offsets = inflate(state, params, tol)
        self.gap = 100 * max(tol.eps_point, 1e-9)

    def to3(self, face, pt):
        return self.state.placements[face].apply(np.asarray(pt, dtype=float)) + self.offsets[face]

    def outward(self, face, edge):
        a, b = self.strip.edge(face, edge)
        d = unit(b - a)
        n2 = np.array([d[1], -d[0]])
        return n2, self.state.placements[face].apply_vector(np.append(n2, 0.0))

    def joints(self, ratio):
        out = {}
        n = self.strip.n_faces
        for idx, sp in enumerate(self.gluing.side_pairs):
            if sp.face_a == sp.face_b:
                continue
            if sp.kind == "end":
                f, ef, g = (sp.face_b, sp.edge_b, sp.face_a) if sp.face_b == n - 1 else (sp.face_a, sp.edge_a, sp.face_b)
            else:
                f, ef, g = (sp.face_a, sp.edge_a, sp.face_b) if sp.face_a < sp.face_b else (sp.face_b, sp.edge_b, sp.face_a)
            a, b = self.strip.edge(f, ef)
            A0, A1 = self.to3(f, a), self.to3(f, b)
            _, B0 = map_across(self.strip, sp, f, a)
            B0 = self.to3(g, B0)
            if np.linalg.norm(B0 - A0) <= self.gap:
                continue  # butt joint: the faces already share this edge
            n_dev, u = self.outward(f, ef)
            eg = sp.edge_b if g == sp.face_b else sp.edge_a
            _, ug = self.outward(g, eg)
            e = unit(A1 - A0)
            w = np.cross(e, u)
            D = B0 - A0
            D2 = np.array([D @ u, D @ w])
            t1 = -np.array([ug @ u, ug @ w])
            radius = ratio * float(np.linalg.norm(D2))
            pts, arc = chord_profile([0.0, 0.0], [1.0, 0.0], D2, t1, radius, self.s, self.samples)
            length = float(np.linalg.norm(b - a))
            lo = self.inset / length
            if not 0 <= lo < 0.5:
                raise JointCollision(f"joint inset {self.inset} leaves no room on edge of face {f}")
            ts = list(np.linspace(lo, 1 - lo, self.rulings + 1))
            # the midline crosses every crease and end edge at half height
            if abs(b[1] - a[1]) > 1e-12:
                tm = (0.5 - a[1]) / (b[1] - a[1])
                if lo < tm < 1 - lo and min(abs(tm - t) for t in ts) > 1e-9:
                    ts.append(tm)
            out[idx] = _Joint(idx, f, g, ef, A0, A1, u, w, pts, arc, np.array(sorted(ts)), n_dev)
        return out

    def shifts(self, joints):
        n = self.strip.n_faces
        S = [np.zeros(2)]
        for k in range(n - 1):
            j = next((jt for jt in joints.values() if jt.f == k and jt.g == k + 1), None)
            S.append(S[-1] + (j.length * j.n_dev if j is not None else 0.0))
        return S

    def build(self, ratio):
        strip = self.strip
        joints = self.joints(ratio)
        S = self.shifts(joints)
        # extra points on face edges where joints are welded
        extra = {}
        for j in joints.values():
            sp = self.gluing.side_pairs[j.index]
            a, b = strip.edge(j.f, j.ef)
            extra.setdefault((j.f, j.ef), []).extend(j.ts)
            eg = sp.edge_b if j.g == sp.face_b else sp.edge_a
            for t in j.ts:
                _, q = map_across(strip, sp, j.f, a + t * (b - a))
                extra.setdefault((j.g, eg), []).append(edge_param(strip, j.g, eg, q))
        verts, tris, uvs, prov = [], [], [], []

        def add(p):
            verts.append(np.asarray(p, dtype=float))
            return len(verts) - 1

        for f, poly in enumerate(strip.faces):
            ring = []
            m = len(poly)
            for k in range(m):
                a, b = poly[k], poly[(k + 1) % m]
                ring.append(a)
                for t in sorted(extra.get((f, k), [])):
                    if 1e-12 < t < 1 - 1e-12:
                        ring.append(a + t * (b - a))
            ring = np.asarray(ring)
            c = poly.mean(axis=0)
            ci = add(self.to3(f, c))
            ids = [add(self.to3(f, p)) for p in ring]
            for i in range(len(ring)):
                i2 = (i + 1) % len(ring)
                tris.append((ci, ids[i], ids[i2]))
                uvs.append((c + S[f], ring[i] + S[f], ring[i2] + S[f]))
                prov.append((FACE, f))
        for idx in sorted(joints):
            j = joints[idx]
            sp = self.gluing.side_pairs[idx]
            a, b = strip.edge(j.f, j.ef)
            grid = []
            for t in j.ts:
                row = j.row(t)
                pf = a + t * (b - a)
                _, q = map_across(strip, sp, j.f, pf)
                row[0] = self.to3(j.f, pf)
                row[-1] = self.to3(j.g, q)
                grid.append(([add(p) for p in row], pf + S[j.f]))
            for r in range(len(grid) - 1):
                (i0, p0), (i1, p1) = grid[r], grid[r + 1]
                for c in range(len(j.arc) - 1):
                    u0 = p0 + j.arc[c] * j.n_dev
                    u1 = p0 + j.arc[c + 1] * j.n_dev
                    v0 = p1 + j.arc[c] * j.n_dev
                    v1 = p1 + j.arc[c + 1] * j.n_dev
                    tris.append((i0[c], i1[c], i1[c + 1]))
                    uvs.append((u0, v0, v1))
                    tris.append((i0[c], i1[c + 1], i0[c + 1]))
                    uvs.append((u0, v1, u1))
                    prov.extend([(JOINT, idx), (JOINT, idx)])
        V, T = _weld(np.asarray(verts), np.asarray(tris, dtype=np.int64), self.gap * 1e-3)
        midline = self._midline(joints)
        starts = []
        for cyc in self.gluing.boundary_cycles:
            be = cyc[0]
            a, b = strip.edge(be.face, be.edge)
            head, tail = (a, b) if be.forward else (b, a)
            starts.append((self.to3(be.face, head), self.to3(be.face, tail)))
        return StripMesh(V, T, np.asarray(uvs, dtype=float), tuple(prov), midline, ratio,
                         tuple(joints[i].length for i in sorted(joints)), tuple(starts))

    def _midline(self, joints):
        strip = self.strip
        by_pair = {j.index: j for j in joints.values()}
        mid = self.gluing.midline
        pts = []
        for i, seg in enumerate(mid):
            pts.append(self.to3(seg.face, seg.start))
            pts.append(self.to3(seg.face, seg.end))
            nxt = mid[(i + 1) % len(mid)]
            for sp, face, pt in glued_route(strip, self.gluing, seg.face, seg.end, nxt.face, nxt.start, self.gap):
                idx = self.gluing.side_pairs.index(sp)
                j = by_pair.get(idx)
                if j is None:
                    continue
                if face == j.f:
                    row = j.row(edge_param(strip, j.f, j.ef, pt))
                else:
                    _, q = map_across(strip, sp, face, pt)
                    row = j.row(edge_param(strip, j.f, j.ef, q))[::-1]
                pts.extend(row[1:-1])
        out = [pts[0]]
        for p in pts[1:]:
            if np.linalg.norm(p - out[-1]) > self.gap:
                out.append(p)
        while len(out) > 1 and np.linalg.norm(out[0] - out[-1]) <= self.gap:
            out.pop()
        return np.asarray(out)


def _weld(verts, tris, r):
    """Merge coincident vertices; the lowest index of each cluster survives."""
    tree = cKDTree(verts)
    parent = np.arange(len(verts))
    for i, j in sorted(tree.query_pairs(r)):
        ri, rj = parent[i], parent[j]
        while parent[ri] != ri:
            ri = parent[ri]
        while parent[rj] != rj:
            rj = parent[rj]
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    for i in range(len(parent)):
        k = i
        while parent[k] != k:
            k = parent[k]
        parent[i] = k
    keep = np.unique(parent)
    remap = np.full(len(verts), -1)
    remap[keep] = np.arange(len(keep))
    return verts[keep], remap[parent][tris]


def build_mesh(state: FoldedState, params: InflationParams = InflationParams(0.02),
               joint_inset: float = 0.05, s: float = 1.0, samples: int = 16,
               rulings: int = 4, turn_ratio: Optional[float] = None,
               tol: Tolerance = DEFAULT_TOL) -> StripMesh:
    """Triangulated smooth approximation of an inflated folded state.

    Each joint profile turns towards the chord between the two offset edges,
    runs straight and turns into the far face; each turn has arclength
    ``turn_ratio`` times the chord.  A flat fold thus gets a U whose depth
    past the crease grows with the ratio.  When ``turn_ratio`` is None the
    smallest ratio from TURN_RATIOS giving an embedded mesh is used.
    """
    if state.gluing is None:
        raise OpenCurve("a gluing diagram is required")
    if samples < 16:
        raise ValueError("samples must be at least 16")
    if joint_inset < 0:
        raise ValueError("joint_inset must be non-negative")
    b = _Builder(state, params, joint_inset, s, samples, rulings, tol)
    ratios = TURN_RATIOS if turn_ratio is None else (turn_ratio,)
    first = None
    for ratio in ratios:
        try:
            mesh = b.build(ratio)
        except DegenerateProfile:
            continue
        ok, pair = check_embedded(mesh, tol)
        if ok:
            return mesh
        first = first or (ratio, mesh, pair)
    if first is None:
        raise JointCollision("no turn ratio admits a joint profile")
    ratio, mesh, (i, j) = first
    raise JointCollision(f"triangles {i} ({mesh_label(mesh, i)}) and {j} ({mesh_label(mesh, j)}) "
                         f"intersect at turn ratio {ratio}")


def mesh_label(mesh, t):
    kind, idx = mesh.provenance[t]
    return f"{kind} {idx}"


def check_developable(mesh: StripMesh):
    """(max relative edge-length distortion, max interior angle defect)."""
    P = mesh.vertices[mesh.triangles]
    dist = 0.0
    for k in range(3):
        l3 = np.linalg.norm(P[:, (k + 1) % 3] - P[:, k], axis=1)
        l2 = np.linalg.norm(mesh.uv[:, (k + 1) % 3] - mesh.uv[:, k], axis=1)
        dist = max(dist, float(np.max(np.abs(l3 - l2) / l2)))
    angles = np.zeros(len(mesh.vertices))
    for k in range(3):
        a = P[:, (k + 1) % 3] - P[:, k]
        b = P[:, (k + 2) % 3] - P[:, k]
        cosv = np.einsum("ij,ij->i", a, b) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
        np.add.at(angles, mesh.triangles[:, k], np.arccos(np.clip(cosv, -1.0, 1.0)))
    interior = np.ones(len(mesh.vertices), dtype=bool)
    interior[np.unique(boundary_edges(mesh))] = False
    defect = float(np.max(np.abs(2 * np.pi - angles[interior]))) if interior.any() else 0.0
    return dist, defect


def _edge_counts(mesh):
    e = np.concatenate([mesh.triangles[:, [0, 1]], mesh.triangles[:, [1, 2]], mesh.triangles[:, [2, 0]]])
    e = np.sort(e, axis=1)
    return np.unique(e, axis=0, return_counts=True)


def boundary_edges(mesh):
    edges, counts = _edge_counts(mesh)
    return edges[counts == 1]


def is_manifold(mesh):
    _, counts = _edge_counts(mesh)
    return bool(np.all(counts <= 2))


def check_embedded(mesh: StripMesh, tol: Tolerance = DEFAULT_TOL):
    """(True, None) or (False, (i, j)) with the lowest-index touching pair of vertex-disjoint triangles."""
    i, j = kernels.first_triangle_collision(mesh.vertices, mesh.triangles, tol.eps_point)
    if i < 0:
        return True, None
    return False, (i, j)


def aspect_ratio(mesh: StripMesh) -> float:
    """Length of the development: the extent of the flat coordinates along the strip."""
    u = mesh.uv[..., 0]
    return float(u.max() - u.min())


def boundary_loops(mesh: StripMesh) -> List[np.ndarray]:
    """Closed boundary polylines, each oriented to follow its gluing boundary cycle."""
    edges = boundary_edges(mesh)
    nbrs = {}
    for a, b in edges:
        nbrs.setdefault(int(a), []).append(int(b))
        nbrs.setdefault(int(b), []).append(int(a))
    if any(len(v) != 2 for v in nbrs.values()):
        raise OpenCurve("mesh boundary is not a union of simple loops")
    seen = set()
    loops = []
    for start in sorted(nbrs):
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        prev, cur = start, nbrs[start][0]
        while cur != start:
            loop.append(cur)
            seen.add(cur)
            a, b = nbrs[cur]
            prev, cur = cur, (b if a == prev else a)
        loops.append(loop)
    tree = cKDTree(mesh.vertices)
    out = []
    for head, tail in mesh.boundary_starts:
        h = int(tree.query(head)[1])
        t = int(tree.query(tail)[1])
        for loop in loops:
            if h in loop:
                k = loop.index(h)
                loop = loop[k:] + loop[:k]
                if loop[1] != t:
                    loop = [loop[0]] + loop[1:][::-1]
                out.append(mesh.vertices[loop])
                break
    if len(out) != len(loops):
        raise OpenCurve(f"mesh has {len(loops)} boundary loops, gluing has {len(out)}")
    return out


def mesh_curves(mesh: StripMesh) -> List[SpaceCurve]:
    loops = boundary_loops(mesh)
    names = [BOUNDARY] if len(loops) == 1 else [BOUNDARY, BOUNDARY2]
    curves = [SpaceCurve(n, p) for n, p in zip(names, loops)]
    curves.append(SpaceCurve(MIDLINE, mesh.midline))
    return curves


def boundary_symmetric(mesh: StripMesh, order: int, normals=(), tol: float = 1e-6) -> bool:
    """Whether a rotation of the given order maps the mesh boundary onto itself."""
    pts = np.concatenate(boundary_loops(mesh))
    center = pts.mean(axis=0)
    return any(rotates_onto_itself([pts], order, axis, center, tol)
               for axis in candidate_axes(pts, normals))


def _fmt(x):
    return f"{x:.9g}"


def write_obj(mesh: StripMesh, path, comment=""):
    with open(path, "w") as fh:
        fh.write(obj_text(mesh, comment))


def obj_text(mesh: StripMesh, comment=""):
    lines = []
    if comment:
        lines.append(f"# {comment}")
    for v in mesh.vertices:
        lines.append("v " + " ".join(_fmt(x) for x in v))
    for c in mesh.uv.reshape(-1, 2):
        lines.append("vt " + " ".join(_fmt(x) for x in c))
    current = None
    for t, tri in enumerate(mesh.triangles):
        kind, idx = mesh.provenance[t]
        if (kind, idx) != current:
            current = (kind, idx)
            lines.append(f"g {kind}_{idx}")
        lines.append("f " + " ".join(f"{tri[k] + 1}/{3 * t + k + 1}" for k in range(3)))
    return "\n".join(lines) + "\n"
