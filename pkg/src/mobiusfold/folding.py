"""Fold programs, folded states and layer-order checks."""

from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree
from shapely.geometry import Polygon

from .errors import GluingMismatch, LayerConflict, NonPlanarFace
from .geometry import DEFAULT_TOL, RigidPlacement, Tolerance, plane_basis, point_in_polygon, unit
from .strip import CreasedStrip, GluingDiagram, map_across

ABOVE = "above"
BELOW = "below"


@dataclass(frozen=True)
class FoldInstruction:
    """Rotate everything downstream of ``crease`` by ``dihedral`` radians.

    The rotation is right-handed about the crease direction as stored in
    the strip.  ``dihedral == pi`` is a flat fold; ``stacking`` then says
    whether the moving faces land above or below the stationary stack.
    """

    crease: int
    dihedral: float = np.pi
    stacking: str = ABOVE

    def __post_init__(self):
        if not 0 < self.dihedral < 2 * np.pi:
            raise ValueError(f"dihedral must lie in (0, 2pi), got {self.dihedral}")
        if self.stacking not in (ABOVE, BELOW):
            raise ValueError(f"stacking must be 'above' or 'below', got {self.stacking!r}")

    @property
    def is_flat(self):
        return abs(self.dihedral - np.pi) < 1e-12


@dataclass(frozen=True, eq=False)
class FoldedState:
    strip: CreasedStrip
    gluing: Optional[GluingDiagram]
    placements: Tuple[RigidPlacement, ...]
    layers: Tuple[int, ...]
    plane_groups: Tuple[Tuple[int, ...], ...]
    group_normals: Tuple[np.ndarray, ...]
    images: Tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        if not self.images:
            imgs = tuple(p.apply(f) for p, f in zip(self.placements, self.strip.faces))
            object.__setattr__(self, "images", imgs)

    def group_of(self, face):
        for g, members in enumerate(self.plane_groups):
            if face in members:
                return g
        raise KeyError(face)

    def face_normal(self, face):
        return self.placements[face].apply_vector([0.0, 0.0, 1.0])

    def group_frame(self, g):
        """Origin and in-plane basis for plane group ``g``."""
        n = self.group_normals[g]
        e1, e2 = plane_basis(n)
        origin = self.images[self.plane_groups[g][0]][0]
        return origin, e1, e2

    def to_group_2d(self, g, pts):
        origin, e1, e2 = self.group_frame(g)
        rel = np.asarray(pts, dtype=float) - origin
        return np.stack([rel @ e1, rel @ e2], axis=-1)

    def glued_images(self, pair):
        """3D endpoints of both sides of a side pair, oriented consistently."""
        a0, a1 = _edge3(self, pair.face_a, pair.edge_a)
        b0, b1 = _edge3(self, pair.face_b, pair.edge_b)
        if pair.flip:
            b0, b1 = b1, b0
        return (a0, a1), (b0, b1)


def _edge3(state, face, k):
    im = state.images[face]
    return im[k], im[(k + 1) % len(im)]


def _coplanar(n1, p1, n2, p2, eps):
    return np.linalg.norm(np.cross(n1, n2)) < 1e-7 and abs(np.dot(p2 - p1, n1)) < eps


def fold(strip: CreasedStrip, program: Sequence[FoldInstruction],
         gluing: Optional[GluingDiagram] = None, tol: Tolerance = DEFAULT_TOL) -> FoldedState:
    """Execute a fold program and stack the layers.

    Every face carries a stacking normal and a height along it.  Flat folds
    reflect the moving faces (so their heights reverse) and shift them to
    sit contiguously above or below the stationary faces in the same plane.
    Final layers are the longest-path ranks of the overlap order inside each
    plane group.
    """
    n = strip.n_faces
    used = [ins.crease for ins in program]
    if len(set(used)) != len(used):
        raise ValueError("program folds a crease more than once")
    if any(not 0 <= c < n - 1 for c in used):
        raise ValueError("crease index out of range")
    eps = max(tol.eps_point, 1e-9) * 100
    placements = [RigidPlacement.identity() for _ in range(n)]
    up = [np.array([0.0, 0.0, 1.0]) for _ in range(n)]
    height = [0.0] * n
    for ins in program:
        k = ins.crease
        p, q = strip.creases[k]
        P = placements[k].apply(p)
        Q = placements[k].apply(q)
        R = RigidPlacement.about_axis(P, Q - P, ins.dihedral)
        for f in range(k + 1, n):
            placements[f] = R.compose(placements[f])
            up[f] = R.apply_vector(up[f])
        if not ins.is_flat:
            continue
        nk = placements[k].apply_vector([0, 0, 1.0])
        xk = placements[k].apply(strip.faces[k][:1])[0]
        ref = up[k]

        def in_plane(f):
            nf = placements[f].apply_vector([0, 0, 1.0])
            xf = placements[f].apply(strip.faces[f][:1])[0]
            return _coplanar(nk, xk, nf, xf, eps)

        stat = [height[f] * np.dot(up[f], ref) for f in range(k + 1) if in_plane(f)]
        mov_faces = [f for f in range(k + 1, n) if in_plane(f)]
        mov = [height[f] * np.dot(up[f], ref) for f in mov_faces]
        if ins.stacking == ABOVE:
            shift = max(stat) + 1.0 - min(mov)
        else:
            shift = min(stat) - 1.0 - max(mov)
        for f in range(k + 1, n):
            c = float(np.dot(up[f], ref))
            if abs(c) > 0.5:
                height[f] += shift * np.sign(c)
    for f in range(n):
        if not placements[f].is_valid():
            raise NonPlanarFace(f"face {f} placement is not a rigid motion")
    images = tuple(pl.apply(fc) for pl, fc in zip(placements, strip.faces))
    groups, normals = _plane_groups(strip, placements, images, up, eps)
    layers = _assign_layers(strip, gluing, images, groups, normals, up, height, eps)
    state = FoldedState(strip, gluing, tuple(placements), tuple(layers), groups, normals, images)
    if gluing is not None:
        for sp in gluing.side_pairs:
            (a0, a1), (b0, b1) = state.glued_images(sp)
            if np.linalg.norm(a0 - b0) > eps or np.linalg.norm(a1 - b1) > eps:
                raise GluingMismatch(f"side pair {sp.label} does not close up in space")
    return state


def _plane_groups(strip, placements, images, up, eps):
    n = len(images)
    normals = [pl.apply_vector([0, 0, 1.0]) for pl in placements]
    groups: List[List[int]] = []
    for f in range(n):
        for g in groups:
            h = g[0]
            if _coplanar(normals[h], images[h][0], normals[f], images[f][0], eps):
                g.append(f)
                break
        else:
            groups.append([f])
    groups_t = tuple(tuple(g) for g in groups)
    centroid = np.concatenate(images).mean(axis=0)
    ref = []
    for g in groups_t:
        nrm = unit(normals[g[0]])
        if len(groups_t) == 1:
            s = np.dot(up[g[0]], nrm)
        else:
            gc = np.concatenate([images[f] for f in g]).mean(axis=0)
            s = np.dot(gc - centroid, nrm)
        ref.append(nrm if s >= 0 else -nrm)
    return groups_t, tuple(ref)


def butt_pairs(strip, gluing, images, groups, eps):
    """Side pairs joining two coplanar faces lying on opposite sides of the glued edge."""
    out = []
    if gluing is None:
        return out
    gid = {f: gi for gi, g in enumerate(groups) for f in g}
    for sp in gluing.side_pairs:
        if gid[sp.face_a] != gid[sp.face_b]:
            continue
        if _fold_side(strip, images, sp) is None:
            out.append(sp)
    return out


def _fold_side(strip, images, sp):
    """+-1 side (relative to edge a) shared by both faces of a taco, None for a butt joint."""
    ia, ib = images[sp.face_a], images[sp.face_b]
    a0 = ia[sp.edge_a]
    a1 = ia[(sp.edge_a + 1) % len(ia)]
    e = unit(a1 - a0)
    ca = ia.mean(axis=0) - a0
    cb = ib.mean(axis=0) - a0
    ca = ca - np.dot(ca, e) * e
    cb = cb - np.dot(cb, e) * e
    if np.dot(ca, cb) > 0:
        return ca / np.linalg.norm(ca)
    return None


def _assign_layers(strip, gluing, images, groups, normals, up, height, eps):
    n = len(images)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for sp in butt_pairs(strip, gluing, images, groups, eps):
        parent[find(sp.face_a)] = find(sp.face_b)
    layers = [0] * n
    for gi, g in enumerate(groups):
        nrm = normals[gi]
        origin = images[g[0]][0]
        e1, e2 = plane_basis(nrm)
        polys = {f: Polygon(np.stack([(images[f] - origin) @ e1, (images[f] - origin) @ e2], axis=1))
                 for f in g}
        s = {f: height[f] * float(np.dot(up[f], nrm)) for f in g}
        phys = sorted({find(f) for f in g})
        succ = {p: set() for p in phys}
        for f, h in combinations(g, 2):
            pf, ph = find(f), find(h)
            if pf == ph:
                continue
            if polys[f].intersection(polys[h]).area <= 1e-9:
                continue
            if abs(s[f] - s[h]) < 1e-9:
                raise LayerConflict(f"overlapping faces {f} and {h} share a height")
            lo, hi = (pf, ph) if s[f] < s[h] else (ph, pf)
            succ[lo].add(hi)
        rank = _longest_path_ranks(phys, succ)
        for f in g:
            layers[f] = rank[find(f)]
    return layers


def _longest_path_ranks(nodes, succ):
    indeg = {v: 0 for v in nodes}
    for v in nodes:
        for w in succ[v]:
            indeg[w] += 1
    rank = {v: 1 for v in nodes}
    queue = [v for v in nodes if indeg[v] == 0]
    seen = 0
    while queue:
        v = queue.pop(0)
        seen += 1
        for w in sorted(succ[v]):
            rank[w] = max(rank[w], rank[v] + 1)
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if seen != len(nodes):
        raise LayerConflict("stacking order is cyclic")
    return rank


# ---------------------------------------------------------------------------
# layer checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class LayerViolation:
    kind: str  # "taco-taco" or "taco-tortilla"
    entities: Tuple[str, ...]
    message: str = field(compare=False, default="")

    def __str__(self):
        return f"{self.kind} {', '.join(self.entities)}: {self.message}"


@dataclass(frozen=True)
class FoldEdge:
    pair: object
    group: int
    seg: np.ndarray        # 2D segment in group coordinates
    layers: Tuple[int, int]
    inward: np.ndarray     # 2D unit vector toward the two faces


def fold_edges(state: FoldedState, tol: Tolerance = DEFAULT_TOL) -> List[FoldEdge]:
    """Glued edges folded flat inside a plane group (tacos)."""
    out = []
    if state.gluing is None:
        return out
    for sp in state.gluing.side_pairs:
        ga, gb = state.group_of(sp.face_a), state.group_of(sp.face_b)
        if ga != gb:
            continue
        side = _fold_side(state.strip, state.images, sp)
        if side is None:
            continue
        (a0, a1), _ = state.glued_images(sp)
        seg = state.to_group_2d(ga, np.stack([a0, a1]))
        origin, e1, e2 = state.group_frame(ga)
        inward = np.array([side @ e1, side @ e2])
        la, lb = state.layers[sp.face_a], state.layers[sp.face_b]
        out.append(FoldEdge(sp, ga, seg, (min(la, lb), max(la, lb)), inward / np.linalg.norm(inward)))
    return out


def _collinear_overlap(s1, s2, eps):
    d = s1[1] - s1[0]
    L = np.linalg.norm(d)
    d = d / L
    nrm = np.array([-d[1], d[0]])
    if abs(np.dot(s2[0] - s1[0], nrm)) > eps or abs(np.dot(s2[1] - s1[0], nrm)) > eps:
        return 0.0
    a = sorted([np.dot(s2[0] - s1[0], d), np.dot(s2[1] - s1[0], d)])
    return max(0.0, min(L, a[1]) - max(0.0, a[0]))


def check_layers(state: FoldedState, tol: Tolerance = DEFAULT_TOL) -> List[LayerViolation]:
    """Interlaced folds on a common line and faces wedged into a fold.

    Empty result means every plane group can be stacked physically.
    """
    eps = max(tol.eps_point, 1e-9) * 100
    edges = fold_edges(state, tol)
    out = set()
    for e, f in combinations(edges, 2):
        if e.group != f.group:
            continue
        if _collinear_overlap(e.seg, f.seg, eps) <= eps:
            continue
        (a, b), (c, d) = e.layers, f.layers
        if a < c < b < d or c < a < d < b:
            names = tuple(sorted((e.pair.label, f.pair.label)))
            out.add(LayerViolation("taco-taco", names, f"layers {e.layers} and {f.layers} interlace"))
    for e in edges:
        lo, hi = e.layers
        members = state.plane_groups[e.group]
        for face in members:
            if face in (e.pair.face_a, e.pair.face_b):
                continue
            if not lo < state.layers[face] < hi:
                continue
            poly = state.to_group_2d(e.group, state.images[face])
            if _covers_outside(poly, e.seg, -e.inward):
                label = state.strip.face_labels[face]
                out.add(LayerViolation("taco-tortilla", (e.pair.label, label),
                                       f"face {label} at layer {state.layers[face]} pierces fold {e.layers}"))
    return sorted(out)


def _covers_outside(poly, seg, outward, probes=19, push=1e-6):
    for t in np.linspace(0.05, 0.95, probes):
        pt = seg[0] + t * (seg[1] - seg[0]) + push * outward
        if point_in_polygon(pt, poly):
            return True
    return False


# ---------------------------------------------------------------------------
# symmetry
# ---------------------------------------------------------------------------

def candidate_axes(points, normals=()):
    """Unit directions worth testing as rotation axes for a point cloud."""
    pts = np.asarray(points, dtype=float)
    cands = [np.array([0, 0, 1.0])]
    normals = [unit(n) for n in normals]
    cands.extend(normals)
    for a, b in combinations(normals, 2):
        for sb in (1, -1):
            v = a + sb * b
            if np.linalg.norm(v) > 1e-9:
                cands.append(unit(v))
    for a, b, c in combinations(normals, 3):
        for sb in (1, -1):
            for sc in (1, -1):
                v = a + sb * b + sc * c
                if np.linalg.norm(v) > 1e-9:
                    cands.append(unit(v))
    centered = pts - pts.mean(axis=0)
    _, vecs = np.linalg.eigh(centered.T @ centered)
    cands.extend(vecs.T)
    return cands


def rotates_onto_itself(point_sets, order, axis, center, tol):
    """True if rotating by 2pi/order about the axis maps the union of point sets to itself."""
    R = RigidPlacement.about_axis(center, axis, 2 * np.pi / order)
    allpts = np.concatenate(point_sets)
    tree = cKDTree(allpts)
    for pts in point_sets:
        d, _ = tree.query(R.apply(pts))
        if np.max(d) > tol:
            return False
    return True


def symmetry_check(state: FoldedState, order: int, tol: float = 1e-9) -> bool:
    """Whether some axis gives a rotation of the given order preserving all face images."""
    if order <= 1:
        return True
    polys = [np.asarray(im) for im in state.images]
    center = np.concatenate(polys).mean(axis=0)
    for axis in candidate_axes(np.concatenate(polys), state.group_normals):
        if _faces_map(polys, order, axis, center, tol):
            return True
    return False


def _faces_map(polys, order, axis, center, tol):
    R = RigidPlacement.about_axis(center, axis, 2 * np.pi / order)
    keys = [_poly_key(p, tol) for p in polys]
    for p in polys:
        rk = _poly_key(R.apply(p), tol)
        if not any(_same_vertex_set(rk, k, tol) for k in keys):
            return False
    return True


def _poly_key(p, tol):
    return np.asarray(sorted(map(tuple, np.round(p, 7))))


def _same_vertex_set(a, b, tol):
    if a.shape != b.shape:
        return False
    return np.max(np.abs(a - b)) <= max(tol, 1e-7) * 10
