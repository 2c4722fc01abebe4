"""The flat creased strip and its gluing combinatorics."""

from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from shapely.geometry import Polygon

from .errors import NotDevelopable
from .geometry import DEFAULT_TOL, Tolerance, polygon_area, unit

MOEBIUS = "moebius"
CYLINDER = "cylinder"


@dataclass(frozen=True, eq=False)
class CreasedStrip:
    """A 1 x aspect_ratio rectangle cut into faces along straight creases.

    Faces are counter-clockwise polygons listed in strip order; crease ``k``
    is the segment shared by faces ``k`` and ``k + 1``.  ``side_colors``
    tags the (top, bottom) side of each face as it lies flat.
    """

    aspect_ratio: float
    faces: Tuple[np.ndarray, ...]
    creases: Tuple[np.ndarray, ...]
    face_labels: Tuple[str, ...] = ()
    side_colors: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "faces", tuple(np.asarray(f, dtype=float).reshape(-1, 2) for f in self.faces))
        object.__setattr__(self, "creases", tuple(np.asarray(c, dtype=float).reshape(2, 2) for c in self.creases))
        if not self.face_labels:
            object.__setattr__(self, "face_labels", tuple(str(i + 1) for i in range(len(self.faces))))
        if not self.side_colors:
            object.__setattr__(self, "side_colors",
                               tuple((f"{lab}A", f"{lab}B") for lab in self.face_labels))

    @property
    def n_faces(self):
        return len(self.faces)

    def edge(self, face, k):
        poly = self.faces[face]
        return poly[k], poly[(k + 1) % len(poly)]

    def find_edge(self, face, p, q, eps=1e-9):
        """Index of the edge of ``face`` with endpoints {p, q}, or None."""
        poly = self.faces[face]
        m = len(poly)
        for k in range(m):
            a, b = poly[k], poly[(k + 1) % m]
            if ((np.linalg.norm(a - p) < eps and np.linalg.norm(b - q) < eps)
                    or (np.linalg.norm(a - q) < eps and np.linalg.norm(b - p) < eps)):
                return k
        return None

    def crease_edges(self, k):
        """Edge indices of crease ``k`` on faces k and k+1."""
        p, q = self.creases[k]
        return self.find_edge(k, p, q), self.find_edge(k + 1, p, q)


@dataclass(frozen=True)
class SidePair:
    """Identification of edge ``edge_a`` of ``face_a`` with ``edge_b`` of ``face_b``.

    The point at parameter t along edge a (from its first vertex) is glued
    to parameter t along edge b, or 1 - t when ``flip`` is set.
    """

    label: str
    face_a: int
    edge_a: int
    face_b: int
    edge_b: int
    flip: bool
    kind: str = "crease"  # or "end"


@dataclass(frozen=True)
class BoundaryEdge:
    label: str
    face: int
    edge: int
    forward: bool


@dataclass(frozen=True)
class MidlineSegment:
    face: int
    start: Tuple[float, float]
    end: Tuple[float, float]


@dataclass(frozen=True)
class GluingDiagram:
    side_pairs: Tuple[SidePair, ...]
    boundary_cycles: Tuple[Tuple[BoundaryEdge, ...], ...]
    midline: Tuple[MidlineSegment, ...]
    end_gluing: str = MOEBIUS

    @property
    def end_pair(self) -> Optional[SidePair]:
        for sp in self.side_pairs:
            if sp.kind == "end":
                return sp
        return None

    def pairs_of(self, face):
        return [sp for sp in self.side_pairs if face in (sp.face_a, sp.face_b)]


def edge_param(strip, face, edge, pt):
    a, b = strip.edge(face, edge)
    ab = b - a
    return float(np.dot(np.asarray(pt) - a, ab) / np.dot(ab, ab))


def map_across(strip, pair, face, pt):
    """Image of a development point on one side of ``pair`` on the other side."""
    if face == pair.face_a:
        t = edge_param(strip, pair.face_a, pair.edge_a, pt)
        other, oedge = pair.face_b, pair.edge_b
    else:
        t = edge_param(strip, pair.face_b, pair.edge_b, pt)
        other, oedge = pair.face_a, pair.edge_a
    if pair.flip:
        t = 1.0 - t
    a, b = strip.edge(other, oedge)
    return other, a + t * (b - a)


def glue_strip(strip: CreasedStrip, kind=MOEBIUS, reverse_boundary=False,
               reverse_midline=False, pair_labels=None) -> GluingDiagram:
    """Derive the gluing diagram of a strip whose ends are x=0 and x=aspect_ratio."""
    lam = strip.aspect_ratio
    n = strip.n_faces
    pairs = []
    labels = pair_labels or [chr(ord("A") + i) for i in range(n)]
    for k in range(n - 1):
        ea, eb = strip.crease_edges(k)
        if ea is None or eb is None:
            raise ValueError(f"crease {k} is not an edge of faces {k} and {k + 1}")
        pairs.append(SidePair(labels[k], k, ea, k + 1, eb, True, "crease"))
    e0 = _edge_on(strip, 0, lambda p: abs(p[0]) < 1e-9)
    e1 = _edge_on(strip, n - 1, lambda p: abs(p[0] - lam) < 1e-9)
    if e0 is not None and e1 is not None:
        # ccw: x=0 edge runs downward, x=lam edge upward
        flip = kind == CYLINDER
        pairs.append(SidePair(labels[n - 1], 0, e0, n - 1, e1, flip, "end"))

    def side(yval):
        out = []
        for f in range(n):
            k = _edge_on(strip, f, lambda p: abs(p[1] - yval) < 1e-9)
            if k is not None:
                a, b = strip.edge(f, k)
                out.append((min(a[0], b[0]), f, k, bool(b[0] > a[0])))
        out.sort()
        return [(f, k, fwd) for _, f, k, fwd in out]

    bottom, top = side(0.0), side(1.0)
    if kind == MOEBIUS:
        cycles = [bottom + top]
    else:
        cycles = [bottom, top]
    letters = iter("abcdefghijklmnopqrstuvwxyz")
    out_cycles = []
    for cyc in cycles:
        if reverse_boundary:
            cyc = [(f, k, not fwd) for f, k, fwd in reversed(cyc)]
        out_cycles.append(tuple(BoundaryEdge(next(letters), f, k, fwd) for f, k, fwd in cyc))

    mid = []
    for f in range(n):
        seg = _midline_piece(strip.faces[f])
        if seg is not None:
            mid.append(MidlineSegment(f, tuple(seg[0]), tuple(seg[1])))
    if reverse_midline:
        mid = [MidlineSegment(m.face, m.end, m.start) for m in reversed(mid)]
    return GluingDiagram(tuple(pairs), tuple(out_cycles), tuple(mid), kind)


def _edge_on(strip, face, pred):
    poly = strip.faces[face]
    m = len(poly)
    for k in range(m):
        a, b = poly[k], poly[(k + 1) % m]
        if pred(a) and pred(b) and np.linalg.norm(b - a) > 1e-9:
            return k
    return None


def _midline_piece(poly, y=0.5):
    xs = []
    m = len(poly)
    for k in range(m):
        a, b = poly[k], poly[(k + 1) % m]
        if (a[1] - y) * (b[1] - y) <= 0 and a[1] != b[1]:
            t = (y - a[1]) / (b[1] - a[1])
            xs.append(a[0] + t * (b[0] - a[0]))
    if len(xs) < 2:
        return None
    lo, hi = min(xs), max(xs)
    if hi - lo < 1e-12:
        return None
    return np.array([lo, y]), np.array([hi, y])


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    invariant: str
    entity: str
    message: str

    def __str__(self):
        return f"[{self.invariant}] {self.entity}: {self.message}"


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)
    boundary_cycle_count: int = 0

    @property
    def ok(self):
        return not self.violations

    def add(self, invariant, entity, message):
        self.violations.append(Violation(invariant, entity, message))


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def vertex_classes(strip, gluing):
    """Union-find over (face, vertex) identified by the side pairs."""
    uf = _UnionFind()
    for sp in gluing.side_pairs:
        na = len(strip.faces[sp.face_a])
        nb = len(strip.faces[sp.face_b])
        a0, a1 = (sp.face_a, sp.edge_a), (sp.face_a, (sp.edge_a + 1) % na)
        b0, b1 = (sp.face_b, sp.edge_b), (sp.face_b, (sp.edge_b + 1) % nb)
        if sp.flip:
            b0, b1 = b1, b0
        uf.union(a0, b0)
        uf.union(a1, b1)
    return uf


def validate_strip(strip: CreasedStrip, gluing: Optional[GluingDiagram] = None,
                   tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    rep = ValidationReport()
    lam = strip.aspect_ratio
    eps = max(tol.eps_point, 1e-9)
    if not lam > 0:
        rep.add("aspect_ratio", "strip", f"non-positive aspect ratio {lam}")
        return rep
    polys = []
    total = 0.0
    for f, poly in enumerate(strip.faces):
        area = polygon_area(poly)
        total += area
        P = Polygon(poly)
        polys.append(P)
        if area <= 0:
            rep.add("face_orientation", f"face {f}", "not counter-clockwise")
        if not P.is_valid:
            rep.add("face_simple", f"face {f}", "polygon is not simple")
        if np.any(poly[:, 0] < -eps) or np.any(poly[:, 0] > lam + eps) or np.any(poly[:, 1] < -eps) \
                or np.any(poly[:, 1] > 1 + eps):
            rep.add("tiling", f"face {f}", "vertex outside the rectangle")
    if abs(total - lam) > 1e-9:
        rep.add("tiling", "strip", f"face areas sum to {total:.12g}, expected {lam:.12g}")
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if polys[i].is_valid and polys[j].is_valid and polys[i].intersection(polys[j]).area > 1e-9:
                rep.add("tiling", f"faces {i},{j}", "interiors overlap")
            if j > i + 1 and polys[i].is_valid and polys[j].is_valid:
                shared = polys[i].boundary.intersection(polys[j].boundary)
                if shared.length > 1e-9:
                    rep.add("crease_path", f"faces {i},{j}", "non-consecutive faces share an edge")
    if len(strip.creases) != strip.n_faces - 1:
        rep.add("crease_path", "strip", "crease count must be face count - 1")
    for k, (p, q) in enumerate(strip.creases):
        for pt in (p, q):
            on = (abs(pt[0]) < eps or abs(pt[0] - lam) < eps or abs(pt[1]) < eps or abs(pt[1] - 1) < eps)
            if not on:
                rep.add("crease_endpoint", f"crease {k}", f"endpoint {pt.tolist()} not on the rectangle boundary")
        if k + 1 < strip.n_faces:
            ea, eb = strip.crease_edges(k)
            if ea is None or eb is None:
                rep.add("crease_path", f"crease {k}", "not an edge of both adjacent faces")
    if gluing is None:
        return rep
    _validate_gluing(strip, gluing, rep, eps)
    return rep


def _validate_gluing(strip, gluing, rep, eps):
    for sp in gluing.side_pairs:
        a0, a1 = strip.edge(sp.face_a, sp.edge_a)
        b0, b1 = strip.edge(sp.face_b, sp.edge_b)
        if abs(np.linalg.norm(a1 - a0) - np.linalg.norm(b1 - b0)) > eps:
            rep.add("pair_length", f"pair {sp.label}", "paired edges differ in length")
        if sp.kind == "crease":
            bb0, bb1 = (b1, b0) if sp.flip else (b0, b1)
            if np.linalg.norm(a0 - bb0) > eps or np.linalg.norm(a1 - bb1) > eps:
                rep.add("pair_geometry", f"pair {sp.label}", "crease pair does not coincide in development")
    uf = vertex_classes(strip, gluing)
    cycles = gluing.boundary_cycles
    rep.boundary_cycle_count = len(cycles)
    want = 1 if gluing.end_gluing == MOEBIUS else 2
    if len(cycles) != want:
        rep.add("boundary_cycles", "gluing", f"{len(cycles)} boundary cycle(s), expected {want}")
    seen = set()
    for ci, cyc in enumerate(cycles):
        for i, be in enumerate(cyc):
            key = (be.face, be.edge)
            if key in seen:
                rep.add("boundary_cycles", f"edge {be.label}", "boundary edge listed twice")
            seen.add(key)
            nxt = cyc[(i + 1) % len(cyc)]
            head = _endpoint(strip, be, head=True)
            tail = _endpoint(strip, nxt, head=False)
            if uf.find(head) != uf.find(tail) and not _same_point(strip, head, tail, eps):
                rep.add("boundary_cycles", f"edge {be.label}",
                        f"head does not meet the tail of edge {nxt.label}")
    expected = set()
    for f in range(strip.n_faces):
        poly = strip.faces[f]
        for k in range(len(poly)):
            a, b = strip.edge(f, k)
            if (abs(a[1]) < eps and abs(b[1]) < eps) or (abs(a[1] - 1) < eps and abs(b[1] - 1) < eps):
                expected.add((f, k))
    if expected != seen:
        rep.add("boundary_cycles", "gluing", "boundary cycles do not cover the long edges exactly once")
    # midline concatenation
    mid = gluing.midline
    if not mid:
        rep.add("midline", "gluing", "no midline segments")
        return
    for i, seg in enumerate(mid):
        nxt = mid[(i + 1) % len(mid)]
        end = np.asarray(seg.end)
        ok = False
        for sp in gluing.pairs_of(seg.face):
            # try both sides so that a pair joining a face to itself also counts
            for face, e, other, oe in ((sp.face_a, sp.edge_a, sp.face_b, sp.edge_b),
                                       (sp.face_b, sp.edge_b, sp.face_a, sp.edge_a)):
                if face != seg.face or other != nxt.face:
                    continue
                a, b = strip.edge(face, e)
                if not _on_segment(end, a, b, eps):
                    continue
                t = float(np.dot(end - a, b - a) / np.dot(b - a, b - a))
                if sp.flip:
                    t = 1.0 - t
                c, d = strip.edge(other, oe)
                if np.linalg.norm(c + t * (d - c) - np.asarray(nxt.start)) < eps:
                    ok = True
        if not ok:
            rep.add("midline", f"segment {i}", "does not continue into the next midline segment")


def _on_segment(p, a, b, eps):
    ab = b - a
    t = np.dot(p - a, ab) / np.dot(ab, ab)
    return -eps <= t <= 1 + eps and np.linalg.norm(a + t * ab - p) < eps


def _endpoint(strip, be, head):
    m = len(strip.faces[be.face])
    first = be.edge if be.forward else (be.edge + 1) % m
    last = (be.edge + 1) % m if be.forward else be.edge
    return (be.face, last if head else first)


def _same_point(strip, a, b, eps):
    # different faces meeting at a development vertex shared through creases
    pa = strip.faces[a[0]][a[1]]
    pb = strip.faces[b[0]][b[1]]
    return np.linalg.norm(pa - pb) < eps


def boundary_length(strip, gluing):
    return sum(float(np.linalg.norm(np.subtract(*strip.edge(be.face, be.edge))))
               for cyc in gluing.boundary_cycles for be in cyc)


# ---------------------------------------------------------------------------
# development
# ---------------------------------------------------------------------------

def develop(state, tol: Tolerance = DEFAULT_TOL) -> CreasedStrip:
    """Unfold a folded state back into the plane along the strip path.

    Only the 3D face images and the crease combinatorics are used; the
    first face is brought back with the inverse of its placement.
    """
    strip = state.strip
    eps = max(tol.eps_point, 1e-9) * 10
    images = [np.asarray(im, dtype=float) for im in state.images]
    for f, im in enumerate(images):
        dev = strip.faces[f]
        m = len(dev)
        for k in range(m):
            d3 = np.linalg.norm(im[(k + 1) % m] - im[k])
            d2 = np.linalg.norm(dev[(k + 1) % m] - dev[k])
            if abs(d3 - d2) > eps:
                raise NotDevelopable(f"face {f} edge {k}: length {d3:.12g} vs {d2:.12g}")
        if m > 3:
            n = np.cross(im[1] - im[0], im[2] - im[0])
            n = n / np.linalg.norm(n)
            if np.max(np.abs((im - im[0]) @ n)) > eps:
                raise NotDevelopable(f"face {f} is not planar")
    first = state.placements[0].inverse().apply(images[0])
    if np.max(np.abs(first[:, 2])) > eps:
        raise NotDevelopable("first face does not lie in the development plane")
    out = [first[:, :2]]
    for k in range(strip.n_faces - 1):
        ea, eb = strip.crease_edges(k)
        prev2 = out[k]
        ma, mb = len(strip.faces[k]), len(strip.faces[k + 1])
        a2, b2 = prev2[ea], prev2[(ea + 1) % ma]
        A3, B3 = images[k][ea], images[k][(ea + 1) % ma]
        img = images[k + 1]
        # crease edge on face k+1 runs the other way
        C3, D3 = img[(eb + 1) % mb], img[eb]
        if np.linalg.norm(C3 - A3) > eps or np.linalg.norm(D3 - B3) > eps:
            raise NotDevelopable(f"crease {k} images disagree between faces {k} and {k + 1}")
        e3 = unit(B3 - A3)
        e2 = unit(b2 - a2)
        n2 = np.array([-e2[1], e2[0]])
        if np.dot(prev2.mean(axis=0) - a2, n2) > 0:
            n2 = -n2
        rel = img - A3
        t = rel @ e3
        h = np.linalg.norm(rel - np.outer(t, e3), axis=1)
        out.append(a2 + np.outer(t, e2) + np.outer(h, n2))
    return replace(strip, faces=tuple(out))


def max_vertex_deviation(a: CreasedStrip, b: CreasedStrip) -> float:
    return max(float(np.max(np.linalg.norm(fa - fb, axis=1))) for fa, fb in zip(a.faces, b.faces))
