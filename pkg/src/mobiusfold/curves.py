"""Boundary and midline curves of an inflated folded strip, and their projections."""

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .errors import DegenerateCrossing, LayerViolations, OpenCurve
from .folding import FoldedState, check_layers
from .geometry import DEFAULT_TOL, Tolerance, closed_segments, generic_direction, plane_basis, project, unit
from .strip import CYLINDER, map_across

BOUNDARY = "boundary"
BOUNDARY2 = "boundary2"
MIDLINE = "midline"


@dataclass(frozen=True)
class InflationParams:
    """Layer gap ``eps`` and how far along a crease the connectors sit from its ends."""

    eps: float = 0.01
    inset: Optional[float] = None  # defaults to eps / 2

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.inset is None:
            object.__setattr__(self, "inset", self.eps / 2)
        if not 0 <= self.inset < self.eps:
            raise ValueError("inset must satisfy 0 <= inset < eps")


@dataclass(frozen=True, eq=False)
class SpaceCurve:
    """Closed 3D polyline; the closing segment from last to first vertex is implicit."""

    name: str
    points: np.ndarray

    def reversed(self):
        return SpaceCurve(self.name, self.points[::-1].copy())

    def rotated(self, k):
        return SpaceCurve(self.name, np.roll(self.points, -k, axis=0))

    @property
    def n_segments(self):
        return len(self.points)


def inflate(state: FoldedState, params: InflationParams, tol: Tolerance = DEFAULT_TOL):
    """Offset vector of every face: layer * eps along its group's reference normal.

    Using layer rather than layer - 1 keeps the lowest layers of different
    plane groups apart where their planes meet.
    """
    violations = check_layers(state, tol)
    if violations:
        raise LayerViolations(violations)
    out = []
    for f in range(state.strip.n_faces):
        g = state.group_of(f)
        out.append(state.layers[f] * params.eps * np.asarray(state.group_normals[g]))
    return out


def inflated_images(state, offsets):
    return [im + off for im, off in zip(state.images, offsets)]


def _on_segment(p, a, b, eps):
    ab = b - a
    L2 = float(np.dot(ab, ab))
    t = float(np.dot(p - a, ab)) / L2
    if t < -eps or t > 1 + eps:
        return False
    return float(np.linalg.norm(a + t * ab - p)) <= eps


def glued_route(strip, gluing, f, p, g, q, eps):
    """Shortest chain of glued-edge hops taking development point p on face f to q on face g.

    Returns a list of (side pair, face, point) giving the face and point from
    which each hop leaves.
    """
    key = lambda face, pt: (face, round(float(pt[0]), 7), round(float(pt[1]), 7))
    start, goal = key(f, p), key(g, q)
    prev = {start: None}
    queue = deque([(f, np.asarray(p, dtype=float))])
    while queue:
        face, pt = queue.popleft()
        if key(face, pt) == goal:
            break
        for sp in gluing.pairs_of(face):
            if sp.face_a == sp.face_b:
                continue
            a, b = strip.edge(face, sp.edge_a if face == sp.face_a else sp.edge_b)
            if not _on_segment(pt, a, b, eps):
                continue
            other, opt = map_across(strip, sp, face, pt)
            k = key(other, opt)
            if k not in prev:
                prev[k] = (key(face, pt), sp, face, pt)
                queue.append((other, opt))
    if goal not in prev:
        raise OpenCurve(f"no glued route from face {f} to face {g}")
    hops = []
    k = goal
    while prev[k] is not None:
        pk, sp, face, pt = prev[k]
        hops.append((sp, face, pt))
        k = pk
    return hops[::-1]


class _Walker:
    """Moves between faces through glued edges and emits 3D path pieces."""

    def __init__(self, state, offsets, params, eps):
        self.state = state
        self.strip = state.strip
        self.gluing = state.gluing
        self.offsets = offsets
        self.params = params
        self.eps = eps

    def to3(self, face, pt):
        return self.state.placements[face].apply(np.asarray(pt, dtype=float)) + self.offsets[face]

    def _pair_edge(self, sp, face):
        return (sp.edge_a if face == sp.face_a else sp.edge_b)

    def route(self, f, p, g, q):
        return glued_route(self.strip, self.gluing, f, p, g, q, self.eps)

    def transition(self, f, p, g, q, inset):
        """3D points strictly between the endpoint on face f and the one on face g."""
        pts = []
        for sp, face, pt in self.route(f, p, g, q):
            a, b = self.strip.edge(face, self._pair_edge(sp, face))
            pt = np.asarray(pt, dtype=float)
            other, opt = map_across(self.strip, sp, face, pt)
            if np.linalg.norm(self.to3(other, opt) - self.to3(face, pt)) <= self.eps:
                continue  # butt joint: both sides already meet in space
            if inset > 0:
                # slide along the glued edge away from the vertex we sit on
                far = b if np.linalg.norm(pt - a) < np.linalg.norm(pt - b) else a
                pt = pt + inset * unit(far - pt)
            other, opt = map_across(self.strip, sp, face, pt)
            A = self.to3(face, pt)
            B = self.to3(other, opt)
            pts.append(A)
            gap = float(np.linalg.norm(B - A))
            if gap > self.eps:
                # step out past the glued edge so that nested folds stay nested
                bulge = 0.5 * gap
                pts.append(A + bulge * self.outward(face, sp))
                pts.append(B + bulge * self.outward(other, sp))
                pts.append(B)
        return pts

    def outward(self, face, sp):
        """Unit 3D vector in the face's plane pointing out across its glued edge."""
        a, b = self.strip.edge(face, self._pair_edge(sp, face))
        d = unit(b - a)
        # faces are counter-clockwise, so the right-hand normal points outward
        n2 = np.array([d[1], -d[0]])
        return self.state.placements[face].apply_vector(np.append(n2, 0.0))


def _dedupe(points, eps):
    out = []
    for p in points:
        if not out or np.linalg.norm(p - out[-1]) > eps:
            out.append(p)
    while len(out) > 1 and np.linalg.norm(out[0] - out[-1]) <= eps:
        out.pop()
    return np.asarray(out)


def extract_curves(state: FoldedState, params: InflationParams,
                   tol: Tolerance = DEFAULT_TOL) -> List[SpaceCurve]:
    """Boundary component(s) and midline of the inflated state as closed polylines.

    Connectors join the two sides of a glued edge with a short staple: a step
    outward past the edge, a near-vertical run of length layer gap, and a
    step back.  At boundary corners they sit ``params.inset`` along the
    crease from its end.
    """
    if state.gluing is None:
        raise OpenCurve("a gluing diagram is required")
    offsets = inflate(state, params, tol)
    eps = max(tol.eps_point, 1e-9) * 100
    walker = _Walker(state, offsets, params, eps)
    strip = state.strip
    curves = []
    cycles = state.gluing.boundary_cycles
    names = [BOUNDARY] if len(cycles) == 1 else [BOUNDARY, BOUNDARY2]
    for name, cyc in zip(names, cycles):
        pts = []
        for i, be in enumerate(cyc):
            a, b = strip.edge(be.face, be.edge)
            head, tail = (a, b) if be.forward else (b, a)
            pts.append(walker.to3(be.face, head))
            pts.append(walker.to3(be.face, tail))
            nxt = cyc[(i + 1) % len(cyc)]
            na, nb = strip.edge(nxt.face, nxt.edge)
            nhead = na if nxt.forward else nb
            pts.extend(walker.transition(be.face, tail, nxt.face, nhead, params.inset))
        curves.append(SpaceCurve(name, _dedupe(pts, tol.eps_point)))
    mid = state.gluing.midline
    pts = []
    for i, seg in enumerate(mid):
        pts.append(walker.to3(seg.face, seg.start))
        pts.append(walker.to3(seg.face, seg.end))
        nxt = mid[(i + 1) % len(mid)]
        pts.extend(walker.transition(seg.face, seg.end, nxt.face, nxt.start, 0.0))
    curves.append(SpaceCurve(MIDLINE, _dedupe(pts, tol.eps_point)))
    expected = 3 if state.gluing.end_gluing == CYLINDER else 2
    if len(curves) != expected:
        raise OpenCurve(f"expected {expected} curves, traced {len(curves)}")
    return curves


def min_separation(curves: Sequence[SpaceCurve]) -> float:
    """Smallest distance between non-adjacent segments over all curves."""
    starts, ends, comp, local, nxt, prv = closed_segments([c.points for c in curves])
    n = len(starts)
    best = np.inf
    for i in range(n):
        j = np.arange(i + 1, n)
        j = j[(j != nxt[i]) & (j != prv[i])]
        if len(j) == 0:
            continue
        d = _seg_seg_dist(starts[i], ends[i], starts[j], ends[j])
        best = min(best, float(d.min()))
    return best


def _seg_seg_dist(p0, p1, q0, q1):
    """Distance between one 3D segment and an array of segments (closest-point clamping)."""
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = float(np.dot(d1, d1))
    e = np.einsum("ij,ij->i", d2, d2)
    f = np.einsum("ij,ij->i", d2, r)
    c = r @ d1
    b = d2 @ d1
    den = a * e - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(den > 1e-18 * a * e, (b * f - c * e) / den, 0.0)
        s = np.clip(s, 0.0, 1.0)
        t = np.where(e > 0, (b * s + f) / e, 0.0)
        low, high = t < 0, t > 1
        t = np.clip(t, 0.0, 1.0)
        if a > 0:
            s = np.where(low, np.clip(-c / a, 0.0, 1.0), s)
            s = np.where(high, np.clip((b - c) / a, 0.0, 1.0), s)
    diff = (p0 + s[:, None] * d1) - (q0 + t[:, None] * d2)
    return np.linalg.norm(diff, axis=1)


def is_embedded(curves, tol: Tolerance = DEFAULT_TOL) -> bool:
    return min_separation(curves) > tol.eps_point


# ---------------------------------------------------------------------------
# crossing diagrams
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StrandRef:
    component: int
    segment: int
    t: float


@dataclass(frozen=True)
class Crossing:
    id: int
    over: StrandRef
    under: StrandRef
    sign: int
    point: Tuple[float, float]

    @property
    def components(self):
        return (self.over.component, self.under.component)


@dataclass(frozen=True, eq=False)
class CrossingDiagram:
    direction: np.ndarray
    names: Tuple[str, ...]
    crossings: Tuple[Crossing, ...]
    gauss: Dict[str, Tuple[Tuple[int, bool, int], ...]]

    def index(self, name):
        return self.names.index(name)


def crossing_diagram(curves: Sequence[SpaceCurve], seed: int = 0,
                     tol: Tolerance = DEFAULT_TOL, direction=None) -> CrossingDiagram:
    """Signed crossings of a generic projection of the curves.

    The viewer looks down ``-direction``; the strand with the larger height
    along ``direction`` is over.  The sign is that of cross(over tangent,
    under tangent) in the projection plane, whose basis satisfies
    e1 x e2 = direction.
    """
    polys = [c.points for c in curves]
    if direction is None:
        direction = generic_direction(polys, seed, tol)
    direction = unit(direction)
    starts, ends, comp, local, nxt, prv = closed_segments(polys)
    p2, h0 = project(starts, direction)
    q2, h1 = project(ends, direction)
    ii, jj, ss, tt, code = kernels.segment_crossings(p2, q2, nxt, prv, tol.eps_point, tol.eps_angle)
    if np.any(code != kernels.CROSS_OK):
        raise DegenerateCrossing("projection is not regular")
    order = np.lexsort((jj, ii))
    crossings = []
    seg2 = q2 - p2
    for cid, k in enumerate(order):
        i, j, s, t = int(ii[k]), int(jj[k]), float(ss[k]), float(tt[k])
        zi = h0[i] + s * (h1[i] - h0[i])
        zj = h0[j] + t * (h1[j] - h0[j])
        if abs(zi - zj) <= tol.eps_point:
            raise DegenerateCrossing("strands meet in space")
        if zi > zj:
            o, u, so, su = i, j, s, t
        else:
            o, u, so, su = j, i, t, s
        cr = seg2[o, 0] * seg2[u, 1] - seg2[o, 1] * seg2[u, 0]
        sign = 1 if cr > 0 else -1
        pt = p2[i] + s * seg2[i]
        crossings.append(Crossing(cid, StrandRef(int(comp[o]), int(local[o]), so),
                                  StrandRef(int(comp[u]), int(local[u]), su), sign,
                                  (float(pt[0]), float(pt[1]))))
    names = tuple(c.name for c in curves)
    visits = {n: [] for n in range(len(curves))}
    for c in crossings:
        visits[c.over.component].append((c.over.segment, c.over.t, c.id, True, c.sign))
        visits[c.under.component].append((c.under.segment, c.under.t, c.id, False, c.sign))
    gauss = {}
    for n, name in enumerate(names):
        seq = sorted(visits[n])
        gauss[name] = tuple((cid, over, sign) for _, _, cid, over, sign in seq)
    return CrossingDiagram(direction, names, tuple(crossings), gauss)


def write_polylines(curves: Sequence[SpaceCurve], path):
    """Plain-text export: a component tag then one vertex per line."""
    with open(path, "w") as fh:
        fh.write(curves_text(curves))


def curves_text(curves):
    lines = []
    for c in curves:
        lines.append(f"# {c.name} {len(c.points)}")
        for p in c.points:
            lines.append(f"{c.name} {p[0]:.9g} {p[1]:.9g} {p[2]:.9g}")
    return "\n".join(lines) + "\n"
