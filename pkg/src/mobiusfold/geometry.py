"""Tolerance-aware vector, placement and projection primitives."""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from . import kernels
from .errors import DegenerateCrossing, NoGenericDirection


@dataclass(frozen=True)
class Tolerance:
    """Absolute tolerances in strip-width units (the strip width is 1)."""

    eps_point: float = 1e-9
    eps_angle: float = 1e-9

    def __post_init__(self):
        if not (self.eps_point > 0 and self.eps_angle > 0):
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()

_MIRROR = np.diag([1.0, 1.0, -1.0])


@dataclass(frozen=True, eq=False)
class RigidPlacement:
    """x -> rotation @ (M x) + translation, with M = diag(1, 1, -1) if reflect."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    reflect: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=float).reshape(3, 3))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float).reshape(3))

    @classmethod
    def identity(cls):
        return cls()

    @classmethod
    def about_axis(cls, point, direction, angle):
        """Right-handed rotation by ``angle`` about the line through ``point``."""
        R = rotation_matrix(direction, angle)
        point = np.asarray(point, dtype=float)
        return cls(R, point - R @ point)

    @property
    def linear(self):
        return self.rotation @ _MIRROR if self.reflect else self.rotation

    def apply(self, pts):
        pts = np.asarray(pts, dtype=float)
        if pts.shape[-1] == 2:
            pts = np.concatenate([pts, np.zeros(pts.shape[:-1] + (1,))], axis=-1)
        return pts @ self.linear.T + self.translation

    def apply_vector(self, v):
        return np.asarray(v, dtype=float) @ self.linear.T

    def compose(self, other):
        """Placement equal to applying ``other`` first, then ``self``."""
        lin = self.linear @ other.linear
        refl = self.reflect != other.reflect
        rot = lin @ _MIRROR if refl else lin
        return RigidPlacement(rot, self.linear @ other.translation + self.translation, refl)

    def inverse(self):
        lin_inv = self.linear.T
        refl = self.reflect
        rot = lin_inv @ _MIRROR if refl else lin_inv
        return RigidPlacement(rot, -lin_inv @ self.translation, refl)

    def is_valid(self, tol=DEFAULT_TOL):
        R = self.rotation
        return (np.allclose(R.T @ R, np.eye(3), atol=1e-9)
                and abs(np.linalg.det(R) - 1.0) < 1e-9)


def rotation_matrix(direction, angle):
    """Rodrigues rotation matrix about a unit axis."""
    k = np.asarray(direction, dtype=float)
    k = k / np.linalg.norm(k)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)


def unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero vector")
    return v / n


def polygon_area(poly):
    """Signed area of a 2D polygon (positive for counter-clockwise)."""
    p = np.asarray(poly, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def point_in_polygon(pt, poly, eps=0.0):
    """Strict interior test for a convex or simple 2D polygon (ray casting)."""
    x, y = float(pt[0]), float(pt[1])
    p = np.asarray(poly, dtype=float)
    n = len(p)
    # reject points within eps of an edge
    for i in range(n):
        a, b = p[i], p[(i + 1) % n]
        ab = b - a
        L = np.hypot(*ab)
        t = np.clip(((x - a[0]) * ab[0] + (y - a[1]) * ab[1]) / (L * L), 0, 1)
        if np.hypot(x - a[0] - t * ab[0], y - a[1] - t * ab[1]) <= eps:
            return False
    inside = False
    for i in range(n):
        x1, y1 = p[i]
        x2, y2 = p[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc > x:
                inside = not inside
    return inside


def plane_basis(normal):
    """Orthonormal (e1, e2) with e1 x e2 = normal."""
    n = unit(normal)
    helper = np.array([1.0, 0, 0]) if abs(n[0]) < 0.9 else np.array([0, 1.0, 0])
    e1 = unit(np.cross(helper, n))
    e2 = np.cross(n, e1)
    return e1, e2


class SegmentCrossing(NamedTuple):
    point: np.ndarray
    s: float
    t: float


def segment_crossing(a, b, tol=DEFAULT_TOL) -> Optional[SegmentCrossing]:
    """Interior transverse intersection of two 2D segments, or None.

    Raises DegenerateCrossing for endpoint incidences, collinear overlaps
    and near-tangent crossings: those signal a non-generic projection.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.hypot(*(a[1] - a[0])) <= tol.eps_point or np.hypot(*(b[1] - b[0])) <= tol.eps_point:
        raise DegenerateCrossing("segment shorter than eps_point")
    code, s, t = kernels._pair_status(a[0, 0], a[0, 1], a[1, 0], a[1, 1],
                                      b[0, 0], b[0, 1], b[1, 0], b[1, 1],
                                      tol.eps_point, tol.eps_angle)
    if code < 0:
        return None
    if code == kernels.CROSS_DEGENERATE:
        raise DegenerateCrossing(f"non-generic contact between {a.tolist()} and {b.tolist()}")
    return SegmentCrossing(a[0] + s * (a[1] - a[0]), float(s), float(t))


def closed_segments(curves: Sequence[np.ndarray]):
    """Flatten closed polylines into segment arrays plus neighbour links.

    Returns (starts, ends, comp, local, nxt, prv) where segment k of curve c
    runs from vertex k to vertex k+1 (cyclically).
    """
    starts, ends, comp, local, nxt, prv = [], [], [], [], [], []
    offset = 0
    for c, pts in enumerate(curves):
        pts = np.asarray(pts, dtype=float)
        m = len(pts)
        starts.append(pts)
        ends.append(np.roll(pts, -1, axis=0))
        comp.append(np.full(m, c))
        local.append(np.arange(m))
        idx = np.arange(m)
        nxt.append(offset + (idx + 1) % m)
        prv.append(offset + (idx - 1) % m)
        offset += m
    return (np.concatenate(starts), np.concatenate(ends), np.concatenate(comp),
            np.concatenate(local), np.concatenate(nxt), np.concatenate(prv))


def project(points, direction):
    """Coordinates in the plane orthogonal to ``direction`` plus heights."""
    d = unit(direction)
    e1, e2 = plane_basis(d)
    pts = np.asarray(points, dtype=float)
    return np.stack([pts @ e1, pts @ e2], axis=-1), pts @ d


def _candidate_directions(seed: int, count: int):
    """Deterministic low-discrepancy directions, tight around +z first."""
    halton = qmc.Halton(d=2, scramble=False)
    halton.fast_forward(1 + 97 * int(seed))
    uv = halton.random(count)
    out = np.empty((count, 3))
    k = np.arange(count)
    # first 200 candidates inside a 0.15 rad cap, then the upper hemisphere
    theta_max = np.where(k < 200, 0.15, 0.5 * np.pi * 0.98)
    theta = theta_max * np.sqrt(uv[:, 0])
    theta = np.maximum(theta, 1e-3)
    phi = 2 * np.pi * uv[:, 1]
    out[:, 0] = np.sin(theta) * np.cos(phi)
    out[:, 1] = np.sin(theta) * np.sin(phi)
    out[:, 2] = np.cos(theta)
    return out


def projection_is_generic(curves, direction, tol=DEFAULT_TOL):
    """Check regularity of the projection of closed polylines along a direction."""
    starts, ends, comp, local, nxt, prv = closed_segments(curves)
    p2, _ = project(starts, direction)
    q2, _ = project(ends, direction)
    seg = q2 - p2
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    if np.any(lengths <= tol.eps_point):
        return False
    # consecutive segments folding straight back overlap in projection
    nseg = seg[nxt]
    cross = seg[:, 0] * nseg[:, 1] - seg[:, 1] * nseg[:, 0]
    dot = np.einsum("ij,ij->i", seg, nseg)
    if np.any((np.abs(cross) <= tol.eps_angle * lengths * lengths[nxt]) & (dot < 0)):
        return False
    ii, jj, s, t, code = kernels.segment_crossings(p2, q2, nxt, prv, tol.eps_point, tol.eps_angle)
    if np.any(code != kernels.CROSS_OK):
        return False
    if len(ii) > 1:
        pts = p2[ii] + s[:, None] * seg[ii]
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        sp = pts[order]
        gaps = np.hypot(*(np.diff(sp, axis=0).T))
        if np.any(gaps <= tol.eps_point):
            # any two crossings at the same spot is a triple point
            for a in range(len(sp)):
                d = np.hypot(*(sp - sp[a]).T)
                if np.sum(d <= tol.eps_point) > 1:
                    return False
    return True


def generic_direction(curves, seed=0, tol=DEFAULT_TOL, max_candidates=10_000):
    """First direction in a fixed low-discrepancy sequence giving a regular projection."""
    for d in _candidate_directions(seed, max_candidates):
        if projection_is_generic(curves, d, tol):
            return d
    raise NoGenericDirection(f"no generic direction among {max_candidates} candidates")
