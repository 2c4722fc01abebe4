"""Planar joint profiles built from a smooth bump-function turn.

A profile is a polyline in a cross-section plane.  Sweeping it along a
straight crease gives a prism surface, which is exactly developable, so
arclength along the profile is measured by cumulative chord length.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateProfile

_FINE = 64  # fine integration steps per output sample


def transition(t, s=1.0):
    """Smooth step 0 -> 1 on [0, 1] whose derivatives all vanish at the ends."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f = np.where(t > 0, np.exp(-s / np.where(t > 0, t, 1.0)), 0.0)
        g = np.where(t < 1, np.exp(-s / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return f / (f + g)


@lru_cache(maxsize=256)
def _unit_turn(phi, s, samples):
    """Unit-length curve from the origin heading +x whose heading turns by phi."""
    m = (samples - 1) * _FINE + 1
    t = np.linspace(0.0, 1.0, m)
    theta = phi * transition(t, s)
    c, sn = np.cos(theta), np.sin(theta)
    dt = 1.0 / (m - 1)
    x = np.concatenate([[0.0], np.cumsum(0.5 * (c[1:] + c[:-1]) * dt)])
    y = np.concatenate([[0.0], np.cumsum(0.5 * (sn[1:] + sn[:-1]) * dt)])
    pts = np.stack([x, y], axis=1)
    return pts[::_FINE].copy()


def _frame_points(local, t0, nrm):
    return np.outer(local[:, 0], t0) + np.outer(local[:, 1], nrm)


@dataclass(frozen=True, eq=False)
class UProfile:
    points: np.ndarray      # (m, 2)
    arclength: np.ndarray   # cumulative chord length, starts at 0
    h1: float
    h2: float
    s: float

    @property
    def length(self):
        return float(self.arclength[-1])

    def tangents(self):
        d = np.diff(self.points, axis=0)
        return d / np.linalg.norm(d, axis=1)[:, None]


def _polyline(parts):
    pts = [parts[0][0]]
    for part in parts:
        for p in part:
            if np.linalg.norm(p - pts[-1]) > 1e-15:
                pts.append(p)
    pts = np.asarray(pts)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    return pts, np.concatenate([[0.0], np.cumsum(seg)])


def joint_profile(p0, t0, p1, t1, depth=None, s=1.0, samples=32):
    """Polyline from p0 (heading t0) to p1 (arriving heading t1).

    For antiparallel tangents the result is a U: quarter turn, straight
    run, quarter turn, with straight legs whenever ``depth`` exceeds the
    rounded depth.  ``depth`` is the excursion past the farther endpoint
    measured along t0; None picks a fully rounded U.  Other tangent pairs
    get one smooth turn of the exact angle between them with straight legs
    at either end, using the longest turn that fits.
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    t0 = np.asarray(t0, dtype=float) / np.linalg.norm(t0)
    t1 = np.asarray(t1, dtype=float) / np.linalg.norm(t1)
    if samples < 2:
        raise ValueError("samples must be at least 2")
    D = p1 - p0
    cross = t0[0] * t1[1] - t0[1] * t1[0]
    dot = float(np.dot(t0, t1))
    phi = float(np.arctan2(cross, dot))
    if abs(abs(phi) - np.pi) < 1e-9:
        return _u_turn(p0, t0, D, depth, s, samples)
    if abs(phi) < 1e-12:
        if np.linalg.norm(D) < 1e-12:
            return _polyline([[p0, p1]])
        along = np.dot(D, t0)
        if np.linalg.norm(D - along * t0) < 1e-12 and along > 0:
            return _polyline([[p0, p1]])
        raise DegenerateProfile("parallel tangents with a lateral offset need an S-joint")
    turn = _unit_turn(round(phi, 15), float(s), samples)
    R = np.array([[t0[0], -t0[1]], [t0[1], t0[0]]])
    w = R @ turn[-1]
    M = np.stack([t0, t1], axis=1)
    l0 = np.linalg.solve(M, D)
    m = np.linalg.solve(M, w)
    if np.any(l0 < -1e-12):
        raise DegenerateProfile("endpoints are not reachable with a single monotone turn")
    cands = [l0[i] / m[i] for i in range(2) if m[i] > 1e-15]
    if not cands:
        raise DegenerateProfile("turn cannot close the gap")
    a = min(cands)
    if a <= 0:
        raise DegenerateProfile("no room for a smooth turn")
    legs = l0 - a * m
    legs = np.maximum(legs, 0.0)
    start = p0 + legs[0] * t0
    curve = start + a * (turn @ R.T)
    return _polyline([[p0], [start], curve, [p1]])


def _u_turn(p0, t0, D, depth, s, samples):
    du = float(np.dot(D, t0))
    nrm = np.array([-t0[1], t0[0]])
    dv = float(np.dot(D, nrm))
    if abs(dv) < 1e-15:
        raise DegenerateProfile("a U-turn needs distinct heights")
    sign = 1.0 if dv > 0 else -1.0
    nrm = sign * nrm
    dv = abs(dv)
    # quarter turn toward nrm, written in the (t0, nrm) frame
    q = _unit_turn(round(np.pi / 2, 15), float(s), samples)
    cx = float(q[-1, 0])
    full = dv / 2.0
    if depth is None:
        depth = full
    if depth <= 0:
        raise DegenerateProfile("depth must be positive")
    a = min(depth, full) / cx
    leg = depth - a * cx
    b = dv - 2 * a * cx
    l1 = max(du, 0.0) + leg
    l2 = l1 - du
    start = p0 + l1 * t0
    first = start + a * _frame_points(q, t0, nrm)
    mid = first[-1] + b * nrm
    # second quarter: the first one rotated by +90 degrees in the same frame
    second_local = np.stack([-q[:, 1], q[:, 0]], axis=1)
    second = mid + a * _frame_points(second_local, t0, nrm)
    end = p0 + D
    return _polyline([[p0], [start], first, [mid], second, [end]])


def _angle(a, b):
    return float(np.arctan2(a[0] * b[1] - a[1] * b[0], np.dot(a, b)))


def _turn_chord(heading, phi, scale, s, samples):
    """Points of a smooth turn by phi starting at the origin with the given heading."""
    turn = _unit_turn(round(phi, 15), float(s), samples)
    R = np.array([[heading[0], -heading[1]], [heading[1], heading[0]]])
    return scale * (turn @ R.T)


def chord_profile(p0, t0, p1, t1, radius, s=1.0, samples=32):
    """Polyline from p0 (heading t0) to p1 (arriving heading t1) hugging the chord.

    Two smooth turns of arclength ``radius`` aim the curve along a straight
    run towards p1 and then align it with t1, so the total length tends to
    |p1 - p0| as the radius shrinks.
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    t0 = np.asarray(t0, dtype=float) / np.linalg.norm(t0)
    t1 = np.asarray(t1, dtype=float) / np.linalg.norm(t1)
    D = p1 - p0
    if not radius > 0:
        raise DegenerateProfile("radius must be positive")
    if np.linalg.norm(D) < 2 * radius:
        raise DegenerateProfile("turns do not fit between the endpoints")
    d = D / np.linalg.norm(D)
    # fixed point for the direction of the straight run, damped for large radii
    theta = np.arctan2(d[1], d[0])
    for _ in range(400):
        phi1, phi2 = _angle(t0, d), _angle(d, t1)
        c1 = _turn_chord(t0, phi1, radius, s, samples)
        c2 = _turn_chord(d, phi2, radius, s, samples)
        rest = D - c1[-1] - c2[-1]
        step = _angle(d, rest)
        if abs(step) < 1e-15:
            break
        theta += 0.5 * step
        d = np.array([np.cos(theta), np.sin(theta)])
    else:
        raise DegenerateProfile("turn angles did not settle")
    start2 = p0 + c1[-1] + rest
    return _polyline([p0 + c1, start2 + c2, [p1]])


def u_profile(h1, h2, depth=0.0, s=1.0, samples=32):
    """U-shaped profile leaving (0, h1) along +x and returning to (0, h2) along -x.

    ``depth`` lengthens both straight legs beyond the fully rounded turn.
    """
    if samples < 16:
        raise ValueError("samples must be at least 16")
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if h1 == h2:
        raise DegenerateProfile("a U-profile needs distinct end heights")
    reach = abs(h2 - h1) / 2.0 + depth
    pts, arc = joint_profile([0.0, h1], [1.0, 0.0], [0.0, h2], [-1.0, 0.0], reach, s, samples)
    return UProfile(pts, arc, float(h1), float(h2), float(s))
