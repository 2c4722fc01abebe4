"""Gauss codes, linking numbers and knot invariants of crossing diagrams."""

import json
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from . import kernels
from .curves import BOUNDARY, BOUNDARY2, MIDLINE, CrossingDiagram, InflationParams, crossing_diagram, extract_curves
from .errors import InvalidCode, OddCrossingSum, TooManyCrossings
from .geometry import DEFAULT_TOL, Tolerance

MAX_BRACKET_CROSSINGS = 24

UNKNOT = "unknot-consistent"
TREFOIL = "trefoil-consistent"
OTHER = "other"


@dataclass(frozen=True)
class GaussCode:
    """Per-component crossing visits ``(crossing id, over?, sign)``."""

    components: Tuple[Tuple[Tuple[int, bool, int], ...], ...]

    @classmethod
    def single(cls, seq):
        return cls((tuple((int(c), bool(o), int(s)) for c, o, s in seq),))

    @property
    def n(self):
        return sum(len(c) for c in self.components) // 2

    def ids(self):
        return sorted({c for comp in self.components for c, _, _ in comp})

    def validate(self):
        seen: Dict[int, List[Tuple[bool, int]]] = {}
        for comp in self.components:
            for c, over, sign in comp:
                if sign not in (1, -1):
                    raise InvalidCode(f"crossing {c} has sign {sign}")
                seen.setdefault(c, []).append((over, sign))
        for c, vis in seen.items():
            if len(vis) != 2:
                raise InvalidCode(f"crossing {c} appears {len(vis)} times")
            if vis[0][0] == vis[1][0]:
                raise InvalidCode(f"crossing {c} must be visited once over and once under")
            if vis[0][1] != vis[1][1]:
                raise InvalidCode(f"crossing {c} has inconsistent signs")
        return self

    def mirror(self):
        return GaussCode(tuple(tuple((c, not o, -s) for c, o, s in comp) for comp in self.components))

    def reversed(self):
        """Same knot traversed backwards (signs are unchanged for a single component)."""
        return GaussCode(tuple(tuple(reversed(comp)) for comp in self.components))

    def relabeled(self):
        order = {}
        for comp in self.components:
            for c, _, _ in comp:
                order.setdefault(c, len(order))
        return GaussCode(tuple(tuple((order[c], o, s) for c, o, s in comp) for comp in self.components))

    def writhe(self):
        signs = {c: s for comp in self.components for c, _, s in comp}
        return sum(signs.values())

    def __str__(self):
        return " | ".join(" ".join(f"{'O' if o else 'U'}{c}{'+' if s > 0 else '-'}" for c, o, s in comp)
                          for comp in self.components)


def knot_code(diagram: CrossingDiagram, name=BOUNDARY) -> GaussCode:
    """Gauss code of one component using only its self-crossings."""
    k = diagram.index(name)
    own = {c.id for c in diagram.crossings if c.over.component == k and c.under.component == k}
    seq = [v for v in diagram.gauss[name] if v[0] in own]
    return GaussCode.single(seq).relabeled()


def crossing_count(diagram: CrossingDiagram, a, b) -> int:
    ia, ib = diagram.index(a), diagram.index(b)
    return sum(1 for c in diagram.crossings if set(c.components) == {ia, ib})


def linking_number(diagram: CrossingDiagram, a=BOUNDARY, b=MIDLINE) -> int:
    """Half the signed count of crossings between two distinct components."""
    if a == b:
        raise ValueError("linking number needs two distinct components")
    ia, ib = diagram.index(a), diagram.index(b)
    total = sum(c.sign for c in diagram.crossings if set(c.components) == {ia, ib})
    if total % 2:
        raise OddCrossingSum(f"signed crossing sum {total} between {a} and {b} is odd")
    return total // 2


# ---------------------------------------------------------------------------
# planar structure of a one-component diagram
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PlanarMap:
    """Edges are the arcs between consecutive visits; edge k leaves visit k.

    ``rotation[c]`` holds the half-edges at crossing c in counter-clockwise
    order from the outgoing over-strand, a half-edge being (edge, end) with
    end 0 at the edge's start and 1 at its finish.
    """

    n: int
    rotation: Tuple[Tuple[Tuple[int, int], ...], ...]
    faces: Tuple[Tuple[Tuple[int, int], ...], ...]
    corner_faces: np.ndarray  # (n, 4): face between rotation[c][i] and rotation[c][i+1]


def planar_map(code: GaussCode) -> PlanarMap:
    code.validate()
    if len(code.components) != 1:
        raise InvalidCode("expected a one-component code")
    seq = code.components[0]
    m = len(seq)
    n = m // 2
    ids = code.ids()
    cidx = {c: i for i, c in enumerate(ids)}
    at = {}
    for k, (c, over, sign) in enumerate(seq):
        at.setdefault(cidx[c], {})[over] = (k, sign)
    rotation = []
    for i in range(n):
        ko, sign = at[i][True]
        ku, _ = at[i][False]
        o_out, o_in = (ko, 0), ((ko - 1) % m, 1)
        u_out, u_in = (ku, 0), ((ku - 1) % m, 1)
        if sign > 0:
            rotation.append((o_out, u_out, o_in, u_in))
        else:
            rotation.append((o_out, u_in, o_in, u_out))
    where = {}
    for i, rot in enumerate(rotation):
        for j, h in enumerate(rot):
            where[h] = (i, j)
    # a dart is a half-edge read as "leave along this edge"; faces keep the dart on their left
    faces = []
    face_of = {}
    for start in sorted(where):
        if start in face_of:
            continue
        fid = len(faces)
        cyc = []
        d = start
        while d not in face_of:
            face_of[d] = fid
            cyc.append(d)
            e, end = d
            far = (e, 1 - end)
            i, j = where[far]
            d = rotation[i][(j - 1) % 4]
        faces.append(tuple(cyc))
    if n and len(faces) != n + 2:
        raise InvalidCode(f"code is not planar: {len(faces)} faces for {n} crossings")
    corner = np.zeros((n, 4), dtype=np.int64)
    for i, rot in enumerate(rotation):
        for j in range(4):
            # tracing arrives along rot[j+1] and leaves along rot[j]
            corner[i, j] = face_of[rot[j]]
    return PlanarMap(n, tuple(rotation), tuple(faces), corner)


def _checkerboard(pm: PlanarMap):
    """Two-colouring of faces: faces sharing an edge get different colours."""
    nf = len(pm.faces)
    adj = [set() for _ in range(nf)]
    side = {}
    for f, cyc in enumerate(pm.faces):
        for e, end in cyc:
            side.setdefault(e, []).append(f)
    for e, fs in side.items():
        a, b = fs
        adj[a].add(b)
        adj[b].add(a)
    colour = [-1] * nf
    colour[0] = 0
    queue = deque([0])
    while queue:
        f = queue.popleft()
        for g in adj[f]:
            if colour[g] < 0:
                colour[g] = 1 - colour[f]
                queue.append(g)
            elif colour[g] == colour[f]:
                raise InvalidCode("diagram faces are not two-colourable")
    return colour


def _int_det(rows):
    if len(rows) == 0:
        return 1
    return int(sympy.Matrix(rows).det(method="bareiss"))


def goeritz_matrix(code: GaussCode) -> np.ndarray:
    """Goeritz matrix on the faces of one colour class (all of them, unreduced)."""
    pm = planar_map(code)
    if pm.n == 0:
        return np.zeros((1, 1), dtype=np.int64)
    colour = _checkerboard(pm)
    white = [f for f in range(len(pm.faces)) if colour[f] == 0]
    idx = {f: i for i, f in enumerate(white)}
    G = np.zeros((len(white), len(white)), dtype=np.int64)
    for c in range(pm.n):
        cf = pm.corner_faces[c]
        if colour[cf[0]] == 0:
            i, j, eta = cf[0], cf[2], 1
        else:
            i, j, eta = cf[1], cf[3], -1
        if i == j:
            continue
        G[idx[i], idx[j]] -= eta
        G[idx[j], idx[i]] -= eta
    G -= np.diag(G.sum(axis=1))
    return G


def determinant(code: GaussCode) -> int:
    """Knot determinant |Delta(-1)| from a reduced Goeritz matrix."""
    G = goeritz_matrix(code)
    if len(G) <= 1:
        return 1
    return abs(_int_det(G[1:, 1:].tolist()))


def alexander_determinant(code: GaussCode) -> int:
    """Knot determinant from the Alexander matrix at t = -1 (colouring matrix)."""
    code.validate()
    if len(code.components) != 1:
        raise InvalidCode("expected a one-component code")
    seq = code.components[0]
    n = len(seq) // 2
    if n == 0:
        return 1
    # arcs run between consecutive under-visits
    unders = [k for k, (_, over, _) in enumerate(seq) if not over]
    arc_of_edge = {}
    m = len(seq)
    first = unders[0]
    arc = 0
    for step in range(m):
        k = (first + step) % m
        if step and not seq[k][1]:
            arc += 1
        arc_of_edge[k] = arc
    ids = code.ids()
    cidx = {c: i for i, c in enumerate(ids)}
    M = np.zeros((n, n), dtype=np.int64)
    for k, (c, over, _) in enumerate(seq):
        r = cidx[c]
        if over:
            M[r, arc_of_edge[k]] += 2
        else:
            M[r, arc_of_edge[(k - 1) % m]] -= 1
            M[r, arc_of_edge[k]] -= 1
    return abs(_int_det(M[1:, 1:].tolist()))


# ---------------------------------------------------------------------------
# Kauffman bracket
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Laurent:
    """Integer Laurent polynomial in A stored as {exponent: coefficient}."""

    terms: Tuple[Tuple[int, int], ...]

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(sorted((int(e), int(c)) for e, c in d.items() if c != 0)))

    def as_dict(self):
        return dict(self.terms)

    def inverted(self):
        return Laurent.from_dict({-e: c for e, c in self.terms})

    def __len__(self):
        return len(self.terms)

    def is_one(self):
        return self.terms == ((0, 1),)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for e, c in sorted(self.terms, reverse=True):
            mag = abs(c)
            coef = "" if mag == 1 and e != 0 else str(mag)
            mono = "" if e == 0 else ("A" if e == 1 else f"A^{e}")
            sep = "*" if coef and mono else ""
            body = f"{coef}{sep}{mono}"
            out.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(out)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def _loop_poly(k):
    """(-A^2 - A^-2)^k as {exponent: coefficient}."""
    poly = {0: 1}
    for _ in range(k):
        nxt = Counter()
        for e, c in poly.items():
            nxt[e + 2] -= c
            nxt[e - 2] -= c
        poly = dict(nxt)
    return poly


def bracket(code: GaussCode, normalized=True) -> Laurent:
    """Kauffman bracket by the full state sum, writhe-normalised by default."""
    pm = planar_map(code)
    n = pm.n
    if n > MAX_BRACKET_CROSSINGS:
        raise TooManyCrossings(f"{n} crossings exceed the state-sum limit {MAX_BRACKET_CROSSINGS}")
    if n == 0:
        return Laurent.from_dict({0: 1})
    corner_edges = np.array([[e for e, _ in rot] for rot in pm.rotation], dtype=np.int64)
    counts = kernels.state_counts(corner_edges, 2 * n)
    total = Counter()
    for na in range(n + 1):
        for loops in range(counts.shape[1]):
            k = int(counts[na, loops])
            if not k:
                continue
            shift = na - (n - na)
            for e, c in _loop_poly(loops - 1).items():
                total[e + shift] += k * c
    return _finish(total, code, normalized)


def _finish(total, code, normalized):
    if not normalized:
        return Laurent.from_dict(total)
    w = code.writhe()
    # (-A^3)^(-w)
    sgn = -1 if w % 2 else 1
    return Laurent.from_dict({e - 3 * w: sgn * c for e, c in total.items()})


def _divide_by_loop(poly):
    """Exact quotient of poly by -A^2 - A^-2 = -A^-2 (A^4 + 1)."""
    rem = Counter(poly)
    quot = {}
    for top in range(max(rem), min(rem) + 3, -1):
        c = rem.pop(top, 0)
        if c:
            quot[top - 4 + 2] = -c
            rem[top - 4] -= c
    if any(rem.values()):
        raise ArithmeticError("polynomial is not divisible by the loop value")
    return quot


def _greedy_order(corners, start):
    """From ``start``, keep taking the crossing that opens the fewest new edges."""
    n = len(corners)
    done = [False] * n
    touched = Counter()
    order, width, c = [], 0, start
    for _ in range(n):
        done[c] = True
        order.append(c)
        for e in corners[c]:
            touched[e] += 1
        width = max(width, sum(1 for v in touched.values() if v == 1))
        rest = [k for k in range(n) if not done[k]]
        if rest:
            c = min(rest, key=lambda k: (sum(1 if touched[e] == 0 else -1 for e in corners[k]), k))
    return width, order


def _contraction_order(corners):
    """Crossing order keeping few edges half-processed, best over all starting crossings."""
    return min(_greedy_order(corners, s) for s in range(len(corners)))[1]


def bracket_frontier(code: GaussCode, normalized=True, max_states=200000) -> Laurent:
    """Kauffman bracket by contracting one crossing at a time.

    Only the partition of half-processed edges into strands is carried from
    step to step, so the cost depends on the width of the diagram rather
    than on 2^n.  Independent of ``bracket``; used to check it and to reach
    codes beyond the state-sum limit.
    """
    pm = planar_map(code)
    if pm.n == 0:
        return Laurent.from_dict({0: 1})
    corners = [tuple(e for e, _ in rot) for rot in pm.rotation]
    remaining = Counter(e for c in corners for e in c)
    states = {(): Counter({0: 1})}
    for c in _contraction_order(corners):
        h0, h1, h2, h3 = corners[c]
        for e in corners[c]:
            remaining[e] -= 1
        nxt = {}
        for key, poly in states.items():
            for shift, pairs in ((1, ((h1, h2), (h3, h0))), (-1, ((h0, h1), (h2, h3)))):
                blocks = [set(b) for b in key]
                where = {e: i for i, b in enumerate(blocks) for e in b}
                for e in corners[c]:
                    if e not in where:
                        where[e] = len(blocks)
                        blocks.append({e})
                for x, y in pairs:
                    bx, by = where[x], where[y]
                    if bx != by:
                        blocks[bx] |= blocks[by]
                        for e in blocks[by]:
                            where[e] = bx
                        blocks[by] = set()
                loops = 0
                out = []
                for b in blocks:
                    if not b:
                        continue
                    live = tuple(sorted(e for e in b if remaining[e]))
                    if live:
                        out.append(live)
                    else:
                        loops += 1
                new = Counter()
                for e, k in poly.items():
                    for le, lk in _loop_poly(loops).items():
                        new[e + shift + le] += k * lk
                nkey = tuple(sorted(out))
                nxt.setdefault(nkey, Counter()).update(new)
        states = {k: v for k, v in nxt.items() if any(v.values())}
        if len(states) > max_states:
            raise TooManyCrossings(f"diagram too wide: {len(states)} frontier states")
    total = _divide_by_loop(states.get((), Counter()))
    return _finish(total, code, normalized)


# ---------------------------------------------------------------------------
# Reidemeister reductions
# ---------------------------------------------------------------------------

def _drop(seq, ids):
    return tuple(v for v in seq if v[0] not in ids)


def _r1(seq):
    m = len(seq)
    for k in range(m):
        if seq[k][0] == seq[(k + 1) % m][0]:
            return _drop(seq, {seq[k][0]})
    return None


def _r2(code):
    seq = code.components[0]
    m = len(seq)
    if m < 4:
        return None
    pm = planar_map(code)
    for face in pm.faces:
        if len(face) != 2:
            continue
        (e1, s1), (e2, s2) = face
        # visits at both ends of the two edges
        a1, b1 = e1, (e1 + 1) % m
        a2, b2 = e2, (e2 + 1) % m
        c1 = {seq[a1][0], seq[b1][0]}
        c2 = {seq[a2][0], seq[b2][0]}
        if c1 != c2 or len(c1) != 2:
            continue
        if seq[a1][1] != seq[b1][1] or seq[a2][1] != seq[b2][1]:
            continue
        if seq[a1][2] == seq[b1][2]:
            continue
        return _drop(seq, c1)
    return None


def simplify(code: GaussCode) -> GaussCode:
    """Apply Reidemeister I and II reductions until none is available."""
    code.validate()
    if len(code.components) != 1:
        raise InvalidCode("expected a one-component code")
    seq = code.components[0]
    while True:
        nxt = _r1(seq)
        if nxt is None and len(seq) >= 4:
            nxt = _r2(GaussCode((seq,)))
        if nxt is None:
            return GaussCode((seq,)).relabeled()
        seq = nxt


def verdict(det, poly: Optional[Laurent]):
    if det == 1 and (poly is None or poly.is_one()):
        return UNKNOT
    if det == 3 and (poly is None or poly in TREFOILS):
        return TREFOIL
    return OTHER


# right- and left-handed trefoil, writhe-normalised
TREFOILS = (Laurent.from_dict({-4: 1, -12: 1, -16: -1}), Laurent.from_dict({4: 1, 12: 1, 16: -1}))


# ---------------------------------------------------------------------------
# full analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InvariantReport:
    model: str
    eps: float
    seed: int
    linking_number: int
    twist_count: int
    determinant: int
    alexander_determinant: int
    bracket: Optional[Laurent]
    verdict: str
    crossings: int
    boundary_crossings: int
    reduced_crossings: int
    gauss_code: str
    boundary_linking: Optional[int] = None

    def as_dict(self):
        d = {
            "model": self.model,
            "eps": self.eps,
            "seed": self.seed,
            "linking_number": self.linking_number,
            "twist_count": self.twist_count,
            "determinant": self.determinant,
            "alexander_determinant": self.alexander_determinant,
            "bracket": str(self.bracket) if self.bracket is not None else "n/a",
            "verdict": self.verdict,
            "crossings": self.crossings,
            "boundary_crossings": self.boundary_crossings,
            "reduced_crossings": self.reduced_crossings,
            "gauss_code": self.gauss_code,
        }
        if self.boundary_linking is not None:
            d["boundary_linking"] = self.boundary_linking
        return d

    def to_text(self):
        return "".join(f"{k}={_fmt(v)}\n" for k, v in self.as_dict().items())

    def to_json(self):
        return json.dumps({k: (float(f"{v:.9g}") if isinstance(v, float) else v)
                           for k, v in self.as_dict().items()}, indent=2, sort_keys=False) + "\n"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def analyze(state, params: InflationParams, seed: int = 0, model: str = "",
            tol: Tolerance = DEFAULT_TOL) -> InvariantReport:
    """Curves, projection, linking and boundary invariants of a folded state."""
    curves = extract_curves(state, params, tol)
    diagram = crossing_diagram(curves, seed, tol)
    names = diagram.names
    lks = [linking_number(diagram, b, MIDLINE) for b in names if b != MIDLINE]
    lk = sum(lks)
    blk = linking_number(diagram, BOUNDARY, BOUNDARY2) if BOUNDARY2 in names else None
    raw = knot_code(diagram, BOUNDARY)
    reduced = simplify(raw)
    det = determinant(reduced)
    adet = alexander_determinant(reduced)
    poly = bracket(reduced) if reduced.n <= MAX_BRACKET_CROSSINGS else None
    return InvariantReport(model, float(params.eps), int(seed), lk, abs(lk), det, adet, poly,
                           verdict(det, poly), len(diagram.crossings), raw.n, reduced.n,
                           str(reduced), blk)
