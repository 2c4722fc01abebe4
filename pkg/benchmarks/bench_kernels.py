"""Time the compiled kernels against their numpy fallbacks on catalog workloads.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from mobiusfold import _accel, catalog, kernels
from mobiusfold.curves import InflationParams, crossing_diagram, extract_curves
from mobiusfold.folding import fold
from mobiusfold.geometry import closed_segments, generic_direction, project
from mobiusfold.knots import knot_code, planar_map, simplify
from mobiusfold.smooth import build_mesh


def folded(name):
    e = catalog.get_model(name)
    return fold(e.strip, e.program, e.gluing)


def workloads():
    state = folded("trihexaflexagon")
    curves = extract_curves(state, InflationParams(0.005))
    starts, ends, _, _, nxt, prv = closed_segments([c.points for c in curves])
    d = generic_direction([c.points for c in curves], 0)
    p, q = project(starts, d)[0], project(ends, d)[0]

    mesh = build_mesh(folded("cup"), InflationParams(0.005))

    cc = extract_curves(folded("crisscross"), InflationParams(0.01))
    code = simplify(knot_code(crossing_diagram(cc, 0), cc[0].name))
    pm = planar_map(code)
    corner_edges = np.array([[e for e, _ in rot] for rot in pm.rotation], dtype=np.int64)

    return {
        f"segment_crossings ({len(p)} segments)":
            lambda: kernels.segment_crossings(p, q, nxt, prv, 1e-9, 1e-9),
        f"first_triangle_collision ({mesh.n_triangles} triangles)":
            lambda: kernels.first_triangle_collision(mesh.vertices, mesh.triangles, 1e-9),
        f"state_counts ({pm.n} crossings)":
            lambda: kernels.state_counts(corner_edges, 2 * pm.n),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _accel.numba is None:
        raise SystemExit("numba is not installed")
    jobs = workloads()
    print(f"{'kernel':48s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}")
    for name, job in jobs.items():
        times = {}
        for enabled in (True, False):
            _accel.NUMBA_ENABLED = enabled
            job()   # compile / warm up
            times[enabled] = min(timeit.repeat(job, number=1, repeat=args.repeat))
        _accel.NUMBA_ENABLED = True
        print(f"{name:48s} {times[True]:10.4f} {times[False]:10.4f} {times[False] / times[True]:8.1f}x")


if __name__ == "__main__":
    main()
