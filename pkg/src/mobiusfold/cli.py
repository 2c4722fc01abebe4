"""Command-line front end: validate, fold, analyze, mesh and report.

Exit status is 0 when every check passes, 1 when an invariant is violated
(the violations go to stderr) and 2 on malformed input.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Tuple

import numpy as np

from . import catalog
from .curves import MIDLINE, InflationParams, crossing_diagram, extract_curves, write_polylines
from .errors import MobiusFoldError, ModelFormatError, OddCrossingSum, UnknownModel
from .folding import check_layers, fold, symmetry_check
from .knots import analyze, linking_number
from .modelio import ModelEntry, load_model
from .smooth import (aspect_ratio, boundary_symmetric, build_mesh, check_developable,
                     check_embedded, mesh_curves, write_obj)
from .strip import develop, max_vertex_deviation, validate_strip

COMMANDS = ("validate", "fold", "analyze", "mesh", "report")
DEFAULT_EPS = {"analyze": "0.01", "mesh": "0.05,0.02,0.01,0.005", "report": "0.05,0.02,0.01,0.005"}
ISOMETRY_TOL = 1e-6
ROUNDTRIP_TOL = 1e-9


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    models: Tuple[str, ...]
    file: Optional[str]
    eps: Tuple[float, ...]
    seed: int
    inset: float
    smoothness: float
    out: Optional[str]
    fmt: str

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not self.eps or any(not e > 0 for e in self.eps):
            raise UsageError("eps values must be strictly positive")
        if any(b >= a for a, b in zip(self.eps, self.eps[1:])):
            raise UsageError("eps values must be strictly decreasing")
        if self.fmt not in ("text", "json"):
            raise UsageError("format must be text or json")


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------

def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.9g}")
    if isinstance(v, dict):
        return {k: _num(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_num(x) for x in v]
    return v


def _text_value(v):
    if isinstance(v, float):
        return f"{v:.9g}"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return "[" + ", ".join(_text_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_text_value(x)}" for k, x in v.items()) + "}"
    return str(v)


def render(record, fmt):
    record = _num(record)
    if fmt == "json":
        return json.dumps(record, indent=2) + "\n"
    lines = []
    for k, v in record.items():
        if isinstance(v, list) and v and all(isinstance(x, dict) for x in v):
            for i, row in enumerate(v):
                lines.append(f"{k}[{i}]: " + " ".join(f"{rk}={_text_value(rv)}" for rk, rv in row.items()))
        else:
            lines.append(f"{k}={_text_value(v)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# pipeline steps; each returns (record, violations)
# ---------------------------------------------------------------------------

def _params(cfg, eps):
    return InflationParams(eps)


def step_validate(entry: ModelEntry):
    violations = []
    rep = validate_strip(entry.strip, entry.gluing)
    violations += [str(v) for v in rep.violations]
    state = None
    if rep.ok:
        try:
            state = fold(entry.strip, entry.program, entry.gluing)
        except MobiusFoldError as e:
            violations.append(f"fold: {type(e).__name__}: {e}")
    if state is not None:
        violations += [f"layers: {v}" for v in check_layers(state)]
    if entry.diagram is not None:
        for a, b in combinations(entry.diagram.names, 2):
            try:
                linking_number(entry.diagram, a, b)
            except OddCrossingSum as e:
                violations.append(f"diagram: OddCrossingSum: {e}")
    record = {
        "model": entry.name,
        "faces": entry.strip.n_faces,
        "aspect_ratio": entry.strip.aspect_ratio,
        "end_gluing": entry.gluing.end_gluing,
        "folded": state is not None,
        "violations": len(violations),
    }
    return record, violations, state


def step_fold(entry: ModelEntry, state):
    dev = develop(state)
    deviation = max_vertex_deviation(dev, entry.strip)
    violations = []
    if deviation >= ROUNDTRIP_TOL:
        violations.append(f"develop round trip deviates by {deviation:.3g}")
    record = {
        "model": entry.name,
        "layers": list(state.layers),
        "plane_groups": [list(g) for g in state.plane_groups],
        "group_normals": [list(n) for n in state.group_normals],
        "develop_deviation": deviation,
        "images": [im.tolist() for im in state.images],
    }
    return record, violations


def _expected_checks(entry, rep, violations):
    exp = entry.expected
    if exp is None:
        return
    if rep.linking_number != exp.linking:
        violations.append(f"linking_number {rep.linking_number} != expected {exp.linking}")
    if rep.determinant != exp.determinant:
        violations.append(f"determinant {rep.determinant} != expected {exp.determinant}")
    if rep.alexander_determinant != rep.determinant:
        violations.append("Goeritz and Alexander determinants disagree")
    if exp.boundary_linking is not None and rep.boundary_linking != exp.boundary_linking:
        violations.append(f"boundary_linking {rep.boundary_linking} != expected {exp.boundary_linking}")


def step_analyze(entry, state, cfg):
    rows, violations = [], []
    for eps in cfg.eps:
        rep = analyze(state, _params(cfg, eps), cfg.seed, entry.name)
        _expected_checks(entry, rep, violations)
        rows.append(rep.as_dict())
        if cfg.out:
            tag = _tag(entry.name, eps)
            write_polylines(extract_curves(state, _params(cfg, eps)), os.path.join(cfg.out, f"{tag}_curves.txt"))
    return rows, violations


def _tag(name, eps):
    return f"{name}_eps{eps:.9g}"


def step_mesh(entry, state, cfg, twist):
    rows, violations = [], []
    for eps in cfg.eps:
        mesh = build_mesh(state, InflationParams(eps), joint_inset=cfg.inset,
                          s=cfg.smoothness)
        dist, defect = check_developable(mesh)
        embedded, pair = check_embedded(mesh)
        curves = mesh_curves(mesh)
        diagram = crossing_diagram(curves, cfg.seed)
        lk = sum(linking_number(diagram, b, MIDLINE) for b in diagram.names if b != MIDLINE)
        row = {
            "eps": eps,
            "lambda_prime": aspect_ratio(mesh),
            "distortion": dist,
            "angle_defect": defect,
            "embedded": embedded,
            "twist_count": abs(lk),
            "linking_number": lk,
            "turn_ratio": mesh.turn_ratio,
            "triangles": mesh.n_triangles,
        }
        if entry.expected is not None and entry.expected.symmetry_order > 1:
            row["boundary_symmetric"] = boundary_symmetric(mesh, entry.expected.symmetry_order,
                                                           state.group_normals)
            if not row["boundary_symmetric"]:
                violations.append(f"eps={eps:.9g}: mesh boundary lacks {entry.expected.symmetry_order}-fold symmetry")
        rows.append(row)
        if not embedded:
            violations.append(f"eps={eps:.9g}: triangles {pair[0]} and {pair[1]} intersect")
        if dist >= ISOMETRY_TOL or defect >= ISOMETRY_TOL:
            violations.append(f"eps={eps:.9g}: not developable (distortion {dist:.3g}, defect {defect:.3g})")
        if twist is not None and lk != twist:
            violations.append(f"eps={eps:.9g}: mesh linking {lk} differs from polygonal {twist}")
        if cfg.out:
            write_obj(mesh, os.path.join(cfg.out, f"{_tag(entry.name, eps)}.obj"),
                      f"{entry.name} eps={eps:.9g} lambda'={aspect_ratio(mesh):.9g}")
    lams = [r["lambda_prime"] for r in rows]
    lam = entry.strip.aspect_ratio
    if any(b >= a for a, b in zip(lams, lams[1:])) or any(x <= lam for x in lams):
        violations.append(f"lambda' does not decrease towards {lam:.9g}: {[f'{x:.9g}' for x in lams]}")
    return rows, violations


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def run_model(entry: ModelEntry, cfg: RunConfig):
    record, violations, state = step_validate(entry)
    if cfg.command == "validate" or state is None or violations:
        return record, violations
    if cfg.command == "fold":
        rec, v = step_fold(entry, state)
        return rec, violations + v
    if cfg.command == "analyze":
        rows, v = step_analyze(entry, state, cfg)
        if len(rows) == 1:
            return rows[0], v
        return {"model": entry.name, "analyses": rows}, v
    if cfg.command == "mesh":
        twist = analyze(state, InflationParams(cfg.eps[-1]), cfg.seed).linking_number
        rows, v = step_mesh(entry, state, cfg, twist)
        return {"model": entry.name, "meshes": rows}, v
    # report
    frec, fv = step_fold(entry, state)
    arows, av = step_analyze(entry, state, cfg)
    twist = arows[-1]["linking_number"]
    mrows, mv = step_mesh(entry, state, cfg, twist)
    violations += fv + av + mv
    exp = entry.expected
    sym = symmetry_check(state, exp.symmetry_order) if exp else True
    if not sym:
        violations.append(f"folded state lacks {exp.symmetry_order}-fold symmetry")
    rep = {
        "model": entry.name,
        "aspect_ratio": entry.strip.aspect_ratio,
        "faces": entry.strip.n_faces,
        "end_gluing": entry.gluing.end_gluing,
        "layers": frec["layers"],
        "plane_groups": len(state.plane_groups),
        "develop_deviation": frec["develop_deviation"],
        "symmetric": sym,
        "expected": exp.as_dict() if exp else None,
        "analyses": arows,
        "meshes": mrows,
        "violations": violations,
        "ok": not violations,
    }
    if exp is not None:
        if state.plane_groups and len(state.plane_groups) != exp.plane_groups:
            violations.append(f"{len(state.plane_groups)} plane groups, expected {exp.plane_groups}")
        if entry.strip.n_faces != exp.face_count:
            violations.append(f"{entry.strip.n_faces} faces, expected {exp.face_count}")
        if abs(entry.strip.aspect_ratio - exp.lambda_flat) > 1e-9:
            violations.append("aspect ratio differs from expected")
        rep["ok"] = not violations
    return rep, violations


def _entries(cfg: RunConfig) -> List[ModelEntry]:
    if cfg.file:
        return [load_model(cfg.file)]
    names = cfg.models or (catalog.NAMES if cfg.command == "report" else ())
    if not names:
        raise UsageError("give a model name, --model or --file")
    if "all" in names:
        names = catalog.NAMES
    return [catalog.get_model(n) for n in names]


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        entries = _entries(cfg)
    except (UsageError, ModelFormatError, UnknownModel, OSError) as e:
        print(f"error: {e}", file=stderr)
        return 2
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
    status = 0
    for entry in entries:
        try:
            record, violations = run_model(entry, cfg)
        except MobiusFoldError as e:
            record, violations = {"model": entry.name}, [f"{type(e).__name__}: {e}"]
        text = render(record, cfg.fmt)
        stdout.write(text)
        if cfg.out and cfg.command in ("report", "fold", "analyze", "validate"):
            ext = "json" if cfg.fmt == "json" else "txt"
            with open(os.path.join(cfg.out, f"{entry.name}_{cfg.command}.{ext}"), "w") as fh:
                fh.write(text)
        for v in violations:
            print(f"{entry.name}: {v}", file=stderr)
        if violations:
            status = 1
    return status


def parse_eps(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as e:
        raise UsageError(f"bad eps list {text!r}") from e


def build_parser():
    p = argparse.ArgumentParser(prog="mobiusfold", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("name", nargs="*", help="catalog model name(s), or 'all'")
    p.add_argument("--model", action="append", default=[], help="catalog model name (repeatable)")
    p.add_argument("--file", help="model file (JSON)")
    p.add_argument("--eps", help="comma-separated layer gaps, strictly decreasing")
    p.add_argument("--seed", type=int, default=0, help="projection seed")
    p.add_argument("--inset", type=float, default=0.05, help="joint inset along creases (mesh)")
    p.add_argument("--smoothness", type=float, default=1.0, help="bump-function width s")
    p.add_argument("--out", help="output directory for report, polyline and mesh files")
    p.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        cfg = RunConfig(args.command, tuple(args.name) + tuple(args.model), args.file,
                        parse_eps(args.eps or DEFAULT_EPS.get(args.command, "0.01")),
                        args.seed, args.inset, args.smoothness, args.out, args.fmt)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
