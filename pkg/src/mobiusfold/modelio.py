"""JSON model files: a creased strip, its end gluing, a fold program and expected values."""

import json
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .curves import Crossing, CrossingDiagram, StrandRef
from .errors import ModelFormatError
from .folding import FoldInstruction
from .strip import CYLINDER, MOEBIUS, CreasedStrip, GluingDiagram, glue_strip


@dataclass(frozen=True)
class Expected:
    """Values the full pipeline must reproduce for a model."""

    lambda_flat: float
    abs_linking: int
    linking: int
    determinant: int
    face_count: int
    plane_groups: int
    symmetry_order: int = 1
    boundary_linking: Optional[int] = None

    def as_dict(self):
        d = dict(self.__dict__)
        if d["boundary_linking"] is None:
            del d["boundary_linking"]
        return d


@dataclass(frozen=True, eq=False)
class ModelEntry:
    name: str
    strip: CreasedStrip
    gluing: GluingDiagram
    program: Tuple[FoldInstruction, ...]
    expected: Optional[Expected] = None
    notes: str = ""
    diagram: Optional[CrossingDiagram] = None   # recorded crossings, re-checked by validate


_REQUIRED = ("name", "aspect_ratio", "faces", "creases", "program")


def model_from_dict(d) -> ModelEntry:
    if not isinstance(d, dict):
        raise ModelFormatError("model file must hold a JSON object")
    missing = [k for k in _REQUIRED if k not in d]
    if missing:
        raise ModelFormatError(f"missing keys: {', '.join(missing)}")
    try:
        faces = [np.asarray(f, dtype=float) for f in d["faces"]]
        creases = [np.asarray(c, dtype=float) for c in d["creases"]]
        if any(f.ndim != 2 or f.shape[1] != 2 or len(f) < 3 for f in faces):
            raise ModelFormatError("each face must be a list of at least three [x, y] points")
        if any(c.shape != (2, 2) for c in creases):
            raise ModelFormatError("each crease must be a pair of [x, y] points")
        sides = tuple(tuple(str(t) for t in pair) for pair in d.get("side_colors", ()))
        if any(len(pair) != 2 for pair in sides) or (sides and len(sides) != len(faces)):
            raise ModelFormatError("side_colors needs one [top, bottom] pair per face")
        strip = CreasedStrip(float(d["aspect_ratio"]), tuple(faces), tuple(creases),
                             tuple(d.get("face_labels", ())), sides)
        kind = d.get("end_gluing", MOEBIUS)
        if kind not in (MOEBIUS, CYLINDER):
            raise ModelFormatError(f"end_gluing must be {MOEBIUS!r} or {CYLINDER!r}")
        gluing = glue_strip(strip, kind)
        program = tuple(FoldInstruction(int(p["crease"]), float(p.get("dihedral", np.pi)),
                                        p.get("stacking", "above")) for p in d["program"])
        exp = Expected(**d["expected"]) if d.get("expected") else None
        diagram = diagram_from_dict(d["diagram"]) if d.get("diagram") else None
    except ModelFormatError:
        raise
    except (TypeError, ValueError, KeyError) as e:
        raise ModelFormatError(str(e)) from e
    return ModelEntry(str(d["name"]), strip, gluing, program, exp, str(d.get("notes", "")), diagram)


def diagram_from_dict(d) -> CrossingDiagram:
    """Crossing diagram from {"names": [...], "crossings": [{"over": [comp, seg, t], "under": ..., "sign": +-1}]}."""
    names = tuple(d["names"])
    crossings = []
    for cid, c in enumerate(d["crossings"]):
        over, under = StrandRef(*c["over"]), StrandRef(*c["under"])
        if not (0 <= over.component < len(names) and 0 <= under.component < len(names)):
            raise ModelFormatError(f"crossing {cid} refers to a missing component")
        if c["sign"] not in (1, -1):
            raise ModelFormatError(f"crossing {cid} has sign {c['sign']}")
        crossings.append(Crossing(cid, over, under, int(c["sign"]), tuple(c.get("point", (0.0, 0.0)))))
    visits = {n: [] for n in range(len(names))}
    for c in crossings:
        visits[c.over.component].append((c.over.segment, c.over.t, c.id, True, c.sign))
        visits[c.under.component].append((c.under.segment, c.under.t, c.id, False, c.sign))
    gauss = {name: tuple((cid, o, sg) for _, _, cid, o, sg in sorted(visits[n]))
             for n, name in enumerate(names)}
    return CrossingDiagram(np.array(d.get("direction", [0.0, 0.0, 1.0]), dtype=float), names,
                           tuple(crossings), gauss)


def diagram_to_dict(diagram: CrossingDiagram):
    return {
        "direction": [float(x) for x in diagram.direction],
        "names": list(diagram.names),
        "crossings": [{"over": [c.over.component, c.over.segment, c.over.t],
                       "under": [c.under.component, c.under.segment, c.under.t],
                       "sign": c.sign, "point": list(c.point)} for c in diagram.crossings],
    }


def model_to_dict(entry: ModelEntry):
    s = entry.strip
    d = {
        "name": entry.name,
        "aspect_ratio": s.aspect_ratio,
        "end_gluing": entry.gluing.end_gluing,
        "faces": [f.tolist() for f in s.faces],
        "creases": [c.tolist() for c in s.creases],
        "face_labels": list(s.face_labels),
        "side_colors": [list(pair) for pair in s.side_colors],
        "program": [{"crease": p.crease, "dihedral": p.dihedral, "stacking": p.stacking}
                    for p in entry.program],
    }
    if entry.expected is not None:
        d["expected"] = entry.expected.as_dict()
    if entry.notes:
        d["notes"] = entry.notes
    if entry.diagram is not None:
        d["diagram"] = diagram_to_dict(entry.diagram)
    return d


def load_model(path) -> ModelEntry:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"{path}: {e}") from e
    return model_from_dict(d)


def dump_model(entry: ModelEntry, path):
    with open(path, "w") as fh:
        json.dump(model_to_dict(entry), fh, indent=1)
        fh.write("\n")
