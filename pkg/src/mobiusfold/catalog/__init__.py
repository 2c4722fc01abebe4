"""The five reference models, stored as model files next to this module.

``build_entries`` constructs them from scratch; the shipped JSON files are
its output and the test suite checks the two agree.
"""

from importlib import resources
from math import pi, sqrt
from typing import Dict, List

from ..errors import UnknownModel
from ..folding import ABOVE, BELOW, FoldInstruction
from ..modelio import Expected, ModelEntry, dump_model, load_model
from ..strip import CYLINDER, MOEBIUS, CreasedStrip, glue_strip

NAMES = ("crisscross", "cup", "triangular", "two_twist_cylinder", "trihexaflexagon")
R3 = sqrt(3.0)


def _square_halves(x0, rising):
    """Split the unit square at x0 along a diagonal into (left, right) triangles and the diagonal."""
    a, b, c, d = (x0, 0.0), (x0 + 1.0, 0.0), (x0 + 1.0, 1.0), (x0, 1.0)
    if rising:
        return [a, c, d], [a, b, c], (a, c)
    return [a, b, d], [b, c, d], (b, d)


def _flat(creases, flags):
    return tuple(FoldInstruction(c, pi, f) for c, f in zip(creases, flags))


def crisscross() -> ModelEntry:
    # two right-isosceles triangles, a unit square, two more triangles;
    # labels follow the order in which a pin through the stack meets the faces
    l1, r1, c1 = _square_halves(0.0, True)
    l3, r3, c4 = _square_halves(2.0, False)
    faces = [l1, r1, [(1.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0)], l3, r3]
    creases = [c1, ((1.0, 0.0), (1.0, 1.0)), ((2.0, 0.0), (2.0, 1.0)), c4]
    labels = ("2", "3", "1", "4", "5")
    # A marks the side facing up once folded; faces alternate between the two sides of the sheet
    sides = tuple((f"{l}B", f"{l}A") if k % 2 == 0 else (f"{l}A", f"{l}B") for k, l in enumerate(labels))
    strip = CreasedStrip(3.0, faces, creases, labels, sides)
    program = _flat(range(4), (ABOVE, ABOVE, ABOVE, BELOW))
    exp = Expected(3.0, 3, -3, 3, 5, 1, 1)
    return ModelEntry("crisscross", strip, glue_strip(strip, MOEBIUS), program, exp,
                      "five faces stacked over one unit square")


def cup() -> ModelEntry:
    # three unit squares, each halved by a diagonal; the halves of a square
    # are folded flat onto each other and the squares meet at right angles
    faces, creases = [], []
    for k, rising in enumerate((False, True, False)):
        left, right, diag = _square_halves(float(k), rising)
        faces += [left, right]
        creases.append(diag)
        if k < 2:
            creases.append(((k + 1.0, 0.0), (k + 1.0, 1.0)))
    strip = CreasedStrip(3.0, faces, creases, ("1", "4", "2", "5", "3", "6"))
    program = (FoldInstruction(0, pi, BELOW), FoldInstruction(1, pi / 2),
               FoldInstruction(2, pi, ABOVE), FoldInstruction(3, 3 * pi / 2),
               FoldInstruction(4, pi, BELOW))
    exp = Expected(3.0, 3, -3, 3, 6, 3, 3)
    return ModelEntry("cup", strip, glue_strip(strip, MOEBIUS), program, exp,
                      "three doubled right-isosceles triangles on a cube corner")


def triangular() -> ModelEntry:
    faces = [[(0.0, 0.0), (1 / R3, 1.0), (0.0, 1.0)],
             [(0.0, 0.0), (2 / R3, 0.0), (1 / R3, 1.0)],
             [(2 / R3, 0.0), (R3, 1.0), (1 / R3, 1.0)],
             [(2 / R3, 0.0), (R3, 0.0), (R3, 1.0)]]
    creases = [((0.0, 0.0), (1 / R3, 1.0)), ((2 / R3, 0.0), (1 / R3, 1.0)), ((2 / R3, 0.0), (R3, 1.0))]
    strip = CreasedStrip(R3, faces, creases)
    program = _flat(range(3), (ABOVE, BELOW, BELOW))
    exp = Expected(R3, 1, -1, 1, 4, 1, 1)
    return ModelEntry("triangular", strip, glue_strip(strip, MOEBIUS), program, exp,
                      "one turn around an equilateral triangle")


def two_twist_cylinder() -> ModelEntry:
    faces = [[(0.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
             [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)],
             [(1.0, 0.0), (2.0, 0.0), (1.0, 1.0)],
             [(2.0, 0.0), (2.0, 1.0), (1.0, 1.0)]]
    creases = [((0.0, 0.0), (1.0, 1.0)), ((1.0, 0.0), (1.0, 1.0)), ((2.0, 0.0), (1.0, 1.0))]
    strip = CreasedStrip(2.0, faces, creases)
    program = _flat(range(3), (ABOVE, ABOVE, ABOVE))
    exp = Expected(2.0, 2, -2, 1, 4, 1, 1, boundary_linking=-1)
    return ModelEntry("two_twist_cylinder", strip, glue_strip(strip, CYLINDER), program, exp,
                      "four folds around a right-isosceles triangle; ends glued without a flip")


def trihexaflexagon() -> ModelEntry:
    a = 2 / R3
    lam = 3 * R3
    bottom = lambda j: (a * j, 0.0)
    top = lambda j: (a * j + a / 2, 1.0)
    faces = [[bottom(0), top(0), (0.0, 1.0)]]
    creases = [(bottom(0), top(0))]
    for k in range(8):
        j = k // 2
        if k % 2 == 0:
            faces.append([bottom(j), bottom(j + 1), top(j)])
            creases.append((bottom(j + 1), top(j)))
        else:
            faces.append([bottom(j + 1), top(j + 1), top(j)])
            creases.append((bottom(j + 1), top(j + 1)))
    faces.append([bottom(4), (lam, 0.0), (lam, 1.0)])
    strip = CreasedStrip(lam, faces, creases)
    flags = (ABOVE, BELOW) * 4 + (BELOW,)
    program = _flat(range(9), flags)
    exp = Expected(lam, 3, -3, 3, 10, 1, 1)
    return ModelEntry("trihexaflexagon", strip, glue_strip(strip, MOEBIUS), program, exp,
                      "nine equilateral triangles wrapped three times around one triangle; "
                      "the two half triangles at the ends are glued into the ninth")


_BUILDERS = {
    "crisscross": crisscross,
    "cup": cup,
    "triangular": triangular,
    "two_twist_cylinder": two_twist_cylinder,
    "trihexaflexagon": trihexaflexagon,
}


def build_entries() -> Dict[str, ModelEntry]:
    return {name: _BUILDERS[name]() for name in NAMES}


def model_path(name):
    return resources.files(__name__).joinpath("models", f"{name}.json")


def get_model(name: str) -> ModelEntry:
    """Catalog entry loaded from its shipped model file."""
    if name not in _BUILDERS:
        raise UnknownModel(f"unknown model {name!r}; choose from {', '.join(NAMES)}")
    with resources.as_file(model_path(name)) as p:
        return load_model(p)


def list_models() -> List[str]:
    return list(NAMES)


def write_model_files(directory):
    """Regenerate the shipped model files into ``directory``."""
    import os
    for name, entry in build_entries().items():
        dump_model(entry, os.path.join(directory, f"{name}.json"))
