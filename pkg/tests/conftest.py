"""Shared fixtures: catalog models, their folded states and synthetic layer fixtures."""

import dataclasses
import functools
import sys

import numpy as np
import pytest

from mobiusfold.catalog import NAMES, get_model
from mobiusfold.folding import FoldInstruction, fold
from mobiusfold.strip import CreasedStrip, GluingDiagram, glue_strip

_STATES = {}


def folded(name):
    if name not in _STATES:
        e = get_model(name)
        _STATES[name] = fold(e.strip, e.program, e.gluing)
    return _STATES[name]


@pytest.fixture(scope="session")
def states():
    return {n: folded(n) for n in NAMES}


@pytest.fixture(scope="session")
def crisscross_state():
    return folded("crisscross")


@pytest.fixture(scope="session")
def cup_state():
    return folded("cup")


def rect_strip(widths):
    """Strip of rectangles with the given lengths, creases at the cuts."""
    xs = np.concatenate([[0.0], np.cumsum(widths)])
    faces = [[(xs[i], 0.0), (xs[i + 1], 0.0), (xs[i + 1], 1.0), (xs[i], 1.0)] for i in range(len(widths))]
    creases = [((x, 0.0), (x, 1.0)) for x in xs[1:-1]]
    return CreasedStrip(float(xs[-1]), faces, creases)


def _crease_gluing(strip):
    g = glue_strip(strip)
    return GluingDiagram(tuple(sp for sp in g.side_pairs if sp.kind == "crease"),
                         g.boundary_cycles, g.midline, g.end_gluing)


def accordion(widths, layers):
    """Flat accordion fold of a rectangle strip with its layer order overwritten."""
    strip = rect_strip(widths)
    prog = [FoldInstruction(k, np.pi, "above") for k in range(len(widths) - 1)]
    state = fold(strip, prog)
    return dataclasses.replace(state, gluing=_crease_gluing(strip), layers=tuple(layers))


@pytest.fixture
def interlaced_taco_taco():
    # folds at x=1 and x=3 land on one line; layers (1,3) and (2,4) interlace
    return accordion([1.0, 1.0, 1.0, 1.0], (1, 3, 2, 4))


@pytest.fixture
def pierced_taco_tortilla():
    # the last face reaches past the first fold line and sits between its layers
    return accordion([1.0, 1.0, 2.0], (1, 3, 2))


@functools.lru_cache(maxsize=None)
def meshed(name, eps):
    from mobiusfold.curves import InflationParams
    from mobiusfold.smooth import build_mesh
    return build_mesh(folded(name), InflationParams(eps))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(n))
