import json
import math

import pytest

from mobiusfold import catalog
from mobiusfold.curves import InflationParams
from mobiusfold.errors import ModelFormatError, UnknownModel
from mobiusfold.knots import analyze
from mobiusfold.modelio import model_from_dict, model_to_dict
from mobiusfold.strip import validate_strip

from conftest import folded


@pytest.mark.parametrize("name", catalog.NAMES)
def test_shipped_file_matches_builder(name):
    built = catalog.build_entries()[name]
    shipped = catalog.get_model(name)
    assert model_to_dict(shipped) == json.loads(json.dumps(model_to_dict(built)))


@pytest.mark.parametrize("name", catalog.NAMES)
def test_round_trip_through_dict(name):
    e = catalog.get_model(name)
    assert model_to_dict(model_from_dict(model_to_dict(e))) == model_to_dict(e)


@pytest.mark.parametrize("name", catalog.NAMES)
def test_expected_values_reproduced(name):
    e = catalog.get_model(name)
    exp = e.expected
    assert validate_strip(e.strip, e.gluing).ok
    assert e.strip.aspect_ratio == pytest.approx(exp.lambda_flat, abs=1e-9)
    assert e.strip.n_faces == exp.face_count
    st = folded(name)
    assert len(st.plane_groups) == exp.plane_groups
    r = analyze(st, InflationParams(0.02))
    assert (r.linking_number, r.determinant) == (exp.linking, exp.determinant)
    assert r.twist_count == exp.abs_linking
    if exp.boundary_linking is not None:
        assert r.boundary_linking == exp.boundary_linking


def test_aspect_ratio_ordering():
    lam = {n: catalog.get_model(n).strip.aspect_ratio for n in catalog.NAMES}
    assert lam["triangular"] < lam["two_twist_cylinder"] < lam["crisscross"] < lam["trihexaflexagon"]
    assert lam["cup"] == lam["crisscross"] == 3.0
    assert lam["trihexaflexagon"] == pytest.approx(3 * math.sqrt(3))


def test_unknown_model():
    with pytest.raises(UnknownModel):
        catalog.get_model("hexahexaflexagon")


def test_malformed_model_dicts():
    good = model_to_dict(catalog.get_model("triangular"))
    with pytest.raises(ModelFormatError):
        model_from_dict({k: v for k, v in good.items() if k != "faces"})
    with pytest.raises(ModelFormatError):
        model_from_dict(dict(good, end_gluing="klein"))
    with pytest.raises(ModelFormatError):
        model_from_dict(dict(good, faces=[[[0, 0], [1, 0]]]))
    with pytest.raises(ModelFormatError):
        model_from_dict([1, 2])
