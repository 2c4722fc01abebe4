import filecmp
import json
import os

import pytest

from mobiusfold import catalog
from mobiusfold.cli import main
from mobiusfold.modelio import model_to_dict


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_crisscross_json(capsys):
    code, out, _ = run(capsys, "analyze", "crisscross", "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert rec["linking_number"] == -3 and rec["determinant"] == 3


def test_validate_all_text(capsys):
    code, out, _ = run(capsys, "validate", "all")
    assert code == 0
    assert out.count("violations=0") == len(catalog.NAMES)


def test_fold_round_trip(capsys):
    code, out, _ = run(capsys, "fold", "--model", "cup", "--format", "json")
    assert code == 0
    assert json.loads(out)["develop_deviation"] < 1e-9


def test_usage_errors(capsys):
    assert run(capsys, "analyze", "nonesuch")[0] == 2
    assert run(capsys, "analyze", "crisscross", "--eps", "0.01,0.02")[0] == 2
    assert run(capsys, "analyze", "crisscross", "--eps", "-1")[0] == 2
    assert run(capsys, "analyze")[0] == 2
    assert run(capsys, "explode", "crisscross")[0] == 2


def test_missing_and_malformed_files(capsys, tmp_path):
    assert run(capsys, "validate", "--file", str(tmp_path / "absent.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "validate", "--file", str(bad))[0] == 2


def test_odd_recorded_diagram_is_a_violation(capsys, tmp_path):
    d = model_to_dict(catalog.get_model("triangular"))
    d["diagram"] = {"names": ["boundary", "midline"],
                    "crossings": [{"over": [0, 0, 0.5], "under": [1, 0, 0.5], "sign": 1}]}
    path = tmp_path / "odd.json"
    path.write_text(json.dumps(d))
    code, _, err = run(capsys, "validate", "--file", str(path))
    assert code == 1
    assert "OddCrossingSum" in err


def test_wrong_expected_value_is_a_violation(capsys, tmp_path):
    d = model_to_dict(catalog.get_model("triangular"))
    d["expected"]["determinant"] = 3
    path = tmp_path / "wrong.json"
    path.write_text(json.dumps(d))
    code, _, err = run(capsys, "analyze", "--file", str(path))
    assert code == 1 and "determinant" in err


def test_mesh_outputs_are_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        code, _, _ = run(capsys, "mesh", "triangular", "--eps", "0.05,0.02", "--out", str(out))
        assert code == 0
    names = sorted(os.listdir(a))
    assert names == sorted(os.listdir(b)) and any(n.endswith(".obj") for n in names)
    match, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    assert not mismatch and not errors
