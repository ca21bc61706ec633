import json

import numpy as np
import pytest

from adaptsweep import SampleSet, make_grid, make_synthetic
from adaptsweep.io import export_model, load_model
from adaptsweep.loewner import alternate_split, barycentric_fit, build_loewner, mirror_split, state_space_interpolant
from adaptsweep.vecfit import VfConfig, vf_fit


@pytest.fixture(scope="module")
def samples():
    grid = make_grid(1e9, 10e9, 400)
    sys_ = make_synthetic(0, 6, 2, 2)
    idx = np.linspace(0, 399, 20).round().astype(int)
    return grid, SampleSet(grid.points[idx], sys_.evaluate(grid.points[idx]))


def _models(samples):
    _, ss = samples
    return {
        "state-space": state_space_interpolant(build_loewner(alternate_split(ss))),
        "pole-residue": vf_fit(ss, VfConfig(order=6, iterations=5)).model,
        "barycentric": barycentric_fit(mirror_split(ss)),
    }


@pytest.mark.parametrize("form", ["state-space", "pole-residue", "barycentric"])
def test_round_trip(tmp_path, samples, form):
    grid, _ = samples
    model = _models(samples)[form]
    prov = {"method": "loewner+theta1", "seed": 3, "samples_hz": [1e9, 10e9, 5.5e9]}
    export_model(model, tmp_path / "m.json", (1e9, 10e9), prov)
    back, manifest = load_model(tmp_path / "m.json")
    assert back.form == form
    np.testing.assert_array_equal(back.evaluate(grid.points), model.evaluate(grid.points))
    assert manifest["provenance"]["samples_hz"] == [1e9, 10e9, 5.5e9]
    assert manifest["band_hz"] == [1e9, 10e9]


def test_state_space_manifest_fields(tmp_path, samples):
    model = _models(samples)["state-space"]
    export_model(model, tmp_path / "m.json")
    data = json.loads((tmp_path / "m.json").read_text())
    assert set(data["parameters"]) == {"A", "B", "C", "D"}
    assert set(data["parameters"]["A"]) == {"shape", "re", "im"}
    assert data["rank"] == model.rank and data["order"] == model.order


def test_rejects_foreign_manifest(tmp_path):
    (tmp_path / "x.json").write_text(json.dumps({"format": "other"}))
    with pytest.raises(ValueError):
        load_model(tmp_path / "x.json")


def test_rejects_unknown_form(tmp_path):
    class Odd:
        form = "generating"

    with pytest.raises(ValueError):
        export_model(Odd(), tmp_path / "x.json")
