"""JSON manifests for surrogate models."""

from __future__ import annotations

import json
from pathlib import Path


from .core import BarycentricModel, PoleResidueModel, StateSpaceModel
from .oracle import _pack, _unpack

FORMAT = "adaptsweep-model"
VERSION = 1

_FIELDS = {
    "state-space": ("A", "B", "C", "D"),
    "pole-residue": ("poles", "residues", "d", "e"),
    "barycentric": ("nodes", "values", "coeffs"),
}
_CLASSES = {
    "state-space": StateSpaceModel,
    "pole-residue": PoleResidueModel,
    "barycentric": BarycentricModel,
}


def model_manifest(model, band_hz=None, provenance: dict | None = None) -> dict:
    if model.form not in _FIELDS:
        raise ValueError(f"cannot export a {model.form!r} model")
    params = {name: _pack(getattr(model, name)) for name in _FIELDS[model.form]}
    manifest = {
        "format": FORMAT,
        "version": VERSION,
        "form": model.form,
        "shape": list(model.shape),
        "parameters": params,
        "band_hz": None if band_hz is None else [float(band_hz[0]), float(band_hz[1])],
        "provenance": provenance or {},
    }
    if model.form == "state-space":
        manifest["rank"] = model.rank
        manifest["order"] = model.order
    return manifest


def export_model(model, path, band_hz=None, provenance: dict | None = None) -> Path:
    """Write ``model`` as JSON; complex arrays are stored as real/imag lists."""
    path = Path(path)
    path.write_text(json.dumps(model_manifest(model, band_hz, provenance), indent=1))
    return path


def model_from_manifest(manifest: dict):
    if manifest.get("format") != FORMAT:
        raise ValueError("not a model manifest")
    form = manifest["form"]
    params = {name: _unpack(manifest["parameters"][name]) for name in _FIELDS[form]}
    if form == "state-space":
        params["rank"] = manifest.get("rank")
    return _CLASSES[form](**params)


def load_model(path):
    """Model and full manifest from a file written by ``export_model``."""
    manifest = json.loads(Path(path).read_text())
    return model_from_manifest(manifest), manifest
