"""JSON scenes: sets, a norm, a reference point and default parameters.

Schema (keys other than ``sets`` are optional)::

    {
      "dimension": 2,
      "norm": "maximum",                  # or {"kind": "p", "p": 3}
      "sets": [{"name": "L1", "set": {"variant": "AffineSubspace", ...}}, ...],
      "anchor": [0, 0],
      "parameters": {"epsilon": 0.1, "rho": 0.05, "lam": 0.2, "alpha": 0.5, "tau": 0.9},
      "seed": 0,
      "points": [[...], ...],             # point tuples for distance / ekeland
      "values": [...],                    # function values for ekeland
      "omegas": [[...], ...],             # base points, one per set
      "translations": [[...], ...]        # translation vectors
    }

A set entry may also be a bare set object (``{"variant": ...}``); it is then
named ``S1``, ``S2``, ...
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import PreconditionFailed
from .norms import EUCLIDEAN, NormSpec
from .sets import SetRep, set_from_dict

PARAMETERS = ("epsilon", "rho", "lam", "alpha", "tau", "xi", "delta")
ARRAYS = ("points", "values", "omegas", "translations")


@dataclass(frozen=True)
class Scene:
    dimension: int
    norm: NormSpec
    sets: tuple
    names: tuple
    anchor: np.ndarray | None = None
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    arrays: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict, compare=False)

    def param(self, name: str, override=None, default=None):
        if override is not None:
            return override
        if name in self.parameters:
            return self.parameters[name]
        if default is None:
            raise PreconditionFailed(f"parameters.{name}: required by this command")
        return default

    def array(self, name: str) -> np.ndarray:
        if name not in self.arrays:
            raise PreconditionFailed(f"{name}: required by this command")
        return self.arrays[name]

    def require_anchor(self) -> np.ndarray:
        if self.anchor is None:
            raise PreconditionFailed("anchor: required by this command")
        return self.anchor

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form of the source document."""
        blob = json.dumps(self.source, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _array(value, path, d=None):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise PreconditionFailed(f"{path}: expected numbers") from None
    if d == 1 and arr.ndim == 1 and path != "scene.anchor":
        arr = arr[:, None]
    if d is not None and arr.ndim >= 1 and arr.shape[-1] != d:
        raise PreconditionFailed(f"{path}: expected vectors of dimension {d}")
    return arr


def scene_from_dict(data) -> Scene:
    if not isinstance(data, dict):
        raise PreconditionFailed("scene: expected a JSON object")
    if "sets" not in data or not isinstance(data["sets"], list):
        raise PreconditionFailed("scene.sets: expected a list")
    norm = NormSpec.parse(data.get("norm", "euclidean")) if "norm" in data else EUCLIDEAN
    sets, names = [], []
    for k, entry in enumerate(data["sets"]):
        path = f"scene.sets[{k}]"
        if isinstance(entry, dict) and "set" in entry:
            sets.append(set_from_dict(entry["set"], path + ".set"))
            names.append(str(entry.get("name", f"S{k + 1}")))
        else:
            sets.append(set_from_dict(entry, path))
            names.append(f"S{k + 1}")
    if sets:
        d = sets[0].dim
    elif "dimension" in data:
        d = int(data["dimension"])
    else:
        raise PreconditionFailed("scene: need sets or a dimension")
    if "dimension" in data and int(data["dimension"]) != d:
        raise PreconditionFailed(f"scene.dimension: {data['dimension']} does not match the sets ({d})")
    for k, s in enumerate(sets):
        if s.dim != d:
            raise PreconditionFailed(f"scene.sets[{k}]: dimension {s.dim}, expected {d}")
    anchor = None
    if data.get("anchor") is not None:
        anchor = _array(data["anchor"], "scene.anchor", d)
        if anchor.shape != (d,):
            raise PreconditionFailed(f"scene.anchor: expected a point of dimension {d}")
    params = {}
    for key, val in dict(data.get("parameters", {})).items():
        if key not in PARAMETERS:
            raise PreconditionFailed(f"scene.parameters.{key}: unknown parameter")
        try:
            params[key] = float(val)
        except (TypeError, ValueError):
            raise PreconditionFailed(f"scene.parameters.{key}: expected a number") from None
    arrays = {}
    for key in ARRAYS:
        if key in data:
            arrays[key] = _array(data[key], key, None if key == "values" else d)
    seed = data.get("seed", 0)
    if not isinstance(seed, int):
        raise PreconditionFailed("scene.seed: expected an integer")
    return Scene(d, norm, tuple(sets), tuple(names), anchor, params, seed, arrays, data)


def load_scene(path) -> Scene:
    """Read and validate a scene file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise PreconditionFailed(f"{path}: cannot read scene ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PreconditionFailed(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}") from None
    return scene_from_dict(data)


def scene_sets(scene: Scene) -> list[SetRep]:
    return list(scene.sets)
