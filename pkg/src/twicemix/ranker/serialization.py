"""Versioned JSON model files: ``{version, config, layers: [{name, shape, values}]}``.

Values are written with ``repr`` precision, so float64 weights round-trip exactly.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import FORMAT_VERSION, RankerConfig, RankerModel, param_shapes


class ModelFormatError(ValueError):
    pass


class ModelVersionError(ModelFormatError):
    pass


def model_to_dict(model: RankerModel) -> dict:
    return {
        "version": model.version,
        "config": model.config.to_dict(),
        "layers": [
            {"name": name, "shape": list(arr.shape), "values": arr.ravel().tolist()}
            for name, arr in model.params.items()
        ],
    }


def model_from_dict(doc) -> RankerModel:
    if not isinstance(doc, dict) or not {"version", "config", "layers"} <= set(doc):
        raise ModelFormatError("model document must hold version, config and layers")
    if doc["version"] != FORMAT_VERSION:
        raise ModelVersionError(
            f"unsupported model version {doc['version']!r}; expected {FORMAT_VERSION}")
    try:
        config = RankerConfig.from_dict(doc["config"])
        expected = param_shapes(config)
        params = {}
        for layer in doc["layers"]:
            shape = tuple(layer["shape"])
            values = np.asarray(layer["values"], dtype=np.float64)
            if values.size != int(np.prod(shape)):
                raise ModelFormatError(f"layer {layer['name']}: {values.size} values for shape {shape}")
            params[layer["name"]] = values.reshape(shape)
        if list(params) != list(expected):
            raise ModelFormatError(f"layer list {list(params)} does not match config {list(expected)}")
        return RankerModel(config, params, doc["version"])
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"corrupt model document: {exc}") from None


def dumps_model(model: RankerModel) -> str:
    return json.dumps(model_to_dict(model), separators=(",", ":")) + "\n"


def save_model(model: RankerModel, path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def load_model(path) -> RankerModel:
    try:
        doc = json.loads(Path(path).read_bytes().decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"{path}: corrupt model file ({exc})") from None
    return model_from_dict(doc)
