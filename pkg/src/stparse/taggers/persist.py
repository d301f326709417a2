"""Versioned JSON model files.

Envelope: ``{format_version, model_type, config, tags, vocabulary,
weights}``.  Floats are written with ``repr`` precision, so a loaded model
predicts bit-identically to the saved one.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..features import Interner, TemplateConfig
from .crf import CrfModel
from .linear import LinearModel, TrainConfig

FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


class ModelTypeError(ModelFormatError, TypeError):
    pass


def _sparse(W: np.ndarray) -> list[list]:
    f, k = np.nonzero(W)
    return [[int(a), int(b), float(W[a, b])] for a, b in zip(f, k)]


def _dense(entries, shape) -> np.ndarray:
    W = np.zeros(shape)
    for f, k, v in entries:
        W[f, k] = v
    return W


def model_to_json(model: LinearModel | CrfModel) -> dict:
    if isinstance(model, LinearModel):
        return {
            "format_version": FORMAT_VERSION,
            "model_type": "linear",
            "config": {"train": model.config.to_json(),
                       "template": model.template.to_json()},
            "tags": list(model.tags),
            "vocabulary": list(model.interner.reverse),
            "weights": {"coef": _sparse(model.weights),
                        "bias": [float(x) for x in model.bias]},
            "objective_history": [float(x) for x in model.objective_history],
        }
    if isinstance(model, CrfModel):
        return {
            "format_version": FORMAT_VERSION,
            "model_type": "crf",
            "config": {"template": model.template.to_json()},
            "tags": list(model.tags),
            "vocabulary": list(model.interner.reverse),
            "weights": {"emission": _sparse(model.emission),
                        "transition": model.transition.tolist(),
                        "start": model.start.tolist(),
                        "end": model.end.tolist()},
            "objective_history": [float(x) for x in model.objective_history],
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_json(d: dict) -> LinearModel | CrfModel:
    try:
        version = d["format_version"]
        if version != FORMAT_VERSION:
            raise ModelFormatError(
                f"model format version {version} is not supported "
                f"(expected {FORMAT_VERSION})")
        kind = d["model_type"]
        tags = list(d["tags"])
        interner = Interner(d["vocabulary"]).freeze()
        shape = (len(interner), len(tags))
        w = d["weights"]
        if kind == "linear":
            return LinearModel(
                tags, _dense(w["coef"], shape), np.array(w["bias"], dtype=float),
                interner, TrainConfig.from_json(d["config"]["train"]),
                TemplateConfig.from_json(d["config"]["template"]),
                list(d.get("objective_history", [])))
        if kind == "crf":
            return CrfModel(
                tags, _dense(w["emission"], shape),
                np.array(w["transition"], dtype=float).reshape(len(tags), len(tags)),
                np.array(w["start"], dtype=float), np.array(w["end"], dtype=float),
                interner, TemplateConfig.from_json(d["config"]["template"]),
                list(d.get("objective_history", [])))
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, ModelFormatError):
            raise
        raise ModelFormatError(f"malformed model file: {e}") from None
    raise ModelFormatError(f"unknown model type {kind!r}")


def save_model(model: LinearModel | CrfModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model_to_json(model), f)


def load_model(path: str | Path) -> LinearModel | CrfModel:
    try:
        with open(path, encoding="utf-8") as f:
            d = json.load(f)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"{path}: not a complete model file ({e})") from None
    if not isinstance(d, dict):
        raise ModelFormatError(f"{path}: model file must hold a JSON object")
    return model_from_json(d)


def load_linear_model(path: str | Path) -> LinearModel:
    model = load_model(path)
    if not isinstance(model, LinearModel):
        raise ModelTypeError(f"{path} holds a {type(model).__name__}, not a LinearModel")
    return model


def load_crf_model(path: str | Path) -> CrfModel:
    model = load_model(path)
    if not isinstance(model, CrfModel):
        raise ModelTypeError(f"{path} holds a {type(model).__name__}, not a CrfModel")
    return model
