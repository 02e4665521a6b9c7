"""Versioned JSON persistence for trained predictors.

One document format for every variant, discriminated by a ``kind`` tag.
Serialization is deterministic (sorted keys, shortest round-trip float
repr), so retraining with the same seed reproduces the file byte for
byte, and floats survive a round trip exactly.
"""

import json

from .data import Scaler
from .errors import DataError
from .mlp import MlpModel
from .pipeline import NormalizationPolicy, Predictor, VariantKind
from .svr import SvrModel

SCHEMA_VERSION = 1


def predictor_to_dict(predictor: Predictor) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": predictor.kind.value,
        "scaler": predictor.scaler.to_dict(),
        "policy": predictor.policy.to_dict(),
        "denominator": predictor.denominator,
        "models": [m.to_dict() for m in predictor.models],
    }


def predictor_from_dict(doc: dict) -> Predictor:
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DataError(f"unsupported model schema_version: {version!r}")
    models = []
    for entry in doc["models"]:
        if entry.get("type") == "svr":
            models.append(SvrModel.from_dict(entry))
        elif entry.get("type") == "mlp":
            models.append(MlpModel.from_dict(entry))
        else:
            raise DataError(f"unknown model type: {entry.get('type')!r}")
    return Predictor(
        kind=VariantKind(doc["kind"]),
        models=models,
        scaler=Scaler.from_dict(doc["scaler"]),
        policy=NormalizationPolicy.from_dict(doc["policy"]),
        denominator=doc.get("denominator", "target"),
    )


def save_predictor(predictor: Predictor, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(predictor_to_dict(predictor), handle, sort_keys=True)
        handle.write("\n")


def load_predictor(path) -> Predictor:
    with open(path, encoding="utf-8") as handle:
        return predictor_from_dict(json.load(handle))
