"""Model variants behind one interface, plus prediction normalization.

Four variants:
  * SVM       one epsilon-SVR predicting HTER directly (the baseline)
  * QUAD_SVM  four epsilon-SVRs, one per edit operation
  * MLP       single-output perceptron predicting HTER directly
  * MLP4      one 4-output perceptron predicting all edit counts jointly

The 4-output variants assemble HTER from the predicted counts:
``hter = sum(edits) / length``.  The true denominator (post-edited
reference length) is unknown at prediction time, so the MT-output length
serves as proxy by default; reference lengths can be requested for
oracle experiments.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

import numpy as np

from . import mlp as mlp_mod
from . import svr as svr_mod
from .data import QeDataset, Scaler, apply_scaler, fit_scaler
from .errors import ConfigError, DimensionMismatch, MissingLabels

EDIT_COLUMNS = ("ins", "del", "sub", "shift")


class VariantKind(str, Enum):
    SVM = "svm"
    QUAD_SVM = "quad_svm"
    MLP = "mlp"
    MLP4 = "mlp4"

    @property
    def predicts_edits(self) -> bool:
        return self in (VariantKind.QUAD_SVM, VariantKind.MLP4)


@dataclass(frozen=True)
class NormalizationPolicy:
    """Optional rounding and range trimming of predicted edit counts."""

    round: bool = False
    trim: bool = False

    def to_dict(self) -> dict:
        return {"round": self.round, "trim": self.trim}

    @classmethod
    def from_dict(cls, doc: dict) -> "NormalizationPolicy":
        return cls(round=bool(doc["round"]), trim=bool(doc["trim"]))


@dataclass
class Predictor:
    kind: VariantKind
    models: list
    scaler: Scaler
    policy: NormalizationPolicy
    denominator: str = "target"  # or "reference": oracle experiments only

    def __post_init__(self):
        if self.denominator not in ("target", "reference"):
            raise ConfigError(f"unknown denominator source {self.denominator!r}")
        expected = 4 if self.kind == VariantKind.QUAD_SVM else 1
        if len(self.models) != expected:
            raise ConfigError(
                f"{self.kind.value} requires {expected} model(s), got {len(self.models)}"
            )


def normalize_edits(raw, policy: NormalizationPolicy, upper_bounds) -> np.ndarray:
    """Apply the policy to raw predicted edit counts.

    Rounding is half away from zero; trimming clamps each row into
    [0, upper_bound].  With both enabled, rounding happens first.
    """
    out = np.array(raw, dtype=np.float64, copy=True)
    if out.ndim != 2:
        raise DimensionMismatch(f"expected (n, 4) edit counts, got shape {out.shape}")
    bounds = np.asarray(upper_bounds, dtype=np.float64)
    if bounds.shape[0] != out.shape[0]:
        raise DimensionMismatch(
            f"{bounds.shape[0]} bounds for {out.shape[0]} prediction rows"
        )
    if policy.round:
        out = np.copysign(np.floor(np.abs(out) + 0.5), out)
    if policy.trim:
        out = np.clip(out, 0.0, bounds[:, None])
    return out


def assemble_hter(edits, denominators) -> np.ndarray:
    """Row-wise HTER: total edit count divided by the denominator."""
    edits = np.asarray(edits, dtype=np.float64)
    denominators = np.asarray(denominators)
    if edits.ndim != 2 or edits.shape[0] != denominators.shape[0]:
        raise DimensionMismatch(
            f"edits shape {edits.shape} vs {denominators.shape[0]} denominators"
        )
    if np.any(denominators <= 0):
        raise ConfigError("denominators must be positive")
    return edits.sum(axis=1) / denominators


def _svr_configs(model_cfg, kind: VariantKind) -> list[svr_mod.SvrConfig]:
    if isinstance(model_cfg, svr_mod.SvrConfig):
        return [model_cfg] * (4 if kind == VariantKind.QUAD_SVM else 1)
    configs = list(model_cfg)
    expected = 4 if kind == VariantKind.QUAD_SVM else 1
    if len(configs) != expected or not all(
        isinstance(c, svr_mod.SvrConfig) for c in configs
    ):
        raise ConfigError(
            f"{kind.value} expects one SvrConfig or a list of {expected}"
        )
    return configs


def train_variant(
    kind: VariantKind,
    ds: QeDataset,
    model_cfg,
    policy: NormalizationPolicy = NormalizationPolicy(),
    denominator: str = "target",
) -> Predictor:
    """Fit the scaler on the dataset and train the variant's model(s).

    QUAD_SVM trains its four models in the fixed order ins, del, sub,
    shift; ``model_cfg`` may be a single config (shared) or a list of 4.
    """
    kind = VariantKind(kind)
    scaler = fit_scaler(ds.features)
    X = apply_scaler(scaler, ds.features)

    if kind.predicts_edits:
        if ds.gold_edits is None:
            raise MissingLabels(f"{kind.value} requires gold edit-count labels")
        targets = np.asarray(ds.gold_edits, dtype=np.float64)
    else:
        if ds.gold_hter is None:
            raise MissingLabels(f"{kind.value} requires gold HTER labels")
        targets = np.asarray(ds.gold_hter, dtype=np.float64)

    if kind == VariantKind.SVM:
        cfg = _svr_configs(model_cfg, kind)[0]
        models = [svr_mod.train_svr(cfg, X, targets)]
    elif kind == VariantKind.QUAD_SVM:
        configs = _svr_configs(model_cfg, kind)
        models = [
            svr_mod.train_svr(cfg, X, targets[:, op]) for op, cfg in enumerate(configs)
        ]
    elif kind == VariantKind.MLP:
        if not isinstance(model_cfg, mlp_mod.MlpConfig):
            raise ConfigError("mlp expects an MlpConfig")
        cfg = replace(model_cfg, n_outputs=1)
        models = [mlp_mod.train(cfg, X, targets.reshape(-1, 1))]
    else:  # MLP4; trained on raw integer counts, not normalized values
        if not isinstance(model_cfg, mlp_mod.MlpConfig):
            raise ConfigError("mlp4 expects an MlpConfig")
        cfg = replace(model_cfg, n_outputs=4)
        models = [mlp_mod.train(cfg, X, targets)]

    return Predictor(
        kind=kind, models=models, scaler=scaler, policy=policy, denominator=denominator
    )


def predict_raw(predictor: Predictor, X) -> np.ndarray:
    """Unnormalized model outputs on scaled features.

    Direct variants return HTER predictions of shape (n,);
    4-output variants return raw edit counts of shape (n, 4).
    """
    Xs = apply_scaler(predictor.scaler, np.asarray(X, dtype=np.float64))
    if predictor.kind == VariantKind.SVM:
        return svr_mod.predict_svr(predictor.models[0], Xs)
    if predictor.kind == VariantKind.QUAD_SVM:
        return np.column_stack(
            [svr_mod.predict_svr(m, Xs) for m in predictor.models]
        )
    out = mlp_mod.forward(predictor.models[0], Xs)
    return out[:, 0] if predictor.kind == VariantKind.MLP else out


def predict_hter(
    predictor: Predictor, X, sentence_lengths: Sequence[int]
) -> tuple[np.ndarray, np.ndarray | None]:
    """Predicted HTER per row, plus the (normalized) edit counts if any.

    ``sentence_lengths`` supplies both the trimming upper bound and the
    HTER denominator for the 4-output variants.
    """
    X = np.asarray(X, dtype=np.float64)
    lengths = np.asarray(sentence_lengths)
    if lengths.shape[0] != X.shape[0]:
        raise DimensionMismatch(
            f"{lengths.shape[0]} sentence lengths for {X.shape[0]} feature rows"
        )
    raw = predict_raw(predictor, X)
    if not predictor.kind.predicts_edits:
        return raw, None
    edits = normalize_edits(raw, predictor.policy, lengths)
    return assemble_hter(edits, lengths), edits


def predict_dataset(predictor: Predictor, ds: QeDataset):
    """Predict on a dataset, picking lengths per the predictor's config."""
    if predictor.denominator == "reference":
        lengths = ds.ref_lengths
        if lengths is None:
            raise MissingLabels("denominator='reference' needs ref_lengths")
    else:
        lengths = ds.target_lengths
        if lengths is None:
            raise MissingLabels("denominator='target' needs target_lengths")
    return predict_hter(predictor, ds.features, lengths)
