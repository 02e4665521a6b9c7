"""Grid search over model hyperparameters with k-fold cross-validation.

Every candidate configuration is scored by the selected optimization
measure on held-out folds, using raw (unnormalized) predictions; the
winner is the config with the best mean fold score, ties resolving to
the first config in grid order.  Degenerate configs that make a measure
uncomputable on a fold (for example constant predictions) score that
fold as -inf instead of aborting the search.
"""

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import metrics
from .data import QeDataset
from .errors import ConfigError, MissingLabels, NumericalError, TooFewRows, ZeroVariance
from .mlp import MlpConfig
from .pipeline import (
    NormalizationPolicy,
    Predictor,
    VariantKind,
    predict_raw,
    train_variant,
)
from .svr import SvrConfig


class Measure(str, Enum):
    R2 = "r2"
    RHO_EDITS = "rho_edits"
    RHO_HTER = "rho_hter"


def default_measure(variant: VariantKind) -> Measure:
    """rho-edits for 4-output variants, rho-HTER for direct ones."""
    return Measure.RHO_EDITS if VariantKind(variant).predicts_edits else Measure.RHO_HTER


def default_param_grid(variant: VariantKind) -> dict[str, list]:
    """Default candidate values, taken from the tuned models' settings."""
    if VariantKind(variant) in (VariantKind.SVM, VariantKind.QUAD_SVM):
        return {
            "c": [1.0, 10.0],
            "epsilon": [0.1, 0.2],
            "gamma": [0.001, 0.01],
        }
    return {
        "hidden_sizes": [(100,), (300,), (300, 150), (150, 75, 6)],
        "alpha": [0.01, 0.1],
        "tol": [1e-3, 1e-9],
        "activation": ["relu", "tanh"],
    }


@dataclass
class GridSpec:
    variant: VariantKind
    param_grid: dict[str, list] = field(default_factory=dict)
    measure: Measure | None = None  # None: default_measure(variant)
    k: int = 5
    seed: int = 42
    base: dict = field(default_factory=dict)  # fixed non-grid parameters

    def __post_init__(self):
        self.variant = VariantKind(self.variant)
        if not self.param_grid:
            self.param_grid = default_param_grid(self.variant)
        if any(len(v) == 0 for v in self.param_grid.values()):
            raise ConfigError("every grid dimension needs at least one value")
        if self.measure is None:
            self.measure = default_measure(self.variant)
        self.measure = Measure(self.measure)
        if self.k < 2:
            raise ConfigError("fold count k must be >= 2")
        if self.measure == Measure.RHO_EDITS and not self.variant.predicts_edits:
            raise ConfigError(
                f"measure rho_edits needs a 4-output variant, not {self.variant.value}"
            )


@dataclass
class CvEntry:
    params: dict
    fold_scores: list[float]
    mean_score: float


@dataclass
class CvResult:
    entries: list[CvEntry]
    best_index: int
    best_params: dict
    best_score: float
    measure: Measure
    k: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "measure": self.measure.value,
            "k": self.k,
            "seed": self.seed,
            "best_index": self.best_index,
            "best_params": _jsonable(self.best_params),
            "best_score": self.best_score,
            "entries": [
                {
                    "params": _jsonable(e.params),
                    "fold_scores": e.fold_scores,
                    "mean_score": e.mean_score,
                }
                for e in self.entries
            ],
        }


def _jsonable(params: dict) -> dict:
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in params.items()}


def make_folds(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Seeded shuffle then contiguous split into k near-equal folds."""
    if n < k:
        raise TooFewRows(f"cannot split {n} rows into {k} folds")
    perm = np.random.default_rng(seed).permutation(n)
    base = n // k
    extra = n % k
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(perm[start : start + size])
        start += size
    return folds


def make_model_config(variant: VariantKind, params: dict):
    """Build the concrete model config for one grid point."""
    if VariantKind(variant) in (VariantKind.SVM, VariantKind.QUAD_SVM):
        return SvrConfig(**params)
    mlp_params = dict(params)
    if "hidden_sizes" in mlp_params:
        mlp_params["hidden_sizes"] = tuple(mlp_params["hidden_sizes"])
    return MlpConfig(**mlp_params)


def iter_param_points(spec: GridSpec) -> list[dict]:
    """Cartesian product of the grid in deterministic order."""
    names = list(spec.param_grid.keys())
    points = []
    for combo in itertools.product(*(spec.param_grid[n] for n in names)):
        params = dict(spec.base)
        params.update(dict(zip(names, combo)))
        points.append(params)
    return points


def _require_labels(spec: GridSpec, ds: QeDataset) -> None:
    if spec.variant.predicts_edits and ds.gold_edits is None:
        raise MissingLabels(f"{spec.variant.value} tuning needs gold edit counts")
    if spec.measure in (Measure.RHO_HTER,) and ds.gold_hter is None:
        raise MissingLabels("measure rho_hter needs gold HTER labels")
    if not spec.variant.predicts_edits and ds.gold_hter is None:
        raise MissingLabels(f"{spec.variant.value} tuning needs gold HTER labels")
    if (
        spec.variant.predicts_edits
        and spec.measure == Measure.RHO_HTER
        and ds.target_lengths is None
    ):
        raise MissingLabels("measure rho_hter needs target sentence lengths")


def fold_measure(
    variant: VariantKind, measure: Measure, raw: np.ndarray, test_ds: QeDataset
) -> float:
    """Measure value on one fold's raw predictions."""
    if VariantKind(variant).predicts_edits:
        if measure == Measure.RHO_EDITS:
            return metrics.rho_edits(raw, test_ds.gold_edits)
        if measure == Measure.RHO_HTER:
            return metrics.rho_hter(raw, test_ds.gold_hter, test_ds.target_lengths)
        return float(
            np.mean(
                [
                    metrics.r_squared(raw[:, c], test_ds.gold_edits[:, c])
                    for c in range(4)
                ]
            )
        )
    if measure == Measure.RHO_HTER:
        return metrics.pearson(raw, test_ds.gold_hter)
    return metrics.r_squared(raw, test_ds.gold_hter)


def _eval_config(args) -> list[float]:
    spec, ds, params, folds = args
    scores = []
    n = ds.n
    all_idx = np.arange(n)
    for fold in folds:
        mask = np.ones(n, dtype=bool)
        mask[fold] = False
        train_idx = all_idx[mask]
        train_ds = ds.subset(train_idx)
        test_ds = ds.subset(fold)
        model_params = dict(params)
        if spec.variant in (VariantKind.MLP, VariantKind.MLP4):
            model_params.setdefault("seed", spec.seed)
        cfg = make_model_config(spec.variant, model_params)
        try:
            predictor = train_variant(spec.variant, train_ds, cfg)
        except NumericalError as exc:
            raise NumericalError(f"config {params} failed to train: {exc}") from exc
        raw = predict_raw(predictor, test_ds.features)
        try:
            scores.append(float(fold_measure(spec.variant, spec.measure, raw, test_ds)))
        except ZeroVariance:
            scores.append(float("-inf"))
    return scores


def grid_search(spec: GridSpec, ds: QeDataset, jobs: int = 1) -> CvResult:
    """Evaluate every grid point with k-fold CV and pick the best.

    Per config and fold: the scaler and model are fit on the training
    part only, the measure is computed on the held-out fold's raw
    predictions, and the k fold scores are averaged.
    """
    _require_labels(spec, ds)
    folds = make_folds(ds.n, spec.k, spec.seed)
    points = iter_param_points(spec)
    tasks = [(spec, ds, params, folds) for params in points]
    if jobs <= 1 or len(tasks) < 2:
        all_scores = [_eval_config(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            all_scores = list(pool.map(_eval_config, tasks))

    entries = [
        CvEntry(params=params, fold_scores=scores, mean_score=float(np.mean(scores)))
        for params, scores in zip(points, all_scores)
    ]
    best_index = max(range(len(entries)), key=lambda i: entries[i].mean_score)
    return CvResult(
        entries=entries,
        best_index=best_index,
        best_params=entries[best_index].params,
        best_score=entries[best_index].mean_score,
        measure=spec.measure,
        k=spec.k,
        seed=spec.seed,
    )


def retrain_best(
    spec: GridSpec,
    ds: QeDataset,
    result: CvResult,
    policy: NormalizationPolicy = NormalizationPolicy(),
    denominator: str = "target",
) -> Predictor:
    """Refit the winning config on the full training set."""
    params = dict(result.best_params)
    if spec.variant in (VariantKind.MLP, VariantKind.MLP4):
        params.setdefault("seed", spec.seed)
    cfg = make_model_config(spec.variant, params)
    return train_variant(spec.variant, ds, cfg, policy=policy, denominator=denominator)
