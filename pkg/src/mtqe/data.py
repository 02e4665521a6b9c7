"""File ingestion and feature standardization.

File formats (all UTF-8):
  * feature file: TSV of reals, one row per sentence, '.' decimal separator
  * HTER label file: one real per line
  * edit-count label file: 4-column TSV ``ins del sub shift``
  * sentence file: one tokenized sentence per line
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    LengthMismatch,
    NonNumericCell,
    RaggedRows,
    TooFewRows,
)
from .ter import tokenize

ZERO_VARIANCE_GUARD = 1e-12


def _parse_cell(text: str, path, row: int, col: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise NonNumericCell(
            f"{path}: row {row + 1}, column {col + 1}: not a number: {text!r}"
        ) from None
    if not math.isfinite(value):
        raise NonNumericCell(
            f"{path}: row {row + 1}, column {col + 1}: non-finite value {text!r}"
        )
    return value


def load_table(path, n_cols: int | None = None, skip_comments: bool = False) -> np.ndarray:
    """Load a TSV of reals into an (n, D) float64 array.

    D is inferred from the first row unless ``n_cols`` pins it.  Blank
    lines are rejected as ragged rather than skipped: label and feature
    files are strictly line-aligned with the sentence files.  With
    ``skip_comments``, lines starting with '#' (the config header our
    own writers emit) are ignored.
    """
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as handle:
        for r, line in enumerate(handle):
            if skip_comments and line.startswith("#"):
                continue
            cells = line.rstrip("\n").split("\t")
            if cells == [""]:
                cells = []
            values = [_parse_cell(c, path, r, j) for j, c in enumerate(cells)]
            if n_cols is None:
                n_cols = len(values)
            if len(values) != n_cols:
                raise RaggedRows(
                    f"{path}: row {r + 1} has {len(values)} columns, expected {n_cols}"
                )
            rows.append(values)
    return np.asarray(rows, dtype=np.float64).reshape(len(rows), n_cols or 0)


def load_features(path) -> np.ndarray:
    """Feature matrix from a TSV file."""
    return load_table(path)


def load_hter(path) -> np.ndarray:
    """HTER gold labels, one per line."""
    return load_table(path, n_cols=1)[:, 0]


def load_edit_counts(path) -> np.ndarray:
    """Gold edit counts as an (n, 4) array in ins/del/sub/shift order."""
    return load_table(path, n_cols=4)


def load_sentences(path, lowercase: bool = True) -> list[list[str]]:
    """Tokenized sentences, one per line."""
    with open(path, encoding="utf-8") as handle:
        return [tokenize(line, lowercase=lowercase) for line in handle]


def write_table(path, X: np.ndarray) -> None:
    """Serialize a matrix as TSV with 12 significant digits."""
    X = np.atleast_2d(X)
    with open(path, "w", encoding="utf-8") as handle:
        for row in X:
            handle.write("\t".join(f"{v:.12g}" for v in row) + "\n")


@dataclass
class Scaler:
    """Per-feature standardization parameters (population statistics)."""

    means: np.ndarray
    stds: np.ndarray

    def to_dict(self) -> dict:
        return {"means": self.means.tolist(), "stds": self.stds.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "Scaler":
        return cls(
            means=np.asarray(doc["means"], dtype=np.float64),
            stds=np.asarray(doc["stds"], dtype=np.float64),
        )


def fit_scaler(X: np.ndarray) -> Scaler:
    """Compute per-column mean and population standard deviation.

    Columns with (near-)zero variance get std 1 so that scaling maps
    them to zero instead of blowing up.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d feature matrix, got shape {X.shape}")
    if X.shape[0] < 2:
        raise TooFewRows(f"need at least 2 rows to fit a scaler, got {X.shape[0]}")
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    stds = np.where(stds < ZERO_VARIANCE_GUARD, 1.0, stds)
    return Scaler(means=means, stds=stds)


def apply_scaler(scaler: Scaler, X: np.ndarray) -> np.ndarray:
    """Standardize columns: (x - mean) / std."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != scaler.means.shape[0]:
        raise DimensionMismatch(
            f"matrix has shape {X.shape}, scaler expects {scaler.means.shape[0]} columns"
        )
    return (X - scaler.means) / scaler.stds


@dataclass
class QeDataset:
    """Features plus whatever labels are available for them.

    ``target_lengths`` are MT-output token counts (the only lengths known
    at prediction time); ``ref_lengths`` are post-edited reference lengths
    for oracle experiments.
    """

    features: np.ndarray
    gold_edits: np.ndarray | None = None
    gold_hter: np.ndarray | None = None
    target_lengths: np.ndarray | None = None
    ref_lengths: np.ndarray | None = None

    def __post_init__(self):
        n = self.features.shape[0]
        for name in ("gold_edits", "gold_hter", "target_lengths", "ref_lengths"):
            value = getattr(self, name)
            if value is not None and value.shape[0] != n:
                raise LengthMismatch(
                    f"{name} has {value.shape[0]} rows, features have {n}"
                )

    @property
    def n(self) -> int:
        return self.features.shape[0]

    def subset(self, indices) -> "QeDataset":
        take = lambda a: None if a is None else a[indices]
        return QeDataset(
            features=self.features[indices],
            gold_edits=take(self.gold_edits),
            gold_hter=take(self.gold_hter),
            target_lengths=take(self.target_lengths),
            ref_lengths=take(self.ref_lengths),
        )


def sentence_lengths(sentences: list[list[str]]) -> np.ndarray:
    """Token counts per sentence as an int array."""
    return np.asarray([len(s) for s in sentences], dtype=np.int64)
