"""Correlation metrics and bootstrap significance testing.

The tuning/evaluation measures mirror how systems are compared in
sentence-level QE: Pearson's rho on the final score, R2 of predicted
quantities, the product of the four per-operation rhos, and rho over
HTER assembled from raw (unnormalized) predicted edit counts.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import LengthMismatch, TooFewSamples, ZeroVariance
from .pipeline import EDIT_COLUMNS, assemble_hter


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape[0] != b.shape[0]:
        raise LengthMismatch(f"vector lengths differ: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] < 2:
        raise TooFewSamples("need at least 2 samples")
    return a, b


def pearson(a, b) -> float:
    """Product-moment correlation of two equal-length vectors."""
    a, b = _pair(a, b)
    ac = a - a.mean()
    bc = b - b.mean()
    ssa = float(ac @ ac)
    ssb = float(bc @ bc)
    if ssa == 0.0:
        raise ZeroVariance("first argument is constant")
    if ssb == 0.0:
        raise ZeroVariance("second argument is constant")
    return float(ac @ bc) / np.sqrt(ssa * ssb)


def r_squared(pred, gold) -> float:
    """Coefficient of determination 1 - SSres/SStot (not squared rho)."""
    pred, gold = _pair(pred, gold)
    gc = gold - gold.mean()
    ss_tot = float(gc @ gc)
    if ss_tot == 0.0:
        raise ZeroVariance("gold labels are constant")
    resid = gold - pred
    return 1.0 - float(resid @ resid) / ss_tot


def rho_edits(pred, gold) -> float:
    """Product of the four per-operation Pearson rhos on raw predictions."""
    pred = np.asarray(pred, dtype=np.float64)
    gold = np.asarray(gold, dtype=np.float64)
    if pred.ndim != 2 or pred.shape[1] != 4 or gold.shape != pred.shape:
        raise LengthMismatch(
            f"expected matching (n, 4) matrices, got {pred.shape} and {gold.shape}"
        )
    product = 1.0
    for col, name in enumerate(EDIT_COLUMNS):
        try:
            product *= pearson(pred[:, col], gold[:, col])
        except ZeroVariance as exc:
            raise ZeroVariance(f"column {col} ({name}): {exc}") from None
    return product


def rho_hter(pred, gold_hter, denominators) -> float:
    """Pearson rho of HTER assembled from raw predicted counts.

    No normalization is applied to the predictions before assembly.
    """
    assembled = assemble_hter(pred, denominators)
    return pearson(assembled, gold_hter)


@dataclass
class EvalReport:
    rho: float
    r2: float
    rho_edits: Optional[float]
    rho_hter: Optional[float]
    n: int

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "r2": self.r2,
            "rho_edits": self.rho_edits,
            "rho_hter": self.rho_hter,
            "n": self.n,
        }


def evaluate(
    pred_hter,
    gold_hter,
    pred_edits=None,
    gold_edits=None,
    denominators=None,
) -> EvalReport:
    """Full report for one system's predictions against gold labels."""
    pred_hter, gold_hter = _pair(pred_hter, gold_hter)
    report = EvalReport(
        rho=pearson(pred_hter, gold_hter),
        r2=r_squared(pred_hter, gold_hter),
        rho_edits=None,
        rho_hter=None,
        n=pred_hter.shape[0],
    )
    if pred_edits is not None and gold_edits is not None:
        report.rho_edits = rho_edits(pred_edits, gold_edits)
    if pred_edits is not None and denominators is not None:
        report.rho_hter = rho_hter(pred_edits, gold_hter, denominators)
    return report


@dataclass
class SignificanceResult:
    win_fraction: float
    alpha: float
    significant: bool
    n_samples: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "win_fraction": self.win_fraction,
            "alpha": self.alpha,
            "significant": self.significant,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def _rowwise_pearson(A: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row correlation plus validity mask (False where degenerate)."""
    Ac = A - A.mean(axis=1, keepdims=True)
    Bc = B - B.mean(axis=1, keepdims=True)
    ssa = np.einsum("ij,ij->i", Ac, Ac)
    ssb = np.einsum("ij,ij->i", Bc, Bc)
    valid = (ssa > 0.0) & (ssb > 0.0)
    denom = np.where(valid, np.sqrt(ssa * ssb), 1.0)
    return np.einsum("ij,ij->i", Ac, Bc) / denom, valid


# Resamples per work chunk; chunk seeds derive from (seed, chunk index),
# so results do not depend on the worker count.
_CHUNK = 64


def _chunk_wins(args) -> int:
    pred_a, pred_b, gold, take, seed, chunk_index = args
    rng = np.random.default_rng(np.random.SeedSequence((seed, chunk_index)))
    idx = rng.integers(0, gold.shape[0], size=(take, gold.shape[0]))
    g = gold[idx]
    rho_a, ok_a = _rowwise_pearson(pred_a[idx], g)
    rho_b, ok_b = _rowwise_pearson(pred_b[idx], g)
    return int(np.sum((rho_a > rho_b) & ok_a & ok_b))


def bootstrap_significance(
    pred_a,
    pred_b,
    gold,
    n_samples: int = 1000,
    alpha: float = 0.05,
    seed: int = 42,
    jobs: int = 1,
) -> SignificanceResult:
    """Paired bootstrap: does system A beat system B on Pearson rho?

    Resamples test indices with replacement ``n_samples`` times and
    counts the fraction where rho(A) strictly exceeds rho(B); ties and
    degenerate resamples never count as wins.  One-sided decision:
    significant iff win_fraction >= 1 - alpha.
    """
    pred_a, gold = _pair(pred_a, gold)
    pred_b, _ = _pair(pred_b, gold)
    n = gold.shape[0]
    if n < 10:
        raise TooFewSamples(f"need at least 10 paired samples, got {n}")
    if n_samples < 1:
        raise TooFewSamples("n_samples must be positive")

    tasks = []
    remaining = n_samples
    chunk_index = 0
    while remaining > 0:
        take = min(_CHUNK, remaining)
        tasks.append((pred_a, pred_b, gold, take, seed, chunk_index))
        remaining -= take
        chunk_index += 1

    if jobs <= 1 or len(tasks) < 2:
        wins = sum(_chunk_wins(t) for t in tasks)
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            wins = sum(pool.map(_chunk_wins, tasks))

    win_fraction = wins / n_samples
    return SignificanceResult(
        win_fraction=win_fraction,
        alpha=alpha,
        significant=win_fraction >= 1.0 - alpha,
        n_samples=n_samples,
        seed=seed,
    )
