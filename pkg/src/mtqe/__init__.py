"""Sentence-level machine translation quality estimation toolkit.

Predicts post-editing effort (HTER) either directly or by jointly
predicting the four edit-operation counts and assembling the score,
and ships the supporting machinery: a TER aligner for gold labels,
feature standardization, grid-search tuning and bootstrap significance
testing.
"""

from .kernels import backend_name
from .ter import EditCounts, TerResult, edit_distance, score_corpus, ter, tokenize

__version__ = "0.1.0"

__all__ = [
    "EditCounts",
    "TerResult",
    "backend_name",
    "edit_distance",
    "score_corpus",
    "ter",
    "tokenize",
    "__version__",
]
