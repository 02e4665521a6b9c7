"""TER edit operations and HTER between tokenized sentence pairs.

Counts the four edit operations (insertions, deletions, substitutions and
block shifts) needed to turn a hypothesis into its reference, then scores

    hter = (insertions + deletions + substitutions + shifts) / len(reference)

The shift search is greedy in the TERCOM style: repeatedly apply the
single block move that reduces the remaining edit distance the most, one
edit per accepted shift, until no move helps.  Shifted spans are limited
to ``max_shift_span`` tokens, may travel at most ``max_shift_dist``
positions, and must match a contiguous reference subsequence exactly.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from . import kernels
from .errors import EmptyReference, LengthMismatch

MAX_SHIFT_SPAN = 10
MAX_SHIFT_DIST = 50


@dataclass(frozen=True)
class EditCounts:
    """Per-sentence counts of the four edit operations."""

    insertions: int
    deletions: int
    substitutions: int
    shifts: int

    @property
    def total(self) -> int:
        return self.insertions + self.deletions + self.substitutions + self.shifts

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.insertions, self.deletions, self.substitutions, self.shifts)


@dataclass(frozen=True)
class TerResult:
    """Edit counts, reference length and HTER for one sentence pair."""

    edits: EditCounts
    ref_word_count: int
    hter: float


def tokenize(line: str, lowercase: bool = True) -> list[str]:
    """Split a line on whitespace runs, optionally lowercasing first."""
    if lowercase:
        line = line.lower()
    return line.split()


def _intern(hyp: Sequence[str], ref: Sequence[str]) -> tuple[list[int], list[int]]:
    # Token identity is all the kernels need; map tokens to small ints.
    table: dict[str, int] = {}
    hyp_ids = [table.setdefault(tok, len(table)) for tok in hyp]
    ref_ids = [table.setdefault(tok, len(table)) for tok in ref]
    return hyp_ids, ref_ids


def edit_distance(
    hyp: Sequence[str], ref: Sequence[str], backend: str | None = None
) -> tuple[int, int, int, int]:
    """Shift-free minimal alignment of ``hyp`` against ``ref``.

    Returns ``(cost, insertions, deletions, substitutions)``.  An insertion
    adds a reference token missing from the hypothesis; a deletion removes
    a spurious hypothesis token.  Equal-cost alignments resolve in favour
    of substitutions over insertion+deletion pairs.
    """
    kern = kernels.get(backend)
    hyp_ids, ref_ids = _intern(hyp, ref)
    return kern.edit_distance_counts(hyp_ids, ref_ids)


def _ref_ngrams(ref_ids: list[int], max_len: int) -> dict[int, set[tuple[int, ...]]]:
    grams: dict[int, set[tuple[int, ...]]] = {}
    n = len(ref_ids)
    for length in range(1, min(max_len, n) + 1):
        grams[length] = {
            tuple(ref_ids[r : r + length]) for r in range(n - length + 1)
        }
    return grams


def _best_shift(cur, ref_ids, base_cost, cost_fn, max_span, max_dist):
    """Best single block move of ``cur``, or None if no span qualifies.

    Returns ``(delta, shifted_sequence)`` where delta is the edit-distance
    reduction.  Ties resolve to the smallest span, then leftmost origin,
    then leftmost target, which makes the greedy search deterministic.
    """
    m = len(cur)
    grams = _ref_ngrams(ref_ids, min(max_span, m))
    best_key = None
    best_seq = None
    for length in range(1, min(max_span, m) + 1):
        ref_spans = grams.get(length)
        if not ref_spans:
            break
        for start in range(m - length + 1):
            span = tuple(cur[start : start + length])
            if span not in ref_spans:
                continue
            remaining = cur[:start] + cur[start + length :]
            for target in range(len(remaining) + 1):
                if target == start or abs(target - start) > max_dist:
                    continue
                candidate = remaining[:target] + list(span) + remaining[target:]
                delta = base_cost - cost_fn(candidate, ref_ids)
                key = (-delta, length, start, target)
                if best_key is None or key < best_key:
                    best_key = key
                    best_seq = candidate
    if best_key is None:
        return None
    return -best_key[0], best_seq


def ter(
    hyp: Sequence[str],
    ref: Sequence[str],
    enable_shifts: bool = True,
    max_shift_span: int = MAX_SHIFT_SPAN,
    max_shift_dist: int = MAX_SHIFT_DIST,
    backend: str | None = None,
) -> TerResult:
    """TER alignment of one sentence pair.

    ``enable_shifts=False`` reduces the result to the plain counted edit
    distance, which is useful for testing and diagnostics.
    """
    if len(ref) == 0:
        raise EmptyReference("reference sentence is empty; HTER is undefined")
    kern = kernels.get(backend)
    hyp_ids, ref_ids = _intern(hyp, ref)

    shifts = 0
    if enable_shifts:
        base_cost = kern.edit_distance_cost(hyp_ids, ref_ids)
        while base_cost > 0:
            found = _best_shift(
                hyp_ids,
                ref_ids,
                base_cost,
                kern.edit_distance_cost,
                max_shift_span,
                max_shift_dist,
            )
            if found is None or found[0] <= 0:
                break
            delta, hyp_ids = found
            base_cost -= delta
            shifts += 1

    _, ins, dels, subs = kern.edit_distance_counts(hyp_ids, ref_ids)
    edits = EditCounts(ins, dels, subs, shifts)
    return TerResult(edits, len(ref), edits.total / len(ref))


def _score_pair(args) -> TerResult:
    hyp, ref, enable_shifts, max_span, max_dist, backend = args
    return ter(
        hyp,
        ref,
        enable_shifts=enable_shifts,
        max_shift_span=max_span,
        max_shift_dist=max_dist,
        backend=backend,
    )


def score_corpus(
    hyps: Sequence[Sequence[str]],
    refs: Sequence[Sequence[str]],
    enable_shifts: bool = True,
    max_shift_span: int = MAX_SHIFT_SPAN,
    max_shift_dist: int = MAX_SHIFT_DIST,
    backend: str | None = None,
    jobs: int = 1,
) -> list[TerResult]:
    """Element-wise :func:`ter` over parallel hypothesis/reference lists."""
    if len(hyps) != len(refs):
        raise LengthMismatch(
            f"corpus sizes differ: {len(hyps)} hypotheses vs {len(refs)} references"
        )
    for i, ref in enumerate(refs):
        if len(ref) == 0:
            raise EmptyReference(f"reference at line {i + 1} is empty")
    work = [
        (list(h), list(r), enable_shifts, max_shift_span, max_shift_dist, backend)
        for h, r in zip(hyps, refs)
    ]
    if jobs <= 1 or len(work) < 2:
        return [_score_pair(item) for item in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_score_pair, work, chunksize=max(1, len(work) // (jobs * 4))))
