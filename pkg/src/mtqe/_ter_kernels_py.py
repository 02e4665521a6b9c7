"""Pure-Python edit-distance kernels.

Fallback for :mod:`mtqe._ter_kernels` (the Cython build of the same two
functions).  Both implementations must stay behaviourally identical; the
test suite cross-checks them on random inputs.

Sequences are compared by token id (any ints), unit cost per operation.
Among minimal-cost alignments the one with the most substitutions is
preferred, i.e. a substitution is never reported as an insertion+deletion
pair.  Given the cost and the substitution count, the insertion and
deletion counts are fixed by the length identity
``dels - ins = len(hyp) - len(ref)``.
"""

IMPLEMENTATION = "python"


def edit_distance_cost(hyp, ref):
    """Minimal number of unit-cost edits turning ``hyp`` into ``ref``."""
    hyp = list(hyp)
    ref = list(ref)
    m = len(hyp)
    n = len(ref)
    if m == 0:
        return n
    if n == 0:
        return m
    prev = list(range(n + 1))
    cur = [0] * (n + 1)
    for i in range(1, m + 1):
        cur[0] = i
        hi = hyp[i - 1]
        for j in range(1, n + 1):
            best = prev[j - 1] + (hi != ref[j - 1])
            dele = prev[j] + 1
            if dele < best:
                best = dele
            ins = cur[j - 1] + 1
            if ins < best:
                best = ins
            cur[j] = best
        prev, cur = cur, prev
    return prev[n]


def edit_distance_counts(hyp, ref):
    """Counted minimal alignment of ``hyp`` against ``ref``.

    Returns ``(cost, insertions, deletions, substitutions)`` with
    ``cost = insertions + deletions + substitutions``.
    """
    hyp = list(hyp)
    ref = list(ref)
    m = len(hyp)
    n = len(ref)
    if m == 0:
        return n, n, 0, 0
    if n == 0:
        return m, 0, m, 0
    # Per cell: cost of the best alignment and its substitution count
    # (maximised among equal-cost alignments).
    prev_c = list(range(n + 1))
    prev_s = [0] * (n + 1)
    cur_c = [0] * (n + 1)
    cur_s = [0] * (n + 1)
    for i in range(1, m + 1):
        cur_c[0] = i
        cur_s[0] = 0
        hi = hyp[i - 1]
        for j in range(1, n + 1):
            if hi == ref[j - 1]:
                bc = prev_c[j - 1]
                bs = prev_s[j - 1]
            else:
                bc = prev_c[j - 1] + 1
                bs = prev_s[j - 1] + 1
            dc = prev_c[j] + 1
            if dc < bc or (dc == bc and prev_s[j] > bs):
                bc = dc
                bs = prev_s[j]
            ic = cur_c[j - 1] + 1
            if ic < bc or (ic == bc and cur_s[j - 1] > bs):
                bc = ic
                bs = cur_s[j - 1]
            cur_c[j] = bc
            cur_s[j] = bs
        prev_c, cur_c = cur_c, prev_c
        prev_s, cur_s = cur_s, prev_s
    cost = prev_c[n]
    subs = prev_s[n]
    dels = (cost - subs + m - n) // 2
    ins = cost - subs - dels
    return cost, ins, dels, subs
