# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython edit-distance kernels.

Compiled twin of :mod:`mtqe._ter_kernels_py`; see that module for the
semantics (minimal unit-cost alignment, substitutions preferred over
insertion+deletion pairs).  The TER shift search evaluates thousands of
candidate reorderings per sentence, each requiring one DP run, so this
inner loop dominates corpus scoring time.
"""

from libc.stdlib cimport free, malloc
from libc.stdint cimport int32_t

import numpy as np

IMPLEMENTATION = "cython"


def edit_distance_cost(hyp, ref):
    """Minimal number of unit-cost edits turning ``hyp`` into ``ref``."""
    cdef int32_t[::1] h = np.ascontiguousarray(hyp, dtype=np.int32)
    cdef int32_t[::1] r = np.ascontiguousarray(ref, dtype=np.int32)
    cdef Py_ssize_t m = h.shape[0]
    cdef Py_ssize_t n = r.shape[0]
    if m == 0:
        return int(n)
    if n == 0:
        return int(m)

    cdef int *prev = <int *> malloc((n + 1) * sizeof(int))
    cdef int *cur = <int *> malloc((n + 1) * sizeof(int))
    if prev == NULL or cur == NULL:
        free(prev)
        free(cur)
        raise MemoryError()

    cdef Py_ssize_t i, j
    cdef int best, cand, hi
    cdef int *tmp
    try:
        for j in range(n + 1):
            prev[j] = <int> j
        for i in range(1, m + 1):
            cur[0] = <int> i
            hi = h[i - 1]
            for j in range(1, n + 1):
                best = prev[j - 1] + (hi != r[j - 1])
                cand = prev[j] + 1
                if cand < best:
                    best = cand
                cand = cur[j - 1] + 1
                if cand < best:
                    best = cand
                cur[j] = best
            tmp = prev
            prev = cur
            cur = tmp
        return int(prev[n])
    finally:
        free(prev)
        free(cur)


def edit_distance_counts(hyp, ref):
    """Counted minimal alignment; returns (cost, ins, dels, subs)."""
    cdef int32_t[::1] h = np.ascontiguousarray(hyp, dtype=np.int32)
    cdef int32_t[::1] r = np.ascontiguousarray(ref, dtype=np.int32)
    cdef Py_ssize_t m = h.shape[0]
    cdef Py_ssize_t n = r.shape[0]
    if m == 0:
        return int(n), int(n), 0, 0
    if n == 0:
        return int(m), 0, int(m), 0

    cdef int *prev_c = <int *> malloc((n + 1) * sizeof(int))
    cdef int *prev_s = <int *> malloc((n + 1) * sizeof(int))
    cdef int *cur_c = <int *> malloc((n + 1) * sizeof(int))
    cdef int *cur_s = <int *> malloc((n + 1) * sizeof(int))
    if prev_c == NULL or prev_s == NULL or cur_c == NULL or cur_s == NULL:
        free(prev_c)
        free(prev_s)
        free(cur_c)
        free(cur_s)
        raise MemoryError()

    cdef Py_ssize_t i, j
    cdef int bc, bs, cc, hi
    cdef int cost, subs, dels, ins
    cdef int *tmp
    try:
        for j in range(n + 1):
            prev_c[j] = <int> j
            prev_s[j] = 0
        for i in range(1, m + 1):
            cur_c[0] = <int> i
            cur_s[0] = 0
            hi = h[i - 1]
            for j in range(1, n + 1):
                if hi == r[j - 1]:
                    bc = prev_c[j - 1]
                    bs = prev_s[j - 1]
                else:
                    bc = prev_c[j - 1] + 1
                    bs = prev_s[j - 1] + 1
                cc = prev_c[j] + 1
                if cc < bc or (cc == bc and prev_s[j] > bs):
                    bc = cc
                    bs = prev_s[j]
                cc = cur_c[j - 1] + 1
                if cc < bc or (cc == bc and cur_s[j - 1] > bs):
                    bc = cc
                    bs = cur_s[j - 1]
                cur_c[j] = bc
                cur_s[j] = bs
            tmp = prev_c
            prev_c = cur_c
            cur_c = tmp
            tmp = prev_s
            prev_s = cur_s
            cur_s = tmp
        cost = prev_c[n]
        subs = prev_s[n]
        dels = (cost - subs + <int> m - <int> n) // 2
        ins = cost - subs - dels
        return int(cost), int(ins), int(dels), int(subs)
    finally:
        free(prev_c)
        free(prev_s)
        free(cur_c)
        free(cur_s)
