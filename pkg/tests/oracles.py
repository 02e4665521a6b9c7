"""Independent reference implementations used as test oracles.

Deliberately written from the definitions (recursive enumeration,
breadth-first search, projected gradient) rather than sharing any code
with the library, so they can catch bugs in the optimized paths.
"""

from functools import lru_cache

import numpy as np


def alignment_oracle(hyp, ref):
    """Counted minimal alignment by recursive enumeration.

    Minimizes cost, then prefers substitutions over insertion+deletion
    pairs.  Returns (cost, ins, dels, subs).
    """
    hyp = tuple(hyp)
    ref = tuple(ref)

    @lru_cache(maxsize=None)
    def best(i, j):
        if i == len(hyp) and j == len(ref):
            return (0, 0)
        options = []
        if i < len(hyp) and j < len(ref):
            cost, neg_subs = best(i + 1, j + 1)
            if hyp[i] == ref[j]:
                options.append((cost, neg_subs))
            else:
                options.append((cost + 1, neg_subs - 1))
        if i < len(hyp):
            cost, neg_subs = best(i + 1, j)
            options.append((cost + 1, neg_subs))
        if j < len(ref):
            cost, neg_subs = best(i, j + 1)
            options.append((cost + 1, neg_subs))
        return min(options)

    cost, neg_subs = best(0, 0)
    subs = -neg_subs
    dels = (cost - subs + len(hyp) - len(ref)) // 2
    ins = cost - subs - dels
    return cost, ins, dels, subs


def levenshtein_cost(a, b):
    """Plain DP edit distance, cost only."""
    a = list(a)
    b = list(b)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i]
        for j, y in enumerate(b, start=1):
            cur.append(min(prev[j - 1] + (x != y), prev[j] + 1, cur[-1] + 1))
        prev = cur
    return prev[-1]


def shift_oracle_cost(hyp, ref):
    """Optimal TER cost over all shift sequences, by exhaustive search.

    Explores every sequence reachable with k block moves (any span to
    any position, one edit each) for k below the best total found so
    far, scoring each state with the plain edit distance.  Tractable
    for short sequences only.
    """
    best = levenshtein_cost(hyp, ref)
    start = tuple(hyp)
    seen = {start: 0}
    frontier = [start]
    depth = 0
    while frontier and depth + 1 < best:
        depth += 1
        next_frontier = []
        for seq in frontier:
            m = len(seq)
            for s in range(m):
                for length in range(1, m - s + 1):
                    span = seq[s : s + length]
                    rest = seq[:s] + seq[s + length :]
                    for t in range(len(rest) + 1):
                        if t == s:
                            continue
                        child = rest[:t] + span + rest[t:]
                        prior = seen.get(child)
                        if prior is not None and prior <= depth:
                            continue
                        seen[child] = depth
                        total = depth + levenshtein_cost(child, ref)
                        if total < best:
                            best = total
                        next_frontier.append(child)
        frontier = next_frontier
    return best


def svr_dual_oracle(K, y, c, epsilon, max_iter=300_000, tol=1e-14):
    """Projected gradient on the 2n-variable epsilon-SVR dual.

    Returns the net coefficients beta.  The feasible set is the box
    [0, C]^2n intersected with the signed-sum-zero hyperplane; the
    projection solves for the hyperplane shift by bisection.
    """
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    signs = np.concatenate([np.ones(n), -np.ones(n)])
    eig_max = float(np.linalg.eigvalsh(K).max())
    step = 1.0 / max(2.0 * eig_max, 1e-9)

    def project(z):
        lo = -(c + np.abs(z).max() + 1.0)
        hi = -lo
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if signs @ np.clip(z - mid * signs, 0.0, c) > 0.0:
                lo = mid
            else:
                hi = mid
        return np.clip(z - 0.5 * (lo + hi) * signs, 0.0, c)

    def objective(z):
        beta = z[:n] - z[n:]
        return 0.5 * beta @ (K @ beta) + epsilon * z.sum() - y @ beta

    z = np.zeros(2 * n)
    previous = objective(z)
    stalls = 0
    for iteration in range(max_iter):
        beta = z[:n] - z[n:]
        q = K @ beta
        grad = np.concatenate([q + epsilon - y, -q + epsilon + y])
        z = project(z - step * grad)
        if iteration % 50 == 49:
            current = objective(z)
            if previous - current < tol:
                stalls += 1
                if stalls >= 4:
                    break
            else:
                stalls = 0
            previous = current
    return z[:n] - z[n:]
