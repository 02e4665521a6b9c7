"""Epsilon-insensitive support vector regression with an RBF kernel.

The dual problem is solved by sequential minimal optimization in the
standard 2n-variable form: stacked lower/upper tube multipliers with
constraint signs +1/-1, maximal-violating-pair working set selection,
analytic two-variable updates with box clipping.  The solver is fully
deterministic (ties resolve to the lowest index).

Dual in terms of the net coefficients beta = alpha - alpha*:

    minimize  0.5 beta' K beta - y' beta + epsilon * sum |beta|
    s.t.      sum(beta) = 0,   -C <= beta_i <= C
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionMismatch, NonFiniteInput

_TAU = 1e-12


@dataclass(frozen=True)
class SvrConfig:
    c: float = 1.0
    epsilon: float = 0.1
    gamma: float = 0.01
    tol_kkt: float = 1e-3
    max_passes: int | None = None  # None: 10 * n_samples

    def __post_init__(self):
        if self.c <= 0 or self.gamma <= 0:
            raise ConfigError("c and gamma must be positive")
        if self.epsilon < 0 or self.tol_kkt <= 0:
            raise ConfigError("epsilon must be >= 0 and tol_kkt > 0")

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "epsilon": self.epsilon,
            "gamma": self.gamma,
            "tol_kkt": self.tol_kkt,
            "max_passes": self.max_passes,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SvrConfig":
        return cls(**doc)


@dataclass
class SvrModel:
    support_vectors: np.ndarray
    dual_coefficients: np.ndarray
    bias: float
    config: SvrConfig
    n_iter: int = 0
    converged: bool = True

    def to_dict(self) -> dict:
        return {
            "type": "svr",
            "config": self.config.to_dict(),
            "support_vectors": self.support_vectors.tolist(),
            "dual_coefficients": self.dual_coefficients.tolist(),
            "bias": self.bias,
            "n_iter": self.n_iter,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SvrModel":
        return cls(
            support_vectors=np.asarray(doc["support_vectors"], dtype=np.float64),
            dual_coefficients=np.asarray(doc["dual_coefficients"], dtype=np.float64),
            bias=float(doc["bias"]),
            config=SvrConfig.from_dict(doc["config"]),
            n_iter=int(doc.get("n_iter", 0)),
            converged=bool(doc.get("converged", True)),
        )


def rbf_kernel(a, b, gamma: float) -> float:
    """exp(-gamma * ||a - b||^2) for two feature rows."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"kernel arguments differ in shape: {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.exp(-gamma * np.dot(diff, diff)))


def rbf_gram(A, B, gamma: float) -> np.ndarray:
    """Kernel matrix K[i, j] = rbf(A[i], B[j])."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(
            f"feature dimensions differ: {A.shape[1]} vs {B.shape[1]}"
        )
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


@dataclass
class SmoResult:
    beta: np.ndarray
    bias: float
    n_iter: int
    converged: bool
    kkt_gap: float


def _neg_sg(K, y, z, epsilon):
    """-s_t * gradient_t over the 2n stacked variables."""
    n = y.shape[0]
    beta = z[:n] - z[n:]
    q = K @ beta
    # alpha part (s=+1): G = q + eps - y; alpha* part (s=-1): G = -q + eps + y
    return np.concatenate([y - epsilon - q, y + epsilon - q])


def _up_low_masks(z, c, n):
    # I_up: can increase along +s direction; I_low: can decrease.
    s_pos = np.zeros(2 * n, dtype=bool)
    s_pos[:n] = True
    below_c = z < c
    above_0 = z > 0.0
    in_up = (below_c & s_pos) | (above_0 & ~s_pos)
    in_low = (below_c & ~s_pos) | (above_0 & s_pos)
    return in_up, in_low


def smo_solve(
    K: np.ndarray,
    y: np.ndarray,
    c: float,
    epsilon: float,
    tol_kkt: float,
    max_iter: int,
) -> SmoResult:
    """SMO on the epsilon-SVR dual given a precomputed Gram matrix."""
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    z = np.zeros(2 * n)
    neg_sg = _neg_sg(K, y, z, epsilon)

    n_iter = 0
    converged = False
    gap = np.inf
    while n_iter < max_iter:
        in_up, in_low = _up_low_masks(z, c, n)
        up_vals = np.where(in_up, neg_sg, -np.inf)
        low_vals = np.where(in_low, neg_sg, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        gap = up_vals[i] - low_vals[j]
        if gap <= tol_kkt:
            converged = True
            break
        n_iter += 1

        ii, jj = i % n, j % n
        si = 1.0 if i < n else -1.0
        sj = 1.0 if j < n else -1.0
        kij = K[ii, jj]
        quad = K[ii, ii] + K[jj, jj] - 2.0 * kij
        if quad <= 0.0:
            quad = _TAU
        old_i, old_j = z[i], z[j]
        gi = -si * neg_sg[i]
        gj = -sj * neg_sg[j]

        if si != sj:
            delta = (-gi - gj) / quad
            diff = old_i - old_j
            zi = old_i + delta
            zj = old_j + delta
            if diff > 0.0:
                if zj < 0.0:
                    zj = 0.0
                    zi = diff
                if zi > c:
                    zi = c
                    zj = c - diff
            else:
                if zi < 0.0:
                    zi = 0.0
                    zj = -diff
                if zj > c:
                    zj = c
                    zi = c + diff
        else:
            delta = (gi - gj) / quad
            total = old_i + old_j
            zi = old_i - delta
            zj = old_j + delta
            if total > c:
                if zi > c:
                    zi = c
                    zj = total - c
                if zj > c:
                    zj = c
                    zi = total - c
            else:
                if zj < 0.0:
                    zj = 0.0
                    zi = total
                if zi < 0.0:
                    zi = 0.0
                    zj = total

        z[i] = zi
        z[j] = zj
        dz_i = zi - old_i
        dz_j = zj - old_j
        # neg_sg_t = -s_t G_t depends on q = K beta only; d(beta) columns:
        dq = K[:, ii] * (si * dz_i) + K[:, jj] * (sj * dz_j)
        neg_sg[:n] -= dq
        neg_sg[n:] -= dq

    in_up, in_low = _up_low_masks(z, c, n)
    free = (z > 0.0) & (z < c)
    if free.any():
        bias = float(np.mean(neg_sg[free]))
    else:
        hi = np.max(np.where(in_up, neg_sg, -np.inf))
        lo = np.min(np.where(in_low, neg_sg, np.inf))
        if np.isfinite(hi) and np.isfinite(lo):
            bias = float((hi + lo) / 2.0)
        else:
            bias = 0.0
    beta = z[:n] - z[n:]
    return SmoResult(beta=beta, bias=bias, n_iter=n_iter, converged=converged, kkt_gap=float(gap))


def dual_objective(K, y, beta, epsilon: float) -> float:
    """Value of the beta-form dual objective (lower is better)."""
    beta = np.asarray(beta, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return float(
        0.5 * beta @ (K @ beta) - y @ beta + epsilon * np.sum(np.abs(beta))
    )


def kkt_residuals(K, y, beta, bias: float, c: float, epsilon: float) -> np.ndarray:
    """Per-variable KKT violations of a candidate dual solution.

    All residuals of a converged solver run are below its tol_kkt.
    """
    beta = np.asarray(beta, dtype=np.float64)
    n = beta.shape[0]
    z = np.concatenate([np.maximum(beta, 0.0), np.maximum(-beta, 0.0)])
    neg_sg = _neg_sg(K, y, z, epsilon)
    in_up, in_low = _up_low_masks(z, c, n)
    res = np.zeros(2 * n)
    res[in_up] = np.maximum(res[in_up], neg_sg[in_up] - bias)
    res[in_low] = np.maximum(res[in_low], bias - neg_sg[in_low])
    return np.maximum(res, 0.0)


def train_svr(cfg: SvrConfig, X, y) -> SvrModel:
    """Fit an epsilon-SVR on (X, y); deterministic for fixed inputs."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"{X.shape[0]} rows vs {y.shape[0]} targets")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise NonFiniteInput("training data contains NaN or infinite values")
    n = X.shape[0]
    max_iter = cfg.max_passes if cfg.max_passes is not None else 10 * n
    K = rbf_gram(X, X, cfg.gamma)
    result = smo_solve(K, y, cfg.c, cfg.epsilon, cfg.tol_kkt, max_iter)
    keep = result.beta != 0.0
    return SvrModel(
        support_vectors=X[keep],
        dual_coefficients=result.beta[keep],
        bias=result.bias,
        config=cfg,
        n_iter=result.n_iter,
        converged=result.converged,
    )


def predict_svr(model: SvrModel, X) -> np.ndarray:
    """sum_i coef_i * k(sv_i, x) + bias for each row of X."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if model.support_vectors.shape[0] == 0:
        return np.full(X.shape[0], model.bias)
    if X.shape[1] != model.support_vectors.shape[1]:
        raise DimensionMismatch(
            f"input has {X.shape[1]} columns, model expects {model.support_vectors.shape[1]}"
        )
    K = rbf_gram(X, model.support_vectors, model.config.gamma)
    return K @ model.dual_coefficients + model.bias
