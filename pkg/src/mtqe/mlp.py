"""Multi-layer perceptron regression with 1 or 4 outputs.

Written from scratch on numpy: Glorot-uniform init, relu/tanh hidden
layers, identity output, mean-squared-error loss with an L2 penalty on
the weights, mini-batch adam updates.  Training is deterministic for a
fixed seed; all randomness flows through one generator.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionMismatch, NonFiniteLoss


def _relu(z):
    return np.maximum(z, 0.0)


def _relu_grad(z):
    return (z > 0.0).astype(z.dtype)


def _tanh(z):
    return np.tanh(z)


def _tanh_grad(z):
    t = np.tanh(z)
    return 1.0 - t * t


ACTIVATIONS = {"relu": (_relu, _relu_grad), "tanh": (_tanh, _tanh_grad)}


@dataclass(frozen=True)
class MlpConfig:
    hidden_sizes: tuple[int, ...] = (100,)
    activation: str = "relu"
    alpha: float = 1e-4          # L2 penalty strength
    tol: float = 1e-4            # epoch-to-epoch loss improvement threshold
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    max_epochs: int = 500
    batch_size: int = 200
    seed: int = 42
    n_outputs: int = 1
    shuffle: bool = True

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        if not self.hidden_sizes or any(h < 1 for h in self.hidden_sizes):
            raise ConfigError("hidden_sizes must be a non-empty tuple of positive ints")
        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}")
        if self.n_outputs not in (1, 4):
            raise ConfigError("n_outputs must be 1 or 4")
        if self.alpha < 0 or self.tol <= 0 or self.learning_rate <= 0:
            raise ConfigError("alpha must be >= 0; tol and learning_rate > 0")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ConfigError("beta1/beta2 must lie in (0, 1)")

    def to_dict(self) -> dict:
        return {
            "hidden_sizes": list(self.hidden_sizes),
            "activation": self.activation,
            "alpha": self.alpha,
            "tol": self.tol,
            "learning_rate": self.learning_rate,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "adam_eps": self.adam_eps,
            "max_epochs": self.max_epochs,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "n_outputs": self.n_outputs,
            "shuffle": self.shuffle,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MlpConfig":
        doc = dict(doc)
        doc["hidden_sizes"] = tuple(doc["hidden_sizes"])
        return cls(**doc)


@dataclass
class MlpModel:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    config: MlpConfig
    loss_trace: list[float] = field(default_factory=list)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    def to_dict(self) -> dict:
        return {
            "type": "mlp",
            "config": self.config.to_dict(),
            "shapes": [list(w.shape) for w in self.weights],
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "loss_trace": list(self.loss_trace),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MlpModel":
        return cls(
            weights=[np.asarray(w, dtype=np.float64) for w in doc["weights"]],
            biases=[np.asarray(b, dtype=np.float64) for b in doc["biases"]],
            config=MlpConfig.from_dict(doc["config"]),
            loss_trace=list(doc.get("loss_trace", [])),
        )


def _init_params(cfg: MlpConfig, input_dim: int, rng: np.random.Generator):
    sizes = (input_dim,) + cfg.hidden_sizes + (cfg.n_outputs,)
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def init_mlp(cfg: MlpConfig, input_dim: int) -> MlpModel:
    """Glorot-uniform weights and zero biases, deterministic per seed."""
    if input_dim < 1:
        raise ConfigError("input_dim must be >= 1")
    rng = np.random.default_rng(cfg.seed)
    weights, biases = _init_params(cfg, input_dim, rng)
    return MlpModel(weights=weights, biases=biases, config=cfg)


def _forward_states(weights, biases, activation: str, X):
    """Pre-activations and activations per layer; last layer is linear."""
    act, _ = ACTIVATIONS[activation]
    zs = []
    activations = [X]
    out = X
    last = len(weights) - 1
    for idx, (w, b) in enumerate(zip(weights, biases)):
        z = out @ w + b
        zs.append(z)
        out = z if idx == last else act(z)
        activations.append(out)
    return zs, activations


def forward(model: MlpModel, X) -> np.ndarray:
    """Predictions of shape (n, n_outputs)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise DimensionMismatch(
            f"input has shape {X.shape}, model expects (n, {model.input_dim})"
        )
    _, activations = _forward_states(model.weights, model.biases, model.config.activation, X)
    return activations[-1]


def _loss_and_grads(weights, biases, cfg: MlpConfig, X, Y):
    n = X.shape[0]
    zs, activations = _forward_states(weights, biases, cfg.activation, X)
    pred = activations[-1]
    resid = pred - Y
    data_loss = float(np.mean(resid**2))
    penalty = cfg.alpha / (2.0 * n) * sum(float(np.sum(w * w)) for w in weights)

    _, act_grad = ACTIVATIONS[cfg.activation]
    d_z = 2.0 * resid / resid.size
    grad_w = [None] * len(weights)
    grad_b = [None] * len(biases)
    for layer in range(len(weights) - 1, -1, -1):
        grad_w[layer] = activations[layer].T @ d_z + (cfg.alpha / n) * weights[layer]
        grad_b[layer] = d_z.sum(axis=0)
        if layer > 0:
            d_z = (d_z @ weights[layer].T) * act_grad(zs[layer - 1])
    return data_loss + penalty, grad_w, grad_b


def _check_xy(X, Y, input_dim: int, n_outputs: int):
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    if X.ndim != 2 or X.shape[1] != input_dim:
        raise DimensionMismatch(f"X has shape {X.shape}, expected (n, {input_dim})")
    if Y.shape != (X.shape[0], n_outputs):
        raise DimensionMismatch(
            f"Y has shape {Y.shape}, expected ({X.shape[0]}, {n_outputs})"
        )
    return X, Y


def loss_and_gradients(model: MlpModel, X, Y):
    """Training objective and its gradients at the model's parameters.

    Objective: mean squared error over all outputs plus
    ``alpha/(2n) * sum(weights**2)`` (biases are not penalized).
    """
    X, Y = _check_xy(X, Y, model.input_dim, model.config.n_outputs)
    loss, grad_w, grad_b = _loss_and_grads(model.weights, model.biases, model.config, X, Y)
    return loss, (grad_w, grad_b)


def adam_update(param, grad, m, v, t: int, cfg: MlpConfig):
    """One adam step with bias correction; returns updated (param, m, v)."""
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad * grad
    m_hat = m / (1.0 - cfg.beta1**t)
    v_hat = v / (1.0 - cfg.beta2**t)
    param = param - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)
    return param, m, v


def train(cfg: MlpConfig, X, Y) -> MlpModel:
    """Mini-batch adam training until the loss stops improving.

    Stops when the epoch-to-epoch objective change stays below ``tol``
    for 2 consecutive epochs, or at ``max_epochs``.  The returned model
    carries the per-epoch objective values in ``loss_trace``.
    """
    X = np.asarray(X, dtype=np.float64)
    X, Y = _check_xy(X, Y, X.shape[1], cfg.n_outputs)
    n = X.shape[0]
    batch_size = max(1, min(cfg.batch_size, n))

    rng = np.random.default_rng(cfg.seed)
    weights, biases = _init_params(cfg, X.shape[1], rng)
    m_w = [np.zeros_like(w) for w in weights]
    v_w = [np.zeros_like(w) for w in weights]
    m_b = [np.zeros_like(b) for b in biases]
    v_b = [np.zeros_like(b) for b in biases]

    trace: list[float] = []
    t = 0
    calm_epochs = 0
    for _ in range(cfg.max_epochs):
        order = rng.permutation(n) if cfg.shuffle else np.arange(n)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            _, grad_w, grad_b = _loss_and_grads(weights, biases, cfg, X[batch], Y[batch])
            t += 1
            for layer in range(len(weights)):
                weights[layer], m_w[layer], v_w[layer] = adam_update(
                    weights[layer], grad_w[layer], m_w[layer], v_w[layer], t, cfg
                )
                biases[layer], m_b[layer], v_b[layer] = adam_update(
                    biases[layer], grad_b[layer], m_b[layer], v_b[layer], t, cfg
                )
        epoch_loss, _, _ = _loss_and_grads(weights, biases, cfg, X, Y)
        if not np.isfinite(epoch_loss):
            raise NonFiniteLoss(
                f"training diverged at epoch {len(trace) + 1}: loss={epoch_loss}"
            )
        trace.append(epoch_loss)
        if len(trace) >= 2 and abs(trace[-2] - trace[-1]) < cfg.tol:
            calm_epochs += 1
            if calm_epochs >= 2:
                break
        else:
            calm_epochs = 0
    return MlpModel(weights=weights, biases=biases, config=cfg, loss_trace=trace)
