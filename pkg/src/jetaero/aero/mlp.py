"""
Fully connected network for the aerodynamic force areas.

Layer i computes Z_i = A_{i-1} W_i^T + b_i with W_i of shape (n_i, n_{i-1});
hidden layers apply ReLU and, in training mode, inverted dropout. Inputs are
standardized and outputs de-standardized with vectors stored in the model,
so the loss and every gradient are in raw output units.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from jetaero.errors import DimensionMismatchError

TRAIN = "train"
EVAL = "eval"


@dataclass(frozen=True)
class MlpArch:
    input_dim: int = 22
    output_dim: int = 39
    n_hidden: int = 9
    width: int = 64
    dropout: float = 0.10

    def __post_init__(self):
        if min(self.input_dim, self.output_dim, self.width) <= 0 or self.n_hidden < 0:
            raise ValueError(f"invalid architecture {self}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {self.dropout}")

    @classmethod
    def full_scale(cls, input_dim: int = 22, output_dim: int = 39) -> "MlpArch":
        """Nine hidden layers of 1048 units."""
        return cls(input_dim=input_dim, output_dim=output_dim, n_hidden=9, width=1048)

    @property
    def dims(self) -> List[int]:
        return [self.input_dim] + [self.width] * self.n_hidden + [self.output_dim]


@dataclass(eq=False)
class Mlp:
    arch: MlpArch
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    input_mean: np.ndarray = None
    input_scale: np.ndarray = None
    output_mean: np.ndarray = None
    output_scale: np.ndarray = None

    def __post_init__(self):
        dims = self.arch.dims
        if len(self.weights) != len(dims) - 1 or len(self.biases) != len(dims) - 1:
            raise DimensionMismatchError(f"expected {len(dims) - 1} layers, got {len(self.weights)}")
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.shape != (dims[i + 1], dims[i]) or b.shape != (dims[i + 1],):
                raise DimensionMismatchError(
                    f"layer {i}: expected W {(dims[i + 1], dims[i])} and b {(dims[i + 1],)}, "
                    f"got {W.shape} and {b.shape}")
        if self.input_mean is None:
            self.input_mean = np.zeros(self.arch.input_dim)
            self.input_scale = np.ones(self.arch.input_dim)
        if self.output_mean is None:
            self.output_mean = np.zeros(self.arch.output_dim)
            self.output_scale = np.ones(self.arch.output_dim)

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def params(self) -> List[np.ndarray]:
        """Weights and biases interleaved: W0, b0, W1, b1, ..."""
        out = []
        for W, b in zip(self.weights, self.biases):
            out.extend([W, b])
        return out

    def with_params(self, params: List[np.ndarray]) -> "Mlp":
        return Mlp(self.arch, [p.copy() for p in params[0::2]], [p.copy() for p in params[1::2]],
                   self.input_mean, self.input_scale, self.output_mean, self.output_scale)

    def copy(self) -> "Mlp":
        return self.with_params(self.params)


@dataclass
class ForwardCache:
    """Activations and dropout masks of one forward pass, consumed by backward."""
    activations: List[np.ndarray]
    pre_activations: List[np.ndarray]
    masks: List[Optional[np.ndarray]]
    output: np.ndarray


def mlp_init(arch: MlpArch, seed: int = 0) -> Mlp:
    """He-uniform weights in [-sqrt(6/fan_in), sqrt(6/fan_in)] and zero biases."""
    rng = np.random.default_rng(seed)
    dims = arch.dims
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Mlp(arch, weights, biases)


def _as_batch(mlp: Mlp, x: np.ndarray) -> Tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    batch = x[None, :] if single else x
    if batch.ndim != 2 or batch.shape[1] != mlp.arch.input_dim:
        raise DimensionMismatchError(f"network expects inputs of width {mlp.arch.input_dim}, got shape {x.shape}")
    return batch, single


def forward_cached(mlp: Mlp, x: np.ndarray, mode: str = EVAL,
                   rng: Optional[np.random.Generator] = None) -> ForwardCache:
    """
    Forward pass that keeps what backward needs.

    Args:
        x: (N, input_dim)
        mode: 'train' applies dropout with masks drawn from `rng`
    """
    batch, _ = _as_batch(mlp, x)
    if mode not in (TRAIN, EVAL):
        raise ValueError(f"mode must be '{TRAIN}' or '{EVAL}', got '{mode}'")
    p = mlp.arch.dropout
    dropping = mode == TRAIN and p > 0.0
    if dropping and rng is None:
        raise ValueError("training-mode forward needs a random generator")

    a = (batch - mlp.input_mean) / mlp.input_scale
    activations, pre_activations, masks = [a], [], []
    last = mlp.n_layers - 1
    for i, (W, b) in enumerate(zip(mlp.weights, mlp.biases)):
        z = a @ W.T + b
        pre_activations.append(z)
        if i == last:
            a = z
            masks.append(None)
        else:
            a = np.maximum(z, 0.0)
            mask = None
            if dropping:
                mask = (rng.random(a.shape) >= p) / (1.0 - p)
                a = a * mask
            masks.append(mask)
        activations.append(a)
    output = a * mlp.output_scale + mlp.output_mean
    return ForwardCache(activations, pre_activations, masks, output)


def forward(mlp: Mlp, x: np.ndarray, mode: str = EVAL, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    Network output for one input (input_dim,) or a batch (N, input_dim).

    Raises:
        DimensionMismatchError: If the input width differs from the architecture
    """
    batch, single = _as_batch(mlp, x)
    y = forward_cached(mlp, batch, mode, rng).output
    return y[0] if single else y


def loss_mse(pred: np.ndarray, target: np.ndarray) -> float:
    """(1/N) sum_n ||pred_n - target_n||^2; a 1-D pair counts as one sample."""
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.shape != target.shape:
        raise DimensionMismatchError(f"prediction shape {pred.shape} differs from target shape {target.shape}")
    n = 1 if pred.ndim <= 1 else pred.shape[0]
    return float(np.sum((pred - target) ** 2) / n)


def backward(mlp: Mlp, cache: ForwardCache, target: np.ndarray) -> List[np.ndarray]:
    """
    Exact MSE gradient for the masks recorded in `cache`.

    Returns:
        Gradients in the order of `Mlp.params` (dW0, db0, dW1, db1, ...)

    Raises:
        DimensionMismatchError: If the cache does not belong to this network
            or the target shape differs from the output
    """
    target = np.asarray(target, dtype=float).reshape(cache.output.shape)
    if len(cache.masks) != mlp.n_layers or len(cache.activations) != mlp.n_layers + 1:
        raise DimensionMismatchError("forward cache does not match the network layers")
    for i, mask in enumerate(cache.masks[:-1]):
        if mask is not None and mask.shape != cache.pre_activations[i].shape:
            raise DimensionMismatchError(f"dropout mask of layer {i} does not match its activation")

    n = cache.output.shape[0]
    delta = 2.0 * (cache.output - target) / n * mlp.output_scale
    grads: List[np.ndarray] = [None] * (2 * mlp.n_layers)
    for i in range(mlp.n_layers - 1, -1, -1):
        grads[2 * i] = delta.T @ cache.activations[i]
        grads[2 * i + 1] = delta.sum(axis=0)
        if i == 0:
            break
        delta = delta @ mlp.weights[i]
        mask = cache.masks[i - 1]
        if mask is not None:
            delta = delta * mask
        delta = delta * (cache.pre_activations[i - 1] > 0.0)
    return grads


@dataclass
class AdamState:
    """First and second moment estimates, one array per parameter."""
    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)

    @classmethod
    def zeros_like(cls, params: List[np.ndarray]) -> "AdamState":
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


def adam_step(params: List[np.ndarray], grads: List[np.ndarray], state: AdamState, t: int,
              lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
              eps: float = 1e-8) -> Tuple[List[np.ndarray], AdamState]:
    """
    One bias-corrected Adam update; inputs are left untouched.

    Args:
        t: Step number, starting at 1
    """
    if t < 1:
        raise ValueError(f"Adam step number must be >= 1, got {t}")
    new_params, new_m, new_v = [], [], []
    correction1 = 1.0 - beta1 ** t
    correction2 = 1.0 - beta2 ** t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        new_params.append(p - lr * (m / correction1) / (np.sqrt(v / correction2) + eps))
        new_m.append(m)
        new_v.append(v)
    return new_params, AdamState(new_m, new_v)
