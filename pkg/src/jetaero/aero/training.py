"""
Mini-batch Adam training of the force-area network and force prediction.

Batch order and dropout masks come from two generators spawned from the
configured seed, so a run is reproducible bit for bit.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from jetaero.aero.axisym import SPEED_GUARD, AeroFactors
from jetaero.aero.mlp import (
    TRAIN, AdamState, Mlp, adam_step, backward, forward, forward_cached, loss_mse,
)
from jetaero.dataset.samples import AeroDataset
from jetaero.errors import DimensionMismatchError, NonFiniteLossError
from jetaero.model.kinematics import Kinematics
from jetaero.model.robot import JointState, RobotModel
from jetaero.utils.helpers import format_float
from jetaero.utils.logger import get_logger, ic

logger = get_logger(__name__)

FULL_SCALE_EPOCHS = 60000


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 2000
    batch_size: int = 128
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    standardize: bool = True

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch size must be >= 1, got {self.batch_size}")
        if self.learning_rate < 0:
            raise ValueError(f"learning rate must be >= 0, got {self.learning_rate}")


@dataclass
class TrainingHistory:
    """Eval-mode MSE per epoch plus the values before the first update."""
    initial_train_mse: float = float("nan")
    initial_val_mse: float = float("nan")
    train_mse: List[float] = field(default_factory=list)
    val_mse: List[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.train_mse)

    def to_csv(self) -> str:
        lines = ["epoch,train_mse,val_mse",
                 f"0,{format_float(self.initial_train_mse)},{format_float(self.initial_val_mse)}"]
        for epoch, (tr, va) in enumerate(zip(self.train_mse, self.val_mse), start=1):
            lines.append(f"{epoch},{format_float(tr)},{format_float(va)}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv(), encoding="utf-8")


def fit_standardization(mlp: Mlp, x: np.ndarray, y: np.ndarray) -> Mlp:
    """Copy of `mlp` with per-feature mean/std of the training arrays; constant features keep scale 1."""
    fitted = mlp.copy()
    x_std = x.std(axis=0)
    y_std = y.std(axis=0)
    fitted.input_mean = x.mean(axis=0)
    fitted.input_scale = np.where(x_std > 1e-12, x_std, 1.0)
    fitted.output_mean = y.mean(axis=0)
    fitted.output_scale = np.where(y_std > 1e-12, y_std, 1.0)
    return fitted


def _check_dims(mlp: Mlp, x: np.ndarray, y: np.ndarray, what: str) -> None:
    if x.shape[0] == 0:
        raise DimensionMismatchError(f"{what} set is empty")
    if x.shape[1] != mlp.arch.input_dim or y.shape[1] != mlp.arch.output_dim:
        raise DimensionMismatchError(
            f"{what} set has {x.shape[1]} inputs and {y.shape[1]} outputs, network expects "
            f"{mlp.arch.input_dim} and {mlp.arch.output_dim}")


def _checked(value: float, epoch: int) -> float:
    if not np.isfinite(value):
        raise NonFiniteLossError(epoch, value)
    return value


def train_arrays(mlp: Mlp, x_train: np.ndarray, y_train: np.ndarray, x_val: np.ndarray, y_val: np.ndarray,
                 cfg: TrainConfig) -> Tuple[Mlp, TrainingHistory]:
    """
    Train on explicit arrays; see `train`.

    Raises:
        DimensionMismatchError: If a set is empty or its widths differ from the network
        NonFiniteLossError: When a batch or epoch loss is NaN/inf
    """
    _check_dims(mlp, x_train, y_train, "training")
    _check_dims(mlp, x_val, y_val, "validation")
    model = fit_standardization(mlp, x_train, y_train) if cfg.standardize else mlp.copy()

    batch_seq, dropout_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    batch_rng = np.random.default_rng(batch_seq)
    dropout_rng = np.random.default_rng(dropout_seq)

    history = TrainingHistory(
        initial_train_mse=_checked(loss_mse(forward(model, x_train), y_train), 0),
        initial_val_mse=_checked(loss_mse(forward(model, x_val), y_val), 0),
    )
    logger.info(f"Training {model.arch} on {x_train.shape[0]} samples for {cfg.epochs} epochs "
                f"(initial train mse {history.initial_train_mse:.4e})")

    params = model.params
    state = AdamState.zeros_like(params)
    step = 0
    n = x_train.shape[0]
    for epoch in range(1, cfg.epochs + 1):
        order = batch_rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            cache = forward_cached(model, x_train[idx], TRAIN, dropout_rng)
            _checked(loss_mse(cache.output, y_train[idx]), epoch)
            grads = backward(model, cache, y_train[idx])
            step += 1
            params, state = adam_step(params, grads, state, step, cfg.learning_rate,
                                      cfg.beta1, cfg.beta2, cfg.eps)
            model = model.with_params(params)
        history.train_mse.append(_checked(loss_mse(forward(model, x_train), y_train), epoch))
        history.val_mse.append(_checked(loss_mse(forward(model, x_val), y_val), epoch))
        if epoch % 100 == 0 or epoch == cfg.epochs:
            logger.debug(f"epoch {epoch}: train {history.train_mse[-1]:.4e} val {history.val_mse[-1]:.4e}")
    ic(step)
    logger.info(f"Training finished: train mse {history.train_mse[-1]:.4e}, val mse {history.val_mse[-1]:.4e}")
    return model, history


def train(mlp: Mlp, train_ds: AeroDataset, val_ds: AeroDataset, cfg: TrainConfig) -> Tuple[Mlp, TrainingHistory]:
    """
    Train on dataset inputs (d, s) and link-major force-area targets.

    Returns:
        (trained network, history)
    """
    return train_arrays(mlp, train_ds.inputs, train_ds.targets, val_ds.inputs, val_ds.targets, cfg)


def predict_force_areas_mlp(mlp: Mlp, ds: AeroDataset) -> np.ndarray:
    """Network force areas for every dataset row, (N, n_links, 3)."""
    return forward(mlp, ds.inputs).reshape(len(ds), -1, 3)


def predict_link_forces_mlp(model: RobotModel, mlp: Mlp, state: JointState, v_w: np.ndarray,
                            factors: AeroFactors, kin: Optional[Kinematics] = None) -> np.ndarray:
    """
    World-frame forces on the aerodynamic links from the network, (n_aero_links, 3).

    The network sees the base-frame direction of v_a = v_G - v_w and the joint
    positions; its base-frame force areas are scaled by k_a |v_a|^2.

    Raises:
        DimensionMismatchError: If the network widths do not match the model
    """
    if mlp.arch.input_dim != 3 + model.n_joints or mlp.arch.output_dim != 3 * model.n_aero_links:
        raise DimensionMismatchError(
            f"network {mlp.arch.input_dim}->{mlp.arch.output_dim} does not match the model "
            f"({3 + model.n_joints} inputs, {3 * model.n_aero_links} outputs)")
    kin = kin if kin is not None else Kinematics(model, state)
    v_a = kin.com_jacobian @ state.nu - np.asarray(v_w, dtype=float)
    speed = np.linalg.norm(v_a)
    if speed < SPEED_GUARD:
        return np.zeros((model.n_aero_links, 3))
    R = kin.base_rotation
    x = np.concatenate([R.T @ v_a / speed, state.joint_positions])
    areas = forward(mlp, x).reshape(model.n_aero_links, 3)
    return factors.k_a * speed ** 2 * areas @ R.T
