"""
Controller gains and their key=value file.

Recognized keys: kp_lin, kd_lin, ki_lin, kp_ang, kd_ang, ki_ang, kp_joint,
kd_joint, w1, w2, k_post, damping, aero_feedback, t_min_<jet>, t_max_<jet>.
"""
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from jetaero.errors import ScenarioError
from jetaero.model.robot import RobotModel
from jetaero.utils.helpers import read_key_value_file
from jetaero.utils.logger import get_logger

logger = get_logger(__name__)

AERO_FEEDBACK_CHOICES = ("none", "axisym", "mlp")


@dataclass(frozen=True)
class ControlGains:
    """
    Momentum PID gains (linear and angular blocks), joint inner-loop gains,
    QP weights and postural gain.

    Defaults place the linear momentum poles at (-0.1, -2, -3) and the
    angular ones at (-1, -2, -3).
    """
    kp_lin: float = 6.5
    kd_lin: float = 5.1
    ki_lin: float = 0.6
    kp_ang: float = 11.0
    kd_ang: float = 6.0
    ki_ang: float = 6.0
    kp_joint: float = 100.0
    kd_joint: float = 20.0
    w1: float = 1.0
    w2: float = 0.1
    k_post: float = 0.5
    damping: float = 1e-4
    aero_feedback: str = "none"
    thrust_limits: Dict[str, Tuple[float, float]] = field(default_factory=dict, hash=False)

    @staticmethod
    def _block(ang: float, lin: float) -> np.ndarray:
        return np.diag([ang] * 3 + [lin] * 3)

    @property
    def K_P(self) -> np.ndarray:
        return self._block(self.kp_ang, self.kp_lin)

    @property
    def K_D(self) -> np.ndarray:
        return self._block(self.kd_ang, self.kd_lin)

    @property
    def K_I(self) -> np.ndarray:
        return self._block(self.ki_ang, self.ki_lin)

    def validate(self) -> List[str]:
        errors = []
        for name in ("kp_lin", "kd_lin", "ki_lin", "kp_ang", "kd_ang", "ki_ang",
                     "kp_joint", "kd_joint", "w1", "w2"):
            if not getattr(self, name) > 0:
                errors.append(f"{name} must be positive, got {getattr(self, name)}")
        if self.k_post < 0 or self.damping < 0:
            errors.append("k_post and damping must be non-negative")
        if self.aero_feedback not in AERO_FEEDBACK_CHOICES:
            errors.append(f"aero_feedback must be one of {', '.join(AERO_FEEDBACK_CHOICES)}")
        for jet, (lo, hi) in self.thrust_limits.items():
            if not 0 <= lo < hi:
                errors.append(f"thrust limits of jet '{jet}' must satisfy 0 <= t_min < t_max")
        return errors

    def thrust_bounds(self, model: RobotModel) -> Tuple[np.ndarray, np.ndarray]:
        """Model thrust limits with the per-jet overrides applied."""
        lower = model.thrust_min.copy()
        upper = model.thrust_max.copy()
        for k, jet in enumerate(model.jets):
            if jet.name in self.thrust_limits:
                lower[k], upper[k] = self.thrust_limits[jet.name]
        return lower, upper


_FLOAT_KEYS = {f.name for f in fields(ControlGains)} - {"aero_feedback", "thrust_limits"}


def load_gains(path, model: RobotModel = None) -> ControlGains:
    """
    Read a gains file over the defaults.

    Raises:
        ScenarioError: On unknown keys, unknown jets, bad numbers or invalid gains
    """
    path = Path(path)
    values: Dict[str, object] = {}
    limits: Dict[str, List[float]] = {}
    jet_names = {jet.name for jet in model.jets} if model is not None else None
    defaults = ControlGains()
    for line, key, value in read_key_value_file(path):
        try:
            if key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key == "aero_feedback":
                values[key] = value
            elif key.startswith("t_min_") or key.startswith("t_max_"):
                jet = key[len("t_min_"):]
                if jet_names is not None and jet not in jet_names:
                    raise ScenarioError(f"unknown jet '{jet}'", line)
                pair = limits.setdefault(jet, [None, None])
                pair[0 if key.startswith("t_min_") else 1] = float(value)
            else:
                raise ScenarioError(f"unknown gains key '{key}'", line)
        except ValueError:
            raise ScenarioError(f"bad value for '{key}': '{value}'", line) from None

    thrust_limits = {}
    for jet, (lo, hi) in limits.items():
        if model is not None:
            k = [j.name for j in model.jets].index(jet)
            lo = model.thrust_min[k] if lo is None else lo
            hi = model.thrust_max[k] if hi is None else hi
        elif lo is None or hi is None:
            raise ScenarioError(f"jet '{jet}' needs both t_min_ and t_max_ without a model")
        thrust_limits[jet] = (float(lo), float(hi))
    gains = replace(defaults, thrust_limits=thrust_limits, **values)
    errors = gains.validate()
    if errors:
        raise ScenarioError(f"{path}: " + "; ".join(errors))
    logger.debug(f"Loaded gains from {path}")
    return gains
