"""
Input bounds and the allocation QP.

Bounds use the hyperbolic tangent so a channel can never integrate past its
limits: for a channel x in [lo, hi] with range L,

    x_dot_max =  r tanh(kappa (hi - x))
    x_dot_min = -r tanh(kappa (x - lo))

with r = 0.2 L per second and kappa = 10 / L (r kappa = 2, so any explicit
Euler step dt <= 0.5 s keeps x inside [lo, hi]). Joint rates are further
capped by the joint velocity limits.
"""
from typing import Tuple

import numpy as np

from jetaero.errors import ControllerFault

RATE_FRACTION = 0.2
KAPPA_RANGE = 10.0


def channel_bounds(x: np.ndarray, lower: np.ndarray, upper: np.ndarray,
                   rate_cap: np.ndarray = None) -> Tuple[np.ndarray, np.ndarray]:
    """tanh rate bounds for channels x within [lower, upper]; x is projected into the box first."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    x = np.clip(np.asarray(x, dtype=float), lower, upper)
    span = upper - lower
    r = RATE_FRACTION * span
    if rate_cap is not None:
        r = np.minimum(r, rate_cap)
    kappa = KAPPA_RANGE / span
    return -r * np.tanh(kappa * (x - lower)), r * np.tanh(kappa * (upper - x))


def tanh_bounds(thrust: np.ndarray, thrust_min: np.ndarray, thrust_max: np.ndarray,
                joints: np.ndarray, joint_lower: np.ndarray, joint_upper: np.ndarray,
                joint_vmax: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Bounds on u = (T_dot, s_dot).

    Args:
        thrust: Current thrust intensities
        joints: Current joint positions s (the reference s* is clipped to the same box)

    Returns:
        (u_min, u_max), each of length m + n
    """
    t_lo, t_hi = channel_bounds(thrust, thrust_min, thrust_max)
    s_lo, s_hi = channel_bounds(joints, joint_lower, joint_upper, joint_vmax)
    return np.concatenate([t_lo, s_lo]), np.concatenate([t_hi, s_hi])


def qp_solve(u_star: np.ndarray, s_dot_postural: np.ndarray, w1: float, w2: float,
             u_min: np.ndarray, u_max: np.ndarray) -> np.ndarray:
    """
    Minimize w1 |u - u*|^2 + w2 |s_dot - s_dot_postural|^2 subject to u_min <= u <= u_max.

    The Hessian is diagonal, so the minimizer is the per-channel weighted
    target clamped to its box. The last len(s_dot_postural) channels are the
    joint rates.

    Raises:
        ControllerFault: If some channel has u_min > u_max
    """
    u_star = np.asarray(u_star, dtype=float)
    u_min = np.asarray(u_min, dtype=float)
    u_max = np.asarray(u_max, dtype=float)
    bad = np.flatnonzero(u_min > u_max)
    if bad.size:
        raise ControllerFault(f"inconsistent bounds on input channel(s) {bad.tolist()}")
    n_joints = np.asarray(s_dot_postural).shape[0]
    target = u_star.copy()
    if n_joints:
        m = u_star.shape[0] - n_joints
        target[m:] = (w1 * u_star[m:] + w2 * np.asarray(s_dot_postural, dtype=float)) / (w1 + w2)
    return np.clip(target, u_min, u_max)
