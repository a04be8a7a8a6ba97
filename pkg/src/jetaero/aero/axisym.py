"""
Axisymmetric per-link aerodynamic model.

Each aerodynamic link is treated as a body of revolution around its symmetry
axis k. With alpha the angle between the relative wind v_a and k:

    C_D A(alpha) = w0 + w1 cos + w2 sin^2 + w3 sin^3 + w4 cos^3
    C_N A(alpha) = w5 sin^2 cos
    F = -k_a |v_a| C_D A v_a + k_a C_N A ((v_a x k) x v_a) / sin(alpha)

Every basis function has zero slope at alpha = 0 and pi, and the normal basis
also vanishes there, so the endpoint constraints hold for any weights.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from jetaero.errors import DimensionMismatchError, FitError
from jetaero.model.kinematics import Kinematics
from jetaero.model.robot import JointState, RobotModel
from jetaero.utils.logger import get_logger

logger = get_logger(__name__)

N_WEIGHTS = 6
SIN_GUARD = 1e-9
SPEED_GUARD = 1e-12
WEIGHT_NAMES = ("w0", "w1", "w2", "w3", "w4", "w5")


@dataclass(frozen=True)
class AeroFactors:
    """Air density and the derived factor k_a = rho / 2."""
    air_density: float = 1.225

    def __post_init__(self):
        if not self.air_density > 0:
            raise ValueError(f"air density must be positive, got {self.air_density}")

    @property
    def k_a(self) -> float:
        return 0.5 * self.air_density

    @classmethod
    def from_config(cls) -> "AeroFactors":
        from jetaero.config import AIR_DENSITY
        return cls(air_density=AIR_DENSITY)


@dataclass(frozen=True, eq=False)
class AxisymCoeffs:
    """Per-link weights (w0..w5) keyed by link name, in file order."""
    weights: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        for name, w in self.weights.items():
            w = np.asarray(w, dtype=float)
            if w.shape != (N_WEIGHTS,):
                raise DimensionMismatchError(f"link '{name}': expected 6 weights, got shape {w.shape}")
            if not np.all(np.isfinite(w)):
                raise FitError(f"link '{name}': non-finite coefficient")

    @property
    def link_names(self) -> List[str]:
        return list(self.weights)

    def for_link(self, name: str) -> np.ndarray:
        return np.asarray(self.weights[name], dtype=float)

    def matrix(self, names: Iterable[str]) -> np.ndarray:
        """Stack weights of the given links, (k, 6)."""
        names = list(names)
        missing = [n for n in names if n not in self.weights]
        if missing:
            raise FitError(f"missing coefficients for link(s): {', '.join(missing)}")
        return np.array([self.for_link(n) for n in names]).reshape(-1, N_WEIGHTS)

    def drag_is_positive(self, names: Optional[Iterable[str]] = None) -> bool:
        grid = np.deg2rad(np.arange(0.0, 181.0, 1.0))
        for name in (names if names is not None else self.weights):
            cda, _ = eval_force_areas(self.for_link(name), grid)
            if cda.min() < -1e-12:
                return False
        return True


def angle_of_attack(v_a: np.ndarray, axis: np.ndarray) -> float:
    """
    Angle between the relative wind and the link symmetry axis, in [0, pi].

    Returns 0 when |v_a| < 1e-12.

    Raises:
        ValueError: If `axis` is not a unit vector
    """
    v_a = np.asarray(v_a, dtype=float)
    axis = np.asarray(axis, dtype=float)
    if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
        raise ValueError("symmetry axis must be a unit vector")
    speed = np.linalg.norm(v_a)
    if speed < SPEED_GUARD:
        return 0.0
    return float(np.arccos(np.clip(v_a @ axis / speed, -1.0, 1.0)))


def drag_basis(alpha) -> np.ndarray:
    """Columns [1, cos, sin^2, sin^3, cos^3], shape (..., 5)."""
    alpha = np.asarray(alpha, dtype=float)
    c, s = np.cos(alpha), np.sin(alpha)
    return np.stack([np.ones_like(alpha), c, s ** 2, s ** 3, c ** 3], axis=-1)


def normal_basis(alpha) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    return np.sin(alpha) ** 2 * np.cos(alpha)


def eval_force_areas(weights: np.ndarray, alpha) -> Tuple[np.ndarray, np.ndarray]:
    """
    Drag and normal force areas (m^2).

    Args:
        weights: (6,) for one link, or (..., 6) broadcasting against alpha
        alpha: Angle(s) of attack in radians

    Returns:
        (C_D A, C_N A)
    """
    weights = np.asarray(weights, dtype=float)
    cda = np.sum(drag_basis(alpha) * weights[..., :5], axis=-1)
    cna = weights[..., 5] * normal_basis(alpha)
    return cda, cna


def _normal_directions(directions: np.ndarray, axes: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """((d x k) x d) / sin(alpha) for unit d, with the sine itself; zero below the guard."""
    cross = np.cross(directions, axes)
    sin_alpha = np.linalg.norm(cross, axis=-1)
    normal = np.cross(cross, directions)
    safe = sin_alpha >= SIN_GUARD
    out = np.zeros_like(normal)
    out[safe] = normal[safe] / sin_alpha[safe][:, None]
    return out, sin_alpha


def force_area_vectors(weights: np.ndarray, directions: np.ndarray, axes: np.ndarray) -> np.ndarray:
    """
    Force areas as 3-vectors: F / (k_a |v_a|^2) = -C_D A d + C_N A n.

    Args:
        weights: (k, 6)
        directions: Unit relative-wind directions, (k, 3)
        axes: Unit symmetry axes in the same frame, (k, 3)

    Returns:
        Array (k, 3) in the frame of the inputs
    """
    directions = np.asarray(directions, dtype=float).reshape(-1, 3)
    axes = np.asarray(axes, dtype=float).reshape(-1, 3)
    alpha = np.arccos(np.clip(np.sum(directions * axes, axis=-1), -1.0, 1.0))
    cda, cna = eval_force_areas(weights, alpha)
    normal, _ = _normal_directions(directions, axes)
    return -cda[:, None] * directions + cna[:, None] * normal


def eval_link_forces(weights: np.ndarray, factors: AeroFactors, v_a: np.ndarray, axes: np.ndarray) -> np.ndarray:
    """Vectorized force law for k links: weights (k, 6), v_a (k, 3), axes (k, 3) -> (k, 3) N."""
    v_a = np.asarray(v_a, dtype=float).reshape(-1, 3)
    speed = np.linalg.norm(v_a, axis=-1)
    moving = speed >= SPEED_GUARD
    forces = np.zeros_like(v_a)
    if not np.any(moving):
        return forces
    directions = v_a[moving] / speed[moving][:, None]
    areas = force_area_vectors(np.asarray(weights)[moving], directions, np.asarray(axes)[moving])
    forces[moving] = factors.k_a * speed[moving][:, None] ** 2 * areas
    return forces


def eval_link_force(weights: np.ndarray, factors: AeroFactors, v_a: np.ndarray, axis: np.ndarray) -> np.ndarray:
    """Aerodynamic force on one link (N)."""
    return eval_link_forces(np.asarray(weights)[None, :], factors, np.asarray(v_a)[None, :],
                            np.asarray(axis)[None, :])[0]


def predict_link_forces_axisym(model: RobotModel, state: JointState, v_w: np.ndarray,
                               coeffs: AxisymCoeffs, factors: AeroFactors,
                               kin: Optional[Kinematics] = None) -> np.ndarray:
    """
    World-frame force on every aerodynamic link, (n_aero_links, 3).

    The relative wind of link i is the world velocity of its CoM minus v_w.
    """
    kin = kin if kin is not None else Kinematics(model, state)
    idx = list(model.aero_links)
    _, com_velocities, _, _ = kin.velocity_terms
    v_a = com_velocities[idx] - np.asarray(v_w, dtype=float)[None, :]
    axes = kin.link_symmetry_axes[idx]
    return eval_link_forces(coeffs.matrix(model.aero_link_names), factors, v_a, axes)


def total_wrench(model: RobotModel, state: JointState, forces: np.ndarray,
                 kin: Optional[Kinematics] = None) -> np.ndarray:
    """
    Generalized aerodynamic force f_a = sum_i J_i^T (0, F_i), forces applied at link CoMs.

    Raises:
        DimensionMismatchError: If there is not one force per aerodynamic link
    """
    forces = np.asarray(forces, dtype=float)
    if forces.shape != (model.n_aero_links, 3):
        raise DimensionMismatchError(
            f"expected {model.n_aero_links} link forces, got array of shape {forces.shape}")
    kin = kin if kin is not None else Kinematics(model, state)
    return kin.link_force(model.aero_links, forces)


def link_axes_in_base(model: RobotModel, joint_positions: np.ndarray) -> np.ndarray:
    """Symmetry axes of the aerodynamic links in the base frame for a joint configuration."""
    kin = Kinematics(model, JointState.at_rest(model, joint_positions))
    return kin.link_symmetry_axes[list(model.aero_links)]


def predict_force_areas(model: RobotModel, joints: np.ndarray, directions: np.ndarray,
                        coeffs: AxisymCoeffs) -> np.ndarray:
    """
    Base-frame force-area triples for dataset rows.

    Args:
        joints: (N, n_joints)
        directions: Unit relative-wind directions in the base frame, (N, 3)

    Returns:
        (N, n_aero_links, 3)
    """
    weights = coeffs.matrix(model.aero_link_names)
    n_links = weights.shape[0]
    out = np.empty((joints.shape[0], n_links, 3))
    axes_cache: Dict[bytes, np.ndarray] = {}
    for row in range(joints.shape[0]):
        key = joints[row].tobytes()
        if key not in axes_cache:
            axes_cache[key] = link_axes_in_base(model, joints[row])
        axes = axes_cache[key]
        d = np.broadcast_to(directions[row], (n_links, 3))
        out[row] = force_area_vectors(weights, d, axes)
    return out
