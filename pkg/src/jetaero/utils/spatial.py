"""
Spatial algebra helpers.

All 6-vectors in jetaero are ordered (angular, linear).
"""
import numpy as np
from scipy.spatial.transform import Rotation


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix: skew(a) @ b == np.cross(a, b). Accepts (..., 3)."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def axis_angle_matrices(axes: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Rodrigues rotation for a batch of unit axes (k, 3) and angles (k,)."""
    axes = np.asarray(axes, dtype=float).reshape(-1, 3)
    angles = np.asarray(angles, dtype=float).reshape(-1)
    K = skew(axes)
    s = np.sin(angles)[:, None, None]
    c = np.cos(angles)[:, None, None]
    return np.eye(3)[None] + s * K + (1.0 - c) * (K @ K)


def quat_to_matrix(quat: np.ndarray) -> np.ndarray:
    """Scalar-last unit quaternion to rotation matrix."""
    return Rotation.from_quat(quat).as_matrix()


def rotate_quat_world(quat: np.ndarray, rotvec: np.ndarray) -> np.ndarray:
    """Left-multiply by exp(rotvec) (world-frame increment) and renormalize."""
    rotated = (Rotation.from_rotvec(rotvec) * Rotation.from_quat(quat)).as_quat()
    return rotated / np.linalg.norm(rotated)


def tilt_angle(matrix: np.ndarray) -> float:
    """Angle between the body z axis and the world vertical."""
    return float(np.arccos(np.clip(matrix[2, 2], -1.0, 1.0)))
