"""
Centroidal momentum rate and its relative-degree augmentation.

    h_dot  = A_T T + A_a F - m g e_z
    h_ddot = Lambda nu + A_T T_dot

A_T maps thrust intensities to the jets' wrench about the CoM, A_a maps the
stacked per-link aerodynamic forces (applied at the link CoMs) to the wrench
about the CoM. Lambda differentiates both maps along the motion with T and
the world aerodynamic forces held constant.
"""
from typing import Optional, Tuple

import numpy as np

from jetaero.model.kinematics import Kinematics
from jetaero.model.robot import JointState, RobotModel
from jetaero.utils.spatial import skew


def thrust_matrix(kin: Kinematics) -> np.ndarray:
    """A_T (6 x m): column j is the wrench about the CoM of a unit thrust of jet j."""
    arms = kin.jet_positions - kin.com
    directions = kin.jet_directions
    return np.vstack([np.cross(arms, directions).T, directions.T]).reshape(6, -1)


def aero_matrix(kin: Kinematics) -> np.ndarray:
    """A_a (6 x 3 n_aero_links) for forces stacked link-major."""
    idx = list(kin.model.aero_links)
    arms = skew(kin.coms[idx] - kin.com)
    n = len(idx)
    A = np.zeros((6, 3 * n))
    for i in range(n):
        A[0:3, 3 * i:3 * i + 3] = arms[i]
        A[3:6, 3 * i:3 * i + 3] = np.eye(3)
    return A


def gravity_wrench(model: RobotModel) -> np.ndarray:
    return np.array([0.0, 0.0, 0.0, 0.0, 0.0, -model.total_mass * model.gravity])


def momentum_dynamics(model: RobotModel, state: JointState, thrust: np.ndarray,
                      link_forces: Optional[np.ndarray] = None,
                      kin: Optional[Kinematics] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Rate of change of the centroidal momentum.

    Args:
        thrust: Jet intensities T (m,)
        link_forces: World aerodynamic forces (n_aero_links, 3); zero when None

    Returns:
        (h_dot, A_T, A_a)
    """
    kin = kin if kin is not None else Kinematics(model, state)
    A_T = thrust_matrix(kin)
    A_a = aero_matrix(kin)
    h_dot = A_T @ np.asarray(thrust, dtype=float) + gravity_wrench(model)
    if link_forces is not None:
        h_dot = h_dot + A_a @ np.asarray(link_forces, dtype=float).reshape(-1)
    return h_dot, A_T, A_a


def augmented_dynamics(model: RobotModel, state: JointState, thrust: np.ndarray,
                       link_forces: Optional[np.ndarray] = None,
                       kin: Optional[Kinematics] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Lambda (6 x nv) and A_T such that h_ddot = Lambda nu + A_T T_dot.

    Jet terms: for thrust T_j along d_j at p_j on link k,
        d/dt (p_j - G) x d_j = -[d_j](J_pj - J_G) nu - [p_j - G][d_j] Jw_k nu
        d/dt d_j            = -[d_j] Jw_k nu
    Aerodynamic terms (F_i frozen): d/dt (c_i - G) x F_i = -[F_i](J_ci - J_G) nu.
    """
    kin = kin if kin is not None else Kinematics(model, state)
    nv = model.nv
    J_G = kin.com_jacobian
    Lam = np.zeros((6, nv))

    if model.n_jets:
        thrust = np.asarray(thrust, dtype=float)
        J = kin.jet_jacobians
        D = skew(kin.jet_directions)
        arms = skew(kin.jet_positions - kin.com)
        rot_rate = -D @ J[:, 0:3, :]
        Lam[0:3] = np.einsum("k,kij->ij", thrust, -D @ (J[:, 3:6, :] - J_G[None]) + arms @ rot_rate)
        Lam[3:6] = np.einsum("k,kij->ij", thrust, rot_rate)

    if link_forces is not None:
        forces = np.asarray(link_forces, dtype=float).reshape(-1, 3)
        if np.any(forces):
            idx = list(model.aero_links)
            Jc = kin.com_jacobians[idx, 3:6, :]
            Lam[0:3] += np.einsum("kij,kjn->in", -skew(forces), Jc - J_G[None])
    return Lam, thrust_matrix(kin)
