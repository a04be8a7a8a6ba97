"""
Kinematics, Jacobians, centroidal momentum and joint-space dynamics terms.

Conventions:
    nu = (omega_B, v_B, s_dot) with omega_B and v_B in world coordinates,
    v_B being the velocity of the base origin. Jacobians map nu to the
    world-aligned twist (omega, velocity of a point). Dynamics read

        M(q) nu_dot + bias(q, nu) = f_jets + f_a + (0_6, tau)

    so bias holds Coriolis/centrifugal terms plus gravity: at rest its linear
    base rows equal (0, 0, +m g).
"""
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from jetaero.model.robot import CentroidalState, JointState, RobotModel
from jetaero.utils.spatial import axis_angle_matrices, rotate_quat_world, skew

# Attributes that depend on the configuration only and survive a rebind
_POSITIONAL = (
    "rotations", "origins", "coms", "com", "joint_axes", "joint_origins",
    "com_jacobians", "world_inertias", "mass_matrix", "free_base_joint_inertia", "momentum_matrix",
    "com_jacobian", "jet_positions", "jet_directions", "jet_jacobians",
    "link_symmetry_axes", "gravity_force",
)


class Kinematics:
    """
    Configuration-dependent quantities of one robot state.

    Positions are computed eagerly; Jacobians, inertia and velocity terms are
    computed on first access and cached.
    """

    def __init__(self, model: RobotModel, state: JointState):
        state.check(model)
        self.model = model
        self.state = state

        topo = model.topology
        n_links = len(model.links)
        rotations = np.empty((n_links, 3, 3))
        origins = np.empty((n_links, 3))
        base = model.base_index
        rotations[base] = state.rotation
        origins[base] = state.base_position

        joint_rotations = axis_angle_matrices(model.dof_axes, state.joint_positions)
        for link in topo.order[1:]:
            parent = topo.parent_link[link]
            joint_index = topo.parent_joint[link]
            parent_rotation = rotations[parent]
            origins[link] = origins[parent] + parent_rotation @ model.joints[joint_index].origin
            dof = topo.joint_dof[joint_index]
            rotations[link] = parent_rotation @ joint_rotations[dof] if dof >= 0 else parent_rotation

        self.rotations = rotations
        self.origins = origins
        self.coms = origins + np.einsum("lij,lj->li", rotations, model.link_coms)
        self.com = model.masses @ self.coms / model.total_mass
        self.joint_axes = np.einsum("kij,kj->ki", rotations[topo.dof_parent], model.dof_axes)
        self.joint_origins = origins[topo.dof_child]

    def rebind(self, state: JointState) -> "Kinematics":
        """Same configuration, new velocities: reuse every positional quantity."""
        clone = object.__new__(Kinematics)
        clone.model = self.model
        clone.state = state
        for name in _POSITIONAL:
            if name in self.__dict__:
                clone.__dict__[name] = self.__dict__[name]
        return clone

    @property
    def base_rotation(self) -> np.ndarray:
        return self.rotations[self.model.base_index]

    @property
    def base_position(self) -> np.ndarray:
        return self.origins[self.model.base_index]

    def transform(self, link: int) -> np.ndarray:
        """Homogeneous world transform of a link frame."""
        T = np.eye(4)
        T[:3, :3] = self.rotations[link]
        T[:3, 3] = self.origins[link]
        return T

    def point_jacobians(self, link_indices: Sequence[int], points: np.ndarray) -> np.ndarray:
        """
        Stacked Jacobians of points rigidly attached to links.

        Args:
            link_indices: Link carrying each point, shape (k,)
            points: World positions, shape (k, 3)

        Returns:
            Array (k, 6, nv); rows are (angular, linear)
        """
        link_indices = np.asarray(link_indices, dtype=int)
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        k = points.shape[0]
        nv = self.model.nv
        J = np.zeros((k, 6, nv))
        J[:, 0:3, 0:3] = np.eye(3)
        J[:, 3:6, 3:6] = np.eye(3)
        J[:, 3:6, 0:3] = -skew(points - self.base_position)
        if self.model.n_joints:
            mask = self.model.topology.ancestor_mask[link_indices]
            axes = self.joint_axes
            J[:, 0:3, 6:] = mask[:, None, :] * axes.T[None, :, :]
            linear = np.cross(axes[None, :, :], points[:, None, :] - self.joint_origins[None, :, :])
            J[:, 3:6, 6:] = (linear * mask[:, :, None]).transpose(0, 2, 1)
        return J

    @cached_property
    def com_jacobians(self) -> np.ndarray:
        return self.point_jacobians(np.arange(len(self.model.links)), self.coms)

    @cached_property
    def world_inertias(self) -> np.ndarray:
        R = self.rotations
        return R @ self.model.link_inertias @ R.transpose(0, 2, 1)

    @cached_property
    def link_symmetry_axes(self) -> np.ndarray:
        return np.einsum("lij,lj->li", self.rotations, self.model.link_axes)

    @cached_property
    def mass_matrix(self) -> np.ndarray:
        Jw = self.com_jacobians[:, 0:3, :]
        Jv = self.com_jacobians[:, 3:6, :]
        masses = self.model.masses
        M = np.einsum("lai,laj->ij", Jw, self.world_inertias @ Jw)
        M += np.einsum("lai,laj->ij", Jv * masses[:, None, None], Jv)
        return 0.5 * (M + M.T)

    @cached_property
    def free_base_joint_inertia(self) -> np.ndarray:
        """
        Joint-space inertia seen with the base free: M_ss - M_sb M_bb^-1 M_bs.

        Equals the inverse of the joint block of M^-1, so a torque increment
        d_tau changes the joint accelerations of the floating robot by
        free_base_joint_inertia^-1 d_tau.
        """
        M = self.mass_matrix
        if M.shape[0] == 6:
            return np.zeros((0, 0))
        coupling = cho_solve(cho_factor(M[:6, :6]), M[:6, 6:])
        S = M[6:, 6:] - M[6:, :6] @ coupling
        return 0.5 * (S + S.T)

    @cached_property
    def momentum_matrix(self) -> np.ndarray:
        """A_G with h = A_G nu, about the robot CoM with world orientation."""
        Jw = self.com_jacobians[:, 0:3, :]
        Jv = self.com_jacobians[:, 3:6, :]
        masses = self.model.masses[:, None, None]
        arms = skew(self.coms - self.com)
        angular = (self.world_inertias @ Jw + masses * (arms @ Jv)).sum(axis=0)
        linear = (masses * Jv).sum(axis=0)
        return np.vstack([angular, linear])

    @cached_property
    def com_jacobian(self) -> np.ndarray:
        """3 x nv Jacobian of the robot CoM."""
        return self.momentum_matrix[3:6] / self.model.total_mass

    @cached_property
    def velocity_terms(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """
        Link angular velocities, CoM velocities and the velocity-product
        accelerations (J_dot nu) at every link CoM.

        Returns:
            (omegas, com_velocities, angular_bias, linear_bias), each (n_links, 3)
        """
        nu = self.state.nu
        J = self.com_jacobians
        omegas = J[:, 0:3, :] @ nu
        com_velocities = J[:, 3:6, :] @ nu
        omega_base = nu[0:3]
        v_base = nu[3:6]

        linear_bias = np.cross(omega_base, com_velocities - v_base)
        angular_bias = np.zeros_like(omegas)
        if self.model.n_joints:
            topo = self.model.topology
            s_dot = nu[6:]
            axes = self.joint_axes
            origin_velocities = com_velocities - np.cross(omegas, self.coms - self.origins)
            axis_rates = np.cross(omegas[topo.dof_parent], axes)
            pivot_velocities = origin_velocities[topo.dof_child]
            weights = topo.ancestor_mask * s_dot[None, :]
            angular_bias = weights @ axis_rates
            term = np.cross(axis_rates[None, :, :], self.coms[:, None, :] - self.joint_origins[None, :, :])
            term += np.cross(axes[None, :, :], com_velocities[:, None, :] - pivot_velocities[None, :, :])
            linear_bias = linear_bias + np.einsum("lj,lja->la", weights, term)
        return omegas, com_velocities, angular_bias, linear_bias

    @cached_property
    def gravity_force(self) -> np.ndarray:
        """Generalized gravity force (acts on the right-hand side)."""
        Jv = self.com_jacobians[:, 3:6, :]
        weights = np.zeros((len(self.model.links), 3))
        weights[:, 2] = -self.model.masses * self.model.gravity
        return np.einsum("lai,la->i", Jv, weights)

    @cached_property
    def bias(self) -> np.ndarray:
        omegas, _, angular_bias, linear_bias = self.velocity_terms
        Iw = self.world_inertias
        spin = np.einsum("lij,lj->li", Iw, omegas)
        torques = np.einsum("lij,lj->li", Iw, angular_bias) + np.cross(omegas, spin)
        forces = self.model.masses[:, None] * linear_bias
        J = self.com_jacobians
        coriolis = np.einsum("lai,la->i", J[:, 0:3, :], torques) + np.einsum("lai,la->i", J[:, 3:6, :], forces)
        return coriolis - self.gravity_force

    @cached_property
    def jet_positions(self) -> np.ndarray:
        model = self.model
        if not model.n_jets:
            return np.zeros((0, 3))
        local = np.array([jet.position for jet in model.jets])
        idx = model.jet_link_indices
        return self.origins[idx] + np.einsum("kij,kj->ki", self.rotations[idx], local)

    @cached_property
    def jet_directions(self) -> np.ndarray:
        model = self.model
        if not model.n_jets:
            return np.zeros((0, 3))
        local = np.array([jet.direction for jet in model.jets])
        return np.einsum("kij,kj->ki", self.rotations[model.jet_link_indices], local)

    @cached_property
    def jet_jacobians(self) -> np.ndarray:
        return self.point_jacobians(self.model.jet_link_indices, self.jet_positions)

    def thrust_force(self, thrust: np.ndarray) -> np.ndarray:
        """Generalized force of the jets for thrust intensities T (N)."""
        if not self.model.n_jets:
            return np.zeros(self.model.nv)
        forces = np.asarray(thrust, dtype=float)[:, None] * self.jet_directions
        return np.einsum("kai,ka->i", self.jet_jacobians[:, 3:6, :], forces)

    def link_force(self, link_indices: Sequence[int], forces: np.ndarray) -> np.ndarray:
        """Generalized force of pure forces applied at the CoM of the given links."""
        J = self.com_jacobians[np.asarray(link_indices, dtype=int), 3:6, :]
        return np.einsum("kai,ka->i", J, np.asarray(forces, dtype=float).reshape(-1, 3))


def forward_kinematics(model: RobotModel, state: JointState) -> Kinematics:
    """
    World transforms of every link, world CoM of every link and robot CoM.

    The returned object exposes `rotations`, `origins`, `coms`, `com` and
    `transform(link)`.
    """
    return Kinematics(model, state)


def link_jacobian(model: RobotModel, state: JointState, link: str) -> np.ndarray:
    """6 x nv Jacobian mapping nu to the twist of the link frame origin."""
    index = model.find_link(link)
    kin = Kinematics(model, state)
    return kin.point_jacobians([index], kin.origins[index][None, :])[0]


def centroidal_momentum(model: RobotModel, state: JointState, kin: Kinematics = None) -> CentroidalState:
    kin = kin if kin is not None else Kinematics(model, state)
    h = kin.momentum_matrix @ state.nu
    return CentroidalState(h=h, com=kin.com.copy(), com_velocity=h[3:6] / model.total_mass)


def dynamics_terms(model: RobotModel, state: JointState, kin: Kinematics = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Mass matrix and bias vector.

    Returns:
        (M, bias) with M of shape (nv, nv), bias of shape (nv,)
    """
    kin = kin if kin is not None else Kinematics(model, state)
    return kin.mass_matrix, kin.bias


def integrate_configuration(state: JointState, nu: np.ndarray, dt: float) -> JointState:
    """
    Advance the configuration by nu * dt and attach nu as the new velocity.

    The base rotation is updated on the left (world angular velocity) through
    the exponential map and renormalized.
    """
    nu = np.asarray(nu, dtype=float)
    return JointState(
        base_position=state.base_position + dt * nu[3:6],
        base_orientation=rotate_quat_world(state.base_orientation, dt * nu[0:3]),
        base_angular_velocity=nu[0:3].copy(),
        base_linear_velocity=nu[3:6].copy(),
        joint_positions=state.joint_positions + dt * nu[6:],
        joint_velocities=nu[6:].copy(),
    )
