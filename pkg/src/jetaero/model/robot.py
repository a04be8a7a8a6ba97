"""
Domain types of the floating-base robot model.

A RobotModel is an immutable description of a link tree rooted at the base
link, with revolute (or fixed) joints, jet mounts and per-link aerodynamic
geometry. Derived topology (traversal order, ancestor masks, mirror map) is
computed once per model and cached.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np

from jetaero.errors import DimensionMismatchError, UnknownLinkError
from jetaero.utils.spatial import quat_to_matrix

REVOLUTE = "revolute"
FIXED = "fixed"


@dataclass(frozen=True, eq=False)
class LinkSpec:
    name: str
    mass: float
    com: np.ndarray
    inertia: np.ndarray
    symmetry_axis: np.ndarray
    aero: bool = False


@dataclass(frozen=True, eq=False)
class JointSpec:
    name: str
    parent: str
    child: str
    origin: np.ndarray
    axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    lower: float = 0.0
    upper: float = 0.0
    vmax: float = 0.0
    kind: str = REVOLUTE

    @property
    def is_revolute(self) -> bool:
        return self.kind == REVOLUTE


@dataclass(frozen=True, eq=False)
class JetSpec:
    name: str
    link: str
    direction: np.ndarray
    thrust_min: float
    thrust_max: float
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))


@dataclass(frozen=True, eq=False)
class Topology:
    """Index structure derived from the joint tree."""
    order: Tuple[int, ...]              # links, parents before children
    parent_link: Tuple[int, ...]        # -1 for the base
    parent_joint: Tuple[int, ...]       # index into model.joints, -1 for the base
    joint_dof: Tuple[int, ...]          # per joint, dof index or -1 when fixed
    dof_joint: Tuple[int, ...]          # per dof, index into model.joints
    dof_child: np.ndarray               # per dof, child link index
    dof_parent: np.ndarray              # per dof, parent link index
    ancestor_mask: np.ndarray           # (n_links, n_dofs) float mask


@dataclass(frozen=True, eq=False)
class RobotModel:
    links: Tuple[LinkSpec, ...]
    joints: Tuple[JointSpec, ...]
    jets: Tuple[JetSpec, ...]
    gravity: float = 9.81
    name: str = "robot"
    lateral_axis: Optional[np.ndarray] = None
    joint_pairs: Tuple[Tuple[str, str], ...] = ()
    groups: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    posture: Dict[str, float] = field(default_factory=dict)

    @cached_property
    def total_mass(self) -> float:
        return float(sum(link.mass for link in self.links))

    @cached_property
    def link_index(self) -> Dict[str, int]:
        return {link.name: i for i, link in enumerate(self.links)}

    @cached_property
    def dof_joints(self) -> Tuple[JointSpec, ...]:
        return tuple(j for j in self.joints if j.is_revolute)

    @property
    def joint_names(self) -> List[str]:
        return [j.name for j in self.dof_joints]

    @property
    def n_joints(self) -> int:
        return len(self.dof_joints)

    @property
    def nv(self) -> int:
        return 6 + self.n_joints

    @cached_property
    def aero_links(self) -> Tuple[int, ...]:
        return tuple(i for i, link in enumerate(self.links) if link.aero)

    @property
    def n_aero_links(self) -> int:
        return len(self.aero_links)

    @property
    def aero_link_names(self) -> List[str]:
        return [self.links[i].name for i in self.aero_links]

    @property
    def n_jets(self) -> int:
        return len(self.jets)

    @cached_property
    def base_index(self) -> int:
        children = {j.child for j in self.joints}
        for i, link in enumerate(self.links):
            if link.name not in children:
                return i
        raise UnknownLinkError("model has no root link")

    @property
    def base_link(self) -> LinkSpec:
        return self.links[self.base_index]

    @cached_property
    def masses(self) -> np.ndarray:
        return np.array([link.mass for link in self.links])

    @cached_property
    def link_coms(self) -> np.ndarray:
        return np.array([link.com for link in self.links]).reshape(-1, 3)

    @cached_property
    def link_inertias(self) -> np.ndarray:
        return np.array([link.inertia for link in self.links]).reshape(-1, 3, 3)

    @cached_property
    def link_axes(self) -> np.ndarray:
        return np.array([link.symmetry_axis for link in self.links]).reshape(-1, 3)

    @cached_property
    def dof_axes(self) -> np.ndarray:
        return np.array([j.axis for j in self.dof_joints]).reshape(-1, 3)

    @cached_property
    def jet_link_indices(self) -> np.ndarray:
        return np.array([self.link_index[jet.link] for jet in self.jets], dtype=int)

    @cached_property
    def joint_lower(self) -> np.ndarray:
        return np.array([j.lower for j in self.dof_joints])

    @cached_property
    def joint_upper(self) -> np.ndarray:
        return np.array([j.upper for j in self.dof_joints])

    @cached_property
    def joint_vmax(self) -> np.ndarray:
        return np.array([j.vmax for j in self.dof_joints])

    @cached_property
    def thrust_min(self) -> np.ndarray:
        return np.array([jet.thrust_min for jet in self.jets])

    @cached_property
    def thrust_max(self) -> np.ndarray:
        return np.array([jet.thrust_max for jet in self.jets])

    def find_link(self, name: str) -> int:
        try:
            return self.link_index[name]
        except KeyError:
            raise UnknownLinkError(f"unknown link '{name}'") from None

    def dof_of(self, joint_name: str) -> int:
        for k, joint in enumerate(self.dof_joints):
            if joint.name == joint_name:
                return k
        raise KeyError(f"unknown joint '{joint_name}'")

    @cached_property
    def topology(self) -> Topology:
        n_links = len(self.links)
        parent_link = [-1] * n_links
        parent_joint = [-1] * n_links
        children: Dict[int, List[int]] = {i: [] for i in range(n_links)}
        for j_idx, joint in enumerate(self.joints):
            p, c = self.link_index[joint.parent], self.link_index[joint.child]
            parent_link[c] = p
            parent_joint[c] = j_idx
            children[p].append(c)

        order: List[int] = []
        stack = [self.base_index]
        while stack:
            node = stack.pop(0)
            order.append(node)
            stack.extend(children[node])

        joint_dof = []
        dof_joint = []
        for j_idx, joint in enumerate(self.joints):
            if joint.is_revolute:
                joint_dof.append(len(dof_joint))
                dof_joint.append(j_idx)
            else:
                joint_dof.append(-1)

        n_dofs = len(dof_joint)
        mask = np.zeros((n_links, n_dofs))
        for link in order:
            p = parent_link[link]
            if p < 0:
                continue
            mask[link] = mask[p]
            dof = joint_dof[parent_joint[link]]
            if dof >= 0:
                mask[link, dof] = 1.0

        dof_child = np.array([self.link_index[self.joints[j].child] for j in dof_joint], dtype=int)
        dof_parent = np.array([self.link_index[self.joints[j].parent] for j in dof_joint], dtype=int)
        return Topology(
            order=tuple(order),
            parent_link=tuple(parent_link),
            parent_joint=tuple(parent_joint),
            joint_dof=tuple(joint_dof),
            dof_joint=tuple(dof_joint),
            dof_child=dof_child,
            dof_parent=dof_parent,
            ancestor_mask=mask,
        )

    def home_posture(self) -> np.ndarray:
        """Declared posture (zero for undeclared joints), clipped into the limits."""
        s = np.array([self.posture.get(j.name, 0.0) for j in self.dof_joints])
        return np.clip(s, self.joint_lower, self.joint_upper)

    @property
    def has_symmetry(self) -> bool:
        return self.lateral_axis is not None


@dataclass(frozen=True, eq=False)
class JointState:
    """
    Configuration and velocity of the floating-base robot.

    base_orientation is a scalar-last unit quaternion; base velocities are in
    world coordinates (angular velocity of the base, linear velocity of the
    base origin). The stacked velocity is nu = (omega_B, v_B, s_dot).
    """
    base_position: np.ndarray
    base_orientation: np.ndarray
    base_angular_velocity: np.ndarray
    base_linear_velocity: np.ndarray
    joint_positions: np.ndarray
    joint_velocities: np.ndarray

    @classmethod
    def at_rest(cls, model: RobotModel, joint_positions: Optional[np.ndarray] = None,
                base_position: Optional[np.ndarray] = None,
                base_orientation: Optional[np.ndarray] = None) -> "JointState":
        s = model.home_posture() if joint_positions is None else np.asarray(joint_positions, dtype=float)
        return cls(
            base_position=np.zeros(3) if base_position is None else np.asarray(base_position, dtype=float),
            base_orientation=np.array([0.0, 0.0, 0.0, 1.0]) if base_orientation is None
            else np.asarray(base_orientation, dtype=float),
            base_angular_velocity=np.zeros(3),
            base_linear_velocity=np.zeros(3),
            joint_positions=s.copy(),
            joint_velocities=np.zeros_like(s),
        )

    @cached_property
    def rotation(self) -> np.ndarray:
        return quat_to_matrix(self.base_orientation)

    @property
    def nu(self) -> np.ndarray:
        return np.concatenate([self.base_angular_velocity, self.base_linear_velocity, self.joint_velocities])

    def with_nu(self, nu: np.ndarray) -> "JointState":
        nu = np.asarray(nu, dtype=float)
        return JointState(
            base_position=self.base_position,
            base_orientation=self.base_orientation,
            base_angular_velocity=nu[0:3].copy(),
            base_linear_velocity=nu[3:6].copy(),
            joint_positions=self.joint_positions,
            joint_velocities=nu[6:].copy(),
        )

    def check(self, model: RobotModel) -> None:
        """Raise if vector lengths or the orientation are invalid for `model`."""
        n = model.n_joints
        if self.joint_positions.shape != (n,) or self.joint_velocities.shape != (n,):
            raise DimensionMismatchError(
                f"state has {self.joint_positions.shape[0]} joint positions and "
                f"{self.joint_velocities.shape[0]} velocities, model has {n} joints"
            )
        if abs(np.linalg.norm(self.base_orientation) - 1.0) > 1e-9:
            raise DimensionMismatchError("base orientation quaternion is not unit norm")


@dataclass(frozen=True, eq=False)
class CentroidalState:
    """Centroidal momentum h = (angular about the CoM, linear), CoM position and velocity."""
    h: np.ndarray
    com: np.ndarray
    com_velocity: np.ndarray
