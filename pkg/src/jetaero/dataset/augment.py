"""
Mirror augmentation and train/validation splitting.

Mirroring reflects a sample through the longitudinal plane of the robot
(normal = the model's lateral axis): paired joints swap their values, the
lateral wind component changes sign, and every output triple is reflected
and moved to the partner link.
"""
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from jetaero.dataset.samples import AeroDataset
from jetaero.errors import DatasetError
from jetaero.model.kinematics import Kinematics
from jetaero.model.robot import JointState, RobotModel
from jetaero.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class MirrorMap:
    """Index permutations and signs of the reflection, all involutions."""
    joint_perm: np.ndarray
    joint_signs: np.ndarray
    link_perm: np.ndarray
    reflection: np.ndarray

    def mirror_joints(self, joints: np.ndarray) -> np.ndarray:
        """Mirror joint vectors, shape (..., n_joints)."""
        joints = np.asarray(joints, dtype=float)
        out = np.empty_like(joints)
        out[..., self.joint_perm] = joints * self.joint_signs
        return out

    def mirror_outputs(self, outputs: np.ndarray) -> np.ndarray:
        """Mirror per-link triples, shape (..., n_links, 3)."""
        reflected = np.asarray(outputs, dtype=float) @ self.reflection.T
        out = np.empty_like(reflected)
        out[..., self.link_perm, :] = reflected
        return out


def mirror_map(model: RobotModel) -> MirrorMap:
    """
    Build the reflection of a model with a declared lateral axis and joint pairs.

    The sign of a joint pair is -a_r . (M a_l) with a the world joint axes at
    the zero configuration and M = I - 2 l l^T; unpaired joints map to
    themselves with sign -a . (M a).

    Raises:
        DatasetError: If the model declares no symmetry
    """
    if not model.has_symmetry:
        raise DatasetError(f"model '{model.name}' declares no symmetry (symmetry lateral=... and pair lines)")
    lateral = np.asarray(model.lateral_axis, dtype=float)
    lateral = lateral / np.linalg.norm(lateral)
    reflection = np.eye(3) - 2.0 * np.outer(lateral, lateral)

    kin = Kinematics(model, JointState.at_rest(model, np.zeros(model.n_joints)))
    axes = kin.joint_axes
    n = model.n_joints
    joint_perm = np.arange(n)
    for left, right in model.joint_pairs:
        a, b = model.dof_of(left), model.dof_of(right)
        joint_perm[a], joint_perm[b] = b, a
    joint_signs = np.array([-axes[joint_perm[k]] @ (reflection @ axes[k]) for k in range(n)])
    joint_signs = np.round(joint_signs)

    topo = model.topology
    link_partner = np.arange(len(model.links))
    for k in range(n):
        link_partner[topo.dof_child[k]] = topo.dof_child[joint_perm[k]]
    aero = list(model.aero_links)
    position = {link: i for i, link in enumerate(aero)}
    link_perm = np.empty(len(aero), dtype=int)
    for i, link in enumerate(aero):
        partner = int(link_partner[link])
        if partner not in position:
            raise DatasetError(f"mirror partner of aerodynamic link '{model.links[link].name}' is not aerodynamic")
        link_perm[i] = position[partner]
    return MirrorMap(joint_perm=joint_perm, joint_signs=joint_signs, link_perm=link_perm, reflection=reflection)


def _mirror_yaw(yaw: np.ndarray) -> np.ndarray:
    """-yaw wrapped into (-pi, pi]."""
    mirrored = -np.asarray(yaw, dtype=float)
    return np.where(mirrored <= -np.pi, mirrored + 2.0 * np.pi, mirrored)


def mirror_dataset(ds: AeroDataset, mapping: MirrorMap) -> AeroDataset:
    """Mirrored copy of every sample, same order."""
    return replace(
        ds,
        joints=mapping.mirror_joints(ds.joints),
        yaw=_mirror_yaw(ds.yaw),
        outputs=mapping.mirror_outputs(ds.outputs),
    )


def mirror_augment(ds: AeroDataset, model: RobotModel) -> AeroDataset:
    """
    Double a dataset with its mirror image.

    The wind encoding mirrors by yaw negation, which requires the lateral
    axis to be the base y axis.

    Returns:
        Dataset with the N originals followed by the N mirrored samples

    Raises:
        DatasetError: If the model has no symmetry or a non-y lateral axis
    """
    mapping = mirror_map(model)
    lateral = np.asarray(model.lateral_axis, dtype=float)
    if abs(abs(lateral[1]) - np.linalg.norm(lateral)) > 1e-12:
        raise DatasetError("mirror augmentation needs the lateral axis along base y")
    if ds.n_joints != model.n_joints or ds.n_links != model.n_aero_links:
        raise DatasetError("dataset dimensions do not match the model")
    augmented = ds.concat(mirror_dataset(ds, mapping), augmented=True)
    logger.info(f"Mirror augmentation: {len(ds)} -> {len(augmented)} samples")
    return augmented


def split(ds: AeroDataset, ratio: float, seed: int = 0) -> Tuple[AeroDataset, AeroDataset]:
    """
    Random disjoint train/validation partition.

    |train| = floor(ratio * N + 0.5); rows keep their dataset order inside
    each side.

    Raises:
        ValueError: If ratio is not in (0, 1)
        DatasetError: If either side would be empty
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"split ratio must be in (0, 1), got {ratio}")
    n = len(ds)
    if n == 0:
        raise DatasetError("cannot split an empty dataset")
    n_train = int(np.floor(ratio * n + 0.5))
    if n_train == 0 or n_train == n:
        raise DatasetError(f"split of {n} samples with ratio {ratio} leaves one side empty")
    perm = np.random.default_rng(seed).permutation(n)
    return ds.subset(np.sort(perm[:n_train])), ds.subset(np.sort(perm[n_train:]))
