"""
Aerodynamic dataset containers.

A dataset row is a joint configuration, a relative-wind direction in the
base frame (stored as pitch/yaw in radians) and one base-frame force-area
triple per aerodynamic link.
"""
from dataclasses import dataclass, field, replace
from typing import Iterator, List, Sequence

import numpy as np

from jetaero.errors import DatasetError


def wind_direction(pitch, yaw) -> np.ndarray:
    """Unit relative-wind direction d = (cos(yaw)cos(pitch), -sin(yaw), cos(yaw)sin(pitch)), shape (..., 3)."""
    pitch = np.asarray(pitch, dtype=float)
    yaw = np.asarray(yaw, dtype=float)
    return np.stack([np.cos(yaw) * np.cos(pitch), -np.sin(yaw), np.cos(yaw) * np.sin(pitch)], axis=-1)


@dataclass(frozen=True, eq=False)
class AeroSample:
    joints: np.ndarray
    pitch: float
    yaw: float
    outputs: np.ndarray

    @property
    def direction(self) -> np.ndarray:
        return wind_direction(self.pitch, self.yaw)


@dataclass(frozen=True, eq=False)
class AeroDataset:
    """
    Column-oriented table of samples.

    Attributes:
        joints: (N, n_joints) rad
        pitch, yaw: (N,) rad
        outputs: (N, n_links, 3) m^2, base-frame components
        seed: Oracle seed the rows came from
        config_hash: Digest of the generating configuration
        augmented: True once mirrored samples were appended
    """
    joints: np.ndarray
    pitch: np.ndarray
    yaw: np.ndarray
    outputs: np.ndarray
    seed: int = 0
    config_hash: str = ""
    augmented: bool = False
    link_names: List[str] = field(default_factory=list)
    joint_names: List[str] = field(default_factory=list)

    def __post_init__(self):
        n = self.joints.shape[0]
        if self.joints.ndim != 2 or self.outputs.ndim != 3 or self.outputs.shape[2] != 3:
            raise DatasetError(f"bad dataset shapes: joints {self.joints.shape}, outputs {self.outputs.shape}")
        if self.pitch.shape != (n,) or self.yaw.shape != (n,) or self.outputs.shape[0] != n:
            raise DatasetError("dataset columns have different lengths")
        if not (np.all(np.isfinite(self.joints)) and np.all(np.isfinite(self.outputs))):
            raise DatasetError("dataset contains a non-finite value")

    def __len__(self) -> int:
        return self.joints.shape[0]

    def __getitem__(self, index: int) -> AeroSample:
        return AeroSample(self.joints[index], float(self.pitch[index]), float(self.yaw[index]), self.outputs[index])

    def __iter__(self) -> Iterator[AeroSample]:
        for index in range(len(self)):
            yield self[index]

    @property
    def n_joints(self) -> int:
        return self.joints.shape[1]

    @property
    def n_links(self) -> int:
        return self.outputs.shape[1]

    @property
    def directions(self) -> np.ndarray:
        return wind_direction(self.pitch, self.yaw)

    @property
    def inputs(self) -> np.ndarray:
        """Network inputs x = (d, s), shape (N, 3 + n_joints)."""
        return np.hstack([self.directions, self.joints])

    @property
    def targets(self) -> np.ndarray:
        """Network targets, link-major, shape (N, 3 * n_links)."""
        return self.outputs.reshape(len(self), -1)

    def subset(self, indices: Sequence[int]) -> "AeroDataset":
        idx = np.asarray(indices, dtype=int)
        return replace(self, joints=self.joints[idx], pitch=self.pitch[idx], yaw=self.yaw[idx],
                       outputs=self.outputs[idx])

    def concat(self, other: "AeroDataset", augmented: bool = None) -> "AeroDataset":
        if other.n_joints != self.n_joints or other.n_links != self.n_links:
            raise DatasetError("cannot concatenate datasets with different dimensions")
        return replace(
            self,
            joints=np.vstack([self.joints, other.joints]),
            pitch=np.concatenate([self.pitch, other.pitch]),
            yaw=np.concatenate([self.yaw, other.yaw]),
            outputs=np.concatenate([self.outputs, other.outputs]),
            augmented=self.augmented if augmented is None else augmented,
        )

    def equals(self, other: "AeroDataset") -> bool:
        """Bit-exact comparison of every column and the provenance."""
        return (
            self.seed == other.seed
            and self.config_hash == other.config_hash
            and self.augmented == other.augmented
            and np.array_equal(self.joints, other.joints)
            and np.array_equal(self.pitch, other.pitch)
            and np.array_equal(self.yaw, other.yaw)
            and np.array_equal(self.outputs, other.outputs)
        )
