"""
Validation layer for parsed robot models.

Checks the tree structure, inertial parameters, jet mounts and the optional
mirror declaration before a RobotModel is handed to the rest of the package.
"""
from typing import List, Tuple

import numpy as np

from jetaero.model.robot import RobotModel
from jetaero.utils.logger import get_logger

logger = get_logger(__name__)

UNIT_TOLERANCE = 1e-12


class RobotModelValidator:
    """Validates a RobotModel for structural and physical consistency."""

    def __init__(self):
        """Initialize validator with empty error lists."""
        self.errors: List[str] = []
        self.warnings: List[str] = []

    def validate(self, model: RobotModel) -> Tuple[bool, List[str], List[str]]:
        """
        Validate a robot model comprehensively.

        Args:
            model: Parsed robot model

        Returns:
            Tuple of (is_valid, errors, warnings)
        """
        self.errors = []
        self.warnings = []

        self._validate_names(model)
        self._validate_links(model)
        self._validate_tree(model)
        self._validate_joints(model)
        self._validate_jets(model)
        if not self.errors:
            self._validate_symmetry(model)
        self._validate_groups(model)

        is_valid = len(self.errors) == 0
        return is_valid, self.errors, self.warnings

    def _validate_names(self, model: RobotModel) -> None:
        """Link, joint and jet names must be unique."""
        for kind, names in (("link", [l.name for l in model.links]),
                            ("joint", [j.name for j in model.joints]),
                            ("jet", [j.name for j in model.jets])):
            seen = set()
            for name in names:
                if name in seen:
                    self.errors.append(f"duplicate {kind} name '{name}'")
                seen.add(name)
        if not model.links:
            self.errors.append("model declares no links")

    def _validate_links(self, model: RobotModel) -> None:
        for link in model.links:
            if not link.mass > 0:
                self.errors.append(f"link '{link.name}': mass must be positive, got {link.mass}")
            inertia = link.inertia
            if not np.allclose(inertia, inertia.T, atol=1e-12):
                self.errors.append(f"link '{link.name}': inertia is not symmetric")
            elif np.linalg.eigvalsh(inertia).min() <= 0:
                self.errors.append(f"link '{link.name}': inertia is not positive definite")
            if abs(np.linalg.norm(link.symmetry_axis) - 1.0) > UNIT_TOLERANCE:
                self.errors.append(f"link '{link.name}': symmetry axis is not a unit vector")

    def _validate_tree(self, model: RobotModel) -> None:
        """The joint graph must be a tree rooted at a single base link."""
        names = {link.name for link in model.links}
        parent_of = {}
        for joint in model.joints:
            if joint.parent == joint.child:
                self.errors.append(f"joint '{joint.name}': parent equals child ('{joint.parent}'), cycle detected")
                continue
            for end in (joint.parent, joint.child):
                if end not in names:
                    self.errors.append(f"joint '{joint.name}' references unknown link '{end}'")
            if joint.child in parent_of:
                self.errors.append(f"link '{joint.child}' has more than one parent joint")
            parent_of[joint.child] = joint.parent

        roots = [link.name for link in model.links if link.name not in parent_of]
        if len(roots) != 1:
            if roots:
                self.errors.append(f"model has more than one root link: {', '.join(roots)}")
            else:
                self.errors.append("model has no root link, cycle detected")
            return

        # Every link must reach the root without revisiting a link
        for link in model.links:
            visited = set()
            node = link.name
            while node in parent_of:
                if node in visited:
                    self.errors.append(f"cycle detected through link '{link.name}'")
                    break
                visited.add(node)
                node = parent_of[node]
            else:
                if node != roots[0]:
                    self.errors.append(f"link '{link.name}' is not reachable from base '{roots[0]}'")

    def _validate_joints(self, model: RobotModel) -> None:
        for joint in model.joints:
            if not joint.is_revolute:
                continue
            if abs(np.linalg.norm(joint.axis) - 1.0) > 1e-9:
                self.errors.append(f"joint '{joint.name}': axis is not a unit vector")
            if not joint.lower < joint.upper:
                self.errors.append(f"joint '{joint.name}': limits must satisfy lo < hi")
            if not joint.vmax > 0:
                self.errors.append(f"joint '{joint.name}': vmax must be positive")
        for name, value in model.posture.items():
            joints = {j.name: j for j in model.dof_joints}
            if name not in joints:
                self.errors.append(f"posture references unknown joint '{name}'")
            elif not joints[name].lower <= value <= joints[name].upper:
                self.warnings.append(f"posture value of '{name}' lies outside its limits and will be clipped")

    def _validate_jets(self, model: RobotModel) -> None:
        names = {link.name for link in model.links}
        for jet in model.jets:
            if jet.link not in names:
                self.errors.append(f"jet '{jet.name}' references unknown link '{jet.link}'")
            if jet.thrust_min < 0:
                self.errors.append(f"jet '{jet.name}': thrust_min must be >= 0")
            if not jet.thrust_min < jet.thrust_max:
                self.errors.append(f"jet '{jet.name}': thrust_min must be < thrust_max")
            if abs(np.linalg.norm(jet.direction) - 1.0) > 1e-9:
                self.errors.append(f"jet '{jet.name}': direction is not a unit vector")

    def _validate_symmetry(self, model: RobotModel) -> None:
        """Paired joints must have mirrored axes and origins."""
        if model.lateral_axis is None:
            if model.joint_pairs:
                self.errors.append("pair directives need a 'symmetry lateral=' declaration")
            return
        lateral = model.lateral_axis
        if abs(np.linalg.norm(lateral) - 1.0) > 1e-9:
            self.errors.append("symmetry lateral axis is not a unit vector")
            return
        mirror = np.eye(3) - 2.0 * np.outer(lateral, lateral)
        joints = {j.name: j for j in model.dof_joints}
        for left, right in model.joint_pairs:
            if left not in joints or right not in joints:
                self.errors.append(f"pair '{left}' '{right}' references an unknown joint")
                continue
            a_left, a_right = joints[left].axis, joints[right].axis
            if abs(abs(a_right @ (mirror @ a_left)) - 1.0) > 1e-9:
                self.errors.append(f"pair '{left}' '{right}': axes are not mirror images")
            if not np.allclose(mirror @ joints[left].origin, joints[right].origin, atol=1e-9):
                self.warnings.append(f"pair '{left}' '{right}': origins are not mirror images")

    def _validate_groups(self, model: RobotModel) -> None:
        joints = {j.name for j in model.dof_joints}
        for group, members in model.groups.items():
            for member in members:
                if member not in joints:
                    self.errors.append(f"group '{group}' references unknown joint '{member}'")


def validate_model(model: RobotModel) -> Tuple[bool, List[str], List[str]]:
    """Convenience function to validate a model."""
    validator = RobotModelValidator()
    return validator.validate(model)
