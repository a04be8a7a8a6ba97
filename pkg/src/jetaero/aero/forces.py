"""
Aerodynamic force providers used by the plant and by the controller.

Every provider returns world-frame forces on the aerodynamic links for a
state and a wind velocity; `NoAero` is the baseline with no aerodynamics.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from jetaero.aero.axisym import AeroFactors, AxisymCoeffs, predict_link_forces_axisym
from jetaero.aero.mlp import Mlp
from jetaero.aero.training import predict_link_forces_mlp
from jetaero.model.kinematics import Kinematics
from jetaero.model.robot import JointState, RobotModel

NONE = "none"
AXISYM = "axisym"
MLP = "mlp"
AERO_KINDS = (NONE, AXISYM, MLP)


class AeroProvider:
    kind = NONE

    def link_forces(self, model: RobotModel, state: JointState, v_w: np.ndarray,
                    kin: Optional[Kinematics] = None) -> np.ndarray:
        raise NotImplementedError

    @property
    def enabled(self) -> bool:
        return self.kind != NONE


class NoAero(AeroProvider):
    kind = NONE

    def link_forces(self, model, state, v_w, kin=None):
        return np.zeros((model.n_aero_links, 3))


@dataclass(eq=False)
class AxisymAero(AeroProvider):
    coeffs: AxisymCoeffs
    factors: AeroFactors = field(default_factory=AeroFactors)
    kind = AXISYM

    def link_forces(self, model, state, v_w, kin=None):
        return predict_link_forces_axisym(model, state, v_w, self.coeffs, self.factors, kin)


@dataclass(eq=False)
class MlpAero(AeroProvider):
    mlp: Mlp
    factors: AeroFactors = field(default_factory=AeroFactors)
    kind = MLP

    def link_forces(self, model, state, v_w, kin=None):
        return predict_link_forces_mlp(model, self.mlp, state, v_w, self.factors, kin)


def make_provider(kind: str, coeffs: Optional[AxisymCoeffs] = None, mlp: Optional[Mlp] = None,
                  factors: Optional[AeroFactors] = None) -> AeroProvider:
    """
    Build a provider by name.

    Raises:
        ValueError: For an unknown kind or a missing coefficient set / network
    """
    factors = factors if factors is not None else AeroFactors.from_config()
    if kind == NONE:
        return NoAero()
    if kind == AXISYM:
        if coeffs is None:
            raise ValueError("axisym aerodynamics need a coefficients file")
        return AxisymAero(coeffs, factors)
    if kind == MLP:
        if mlp is None:
            raise ValueError("mlp aerodynamics need a weights file")
        return MlpAero(mlp, factors)
    raise ValueError(f"unknown aerodynamic model '{kind}' (expected one of {', '.join(AERO_KINDS)})")
