"""
Floating-base plant integration.

Semi-implicit Euler on M nu_dot + bias = f_jets + f_a + (0_6, tau), followed
by a correction of the base twist so that the centroidal momentum after the
step equals h_k + dt * (external wrench about the CoM at step k).
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from jetaero.aero.forces import AeroProvider, NoAero
from jetaero.control.momentum import aero_matrix, gravity_wrench, thrust_matrix
from jetaero.errors import IntegrationFault
from jetaero.model.kinematics import Kinematics, integrate_configuration
from jetaero.model.robot import JointState, RobotModel
from jetaero.utils.spatial import tilt_angle

MAX_DT = 5e-3


@dataclass(frozen=True, eq=False)
class SimState:
    """Plant state: robot state, thrust intensities and time."""
    state: JointState
    thrust: np.ndarray
    t: float = 0.0
    plant_link_forces: Optional[np.ndarray] = field(default=None, repr=False)
    kin: Optional[Kinematics] = field(default=None, repr=False)

    def kinematics(self, model: RobotModel) -> Kinematics:
        return self.kin if self.kin is not None else Kinematics(model, self.state)

    @property
    def plant_aero_force(self) -> np.ndarray:
        """Total plant aerodynamic force applied over the last step."""
        if self.plant_link_forces is None:
            return np.zeros(3)
        return self.plant_link_forces.sum(axis=0)

    @property
    def tilt(self) -> float:
        return tilt_angle(self.state.rotation)

    def is_finite(self) -> bool:
        s = self.state
        return all(np.all(np.isfinite(a)) for a in (
            s.base_position, s.base_orientation, s.nu, s.joint_positions, self.thrust))


def step(model: RobotModel, sim: SimState, torque: np.ndarray, thrust: np.ndarray, v_w: np.ndarray,
         plant_aero: Optional[AeroProvider], dt: float, step_index: int = 0,
         momentum_projection: bool = True) -> SimState:
    """
    Advance the plant by dt.

    Args:
        torque: Joint torques tau (n,)
        thrust: Jet intensities applied over the step (m,)
        v_w: World wind velocity
        plant_aero: Aerodynamic model felt by the plant; no aerodynamics when None
        step_index: Reported by IntegrationFault
        momentum_projection: Correct the base twist to the exact momentum balance

    Raises:
        ValueError: If dt is not in (0, 5 ms]
        IntegrationFault: If the new state is not finite
    """
    if not 0 < dt <= MAX_DT:
        raise ValueError(f"plant dt must be in (0, {MAX_DT}] s, got {dt}")
    plant_aero = plant_aero if plant_aero is not None else NoAero()
    state = sim.state
    thrust = np.asarray(thrust, dtype=float)
    kin = sim.kinematics(model)

    forces = plant_aero.link_forces(model, state, np.asarray(v_w, dtype=float), kin)
    rhs = kin.thrust_force(thrust) - kin.bias
    if plant_aero.enabled:
        rhs += kin.link_force(model.aero_links, forces)
    rhs[6:] += np.asarray(torque, dtype=float)
    if not np.all(np.isfinite(rhs)):
        raise IntegrationFault(step_index, "non-finite generalized force")

    try:
        nu_dot = cho_solve(cho_factor(kin.mass_matrix), rhs)
    except np.linalg.LinAlgError:
        raise IntegrationFault(step_index, "singular mass matrix") from None
    nu = state.nu + dt * nu_dot
    next_state = integrate_configuration(state, nu, dt)

    if not (np.all(np.isfinite(nu)) and np.all(np.isfinite(next_state.base_orientation))):
        raise IntegrationFault(step_index)

    next_kin = Kinematics(model, next_state)
    if momentum_projection:
        wrench = thrust_matrix(kin) @ thrust + aero_matrix(kin) @ forces.reshape(-1) + gravity_wrench(model)
        h_target = kin.momentum_matrix @ state.nu + dt * wrench
        A = next_kin.momentum_matrix
        nu[:6] += np.linalg.solve(A[:, :6], h_target - A @ nu)
        next_state = next_state.with_nu(nu)
        next_kin = next_kin.rebind(next_state)

    result = SimState(next_state, thrust.copy(), sim.t + dt, forces, next_kin)
    if not result.is_finite():
        raise IntegrationFault(step_index)
    return result
