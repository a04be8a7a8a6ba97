"""
Aerodynamic-aware momentum flight controller.

One control tick: aerodynamic feedback -> feedback linearization of the
augmented momentum dynamics -> tanh bounds -> QP -> joint-torque inner loop.
The integral of the momentum error and the joint references s* live in an
explicit ControllerMemory so `control_step` itself is a pure function.
"""
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from jetaero.aero.forces import AeroProvider, NoAero
from jetaero.control.allocation import qp_solve, tanh_bounds
from jetaero.control.gains import ControlGains
from jetaero.control.momentum import augmented_dynamics, momentum_dynamics
from jetaero.control.reference import MomentumReference
from jetaero.errors import ControllerFault
from jetaero.model.kinematics import Kinematics
from jetaero.model.robot import JointState, RobotModel
from jetaero.utils.logger import get_logger

logger = get_logger(__name__)

MIN_RANK = 3


@dataclass(frozen=True, eq=False)
class AeroFeedback:
    """Aerodynamic forces the control law accounts for."""
    selector: str
    link_forces: np.ndarray
    generalized: np.ndarray

    @property
    def total_force(self) -> np.ndarray:
        return self.link_forces.sum(axis=0)


def evaluate_aero_feedback(provider: AeroProvider, model: RobotModel, state: JointState,
                           v_w: np.ndarray, kin: Kinematics) -> AeroFeedback:
    if not provider.enabled:
        return AeroFeedback(provider.kind, np.zeros((model.n_aero_links, 3)), np.zeros(model.nv))
    forces = provider.link_forces(model, state, v_w, kin)
    return AeroFeedback(provider.kind, forces, kin.link_force(model.aero_links, forces))


@dataclass(frozen=True, eq=False)
class ControllerMemory:
    """Integral of the angular momentum error, joint references s* and the postural target."""
    angular_integral: np.ndarray
    joint_reference: np.ndarray
    posture: np.ndarray

    @classmethod
    def start(cls, state: JointState) -> "ControllerMemory":
        s = np.asarray(state.joint_positions, dtype=float)
        return cls(np.zeros(3), s.copy(), s.copy())


@dataclass(frozen=True, eq=False)
class ControlOutput:
    torque: np.ndarray
    thrust_rate: np.ndarray
    u_star: np.ndarray
    u_opt: np.ndarray
    h: np.ndarray
    h_error: np.ndarray
    com: np.ndarray
    com_error: np.ndarray
    feedback: AeroFeedback


def damped_pseudoinverse_solve(B: np.ndarray, rhs: np.ndarray, damping: float) -> np.ndarray:
    """B^T (B B^T + mu^2 I)^-1 rhs."""
    BBt = B @ B.T + damping ** 2 * np.eye(B.shape[0])
    return B.T @ np.linalg.solve(BBt, rhs)


def feedback_linearize(model: RobotModel, state: JointState, thrust: np.ndarray,
                       desired: Tuple[np.ndarray, np.ndarray, np.ndarray], integral: np.ndarray,
                       gains: ControlGains, link_forces: Optional[np.ndarray] = None,
                       kin: Optional[Kinematics] = None, damping: Optional[float] = None
                       ) -> Tuple[np.ndarray, dict]:
    """
    Input u* = (T_dot, s_dot) imposing
    h_ddot* = h_ddot_d - K_D (h_dot - h_dot_d) - K_P (h - h_d) - K_I I.

    With B = [A_T | Lambda_s] and c = Lambda_B nu_B, u* = B^+_mu (h_ddot* - c).

    Args:
        desired: (h_d, h_dot_d, h_ddot_d)
        integral: I, the integral of the momentum error (6,)
        damping: mu, defaults to gains.damping

    Returns:
        (u*, details with h, h_tilde, h_dot, h_ddot_star, B, c)

    Raises:
        ControllerFault: If rank(B) < 3
    """
    kin = kin if kin is not None else Kinematics(model, state)
    h_d, h_dot_d, h_ddot_d = desired
    nu = state.nu
    h = kin.momentum_matrix @ nu
    h_dot, _, _ = momentum_dynamics(model, state, thrust, link_forces, kin)
    h_tilde = h - h_d
    h_ddot_star = (h_ddot_d - gains.K_D @ (h_dot - h_dot_d) - gains.K_P @ h_tilde
                   - gains.K_I @ np.asarray(integral, dtype=float))

    Lam, A_T = augmented_dynamics(model, state, thrust, link_forces, kin)
    B = np.hstack([A_T, Lam[:, 6:]])
    c = Lam[:, :6] @ nu[:6]
    rank = np.linalg.matrix_rank(B)
    if rank < MIN_RANK:
        raise ControllerFault(f"allocation matrix rank {rank} < {MIN_RANK}")
    mu = gains.damping if damping is None else damping
    u_star = damped_pseudoinverse_solve(B, h_ddot_star - c, mu)
    return u_star, {"h": h, "h_tilde": h_tilde, "h_dot": h_dot, "h_ddot_star": h_ddot_star, "B": B, "c": c}


def inner_loop_torque(model: RobotModel, state: JointState, s_dot_ref: np.ndarray, s_ref: np.ndarray,
                      gains: ControlGains, applied: Optional[np.ndarray] = None,
                      kin: Optional[Kinematics] = None) -> np.ndarray:
    """
    tau = M_bar s_ddot** + b_bar with s_ddot** = -K_Ds (s_dot - s_dot*) - K_Ps (s - s*).

    M_bar is the joint inertia with the base free, so the floating robot
    realizes the commanded joint acceleration s_ddot** instead of a multiple
    of it. b_bar is the joint rows of the bias minus the joint rows of the
    applied generalized forces (jets and aerodynamics).
    """
    kin = kin if kin is not None else Kinematics(model, state)
    s_ddot = (-gains.kd_joint * (state.joint_velocities - np.asarray(s_dot_ref, dtype=float))
              - gains.kp_joint * (state.joint_positions - np.asarray(s_ref, dtype=float)))
    b_bar = kin.bias[6:].copy()
    if applied is not None:
        b_bar -= np.asarray(applied, dtype=float)[6:]
    return kin.free_base_joint_inertia @ s_ddot + b_bar


def control_step(model: RobotModel, state: JointState, thrust: np.ndarray, t: float,
                 reference: MomentumReference, memory: ControllerMemory, gains: ControlGains,
                 dt: float, aero: Optional[AeroProvider] = None, v_w: Optional[np.ndarray] = None,
                 kin: Optional[Kinematics] = None) -> Tuple[ControlOutput, ControllerMemory]:
    """
    One controller tick.

    Args:
        thrust: Current thrust intensities
        t: Time of the tick (s)
        dt: Control period, used to advance the integral and s*
        aero: Aerodynamic feedback model, NoAero when None
        v_w: Wind velocity the feedback model is evaluated with

    Returns:
        (output, next memory)
    """
    kin = kin if kin is not None else Kinematics(model, state)
    aero = aero if aero is not None else NoAero()
    v_w = np.zeros(3) if v_w is None else np.asarray(v_w, dtype=float)
    mass = model.total_mass

    feedback = evaluate_aero_feedback(aero, model, state, v_w, kin)
    com_d, _, _, _ = reference.com(t)
    desired = reference.desired(t, mass)
    com_error = kin.com - com_d
    integral = np.concatenate([memory.angular_integral, mass * com_error])
    forces = feedback.link_forces if aero.enabled else None
    u_star, details = feedback_linearize(model, state, thrust, desired, integral, gains, forces, kin)

    t_min, t_max = gains.thrust_bounds(model)
    u_min, u_max = tanh_bounds(thrust, t_min, t_max, state.joint_positions,
                               model.joint_lower, model.joint_upper, model.joint_vmax)
    s_dot_post = -gains.k_post * (memory.joint_reference - memory.posture)
    u_opt = qp_solve(u_star, s_dot_post, gains.w1, gains.w2, u_min, u_max)
    m = model.n_jets
    thrust_rate, s_dot_ref = u_opt[:m], u_opt[m:]

    applied = kin.thrust_force(thrust) + feedback.generalized
    torque = inner_loop_torque(model, state, s_dot_ref, memory.joint_reference, gains, applied, kin)

    next_memory = replace(
        memory,
        angular_integral=memory.angular_integral + dt * details["h_tilde"][0:3],
        joint_reference=np.clip(memory.joint_reference + dt * s_dot_ref, model.joint_lower, model.joint_upper),
    )
    output = ControlOutput(
        torque=torque, thrust_rate=thrust_rate, u_star=u_star, u_opt=u_opt,
        h=details["h"], h_error=details["h_tilde"], com=kin.com.copy(), com_error=com_error,
        feedback=feedback,
    )
    return output, next_memory


@dataclass(eq=False)
class FlightController:
    """Stateful wrapper owning the controller memory of one control loop."""
    model: RobotModel
    gains: ControlGains
    reference: MomentumReference
    aero: AeroProvider = field(default_factory=NoAero)
    dt: float = 0.01
    memory: Optional[ControllerMemory] = None

    def reset(self, state: JointState) -> None:
        self.memory = ControllerMemory.start(state)

    def step(self, state: JointState, thrust: np.ndarray, t: float, v_w: np.ndarray,
             kin: Optional[Kinematics] = None) -> ControlOutput:
        if self.memory is None:
            self.reset(state)
        output, self.memory = control_step(self.model, state, thrust, t, self.reference, self.memory,
                                           self.gains, self.dt, self.aero, v_w, kin)
        return output
