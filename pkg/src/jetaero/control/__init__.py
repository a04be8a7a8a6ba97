# control/__init__.py
from jetaero.control.gains import ControlGains, load_gains
from jetaero.control.reference import MomentumReference
from jetaero.control.momentum import augmented_dynamics, momentum_dynamics
from jetaero.control.allocation import qp_solve, tanh_bounds
from jetaero.control.controller import (
    AeroFeedback, ControlOutput, ControllerMemory, FlightController, control_step,
    feedback_linearize, inner_loop_torque,
)

__all__ = [
    'ControlGains', 'load_gains', 'MomentumReference',
    'augmented_dynamics', 'momentum_dynamics', 'qp_solve', 'tanh_bounds',
    'AeroFeedback', 'ControlOutput', 'ControllerMemory', 'FlightController', 'control_step',
    'feedback_linearize', 'inner_loop_torque',
]
