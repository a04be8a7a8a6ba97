# model/__init__.py
from jetaero.model.robot import (
    CentroidalState, JetSpec, JointSpec, JointState, LinkSpec, RobotModel,
)
from jetaero.model.loader import load_default_model, load_model, load_model_file
from jetaero.model.kinematics import (
    Kinematics, centroidal_momentum, dynamics_terms, forward_kinematics,
    integrate_configuration, link_jacobian,
)

__all__ = [
    'CentroidalState', 'JetSpec', 'JointSpec', 'JointState', 'LinkSpec', 'RobotModel',
    'load_default_model', 'load_model', 'load_model_file',
    'Kinematics', 'centroidal_momentum', 'dynamics_terms', 'forward_kinematics',
    'integrate_configuration', 'link_jacobian',
]
