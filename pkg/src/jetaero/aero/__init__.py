# aero/__init__.py
from jetaero.aero.axisym import (
    AeroFactors, AxisymCoeffs, angle_of_attack, eval_force_areas, eval_link_force,
    predict_link_forces_axisym, total_wrench,
)
from jetaero.aero.coeffs_io import load_coeffs_file, load_default_coeffs, write_coeffs_file
from jetaero.aero.metrics import rel_err
from jetaero.aero.regression import fit_coefficients
from jetaero.aero.mlp import Mlp, MlpArch, adam_step, backward, forward, loss_mse, mlp_init
from jetaero.aero.training import TrainConfig, TrainingHistory, predict_link_forces_mlp, train
from jetaero.aero.weights_io import load_mlp, save_mlp
from jetaero.aero.forces import AxisymAero, MlpAero, NoAero, make_provider

__all__ = [
    'AeroFactors', 'AxisymCoeffs', 'angle_of_attack', 'eval_force_areas', 'eval_link_force',
    'predict_link_forces_axisym', 'total_wrench',
    'load_coeffs_file', 'load_default_coeffs', 'write_coeffs_file',
    'rel_err', 'fit_coefficients',
    'Mlp', 'MlpArch', 'adam_step', 'backward', 'forward', 'loss_mse', 'mlp_init',
    'TrainConfig', 'TrainingHistory', 'predict_link_forces_mlp', 'train',
    'load_mlp', 'save_mlp',
    'AxisymAero', 'MlpAero', 'NoAero', 'make_provider',
]
