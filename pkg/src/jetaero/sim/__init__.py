# sim/__init__.py
from jetaero.sim.wind import WindProfile, wind_at
from jetaero.sim.integrator import SimState, step
from jetaero.sim.log import SimLog, parse_log, read_log
from jetaero.sim.envelope import ablation_matrix, fictitious_wind, standard_envelope
from jetaero.sim.scenario import Scenario, load_scenario, run_scenario, run_scenarios

__all__ = [
    'WindProfile', 'wind_at', 'SimState', 'step',
    'SimLog', 'parse_log', 'read_log',
    'ablation_matrix', 'fictitious_wind', 'standard_envelope',
    'Scenario', 'load_scenario', 'run_scenario', 'run_scenarios',
]
