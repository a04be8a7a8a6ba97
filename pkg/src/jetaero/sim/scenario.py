"""
Scenario files and the closed-loop rollout.

A scenario is a key=value file (paths are relative to the file):

    name=test2
    model=default
    gains=gains.txt
    coeffs=default
    weights=net.mlp
    plant_aero=axisym
    controller_aero=axisym
    wind=standard            # or calm, or t:vx,vy,vz;t:vx,vy,vz;...
    reference=standard       # or hover
    duration=60
    dt=0.001
    control_dt=0.01
    seed=0
    perturbation=0.0         # std of the initial joint offset (rad)
    max_com_error=1.0
    max_tilt_deg=60
    heading_deg=0
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from jetaero.aero.forces import AERO_KINDS, AXISYM, MLP, AeroProvider, make_provider
from jetaero.control.controller import ControllerMemory, FlightController
from jetaero.control.gains import ControlGains, load_gains
from jetaero.control.momentum import thrust_matrix
from jetaero.control.reference import MomentumReference
from jetaero.errors import ControllerFault, IntegrationFault, ScenarioError
from jetaero.model.kinematics import Kinematics
from jetaero.model.loader import load_model_file, resolve_model_path
from jetaero.model.robot import JointState, RobotModel
from jetaero.sim.envelope import STANDARD_MOVES, standard_wind
from jetaero.sim.integrator import MAX_DT, SimState, step
from jetaero.sim.log import SimLog, group_errors, log_columns
from jetaero.sim.wind import WindProfile, wind_at
from jetaero.utils.helpers import format_float, read_key_value_file
from jetaero.utils.logger import get_logger

logger = get_logger(__name__)

REFERENCES = ("standard", "hover")


def _default_dt() -> float:
    from jetaero.config import PLANT_DT
    return PLANT_DT


def _default_control_dt() -> float:
    from jetaero.config import CONTROL_DT
    return CONTROL_DT


@dataclass(frozen=True)
class Scenario:
    """One closed-loop flight test. controller_aero None defers to the gains file."""
    name: str = "scenario"
    model: str = "default"
    gains: Optional[str] = None
    coeffs: str = "default"
    weights: Optional[str] = None
    plant_aero: str = AXISYM
    controller_aero: Optional[str] = None
    wind: WindProfile = field(default_factory=WindProfile.calm, compare=False)
    reference: str = "standard"
    duration: float = 60.0
    dt: float = field(default_factory=_default_dt)
    control_dt: float = field(default_factory=_default_control_dt)
    seed: int = 0
    perturbation: float = 0.0
    max_com_error: float = 1.0
    max_tilt: float = math.radians(60.0)
    heading: float = 0.0
    base_dir: Optional[str] = None

    def validate(self) -> List[str]:
        errors = []
        if not 0 < self.dt <= MAX_DT:
            errors.append(f"dt must be in (0, {MAX_DT}], got {self.dt}")
        if self.duration < self.dt:
            errors.append("duration must be at least dt")
        if self.control_dt < self.dt:
            errors.append("control_dt must not be shorter than dt")
        if self.plant_aero not in AERO_KINDS:
            errors.append(f"plant_aero must be one of {', '.join(AERO_KINDS)}")
        if self.controller_aero is not None and self.controller_aero not in AERO_KINDS:
            errors.append(f"controller_aero must be one of {', '.join(AERO_KINDS)}")
        if self.reference not in REFERENCES:
            errors.append(f"reference must be one of {', '.join(REFERENCES)}")
        if self.max_com_error <= 0 or self.max_tilt <= 0:
            errors.append("failure thresholds must be positive")
        if self.perturbation < 0:
            errors.append("perturbation must be non-negative")
        return errors

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def control_every(self) -> int:
        return max(1, int(round(self.control_dt / self.dt)))

    def resolve(self, spec: str) -> Path:
        path = Path(spec)
        if not path.is_absolute() and self.base_dir is not None:
            path = Path(self.base_dir) / path
        return path


_KEYS = {
    "name": str, "model": str, "gains": str, "coeffs": str, "weights": str,
    "plant_aero": str, "controller_aero": str, "reference": str,
    "duration": float, "dt": float, "control_dt": float, "seed": int,
    "perturbation": float, "max_com_error": float,
}
_DEGREE_KEYS = {"max_tilt_deg": "max_tilt", "heading_deg": "heading"}


def parse_wind(text: str) -> WindProfile:
    if text == "standard":
        return standard_wind()
    if text == "calm":
        return WindProfile.calm()
    return WindProfile.parse(text)


def load_scenario(path, **overrides) -> Scenario:
    """
    Read a scenario file; keyword overrides win over the file.

    Raises:
        ScenarioError: On unknown keys, unparsable values or invalid settings
    """
    path = Path(path)
    values: Dict[str, object] = {"name": path.stem, "base_dir": str(path.parent)}
    try:
        entries = read_key_value_file(path)
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from None
    for line, key, value in entries:
        try:
            if key in _KEYS:
                values[key] = _KEYS[key](value)
            elif key in _DEGREE_KEYS:
                values[_DEGREE_KEYS[key]] = math.radians(float(value))
            elif key == "wind":
                values["wind"] = parse_wind(value)
            else:
                raise ScenarioError(f"unknown scenario key '{key}'", line)
        except ValueError as exc:
            raise ScenarioError(f"bad value for '{key}': {exc}", line) from None
    values.update({k: v for k, v in overrides.items() if v is not None})
    scenario = Scenario(**values)
    errors = scenario.validate()
    if errors:
        raise ScenarioError(f"{path}: " + "; ".join(errors))
    return scenario


def format_scenario(sc: Scenario) -> str:
    """Key=value text that load_scenario reads back to the same scenario."""
    lines = [f"name={sc.name}", f"model={sc.model}", f"coeffs={sc.coeffs}", f"plant_aero={sc.plant_aero}"]
    if sc.gains is not None:
        lines.append(f"gains={sc.gains}")
    if sc.weights is not None:
        lines.append(f"weights={sc.weights}")
    if sc.controller_aero is not None:
        lines.append(f"controller_aero={sc.controller_aero}")
    lines += [
        f"wind={sc.wind.format()}",
        f"reference={sc.reference}",
        f"duration={format_float(sc.duration)}",
        f"dt={format_float(sc.dt)}",
        f"control_dt={format_float(sc.control_dt)}",
        f"seed={sc.seed}",
        f"perturbation={format_float(sc.perturbation)}",
        f"max_com_error={format_float(sc.max_com_error)}",
        f"max_tilt_deg={format_float(math.degrees(sc.max_tilt))}",
        f"heading_deg={format_float(math.degrees(sc.heading))}",
    ]
    return "\n".join(lines) + "\n"


@dataclass(eq=False)
class ScenarioAssets:
    model: RobotModel
    gains: ControlGains
    plant: AeroProvider
    controller: AeroProvider


def load_assets(sc: Scenario, model: Optional[RobotModel] = None) -> ScenarioAssets:
    """Load the model, gains and aerodynamic models a scenario refers to."""
    from jetaero.aero.axisym import AeroFactors
    from jetaero.aero.coeffs_io import load_coeffs_file, resolve_coeffs_path
    from jetaero.aero.weights_io import load_mlp

    base_dir = Path(sc.base_dir) if sc.base_dir is not None else None
    if model is None:
        model = load_model_file(resolve_model_path(sc.model, base_dir))
    gains = load_gains(sc.resolve(sc.gains), model) if sc.gains is not None else ControlGains()
    controller_kind = sc.controller_aero if sc.controller_aero is not None else gains.aero_feedback

    kinds = {sc.plant_aero, controller_kind}
    coeffs = load_coeffs_file(resolve_coeffs_path(sc.coeffs, base_dir)) if AXISYM in kinds else None
    mlp = None
    if MLP in kinds:
        if sc.weights is None:
            raise ScenarioError(f"scenario '{sc.name}' uses the mlp model but names no weights file")
        mlp = load_mlp(sc.resolve(sc.weights))
    factors = AeroFactors.from_config()
    try:
        plant = make_provider(sc.plant_aero, coeffs, mlp, factors)
        controller = make_provider(controller_kind, coeffs, mlp, factors)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    return ScenarioAssets(model, gains, plant, controller)


def heading_quaternion(angle: float) -> np.ndarray:
    return np.array([0.0, 0.0, math.sin(angle / 2.0), math.cos(angle / 2.0)])


def initial_state(model: RobotModel, sc: Scenario) -> JointState:
    s = model.home_posture()
    if sc.perturbation > 0:
        rng = np.random.default_rng(sc.seed)
        s = np.clip(s + sc.perturbation * rng.standard_normal(s.shape[0]), model.joint_lower, model.joint_upper)
    return JointState.at_rest(model, joint_positions=s, base_orientation=heading_quaternion(sc.heading))


def hover_thrust(model: RobotModel, kin: Kinematics, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Least-squares thrust balancing gravity with no moment about the CoM, clipped to the limits."""
    target = np.zeros(6)
    target[5] = model.total_mass * model.gravity
    thrust, *_ = np.linalg.lstsq(thrust_matrix(kin), target, rcond=None)
    return np.clip(thrust, lower, upper)


def build_reference(sc: Scenario, start: np.ndarray) -> MomentumReference:
    if sc.reference == "hover":
        return MomentumReference.hover(start)
    c, s = math.cos(sc.heading), math.sin(sc.heading)
    rotation = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    moves = [(t0, d, rotation @ np.asarray(disp)) for t0, d, disp in STANDARD_MOVES]
    return MomentumReference.from_moves(start, moves)


def run_scenario(sc: Scenario, assets: Optional[ScenarioAssets] = None) -> SimLog:
    """
    Closed-loop rollout: control tick (zero-order hold on tau and T_dot),
    thrust integration, plant step; logs one row per control tick.

    Controller and integration faults end the run as failed; the log keeps
    every row up to the fault.
    """
    errors = sc.validate()
    if errors:
        raise ScenarioError(f"scenario '{sc.name}': " + "; ".join(errors))
    assets = assets if assets is not None else load_assets(sc)
    model, gains = assets.model, assets.gains

    state = initial_state(model, sc)
    kin = Kinematics(model, state)
    t_min, t_max = gains.thrust_bounds(model)
    thrust = hover_thrust(model, kin, t_min, t_max)
    reference = build_reference(sc, kin.com)
    control_dt = sc.control_every * sc.dt
    controller = FlightController(model, gains, reference, assets.controller, control_dt)
    controller.memory = ControllerMemory(np.zeros(3), state.joint_positions.copy(), model.home_posture())

    log = SimLog(log_columns(model), meta={
        "scenario": sc.name,
        "plant": assets.plant.kind,
        "controller": assets.controller.kind,
        "reference": "standard-stand-in" if sc.reference == "standard" else sc.reference,
        "dt": format_float(sc.dt),
        "control_dt": format_float(control_dt),
        "seed": str(sc.seed),
    })
    logger.info(f"Running scenario {sc.name}: plant={assets.plant.kind} controller={assets.controller.kind} "
                f"duration={sc.duration}s")

    sim = SimState(state, thrust, 0.0, kin=kin)
    output = None
    for k in range(sc.n_steps):
        t = k * sc.dt
        v_w = wind_at(sc.wind, t)
        ticked = k % sc.control_every == 0
        if ticked:
            try:
                output = controller.step(sim.state, sim.thrust, t, v_w, sim.kinematics(model))
            except ControllerFault as exc:
                log.fail(t, f"controller fault: {exc}")
                break
        ticked_state = sim
        thrust = np.clip(sim.thrust + sc.dt * output.thrust_rate, t_min, t_max)
        try:
            sim = step(model, sim, output.torque, thrust, v_w, assets.plant, sc.dt, k)
        except IntegrationFault as exc:
            log.fail(t, str(exc))
            break
        if ticked:
            tilt = ticked_state.tilt
            com_error = float(np.linalg.norm(output.com_error))
            log.append(np.concatenate([
                [t], output.com, output.com_error, [com_error, tilt], output.h, output.h_error,
                ticked_state.state.joint_positions,
                group_errors(model, ticked_state.state.joint_positions, model.home_posture()),
                ticked_state.thrust, sim.plant_aero_force, output.feedback.total_force, output.torque,
            ]))
            if com_error > sc.max_com_error:
                log.fail(t, f"com error {com_error:.3f} m above {sc.max_com_error} m")
                break
            if tilt > sc.max_tilt:
                log.fail(t, f"tilt {math.degrees(tilt):.1f} deg above {math.degrees(sc.max_tilt):.1f} deg")
                break
    if log.completed:
        logger.info(f"Scenario {sc.name} completed, max com error {log.max_of('com_err_norm'):.4f} m")
    return log


def run_scenarios(scenarios: Sequence[Scenario], jobs: int = 1) -> List[SimLog]:
    """Run independent scenarios, in worker processes when jobs > 1; results keep the input order."""
    if jobs <= 1 or len(scenarios) <= 1:
        return [run_scenario(sc) for sc in scenarios]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_scenario, scenarios))
