import math
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.spatial.transform import Rotation

from jetaero.aero.forces import AXISYM, MLP, NONE
from jetaero.aero.mlp import MlpArch, mlp_init
from jetaero.aero.training import TrainConfig, train
from jetaero.aero.weights_io import save_mlp
from jetaero.dataset.augment import split
from jetaero.dataset.oracle import OracleConfig, oracle_generate
from jetaero.errors import IntegrationFault, ReportSchemaError, ScenarioError
from jetaero.model.kinematics import centroidal_momentum
from jetaero.model.robot import JointState
from jetaero.sim.envelope import (ablation_matrix, fictitious_wind, rotated_about_vertical, standard_envelope,
                                  standard_wind)
from jetaero.sim.integrator import SimState, step
from jetaero.sim.log import SimLog, group_errors, log_columns, parse_log
from jetaero.sim.scenario import (Scenario, format_scenario, initial_state, load_assets, load_scenario,
                                  run_scenario, run_scenarios)
from jetaero.sim.wind import WindProfile, wind_at


def quick_scenario(**kwargs):
    values = dict(name="quick", reference="hover", duration=0.1, dt=1e-3, control_dt=1e-2,
                  plant_aero=NONE, controller_aero=NONE)
    values.update(kwargs)
    return Scenario(**values)


# --- wind ----------------------------------------------------------------

def test_wind_interpolates_between_knots():
    profile = WindProfile.parse("0:0,0,0; 2:4,0,0; 3:4,2,0")
    assert_allclose(wind_at(profile, -1.0), [0.0, 0.0, 0.0])
    assert_allclose(wind_at(profile, 1.0), [2.0, 0.0, 0.0])
    assert_allclose(wind_at(profile, 2.5), [4.0, 1.0, 0.0])
    assert_allclose(wind_at(profile, 10.0), [4.0, 2.0, 0.0])
    assert WindProfile.parse(profile.format()).format() == profile.format()


@pytest.mark.parametrize("text", ["", "1:0,0", "2:1,0,0;1:0,0,0", "0 1,0,0", "0:nan,0,0"])
def test_bad_wind_profiles(text):
    with pytest.raises(ValueError):
        WindProfile.parse(text)


def test_standard_wind_turns_over_one_second():
    wind = standard_wind()
    assert_allclose(wind_at(wind, 2.5), [2.5, 0.0, 0.0])
    assert_allclose(wind_at(wind, 30.5), [2.5, 2.5, 0.0])
    assert_allclose(wind_at(wind, 45.0), [0.0, 5.0, 0.0])


# --- integrator ----------------------------------------------------------

def test_free_fall_step(single_body):
    sim = SimState(JointState.at_rest(single_body), np.zeros(2))
    after = step(single_body, sim, np.zeros(0), np.zeros(2), np.zeros(3), None, 1e-3)
    assert_allclose(after.state.nu, [0.0, 0.0, 0.0, 0.0, 0.0, -9.81e-3], atol=1e-15)
    assert after.state.base_position[2] == pytest.approx(-9.81e-6)
    assert after.t == pytest.approx(1e-3)


def test_balanced_thrust_holds_the_body_still(single_body):
    sim = SimState(JointState.at_rest(single_body), np.array([9.81, 9.81]))
    for k in range(100):
        sim = step(single_body, sim, np.zeros(0), sim.thrust, np.zeros(3), None, 1e-3, k)
    assert_allclose(sim.state.nu, 0.0, atol=1e-12)
    assert_allclose(sim.state.base_position, 0.0, atol=1e-12)
    assert sim.tilt == pytest.approx(0.0, abs=1e-12)


def test_momentum_is_conserved_without_external_forces(humanoid, rng):
    model = replace(humanoid, gravity=0.0)
    state = JointState.at_rest(model).with_nu(0.5 * rng.normal(size=model.nv))
    h0 = centroidal_momentum(model, state).h
    sim = SimState(state, np.zeros(model.n_jets))
    for k in range(200):
        sim = step(model, sim, np.zeros(model.n_joints), sim.thrust, np.zeros(3), None, 1e-3, k)
    assert_allclose(centroidal_momentum(model, sim.state).h, h0, rtol=1e-9, atol=1e-9)
    assert np.linalg.norm(sim.state.base_orientation) == pytest.approx(1.0, abs=1e-12)


def test_plant_aero_forces_are_recorded(humanoid, true_coeffs):
    from jetaero.aero.axisym import AeroFactors
    from jetaero.aero.forces import make_provider

    plant = make_provider(AXISYM, coeffs=true_coeffs, factors=AeroFactors(air_density=1.225))
    sim = SimState(JointState.at_rest(humanoid), np.zeros(humanoid.n_jets))
    after = step(humanoid, sim, np.zeros(humanoid.n_joints), sim.thrust, np.array([6.0, 0.0, 0.0]), plant, 1e-3)
    assert after.plant_link_forces.shape == (humanoid.n_aero_links, 3)
    assert after.plant_aero_force[0] > 0.0
    assert_allclose(sim.plant_aero_force, 0.0)


@pytest.mark.parametrize("dt", [0.0, -1e-3, 0.01])
def test_plant_step_size_is_guarded(single_body, dt):
    sim = SimState(JointState.at_rest(single_body), np.zeros(2))
    with pytest.raises(ValueError):
        step(single_body, sim, np.zeros(0), np.zeros(2), np.zeros(3), None, dt)


def test_non_finite_torque_is_an_integration_fault(pendulum):
    sim = SimState(JointState.at_rest(pendulum), np.zeros(0))
    with pytest.raises(IntegrationFault) as info:
        step(pendulum, sim, np.array([np.nan]), np.zeros(0), np.zeros(3), None, 1e-3, step_index=7)
    assert info.value.step_index == 7


# --- log -----------------------------------------------------------------

def test_log_columns(humanoid):
    columns = log_columns(humanoid)
    n, m = humanoid.n_joints, humanoid.n_jets
    assert len(columns) == 1 + 3 + 3 + 2 + 6 + 6 + n + len(humanoid.groups) + m + 3 + 3 + n
    assert columns[:4] == ["t", "com_x", "com_y", "com_z"]
    assert len(set(columns)) == len(columns)


def test_group_errors(humanoid):
    posture = humanoid.home_posture()
    assert_allclose(group_errors(humanoid, posture, posture), 0.0)
    group, joints = next(iter(humanoid.groups.items()))
    moved = posture.copy()
    moved[humanoid.dof_of(joints[0])] += 0.1
    errors = group_errors(humanoid, moved, posture)
    assert errors[0] == pytest.approx(0.1)
    assert_allclose(errors[1:], 0.0)


def test_log_rows_are_checked():
    log = SimLog(["t", "x"])
    log.append([0.0, 1.0])
    with pytest.raises(ValueError):
        log.append([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        log.append([-1.0, 0.0])


def test_log_text_round_trip():
    log = SimLog(["t", "com_err_norm"], meta={"scenario": "sample", "plant": "axisym"})
    log.append([0.0, 0.1])
    log.append([0.01, 0.30000000000000004])
    log.fail(0.01, "com error above limit")
    parsed = parse_log(log.to_csv())
    assert parsed.columns == log.columns
    assert not parsed.completed
    assert parsed.failed_at == 0.01
    assert parsed.verdict == "failed@0.01"
    assert parsed.reason
    assert parsed.meta == {"scenario": "sample", "plant": "axisym"}
    assert parsed.to_csv() == log.to_csv()
    assert parsed.max_of("com_err_norm") == 0.30000000000000004


@pytest.mark.parametrize("text", ["t,x\n0,1\n", "# sim-log v1\nt,x\n0\n", "# sim-log v1\nt,x\n0,abc\n"])
def test_malformed_logs(text):
    with pytest.raises(ReportSchemaError):
        parse_log(text)


# --- envelope ------------------------------------------------------------

def test_standard_envelope_returns_to_its_start():
    reference, _ = standard_envelope((1.0, 2.0, 3.0))
    assert_allclose(reference.com(0.0)[0], [1.0, 2.0, 3.0])
    assert_allclose(reference.com(25.0)[0], [3.0, 2.5, 3.0])
    assert_allclose(reference.com(40.0)[0], [1.0, 2.0, 3.0], atol=1e-12)
    assert reference.end_time == 40.0


def test_ablation_matrix():
    base = quick_scenario(name="env")
    names = [sc.name for sc in ablation_matrix(base)]
    assert names == ["env-test1", "env-test2"]
    full = ablation_matrix(replace(base, weights="net.mlp"))
    pairs = [(sc.plant_aero, sc.controller_aero) for sc in full]
    assert pairs == [(AXISYM, NONE), (AXISYM, AXISYM), (MLP, NONE), (MLP, MLP), (MLP, AXISYM)]


def test_fictitious_wind_and_rotation():
    base = quick_scenario(name="env", wind=standard_wind(), reference="standard")
    fictitious = fictitious_wind(base)
    assert (fictitious.plant_aero, fictitious.controller_aero, fictitious.reference) == (NONE, AXISYM, "hover")
    rotated = rotated_about_vertical(base, math.pi / 2)
    assert_allclose(wind_at(rotated.wind, 10.0), [0.0, 5.0, 0.0], atol=1e-12)
    assert rotated.heading == pytest.approx(math.pi / 2)


# --- scenarios -----------------------------------------------------------

def test_load_scenario(write_text):
    path = write_text("runs/hover.cfg", "\n".join([
        "plant_aero=axisym", "controller_aero=none", "wind=0:0,0,0;1:3,0,0", "reference=hover",
        "duration=2.5", "seed=4", "max_tilt_deg=45", "gains=gains.cfg",
    ]))
    sc = load_scenario(path)
    assert sc.name == "hover"
    assert sc.duration == 2.5 and sc.seed == 4
    assert sc.max_tilt == pytest.approx(math.radians(45.0))
    assert_allclose(wind_at(sc.wind, 1.0), [3.0, 0.0, 0.0])
    assert sc.resolve(sc.gains) == path.parent / "gains.cfg"
    assert load_scenario(path, duration=1.0, seed=None).duration == 1.0


def test_scenario_text_round_trip(write_text):
    sc = quick_scenario(name="sample", wind=standard_wind(), seed=3, perturbation=0.02)
    again = load_scenario(write_text("sample.cfg", format_scenario(sc)))
    for name in ("name", "plant_aero", "controller_aero", "reference", "duration", "dt", "control_dt",
                 "seed", "perturbation", "max_com_error"):
        assert getattr(again, name) == getattr(sc, name)
    assert again.wind.format() == sc.wind.format()
    assert again.max_tilt == pytest.approx(sc.max_tilt)


@pytest.mark.parametrize("text, message", [
    ("duration=1\nspeed=3\n", "line 2"),
    ("duration=abc\n", "bad value"),
    ("dt=0.01\n", "dt must be"),
    ("plant_aero=cfd\n", "plant_aero"),
    ("reference=loop\n", "reference"),
])
def test_scenario_errors(write_text, text, message):
    with pytest.raises(ScenarioError, match=message):
        load_scenario(write_text("bad.cfg", text))


def test_mlp_scenario_needs_weights(humanoid):
    with pytest.raises(ScenarioError, match="weights"):
        load_assets(quick_scenario(plant_aero=MLP), model=humanoid)


def test_perturbation_is_seeded(humanoid):
    sc = quick_scenario(perturbation=0.05, seed=1)
    first = initial_state(humanoid, sc).joint_positions
    assert np.array_equal(first, initial_state(humanoid, sc).joint_positions)
    assert not np.array_equal(first, initial_state(humanoid, replace(sc, seed=2)).joint_positions)
    assert np.all(first >= humanoid.joint_lower) and np.all(first <= humanoid.joint_upper)
    assert np.array_equal(initial_state(humanoid, quick_scenario()).joint_positions, humanoid.home_posture())


def test_short_hover_completes(humanoid):
    sc = quick_scenario()
    log = run_scenario(sc, load_assets(sc, model=humanoid))
    assert log.completed
    assert len(log.rows) == 10
    assert_allclose(log.channel("t"), np.arange(10) * 0.01, atol=1e-12)
    assert log.max_of("com_err_norm") < 1e-3
    assert log.meta["reference"] == "hover"


def test_rollouts_are_deterministic(humanoid):
    sc = quick_scenario(plant_aero=AXISYM, controller_aero=AXISYM, wind=WindProfile.parse("0:4,1,0"),
                        perturbation=0.02, seed=5)
    assets = load_assets(sc, model=humanoid)
    assert run_scenario(sc, assets).to_csv() == run_scenario(sc, assets).to_csv()


def test_a_tight_threshold_fails_the_run(humanoid):
    sc = quick_scenario(plant_aero=AXISYM, wind=WindProfile.parse("0:20,0,0"), max_com_error=1e-9)
    log = run_scenario(sc, load_assets(sc, model=humanoid))
    assert not log.completed
    assert "com error" in log.reason
    assert log.failed_at <= sc.duration
    assert len(log.rows) >= 1


def test_rank_collapse_fails_the_run(single_body):
    sc = quick_scenario()
    log = run_scenario(sc, load_assets(sc, model=single_body))
    assert not log.completed
    assert log.failed_at == 0.0
    assert log.rows == []
    assert "controller fault" in log.reason


def test_invalid_scenario_is_rejected():
    with pytest.raises(ScenarioError):
        run_scenario(quick_scenario(dt=0.01))


def test_run_scenarios_keeps_the_order():
    scenarios = [quick_scenario(name="a", duration=0.02), quick_scenario(name="b", duration=0.03)]
    logs = run_scenarios(scenarios, jobs=1)
    assert [log.meta["scenario"] for log in logs] == ["a", "b"]
    assert [len(log.rows) for log in logs] == [2, 3]


def com_track(log) -> np.ndarray:
    return np.column_stack([log.channel(f"com_{a}") for a in "xyz"])


def test_hover_at_the_default_rates(humanoid):
    sc = quick_scenario(duration=1.5)
    log = run_scenario(sc, load_assets(sc, model=humanoid))
    assert log.completed
    assert len(log.rows) == 150
    assert log.max_of("com_err_norm") < 1e-2
    assert log.max_of("tilt") < math.radians(2.0)


def test_halving_the_plant_step_keeps_the_hover(humanoid):
    wind = WindProfile.parse("0:3,1,0")
    coarse = quick_scenario(duration=1.0, plant_aero=AXISYM, controller_aero=AXISYM, wind=wind)
    fine = replace(coarse, dt=coarse.dt / 2.0)
    logs = [run_scenario(sc, load_assets(sc, model=humanoid)) for sc in (coarse, fine)]
    assert all(log.completed for log in logs)
    assert len(logs[0].rows) == len(logs[1].rows) == 100
    assert np.linalg.norm(com_track(logs[0])[-1] - com_track(logs[1])[-1]) < 1e-3


def test_rollouts_turn_with_the_wind(humanoid):
    angle = 0.7
    base = quick_scenario(name="turn", duration=0.5, plant_aero=AXISYM, controller_aero=AXISYM,
                          wind=WindProfile.parse("0:0,0,0;0.2:4,1,0"))
    turned = rotated_about_vertical(base, angle)
    logs = [run_scenario(sc, load_assets(sc, model=humanoid)) for sc in (base, turned)]
    assert all(log.completed for log in logs)
    rotation = Rotation.from_euler("z", angle).as_matrix()
    assert_allclose(com_track(logs[1]), com_track(logs[0]) @ rotation.T, rtol=1e-7, atol=1e-9)
    assert_allclose(logs[1].channel("com_err_norm"), logs[0].channel("com_err_norm"), rtol=1e-6, atol=1e-9)
    assert_allclose(logs[1].channel("tilt"), logs[0].channel("tilt"), rtol=1e-6, atol=1e-9)


@pytest.mark.slow
def test_hover_holds_the_com(humanoid):
    sc = quick_scenario(duration=30.0)
    log = run_scenario(sc, load_assets(sc, model=humanoid))
    assert log.completed
    assert log.max_of("com_err_norm") < 0.05


@pytest.mark.slow
def test_aero_aware_controller_flies_the_envelope(humanoid):
    base = quick_scenario(name="env", duration=60.0, reference="standard", wind=standard_wind())
    aware = ablation_matrix(base)[1]
    log = run_scenario(aware, load_assets(aware, model=humanoid))
    assert log.completed
    assert log.max_of("tilt") < math.radians(60.0)


@pytest.mark.slow
def test_controller_aero_model_ordering_against_a_network_plant(humanoid, true_coeffs, tmp_path):
    ds = oracle_generate(humanoid, OracleConfig(coeffs=true_coeffs, interference=0.3, seed=2, n_configs=12))
    train_ds, val_ds = split(ds, 0.8, seed=0)
    arch = MlpArch(input_dim=ds.inputs.shape[1], output_dim=ds.targets.shape[1], n_hidden=2, width=64, dropout=0.0)
    mlp, _ = train(mlp_init(arch, seed=0), train_ds, val_ds,
                   TrainConfig(epochs=300, batch_size=64, learning_rate=2e-3, seed=0))
    save_mlp(mlp, tmp_path / "net.mlp")

    base = quick_scenario(name="env", duration=60.0, reference="standard", wind=standard_wind(),
                          weights=str(tmp_path / "net.mlp"))
    errors = {}
    for sc in ablation_matrix(base):
        if sc.plant_aero != MLP:
            continue
        log = run_scenario(sc, load_assets(sc, model=humanoid))
        assert log.completed or sc.controller_aero == NONE, log.reason
        errors[sc.controller_aero] = log.max_of("com_err_norm")

    assert errors[NONE] > errors[AXISYM]
    assert errors[AXISYM] + 1e-3 >= errors[MLP]
