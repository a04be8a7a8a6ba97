import numpy as np
import pytest
from numpy.testing import assert_allclose

from jetaero.aero.axisym import (AeroFactors, AxisymCoeffs, angle_of_attack, eval_force_areas, eval_link_force,
                                 predict_force_areas, predict_link_forces_axisym, total_wrench)
from jetaero.aero.coeffs_io import format_coeffs, load_coeffs_file, parse_coeffs, write_coeffs_file
from jetaero.aero.forces import AXISYM, NONE, AxisymAero, NoAero, make_provider
from jetaero.aero.metrics import rel_err
from jetaero.aero.regression import (FitReport, LassoSettings, LinkProjection, fit_coefficients, fit_link_coefficients,
                                     lasso_coordinate_descent, project_dataset)
from jetaero.errors import CoeffsFormatError, DimensionMismatchError, FitError
from jetaero.model.robot import JointState

TORSO = np.array([0.025, 0.003, 0.045, 0.030, -0.002, 0.020])
AXIS = np.array([0.0, 0.0, 1.0])
FACTORS = AeroFactors(air_density=1.225)


def test_angle_of_attack():
    assert angle_of_attack([0.0, 0.0, 3.0], AXIS) == pytest.approx(0.0)
    assert angle_of_attack([1.0, 0.0, 0.0], AXIS) == pytest.approx(np.pi / 2)
    assert angle_of_attack([0.0, 0.0, -2.0], AXIS) == pytest.approx(np.pi)
    assert angle_of_attack([1e-13, 0.0, 0.0], AXIS) == 0.0
    with pytest.raises(ValueError):
        angle_of_attack([1.0, 0.0, 0.0], [0.0, 0.0, 2.0])


def test_force_areas_have_flat_endpoints():
    h = 1e-5
    for alpha in (0.0, np.pi):
        lo, hi = (alpha, alpha + h) if alpha == 0.0 else (alpha - h, alpha)
        cda_lo, cna_lo = eval_force_areas(TORSO, lo)
        cda_hi, cna_hi = eval_force_areas(TORSO, hi)
        assert abs(cda_hi - cda_lo) / h < 1e-3
        assert abs(cna_hi - cna_lo) / h < 1e-3
        assert eval_force_areas(TORSO, alpha)[1] == pytest.approx(0.0, abs=1e-15)


def test_zero_relative_wind_gives_zero_force():
    assert_allclose(eval_link_force(TORSO, FACTORS, np.zeros(3), AXIS), 0.0)


def test_axial_wind_is_pure_drag():
    v_a = np.array([0.0, 0.0, 4.0])
    force = eval_link_force(TORSO, FACTORS, v_a, AXIS)
    cda, _ = eval_force_areas(TORSO, 0.0)
    assert_allclose(force, -FACTORS.k_a * 4.0 * cda * v_a)


def test_crosswind_force_components():
    alpha = 0.7
    v_a = 5.0 * np.array([np.sin(alpha), 0.0, np.cos(alpha)])
    force = eval_link_force(TORSO, FACTORS, v_a, AXIS)
    cda, cna = eval_force_areas(TORSO, alpha)
    d = v_a / 5.0
    n = np.cross(np.cross(d, AXIS), d) / np.sin(alpha)
    assert force @ d == pytest.approx(-FACTORS.k_a * 25.0 * cda)
    assert force @ n == pytest.approx(FACTORS.k_a * 25.0 * cna)


def test_force_scales_with_speed_squared():
    v_a = np.array([1.0, 2.0, -0.5])
    base = eval_link_force(TORSO, FACTORS, v_a, AXIS)
    assert_allclose(eval_link_force(TORSO, FACTORS, 3.0 * v_a, AXIS), 9.0 * base)


def test_default_coefficients_have_positive_drag(true_coeffs):
    assert true_coeffs.drag_is_positive()
    assert len(true_coeffs.link_names) == 13


def test_coefficients_need_six_weights():
    with pytest.raises(DimensionMismatchError):
        AxisymCoeffs(weights={"torso": np.ones(5)})


def test_coefficients_file_round_trip(true_coeffs, tmp_path):
    path = tmp_path / "coeffs.txt"
    write_coeffs_file(true_coeffs, path)
    restored = load_coeffs_file(path)
    assert restored.link_names == true_coeffs.link_names
    for name in true_coeffs.link_names:
        assert np.array_equal(restored.for_link(name), true_coeffs.for_link(name))
    assert format_coeffs(restored) == path.read_text(encoding="utf-8")


@pytest.mark.parametrize("text, message", [
    ("coeffs torso w0=1 w1=1 w2=1 w3=1 w4=1\n", "missing field"),
    ("coeffs torso w0=1 w1=1 w2=1 w3=1 w4=1 w5=1 w6=1\n", "unknown field"),
    ("drag torso w0=1\n", "expected"),
    ("coeffs a w0=1 w1=1 w2=1 w3=1 w4=1 w5=1\ncoeffs a w0=1 w1=1 w2=1 w3=1 w4=1 w5=1\n", "duplicate"),
])
def test_coefficients_file_errors(text, message):
    with pytest.raises(CoeffsFormatError, match=message):
        parse_coeffs(text)


def test_link_forces_follow_the_com_velocity(humanoid, true_coeffs):
    state = JointState.at_rest(humanoid)
    still = predict_link_forces_axisym(humanoid, state, np.zeros(3), true_coeffs, FACTORS)
    assert_allclose(still, 0.0)
    # Moving through still air at v is the same as standing in a wind of -v
    v = np.array([2.0, -1.0, 0.5])
    moving = state.with_nu(np.concatenate([np.zeros(3), v, np.zeros(humanoid.n_joints)]))
    assert_allclose(predict_link_forces_axisym(humanoid, moving, np.zeros(3), true_coeffs, FACTORS),
                    predict_link_forces_axisym(humanoid, state, -v, true_coeffs, FACTORS), rtol=1e-12)


def test_total_wrench_of_a_uniform_wind(humanoid, true_coeffs):
    state = JointState.at_rest(humanoid)
    forces = predict_link_forces_axisym(humanoid, state, np.array([5.0, 0.0, 0.0]), true_coeffs, FACTORS)
    generalized = total_wrench(humanoid, state, forces)
    assert_allclose(generalized[3:6], forces.sum(axis=0), rtol=1e-12)
    assert forces.sum(axis=0)[0] > 0.0
    with pytest.raises(DimensionMismatchError):
        total_wrench(humanoid, state, forces[:-1])


def test_providers(humanoid, true_coeffs):
    state = JointState.at_rest(humanoid)
    wind = np.array([0.0, 4.0, 0.0])
    assert isinstance(make_provider(NONE), NoAero)
    assert_allclose(NoAero().link_forces(humanoid, state, wind), 0.0)
    provider = make_provider(AXISYM, coeffs=true_coeffs, factors=FACTORS)
    assert isinstance(provider, AxisymAero) and provider.enabled
    assert_allclose(provider.link_forces(humanoid, state, wind),
                    predict_link_forces_axisym(humanoid, state, wind, true_coeffs, FACTORS))
    with pytest.raises(ValueError):
        make_provider(AXISYM)
    with pytest.raises(ValueError):
        make_provider("cfd")


def test_lasso_zeroes_an_irrelevant_feature(rng):
    X = rng.normal(size=(200, 3))
    y = X @ np.array([1.5, 0.0, -2.0])
    w, _, converged = lasso_coordinate_descent(X, y, 0.05, np.array([True, True, True]))
    assert converged
    assert w[1] == 0.0
    assert w[0] > 1.0 and w[2] < -1.5


def test_fit_rejects_scarce_data():
    alpha = np.linspace(0.1, 1.0, 4)
    projection = LinkProjection(alpha, np.ones(4), alpha, np.zeros(4))
    with pytest.raises(FitError, match="too few samples"):
        fit_link_coefficients(projection, lam=0.0)
    alpha = np.repeat([0.2, 0.4, 0.6], 4)
    projection = LinkProjection(alpha, np.ones(12), alpha, np.zeros(12))
    with pytest.raises(FitError, match="distinct angles"):
        fit_link_coefficients(projection, lam=0.0)


def test_fit_recovers_the_ground_truth(humanoid, true_coeffs, clean_dataset):
    coeffs, report = fit_coefficients(humanoid, clean_dataset, lam=0.0, settings=LassoSettings())
    assert report.positivity_corrected == []
    for name in humanoid.aero_link_names:
        truth = true_coeffs.for_link(name)
        assert_allclose(coeffs.for_link(name), truth, rtol=0, atol=1e-8 * np.linalg.norm(truth))
    predicted = predict_force_areas(humanoid, clean_dataset.joints, clean_dataset.directions, coeffs)
    assert rel_err(predicted, clean_dataset.outputs) < 1e-6


def test_fit_with_cross_validated_lambda_on_one_link(humanoid, clean_dataset, true_coeffs):
    projection = project_dataset(humanoid, clean_dataset)["torso"]
    weights = fit_link_coefficients(projection, lam=None, settings=LassoSettings(cv_grid=8))
    cda, _ = eval_force_areas(weights, projection.alpha)
    assert rel_err(cda, projection.drag_area) < 1e-3
    assert np.all(eval_force_areas(weights, np.linspace(0, np.pi, 181))[0] >= -1e-9)


def test_fit_enforces_positive_drag():
    # Exact data from C_D A = 0.01 cos(alpha), negative past 90 degrees
    alpha = np.linspace(0.0, np.pi, 40)
    projection = LinkProjection(alpha, 0.01 * np.cos(alpha), alpha[1:-1], np.zeros(38))
    report = FitReport()
    weights = fit_link_coefficients(projection, lam=0.0, name="sample", report=report)
    assert report.positivity_corrected == ["sample"]
    grid = np.deg2rad(np.arange(0.0, 181.0))
    assert eval_force_areas(weights, grid)[0].min() >= -1e-8


def test_fit_checks_dimensions(single_body, clean_dataset):
    with pytest.raises(FitError, match="does not match"):
        fit_coefficients(single_body, clean_dataset, lam=0.0)


def test_link_forces_rotate_with_the_scene(humanoid, true_coeffs, rng):
    from scipy.spatial.transform import Rotation

    for seed in range(10):
        s = rng.uniform(humanoid.joint_lower, humanoid.joint_upper)
        base = Rotation.random(random_state=seed)
        state = JointState(
            base_position=rng.normal(size=3), base_orientation=base.as_quat(),
            base_angular_velocity=rng.normal(size=3), base_linear_velocity=rng.normal(size=3),
            joint_positions=s, joint_velocities=rng.normal(size=humanoid.n_joints))
        v_w = 5.0 * rng.normal(size=3)

        turn = Rotation.random(random_state=100 + seed)
        R = turn.as_matrix()
        turned = JointState(
            base_position=R @ state.base_position, base_orientation=(turn * base).as_quat(),
            base_angular_velocity=R @ state.base_angular_velocity,
            base_linear_velocity=R @ state.base_linear_velocity,
            joint_positions=s.copy(), joint_velocities=state.joint_velocities.copy())

        forces = predict_link_forces_axisym(humanoid, state, v_w, true_coeffs, FACTORS)
        rotated = predict_link_forces_axisym(humanoid, turned, R @ v_w, true_coeffs, FACTORS)
        assert_allclose(rotated, forces @ R.T, rtol=1e-9, atol=1e-9)
