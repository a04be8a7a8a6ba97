from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from jetaero.errors import DimensionMismatchError, ModelParseError, ModelValidationError, UnknownLinkError
from jetaero.model.kinematics import (Kinematics, centroidal_momentum, dynamics_terms, forward_kinematics,
                                      integrate_configuration, link_jacobian)
from jetaero.model.loader import load_model, parse_model
from jetaero.model.robot import JointState
from jetaero.model.validator import validate_model

EPS = 1e-6


def random_state(model, rng, speed=1.0):
    s = rng.uniform(model.joint_lower, model.joint_upper)
    quat = rng.normal(size=4)
    quat /= np.linalg.norm(quat)
    state = JointState.at_rest(model, s, base_position=rng.normal(size=3), base_orientation=quat)
    return state.with_nu(speed * rng.normal(size=model.nv))


def moved(state, nu, eps):
    return integrate_configuration(state, nu, eps)


def test_default_model_dimensions(humanoid):
    assert humanoid.total_mass == pytest.approx(43.3)
    assert humanoid.n_joints == 19
    assert humanoid.n_jets == 4
    assert humanoid.n_aero_links == 13
    assert humanoid.nv == 25
    assert humanoid.base_link.name == "pelvis"
    assert set(humanoid.groups) == {"torso", "left_arm", "right_arm", "left_leg", "right_leg"}


def test_unknown_directive_reports_line():
    with pytest.raises(ModelParseError) as info:
        parse_model("link a mass=1 inertia=1,1,1,0,0,0\nwing a span=2\n")
    assert info.value.line_number == 2
    assert "wing" in str(info.value)


def test_missing_field_is_a_parse_error():
    with pytest.raises(ModelParseError, match="missing field"):
        parse_model("link a inertia=1,1,1,0,0,0\n")


def test_self_parented_joint_is_rejected():
    text = """
    link a mass=1 inertia=1,1,1,0,0,0
    joint loop parent=a child=a axis=0,0,1 limits=-1,1 vmax=1
    """
    with pytest.raises(ModelValidationError, match="cycle"):
        load_model(text)


def test_validator_collects_every_error():
    text = """
    link a mass=-1 inertia=1,1,1,0,0,0
    link b mass=1 inertia=1,1,-1,0,0,0
    joint j parent=a child=b axis=0,0,1 limits=1,-1 vmax=1
    jet t link=b dir=0,0,1 tmin=5 tmax=2
    """
    is_valid, errors, _ = validate_model(parse_model(text))
    assert not is_valid
    joined = " ".join(errors)
    assert "mass must be positive" in joined
    assert "positive definite" in joined
    assert "lo < hi" in joined
    assert "thrust_min must be < thrust_max" in joined


def test_two_roots_are_rejected():
    text = """
    link a mass=1 inertia=1,1,1,0,0,0
    link b mass=1 inertia=1,1,1,0,0,0
    """
    with pytest.raises(ModelValidationError, match="more than one root"):
        load_model(text)


def test_posture_outside_limits_is_clipped():
    text = """
    link a mass=1 inertia=1,1,1,0,0,0
    link b mass=1 inertia=1,1,1,0,0,0
    joint j parent=a child=b axis=0,0,1 limits=-1,1 vmax=1
    posture j=2.0
    """
    model = load_model(text)
    assert model.home_posture()[0] == 1.0


def test_unknown_link(humanoid):
    with pytest.raises(UnknownLinkError):
        humanoid.find_link("tail")


def test_state_dimension_check(humanoid):
    state = JointState.at_rest(humanoid, np.zeros(3))
    with pytest.raises(DimensionMismatchError):
        Kinematics(humanoid, state)


def test_forward_kinematics_of_the_pendulum(pendulum):
    theta = 0.3
    kin = forward_kinematics(pendulum, JointState.at_rest(pendulum, [theta]))
    bob = pendulum.find_link("bob")
    assert_allclose(kin.coms[bob], [-0.5 * np.sin(theta), 0.0, -0.5 * np.cos(theta)], atol=1e-12)
    assert_allclose(kin.transform(bob)[:3, 3], [0.0, 0.0, 0.0], atol=1e-12)


def test_base_jacobian_at_the_origin(humanoid):
    J = link_jacobian(humanoid, JointState.at_rest(humanoid), "pelvis")
    assert_allclose(J[:, :6], np.eye(6), atol=1e-12)
    assert_allclose(J[:, 6:], 0.0, atol=1e-12)


def test_mass_matrix_is_symmetric_positive_definite(humanoid, rng):
    M, _ = dynamics_terms(humanoid, random_state(humanoid, rng))
    assert_allclose(M, M.T, atol=1e-12)
    assert np.linalg.eigvalsh(M).min() > 0.0


def test_bias_at_rest_holds_the_weight(humanoid):
    _, bias = dynamics_terms(humanoid, JointState.at_rest(humanoid))
    assert_allclose(bias[3:6], [0.0, 0.0, humanoid.total_mass * humanoid.gravity], rtol=1e-12, atol=1e-9)


def test_com_jacobian_matches_finite_differences(humanoid, rng):
    state = random_state(humanoid, rng)
    nu = state.nu
    kin = Kinematics(humanoid, state)
    plus = Kinematics(humanoid, moved(state, nu, EPS)).com
    minus = Kinematics(humanoid, moved(state, nu, -EPS)).com
    assert_allclose(kin.com_jacobian @ nu, (plus - minus) / (2 * EPS), rtol=1e-6, atol=1e-8)


def test_linear_momentum_is_mass_times_com_velocity(humanoid, rng):
    state = random_state(humanoid, rng)
    cs = centroidal_momentum(humanoid, state)
    kin = Kinematics(humanoid, state)
    assert_allclose(cs.h[3:6], humanoid.total_mass * (kin.com_jacobian @ state.nu), rtol=1e-12, atol=1e-12)


def test_bias_is_consistent_with_the_momentum_matrix(humanoid, rng):
    # Without gravity or applied forces the centroidal momentum is constant:
    # A_G nu_dot + A_G_dot nu = 0 with nu_dot = -M^-1 bias.
    model = replace(humanoid, gravity=0.0)
    state = random_state(model, rng)
    nu = state.nu
    kin = Kinematics(model, state)
    nu_dot = np.linalg.solve(kin.mass_matrix, -kin.bias)
    A_plus = Kinematics(model, moved(state, nu, EPS)).momentum_matrix
    A_minus = Kinematics(model, moved(state, nu, -EPS)).momentum_matrix
    h_dot = kin.momentum_matrix @ nu_dot + (A_plus - A_minus) @ nu / (2 * EPS)
    scale = np.linalg.norm(kin.momentum_matrix @ nu_dot)
    assert np.linalg.norm(h_dot) < 1e-5 * max(1.0, scale)


def test_integrate_configuration_keeps_a_unit_quaternion(humanoid, rng):
    state = random_state(humanoid, rng, speed=5.0)
    for _ in range(100):
        state = integrate_configuration(state, state.nu, 0.01)
    assert np.linalg.norm(state.base_orientation) == pytest.approx(1.0, abs=1e-12)


TWO_LINK = """
gravity g=9.81
link upper mass=3.0 com=0.05,0,0.1 inertia=0.04,0.05,0.03,0.002,0,0.001
link lower mass=1.5 com=0,0.02,-0.2 inertia=0.02,0.01,0.015,0,0.001,0
joint knee parent=upper child=lower axis=0.6,0,0.8 origin=0.1,0,-0.3 limits=-2,2 vmax=8
"""


def test_mass_matrix_is_positive_definite_across_states(humanoid, rng):
    for _ in range(100):
        M, _ = dynamics_terms(humanoid, random_state(humanoid, rng))
        assert np.linalg.eigvalsh(M).min() > 0.0


def test_angular_momentum_of_a_two_link_chain(rng):
    from scipy.spatial.transform import Rotation

    model = load_model(TWO_LINK)
    for _ in range(5):
        state = random_state(model, rng)
        ahead = Kinematics(model, moved(state, state.nu, EPS))
        behind = Kinematics(model, moved(state, state.nu, -EPS))
        kin = Kinematics(model, state)

        angular = np.zeros(3)
        linear = np.zeros(3)
        for i in range(len(model.links)):
            velocity = (ahead.coms[i] - behind.coms[i]) / (2 * EPS)
            omega = Rotation.from_matrix(ahead.rotations[i] @ behind.rotations[i].T).as_rotvec() / (2 * EPS)
            inertia = kin.rotations[i] @ model.link_inertias[i] @ kin.rotations[i].T
            mass = model.masses[i]
            angular += inertia @ omega + np.cross(kin.coms[i] - kin.com, mass * velocity)
            linear += mass * velocity

        h = centroidal_momentum(model, state).h
        assert_allclose(h[0:3], angular, rtol=1e-6, atol=1e-8)
        assert_allclose(h[3:6], linear, rtol=1e-6, atol=1e-8)


def test_free_base_joint_inertia_inverts_the_joint_block(humanoid, rng):
    kin = Kinematics(humanoid, random_state(humanoid, rng))
    expected = np.linalg.inv(np.linalg.inv(kin.mass_matrix)[6:, 6:])
    assert_allclose(kin.free_base_joint_inertia, expected, rtol=1e-8, atol=1e-10)
    assert np.linalg.eigvalsh(kin.free_base_joint_inertia).min() > 0.0
