import json

import pytest

from jetaero.config import Config, ConfigurationError


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    for name in ("JETAERO_CONFIG_FILE", "JETAERO_LOG_LEVEL", "JETAERO_OUTPUT_DIR", "JETAERO_AIR_DENSITY",
                 "JETAERO_GRAVITY", "JETAERO_PLANT_DT", "JETAERO_CONTROL_DT"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("JETAERO_LOG_FILE", str(tmp_path / "logs" / "jetaero.log"))
    monkeypatch.setenv("JETAERO_CONFIG_FILE", str(tmp_path / "absent.json"))
    return monkeypatch


def write_json(tmp_path, payload) -> str:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def test_defaults(clean_env):
    config = Config()
    assert config.AIR_DENSITY == 1.225
    assert config.PLANT_DT == 1e-3
    assert config.CONTROL_DT == 1e-2
    assert config.NUMERICS["cv_folds"] == 5
    assert isinstance(config.LOG_FILE, str)
    assert config.validate()[0]


def test_file_then_environment(clean_env, tmp_path):
    clean_env.setenv("JETAERO_CONFIG_FILE", write_json(tmp_path, {
        "gravity": 9.80665, "plant_dt": 0.002, "numerics": {"cv_folds": 3}}))
    clean_env.setenv("JETAERO_PLANT_DT", "0.0025")
    config = Config()
    assert config.GRAVITY == 9.80665
    assert config.PLANT_DT == 0.0025
    assert config.NUMERICS["cv_folds"] == 3
    assert config.NUMERICS["lasso_tol"] == 1e-10
    assert config.get_summary()["plant_dt"] == 0.0025


def test_invalid_json(clean_env, tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json", encoding="utf-8")
    clean_env.setenv("JETAERO_CONFIG_FILE", str(path))
    with pytest.raises(ConfigurationError, match="Invalid JSON"):
        Config()


def test_invalid_environment_value(clean_env):
    clean_env.setenv("JETAERO_AIR_DENSITY", "thick")
    with pytest.raises(ConfigurationError, match="JETAERO_AIR_DENSITY"):
        Config()


@pytest.mark.parametrize("plant_dt, control_dt, fragment", [
    ("0.01", "0.02", "5 ms"),
    ("0.002", "0.001", "not be shorter"),
    ("-1", "0.01", "must be positive"),
])
def test_time_step_errors(clean_env, plant_dt, control_dt, fragment):
    clean_env.setenv("JETAERO_PLANT_DT", plant_dt)
    clean_env.setenv("JETAERO_CONTROL_DT", control_dt)
    is_valid, errors, _ = Config().validate()
    assert not is_valid
    assert any(fragment in e for e in errors)


def test_uneven_control_period_is_a_warning(clean_env):
    clean_env.setenv("JETAERO_PLANT_DT", "0.003")
    clean_env.setenv("JETAERO_CONTROL_DT", "0.01")
    is_valid, _, warnings = Config().validate()
    assert is_valid
    assert any("not a multiple" in w for w in warnings)


def test_collects_every_error(clean_env, tmp_path):
    clean_env.setenv("JETAERO_CONFIG_FILE", write_json(tmp_path, {
        "gravity": -1, "log_level": "LOUD", "numerics": {"cv_folds": 1}}))
    is_valid, errors, _ = Config().validate()
    assert not is_valid
    assert len(errors) == 3
