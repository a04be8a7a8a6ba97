"""Shared fixtures: small robots, the packaged humanoid and a clean oracle dataset."""
import os
import tempfile
from pathlib import Path

# Keep test runs out of the project log file
os.environ.setdefault("JETAERO_LOG_FILE", str(Path(tempfile.gettempdir()) / "jetaero-tests.log"))

import numpy as np
import pytest

from jetaero.aero.coeffs_io import load_default_coeffs
from jetaero.dataset.oracle import OracleConfig, oracle_generate
from jetaero.model.loader import load_default_model, load_model

# One rigid body, CoM at the base origin, two upward jets 0.1 m either side.
SINGLE_BODY = """
gravity g=9.81
link body mass=2.0 com=0,0,0 inertia=0.02,0.03,0.04,0,0,0 axis=0,0,1 aero=1
jet left  link=body dir=0,0,1 pos=0.1,0,0  tmin=0 tmax=50
jet right link=body dir=0,0,1 pos=-0.1,0,0 tmin=0 tmax=50
"""

# Base plus a bob hanging 0.5 m below a pitch joint.
PENDULUM = """
gravity g=9.81
link base mass=5.0 inertia=0.05,0.05,0.05,0,0,0
link bob  mass=2.0 com=0,0,-0.5 inertia=0.01,0.01,0.01,0,0,0 aero=1
joint swing parent=base child=bob axis=0,1,0 origin=0,0,0 limits=-3,3 vmax=10
"""


@pytest.fixture(scope="session")
def humanoid():
    return load_default_model()


@pytest.fixture(scope="session")
def true_coeffs():
    return load_default_coeffs()


@pytest.fixture(scope="session")
def single_body():
    return load_model(SINGLE_BODY, name="single_body")


@pytest.fixture(scope="session")
def pendulum():
    return load_model(PENDULUM, name="pendulum")


@pytest.fixture(scope="session")
def clean_dataset(humanoid, true_coeffs):
    """Interference-free oracle samples on a coarse grid (4 x 7 x 6)."""
    cfg = OracleConfig(coeffs=true_coeffs, interference=0.0, seed=3, n_configs=4, n_pitch=7, n_yaw=6)
    return oracle_generate(humanoid, cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def write_text(tmp_path):
    """Write a text file under tmp_path and return its path."""
    def _write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return path
    return _write
