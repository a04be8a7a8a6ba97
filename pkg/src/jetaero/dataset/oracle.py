"""
Synthetic aerodynamic dataset oracle.

Force areas are the axisymmetric ground truth of every link at its local
angle of attack plus a smooth, seed-determined interference term

    eps * A_ref * (1/3) * sum_k sin(k * u . z + phi_k),   z = (d, s)

per output channel, where A_ref is the mean clean force-area magnitude of
the channel's link.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from jetaero.aero.axisym import AxisymCoeffs, force_area_vectors, link_axes_in_base
from jetaero.dataset.augment import mirror_map
from jetaero.dataset.samples import AeroDataset, wind_direction
from jetaero.errors import DatasetError, ScenarioError
from jetaero.model.robot import RobotModel
from jetaero.utils.helpers import format_vector, read_key_value_file, short_digest
from jetaero.utils.logger import get_logger, ic

logger = get_logger(__name__)

N_HARMONICS = 3
N_SYMMETRIC_CONFIGS = 2


@dataclass(frozen=True, eq=False)
class OracleConfig:
    """Ground truth, interference amplitude, seed and grid of the oracle."""
    coeffs: AxisymCoeffs
    interference: float = 0.0
    seed: int = 0
    n_configs: int = 24
    n_pitch: int = 19
    n_yaw: int = 18

    def __post_init__(self):
        if not self.interference >= 0.0:
            raise DatasetError(f"interference amplitude must be >= 0, got {self.interference}")
        for key in ("n_configs", "n_pitch", "n_yaw"):
            if getattr(self, key) < 1:
                raise DatasetError(f"{key} must be >= 1, got {getattr(self, key)}")

    @property
    def n_samples(self) -> int:
        return self.n_configs * self.n_pitch * self.n_yaw

    def digest(self) -> str:
        parts = [f"{name}:{format_vector(self.coeffs.for_link(name))}" for name in self.coeffs.link_names]
        parts += [repr(float(self.interference)), str(self.seed),
                  f"{self.n_configs}x{self.n_pitch}x{self.n_yaw}"]
        return short_digest(*parts)


def pitch_grid(n_pitch: int) -> np.ndarray:
    """n_pitch values from 0 to 180 degrees, in radians."""
    if n_pitch == 1:
        return np.zeros(1)
    return np.deg2rad(np.linspace(0.0, 180.0, n_pitch))


def yaw_grid(n_yaw: int) -> np.ndarray:
    """yaw_k = -180 + (k + 1) * 360 / n_yaw degrees, in radians; ends at 180."""
    return np.deg2rad(-180.0 + (np.arange(n_yaw) + 1.0) * 360.0 / n_yaw)


def sample_configurations(model: RobotModel, n_configs: int, rng: np.random.Generator) -> np.ndarray:
    """
    Joint configurations of the oracle grid.

    The first is the home posture, the next two are random mirror-symmetric
    configurations (when the model declares a symmetry) and the rest are
    uniform within the joint limits.
    """
    lower, upper = model.joint_lower, model.joint_upper
    configs = [model.home_posture()]
    mapping = mirror_map(model) if model.has_symmetry else None
    n_symmetric = N_SYMMETRIC_CONFIGS if mapping is not None else 0
    for k in range(1, n_configs):
        s = rng.uniform(lower, upper)
        if k <= n_symmetric:
            mirrored = np.clip(mapping.mirror_joints(s), lower, upper)
            left = mapping.joint_perm > np.arange(model.n_joints)
            s = np.where(left, s, mirrored)
            self_mapped = mapping.joint_perm == np.arange(model.n_joints)
            s = np.where(self_mapped & (mapping.joint_signs < 0), np.clip(0.0, lower, upper), s)
        configs.append(s)
    return np.array(configs[:n_configs]).reshape(n_configs, model.n_joints)


def _interference(inputs: np.ndarray, clean: np.ndarray, amplitude: float,
                  rng: np.random.Generator) -> np.ndarray:
    n, n_links, _ = clean.shape
    n_channels = 3 * n_links
    u = rng.normal(size=(n_channels, inputs.shape[1])) / np.sqrt(inputs.shape[1])
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(N_HARMONICS, n_channels))
    if amplitude == 0.0:
        return np.zeros_like(clean)
    projection = inputs @ u.T
    waves = sum(np.sin((k + 1) * projection + phases[k]) for k in range(N_HARMONICS)) / N_HARMONICS
    reference = np.linalg.norm(clean, axis=2).mean(axis=0)
    scale = amplitude * np.repeat(reference, 3)
    return (waves * scale).reshape(n, n_links, 3)


def oracle_generate(model: RobotModel, cfg: OracleConfig) -> AeroDataset:
    """
    Evaluate the oracle on the full (configuration, pitch, yaw) grid.

    Rows are ordered configuration-major, then pitch, then yaw; the result is
    a pure function of (model, cfg).

    Raises:
        DatasetError: If ground-truth coefficients are missing for a link
    """
    missing = [name for name in model.aero_link_names if name not in cfg.coeffs.weights]
    if missing:
        raise DatasetError(f"missing ground-truth coefficients for link(s): {', '.join(missing)}")
    weights = cfg.coeffs.matrix(model.aero_link_names)
    n_links = weights.shape[0]

    config_seq, noise_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    configs = sample_configurations(model, cfg.n_configs, np.random.default_rng(config_seq))

    pitch, yaw = np.meshgrid(pitch_grid(cfg.n_pitch), yaw_grid(cfg.n_yaw), indexing="ij")
    pitch, yaw = pitch.ravel(), yaw.ravel()
    directions = wind_direction(pitch, yaw)
    n_dirs = directions.shape[0]

    blocks = []
    for s in configs:
        axes = link_axes_in_base(model, s)
        areas = force_area_vectors(
            np.tile(weights, (n_dirs, 1)),
            np.repeat(directions, n_links, axis=0),
            np.tile(axes, (n_dirs, 1)),
        )
        blocks.append(areas.reshape(n_dirs, n_links, 3))
    clean = np.concatenate(blocks)

    joints = np.repeat(configs, n_dirs, axis=0)
    all_pitch = np.tile(pitch, cfg.n_configs)
    all_yaw = np.tile(yaw, cfg.n_configs)
    inputs = np.hstack([wind_direction(all_pitch, all_yaw), joints])
    outputs = clean + _interference(inputs, clean, cfg.interference, np.random.default_rng(noise_seq))
    ic(cfg.n_samples, cfg.interference)

    ds = AeroDataset(
        joints=joints, pitch=all_pitch, yaw=all_yaw, outputs=outputs,
        seed=cfg.seed, config_hash=cfg.digest(), augmented=False,
        link_names=model.aero_link_names, joint_names=model.joint_names,
    )
    logger.info(f"Oracle generated {len(ds)} samples ({cfg.n_configs} configs x {cfg.n_pitch} pitch "
                f"x {cfg.n_yaw} yaw, interference={cfg.interference})")
    return ds


_ORACLE_KEYS = {"coeffs", "interference", "seed", "n_configs", "n_pitch", "n_yaw"}


def load_oracle_config(path, seed: Optional[int] = None, base_dir: Optional[Path] = None) -> OracleConfig:
    """
    Read an oracle key=value file.

    Keys: coeffs (path or 'default'), interference, seed, n_configs, n_pitch,
    n_yaw. A `seed` argument overrides the file.

    Raises:
        ScenarioError: On unknown keys or unparsable values
    """
    from jetaero.aero.coeffs_io import load_coeffs_file, resolve_coeffs_path

    path = Path(path)
    base_dir = base_dir if base_dir is not None else path.parent
    values: Dict[str, str] = {}
    for line, key, value in read_key_value_file(path):
        if key not in _ORACLE_KEYS:
            raise ScenarioError(f"unknown oracle key '{key}'", line)
        values[key] = value
    try:
        coeffs = load_coeffs_file(resolve_coeffs_path(values.get("coeffs", "default"), base_dir))
        return OracleConfig(
            coeffs=coeffs,
            interference=float(values.get("interference", 0.0)),
            seed=int(values.get("seed", 0)) if seed is None else int(seed),
            n_configs=int(values.get("n_configs", 24)),
            n_pitch=int(values.get("n_pitch", 19)),
            n_yaw=int(values.get("n_yaw", 18)),
        )
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def default_oracle_config(seed: int = 0, interference: float = 0.0) -> OracleConfig:
    from jetaero.aero.coeffs_io import load_default_coeffs
    return OracleConfig(coeffs=load_default_coeffs(), interference=interference, seed=seed)
