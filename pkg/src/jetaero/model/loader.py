"""
Parser for the line-based robot model format.

One directive per line, '#' starts a comment:

    link <name> mass=<kg> com=<x,y,z> inertia=<ixx,iyy,izz,ixy,ixz,iyz> axis=<x,y,z> aero=<0|1>
    joint <name> parent=<link> child=<link> axis=<x,y,z> origin=<x,y,z> limits=<lo,hi> vmax=<rad/s>
    joint <name> parent=<link> child=<link> origin=<x,y,z> type=fixed
    jet <name> link=<link> dir=<x,y,z> tmin=<N> tmax=<N> [pos=<x,y,z>]
    symmetry lateral=<x,y,z>
    pair <left_joint> <right_joint>
    group <name> joints=<j1,j2,...>
    posture <joint>=<rad> ...
    gravity g=<m/s^2>
"""
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from jetaero.errors import ModelParseError, ModelValidationError
from jetaero.model.robot import FIXED, REVOLUTE, JetSpec, JointSpec, LinkSpec, RobotModel
from jetaero.model.validator import RobotModelValidator
from jetaero.utils.helpers import iter_directives, parse_key_values, parse_vector
from jetaero.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_MODEL_PATH = Path(__file__).parent / "data" / "default_robot.model"


def _inertia_matrix(values: np.ndarray) -> np.ndarray:
    ixx, iyy, izz, ixy, ixz, iyz = values
    return np.array([[ixx, ixy, ixz],
                     [ixy, iyy, iyz],
                     [ixz, iyz, izz]])


def _unit(vector: np.ndarray, what: str) -> np.ndarray:
    norm = np.linalg.norm(vector)
    if norm == 0:
        raise ValueError(f"{what} must be nonzero")
    return vector / norm


class _ModelBuilder:
    """Accumulates directives while parsing."""

    def __init__(self, gravity: float):
        self.links: List[LinkSpec] = []
        self.joints: List[JointSpec] = []
        self.jets: List[JetSpec] = []
        self.gravity = gravity
        self.lateral: Optional[np.ndarray] = None
        self.pairs: List[tuple] = []
        self.groups: Dict[str, tuple] = {}
        self.posture: Dict[str, float] = {}

    def handlers(self) -> Dict[str, Callable[[List[str]], None]]:
        return {
            "link": self.add_link,
            "joint": self.add_joint,
            "jet": self.add_jet,
            "symmetry": self.set_symmetry,
            "pair": self.add_pair,
            "group": self.add_group,
            "posture": self.add_posture,
            "gravity": self.set_gravity,
        }

    @staticmethod
    def _require(fields: Dict[str, str], *keys: str) -> None:
        missing = [k for k in keys if k not in fields]
        if missing:
            raise ValueError(f"missing field(s): {', '.join(missing)}")

    @staticmethod
    def _reject_unknown(fields: Dict[str, str], allowed) -> None:
        unknown = sorted(set(fields) - set(allowed))
        if unknown:
            raise ValueError(f"unknown field(s): {', '.join(unknown)}")

    def add_link(self, args: List[str]) -> None:
        if not args:
            raise ValueError("missing field(s): name")
        name, fields = args[0], parse_key_values(args[1:])
        self._reject_unknown(fields, ("mass", "com", "inertia", "axis", "aero"))
        self._require(fields, "mass", "inertia")
        aero = fields.get("aero", "0")
        if aero not in ("0", "1"):
            raise ValueError(f"aero must be 0 or 1, got '{aero}'")
        self.links.append(LinkSpec(
            name=name,
            mass=float(fields["mass"]),
            com=parse_vector(fields.get("com", "0,0,0"), 3),
            inertia=_inertia_matrix(parse_vector(fields["inertia"], 6)),
            symmetry_axis=parse_vector(fields.get("axis", "0,0,1"), 3),
            aero=aero == "1",
        ))

    def add_joint(self, args: List[str]) -> None:
        if not args:
            raise ValueError("missing field(s): name")
        name, fields = args[0], parse_key_values(args[1:])
        self._reject_unknown(fields, ("parent", "child", "axis", "origin", "limits", "vmax", "type"))
        kind = fields.get("type", REVOLUTE)
        if kind not in (REVOLUTE, FIXED):
            raise ValueError(f"joint type must be revolute or fixed, got '{kind}'")
        self._require(fields, "parent", "child")
        origin = parse_vector(fields.get("origin", "0,0,0"), 3)
        if kind == FIXED:
            self.joints.append(JointSpec(name=name, parent=fields["parent"], child=fields["child"],
                                         origin=origin, kind=FIXED))
            return
        self._require(fields, "axis", "limits", "vmax")
        lower, upper = parse_vector(fields["limits"], 2)
        self.joints.append(JointSpec(
            name=name,
            parent=fields["parent"],
            child=fields["child"],
            origin=origin,
            axis=_unit(parse_vector(fields["axis"], 3), "joint axis"),
            lower=float(lower),
            upper=float(upper),
            vmax=float(fields["vmax"]),
        ))

    def add_jet(self, args: List[str]) -> None:
        if not args:
            raise ValueError("missing field(s): name")
        name, fields = args[0], parse_key_values(args[1:])
        self._reject_unknown(fields, ("link", "dir", "tmin", "tmax", "pos"))
        self._require(fields, "link", "dir", "tmin", "tmax")
        self.jets.append(JetSpec(
            name=name,
            link=fields["link"],
            direction=_unit(parse_vector(fields["dir"], 3), "jet direction"),
            thrust_min=float(fields["tmin"]),
            thrust_max=float(fields["tmax"]),
            position=parse_vector(fields.get("pos", "0,0,0"), 3),
        ))

    def set_symmetry(self, args: List[str]) -> None:
        fields = parse_key_values(args)
        self._reject_unknown(fields, ("lateral",))
        self._require(fields, "lateral")
        self.lateral = _unit(parse_vector(fields["lateral"], 3), "lateral axis")

    def add_pair(self, args: List[str]) -> None:
        if len(args) != 2:
            raise ValueError("pair expects exactly two joint names")
        self.pairs.append((args[0], args[1]))

    def add_group(self, args: List[str]) -> None:
        if not args:
            raise ValueError("missing field(s): name")
        name, fields = args[0], parse_key_values(args[1:])
        self._reject_unknown(fields, ("joints",))
        self._require(fields, "joints")
        self.groups[name] = tuple(j for j in fields["joints"].split(",") if j)

    def add_posture(self, args: List[str]) -> None:
        for key, value in parse_key_values(args).items():
            self.posture[key] = float(value)

    def set_gravity(self, args: List[str]) -> None:
        fields = parse_key_values(args)
        self._reject_unknown(fields, ("g",))
        self._require(fields, "g")
        self.gravity = float(fields["g"])

    def build(self, name: str) -> RobotModel:
        return RobotModel(
            links=tuple(self.links),
            joints=tuple(self.joints),
            jets=tuple(self.jets),
            gravity=self.gravity,
            name=name,
            lateral_axis=self.lateral,
            joint_pairs=tuple(self.pairs),
            groups=dict(self.groups),
            posture=dict(self.posture),
        )


def parse_model(text: str, name: str = "robot", gravity: Optional[float] = None) -> RobotModel:
    """
    Parse model-file text without validating it.

    Raises:
        ModelParseError: If a line does not follow the grammar
    """
    if gravity is None:
        from jetaero.config import GRAVITY
        gravity = GRAVITY
    builder = _ModelBuilder(gravity)
    handlers = builder.handlers()
    for number, tokens in iter_directives(text):
        directive, args = tokens[0], tokens[1:]
        handler = handlers.get(directive)
        if handler is None:
            raise ModelParseError(f"unknown directive '{directive}'", number)
        try:
            handler(args)
        except ValueError as e:
            raise ModelParseError(str(e), number) from e
    return builder.build(name)


def load_model(text: str, name: str = "robot", gravity: Optional[float] = None) -> RobotModel:
    """
    Parse and validate model-file text.

    Args:
        text: Model file contents
        name: Model name used in logs and provenance
        gravity: Default gravity when the file has no 'gravity' directive

    Returns:
        Validated RobotModel

    Raises:
        ModelParseError: If a line does not follow the grammar
        ModelValidationError: If an invariant is violated
    """
    model = parse_model(text, name=name, gravity=gravity)
    is_valid, errors, warnings = RobotModelValidator().validate(model)
    for warning in warnings:
        logger.warning(f"Model '{name}': {warning}")
    if not is_valid:
        raise ModelValidationError(errors)
    logger.debug(f"Model '{name}' parsed: {len(model.links)} links, {model.n_joints} joints, "
                 f"{model.n_jets} jets, {model.n_aero_links} aero links")
    return model


def load_model_file(path) -> RobotModel:
    """Load and validate a model file from disk."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    model = load_model(text, name=path.stem)
    logger.info(f"Loaded model {path} (mass {model.total_mass:.3f} kg, {model.n_joints} joints)")
    return model


def load_default_model() -> RobotModel:
    """The packaged 19-joint humanoid with four jets."""
    return load_model_file(DEFAULT_MODEL_PATH)


def resolve_model_path(spec: str, base_dir: Optional[Path] = None) -> Path:
    """'default' names the packaged model; other values are paths."""
    if spec == "default":
        return DEFAULT_MODEL_PATH
    path = Path(spec)
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    return path
