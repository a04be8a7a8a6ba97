"""
Simulation logs.

CSV layout: one `# sim-log v1 key=value ...` meta line carrying the
termination status, one header row naming every channel, then one row per
logged control tick. Floats use shortest round-trip text so identical runs
give identical bytes.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from jetaero.errors import ReportSchemaError
from jetaero.model.robot import RobotModel
from jetaero.utils.helpers import format_float
from jetaero.utils.logger import get_logger

logger = get_logger(__name__)

MAGIC = "# sim-log v1"
COMPLETED = "completed"
FAILED = "failed"

_AXES = ("x", "y", "z")
_MOMENTUM = ("ang_x", "ang_y", "ang_z", "lin_x", "lin_y", "lin_z")


def log_columns(model: RobotModel) -> List[str]:
    """Channel names for a model, in the fixed record order."""
    columns = ["t"]
    columns += [f"com_{a}" for a in _AXES]
    columns += [f"com_err_{a}" for a in _AXES]
    columns += ["com_err_norm", "tilt"]
    columns += [f"h_{c}" for c in _MOMENTUM]
    columns += [f"htilde_{c}" for c in _MOMENTUM]
    columns += [f"s_{name}" for name in model.joint_names]
    columns += [f"ds_{group}" for group in model.groups]
    columns += [f"T_{jet.name}" for jet in model.jets]
    columns += [f"fa_plant_{a}" for a in _AXES]
    columns += [f"fa_ctrl_{a}" for a in _AXES]
    columns += [f"tau_{name}" for name in model.joint_names]
    return columns


def group_errors(model: RobotModel, joint_positions: np.ndarray, posture: np.ndarray) -> np.ndarray:
    """Absolute joint-position error sum per sub-assembly, against the postural target."""
    err = np.abs(np.asarray(joint_positions) - np.asarray(posture))
    return np.array([sum(err[model.dof_of(j)] for j in joints) for joints in model.groups.values()])


@dataclass(eq=False)
class SimLog:
    columns: List[str]
    rows: List[np.ndarray] = field(default_factory=list)
    status: str = COMPLETED
    failed_at: Optional[float] = None
    reason: str = ""
    meta: Dict[str, str] = field(default_factory=dict)

    def append(self, row: np.ndarray) -> None:
        row = np.asarray(row, dtype=float)
        if row.shape != (len(self.columns),):
            raise ValueError(f"log row has {row.shape} values for {len(self.columns)} columns")
        if self.rows and row[0] < self.rows[-1][0]:
            raise ValueError("log time must be non-decreasing")
        self.rows.append(row)

    def fail(self, t: float, reason: str) -> None:
        self.status = FAILED
        self.failed_at = float(t)
        self.reason = reason
        logger.info(f"Scenario {self.meta.get('scenario', '?')} failed at t={t:.3f}s: {reason}")

    @property
    def completed(self) -> bool:
        return self.status == COMPLETED

    @property
    def verdict(self) -> str:
        return COMPLETED if self.completed else f"{FAILED}@{format_float(self.failed_at)}"

    def channel(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([row[k] for row in self.rows])

    def matrix(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, len(self.columns)))
        return np.vstack(self.rows)

    def max_of(self, name: str) -> float:
        values = self.channel(name)
        return float(values.max()) if values.size else 0.0

    def to_csv(self) -> str:
        meta = {"status": self.verdict}
        if self.reason:
            meta["reason"] = self.reason.replace(" ", "_")
        meta.update(self.meta)
        lines = [MAGIC + " " + " ".join(f"{k}={v}" for k, v in meta.items()), ",".join(self.columns)]
        lines += [",".join(format_float(v) for v in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv(), encoding="utf-8")
        return path


def parse_log(text: str, source: str = "<log>") -> SimLog:
    """
    Read a log written by SimLog.to_csv.

    Raises:
        ReportSchemaError: If the meta line, header or a row is malformed
    """
    lines = text.splitlines()
    if len(lines) < 2 or not lines[0].startswith(MAGIC):
        raise ReportSchemaError(f"{source}: not a sim-log v1 file")
    meta: Dict[str, str] = {}
    for token in lines[0][len(MAGIC):].split():
        if "=" not in token:
            raise ReportSchemaError(f"{source}: bad meta token '{token}'")
        key, value = token.split("=", 1)
        meta[key] = value
    columns = lines[1].split(",")
    log = SimLog(columns)
    for number, line in enumerate(lines[2:], start=3):
        values = line.split(",")
        if len(values) != len(columns):
            raise ReportSchemaError(f"{source}: line {number} has {len(values)} values, header has {len(columns)}")
        try:
            log.rows.append(np.array([float(v) for v in values]))
        except ValueError:
            raise ReportSchemaError(f"{source}: line {number} holds a non-numeric value") from None

    status = meta.pop("status", COMPLETED)
    if status.startswith(FAILED + "@"):
        log.status = FAILED
        log.failed_at = float(status.split("@", 1)[1])
    log.reason = meta.pop("reason", "")
    log.meta = meta
    return log


def read_log(path) -> SimLog:
    path = Path(path)
    return parse_log(path.read_text(encoding="utf-8"), str(path))
