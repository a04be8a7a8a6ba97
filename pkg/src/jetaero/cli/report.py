"""
Comparison report over several simulation logs.

Rows are time bins of fixed width; for every log the report holds the bin
maximum of the CoM error and tilt, the bin mean of each sub-assembly's joint
error sum and the thrust envelope (min and max over jets). Bins a log does
not reach are written as nan.
"""
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence

import numpy as np

from jetaero.errors import ReportSchemaError
from jetaero.sim.log import SimLog, read_log
from jetaero.utils.helpers import format_float
from jetaero.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_BIN = 1.0


@dataclass(eq=False)
class Report:
    columns: List[str]
    rows: List[List[float]]
    summaries: List[dict]

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        lines += [",".join(format_float(v) for v in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv(), encoding="utf-8")
        return path


def _labels(logs: Sequence[SimLog]) -> List[str]:
    labels, seen = [], {}
    for log in logs:
        name = log.meta.get("scenario", "log")
        seen[name] = seen.get(name, 0) + 1
        labels.append(name if seen[name] == 1 else f"{name}#{seen[name]}")
    return labels


def _check_schema(logs: Sequence[SimLog]) -> None:
    if not logs:
        raise ReportSchemaError("the report needs at least one log")
    reference = logs[0].columns
    for log in logs[1:]:
        if log.columns != reference:
            missing = sorted(set(reference) ^ set(log.columns))
            raise ReportSchemaError(
                f"log '{log.meta.get('scenario', '?')}' does not share the channel schema"
                + (f" (differs in {', '.join(missing[:5])})" if missing else " (column order differs)")
            )


def _bin_stats(data: np.ndarray, columns: List[str], groups: List[str], jets: List[str]) -> List[float]:
    if data.shape[0] == 0:
        return [math.nan] * (2 + len(groups) + 2)
    idx = {name: k for k, name in enumerate(columns)}
    stats = [float(data[:, idx["com_err_norm"]].max()), float(data[:, idx["tilt"]].max())]
    stats += [float(data[:, idx[g]].mean()) for g in groups]
    if jets:
        thrust = data[:, [idx[j] for j in jets]]
        stats += [float(thrust.min()), float(thrust.max())]
    else:
        stats += [math.nan, math.nan]
    return stats


def build_report(logs: Sequence[SimLog], bin_width: float = DEFAULT_BIN) -> Report:
    """
    Raises:
        ReportSchemaError: If the logs do not share one channel schema
        ValueError: If bin_width is not positive
    """
    if not bin_width > 0:
        raise ValueError(f"bin width must be positive, got {bin_width}")
    _check_schema(logs)
    columns = logs[0].columns
    groups = [c for c in columns if c.startswith("ds_")]
    jets = [c for c in columns if c.startswith("T_")]
    labels = _labels(logs)

    header = ["t"]
    for label in labels:
        header += [f"{label}:com_err_max", f"{label}:tilt_max"]
        header += [f"{label}:{g}" for g in groups]
        header += [f"{label}:T_min", f"{label}:T_max"]

    matrices = [log.matrix() for log in logs]
    t_end = max((m[:, 0].max() for m in matrices if m.shape[0]), default=0.0)
    n_bins = int(math.floor(t_end / bin_width + 1e-9)) + 1
    bins = [np.floor(m[:, 0] / bin_width + 1e-9).astype(int) for m in matrices]

    rows = []
    for b in range(n_bins):
        row = [b * bin_width]
        for m, k in zip(matrices, bins):
            row += _bin_stats(m[k == b], columns, groups, jets)
        rows.append(row)

    summaries = [{
        "log": label,
        "status": log.verdict,
        "max_com_err": log.max_of("com_err_norm"),
        "max_tilt": log.max_of("tilt"),
    } for label, log in zip(labels, logs)]
    logger.info(f"Report over {len(logs)} log(s), {n_bins} bins of {bin_width}s")
    return Report(header, rows, summaries)


def report_summary_lines(report: Report) -> List[str]:
    return [" ".join(f"{k}={format_float(v) if isinstance(v, float) else v}" for k, v in s.items())
            for s in report.summaries]


def load_logs(paths: Sequence) -> List[SimLog]:
    return [read_log(p) for p in paths]

