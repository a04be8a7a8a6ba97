"""
Dataset CSV files.

    # aero-dataset v1 n_joints=<n> n_links=<m> seed=<s> config=<hash> augmented=<0|1>
    # columns: <joint names>,pitch,yaw,<link>_x,<link>_y,<link>_z,...
    <row>
    ...

Values are written with repr() so a read gives back the identical floats.
The columns comment is optional on read.
"""
from pathlib import Path
from typing import List

import numpy as np

from jetaero.dataset.samples import AeroDataset
from jetaero.errors import DatasetFormatError
from jetaero.utils.helpers import format_float
from jetaero.utils.logger import get_logger

logger = get_logger(__name__)

MAGIC = "# aero-dataset v1"
_HEADER_KEYS = ("n_joints", "n_links", "seed", "config", "augmented")


def _column_names(ds: AeroDataset) -> List[str]:
    joints = ds.joint_names or [f"s{k}" for k in range(ds.n_joints)]
    links = ds.link_names or [f"link{i}" for i in range(ds.n_links)]
    names = list(joints) + ["pitch", "yaw"]
    for link in links:
        names.extend(f"{link}_{axis}" for axis in "xyz")
    return names


def format_dataset(ds: AeroDataset) -> str:
    header = (f"{MAGIC} n_joints={ds.n_joints} n_links={ds.n_links} seed={ds.seed} "
              f"config={ds.config_hash or '-'} augmented={int(ds.augmented)}")
    lines = [header, "# columns: " + ",".join(_column_names(ds))]
    table = np.hstack([ds.joints, ds.pitch[:, None], ds.yaw[:, None], ds.targets])
    for row in table:
        lines.append(",".join(format_float(v) for v in row))
    return "\n".join(lines) + "\n"


def _parse_header(line: str) -> dict:
    if not line.startswith(MAGIC):
        raise DatasetFormatError("malformed header: expected '# aero-dataset v1 ...'", 1)
    fields = {}
    for token in line[len(MAGIC):].split():
        if "=" not in token:
            raise DatasetFormatError(f"malformed header field '{token}'", 1)
        key, value = token.split("=", 1)
        fields[key] = value
    missing = [key for key in _HEADER_KEYS[:3] if key not in fields]
    if missing:
        raise DatasetFormatError(f"malformed header: missing {', '.join(missing)}", 1)
    try:
        return {
            "n_joints": int(fields["n_joints"]),
            "n_links": int(fields["n_links"]),
            "seed": int(fields["seed"]),
            "config": "" if fields.get("config", "-") == "-" else fields["config"],
            "augmented": fields.get("augmented", "0") == "1",
        }
    except ValueError as exc:
        raise DatasetFormatError(f"malformed header: {exc}", 1) from None


def parse_dataset(text: str) -> AeroDataset:
    """
    Raises:
        DatasetFormatError: On a malformed header, a row with the wrong
            column count, an unparsable or non-finite value
    """
    lines = text.splitlines()
    if not lines:
        raise DatasetFormatError("malformed header: empty file", 1)
    header = _parse_header(lines[0])
    n_joints, n_links = header["n_joints"], header["n_links"]
    n_columns = n_joints + 2 + 3 * n_links

    joint_names: List[str] = []
    link_names: List[str] = []
    rows = []
    for number, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if stripped.startswith("# columns:"):
                names = stripped[len("# columns:"):].strip().split(",")
                if len(names) != n_columns:
                    raise DatasetFormatError(f"column count: header names {len(names)} columns, "
                                             f"expected {n_columns}", number)
                joint_names = names[:n_joints]
                link_names = [name[:-2] for name in names[n_joints + 2::3]]
            continue
        parts = stripped.split(",")
        if len(parts) != n_columns:
            raise DatasetFormatError(f"column count: expected {n_columns} values, got {len(parts)}", number)
        try:
            values = [float(p) for p in parts]
        except ValueError as exc:
            raise DatasetFormatError(f"bad number ({exc})", number) from None
        if not np.all(np.isfinite(values)):
            raise DatasetFormatError("non-finite value", number)
        rows.append(values)

    table = np.array(rows, dtype=float).reshape(len(rows), n_columns)
    return AeroDataset(
        joints=table[:, :n_joints].copy(),
        pitch=table[:, n_joints].copy(),
        yaw=table[:, n_joints + 1].copy(),
        outputs=table[:, n_joints + 2:].reshape(len(rows), n_links, 3).copy(),
        seed=header["seed"],
        config_hash=header["config"],
        augmented=header["augmented"],
        link_names=link_names,
        joint_names=joint_names,
    )


def write_dataset(ds: AeroDataset, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_dataset(ds), encoding="utf-8")
    logger.info(f"Wrote {len(ds)} samples to {path}")


def read_dataset(path) -> AeroDataset:
    path = Path(path)
    ds = parse_dataset(path.read_text(encoding="utf-8"))
    logger.info(f"Read {len(ds)} samples from {path}")
    return ds
