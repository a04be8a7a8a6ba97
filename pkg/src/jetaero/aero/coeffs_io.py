"""Reading and writing axisymmetric coefficient files (`coeffs <link> w0=.. ... w5=..`)."""
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from jetaero.aero.axisym import WEIGHT_NAMES, AxisymCoeffs
from jetaero.errors import CoeffsFormatError
from jetaero.utils.helpers import format_float, iter_directives, parse_key_values
from jetaero.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_COEFFS_PATH = Path(__file__).parent / "data" / "default_coeffs.txt"


def parse_coeffs(text: str) -> AxisymCoeffs:
    """
    Parse coefficient lines; `#` starts a comment.

    Raises:
        CoeffsFormatError: On unknown directives, missing or extra weights,
            duplicated links or unparsable numbers (with the line number)
    """
    weights: Dict[str, np.ndarray] = {}
    for line, tokens in iter_directives(text):
        if tokens[0] != "coeffs" or len(tokens) < 2:
            raise CoeffsFormatError(f"expected 'coeffs <link> w0=... w5=...', got '{' '.join(tokens)}'", line)
        link = tokens[1]
        if link in weights:
            raise CoeffsFormatError(f"duplicate coefficients for link '{link}'", line)
        try:
            fields = parse_key_values(tokens[2:])
            values = [float(fields.pop(name)) for name in WEIGHT_NAMES]
        except KeyError as exc:
            raise CoeffsFormatError(f"missing field {exc} for link '{link}'", line) from None
        except ValueError as exc:
            raise CoeffsFormatError(str(exc), line) from None
        if fields:
            raise CoeffsFormatError(f"unknown field(s) {', '.join(sorted(fields))} for link '{link}'", line)
        if not np.all(np.isfinite(values)):
            raise CoeffsFormatError(f"non-finite value for link '{link}'", line)
        weights[link] = np.array(values)
    return AxisymCoeffs(weights=weights)


def format_coeffs(coeffs: AxisymCoeffs) -> str:
    lines = ["# axisymmetric force-area weights (m^2)"]
    for link in coeffs.link_names:
        w = coeffs.for_link(link)
        fields = " ".join(f"{name}={format_float(value)}" for name, value in zip(WEIGHT_NAMES, w))
        lines.append(f"coeffs {link} {fields}")
    return "\n".join(lines) + "\n"


def load_coeffs_file(path) -> AxisymCoeffs:
    path = Path(path)
    coeffs = parse_coeffs(path.read_text(encoding="utf-8"))
    logger.debug(f"Loaded coefficients for {len(coeffs.link_names)} links from {path}")
    return coeffs


def write_coeffs_file(coeffs: AxisymCoeffs, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_coeffs(coeffs), encoding="utf-8")
    logger.info(f"Wrote coefficients of {len(coeffs.link_names)} links to {path}")


def load_default_coeffs() -> AxisymCoeffs:
    """Ground-truth coefficients shipped with the default robot."""
    return load_coeffs_file(DEFAULT_COEFFS_PATH)


def resolve_coeffs_path(spec: str, base_dir: Optional[Path] = None) -> Path:
    if spec == "default":
        return DEFAULT_COEFFS_PATH
    path = Path(spec)
    if not path.is_absolute() and base_dir is not None:
        path = Path(base_dir) / path
    return path
