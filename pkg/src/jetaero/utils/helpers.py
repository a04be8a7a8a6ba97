"""Small parsing and formatting helpers shared by the file formats."""
import hashlib
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Tuple

import numpy as np


def format_float(value: float) -> str:
    """Shortest decimal text that reads back to the identical float."""
    return repr(float(value))


def format_vector(values: Iterable[float]) -> str:
    return ",".join(format_float(v) for v in values)


def parse_vector(text: str, length: int = None) -> np.ndarray:
    """Parse 'x,y,z' into a float array, optionally checking its length."""
    parts = [p for p in text.split(",") if p.strip() != ""]
    values = np.array([float(p) for p in parts], dtype=float)
    if length is not None and values.shape[0] != length:
        raise ValueError(f"expected {length} comma-separated numbers, got {values.shape[0]} in '{text}'")
    return values


def parse_key_values(tokens: Iterable[str]) -> Dict[str, str]:
    """Turn ['a=1', 'b=x'] into {'a': '1', 'b': 'x'}."""
    fields: Dict[str, str] = {}
    for token in tokens:
        if "=" not in token:
            raise ValueError(f"expected key=value, got '{token}'")
        key, value = token.split("=", 1)
        if not key:
            raise ValueError(f"expected key=value, got '{token}'")
        fields[key] = value
    return fields


def iter_directives(text: str) -> Iterator[Tuple[int, List[str]]]:
    """Yield (line_number, tokens) for every non-blank, non-comment line."""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line.split()


def read_key_value_file(path) -> List[Tuple[int, str, str]]:
    """
    Read a key=value text file.

    Returns:
        List of (line_number, key, value) in file order
    """
    entries = []
    text = Path(path).read_text(encoding="utf-8")
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {number}: expected key=value, got '{line}'")
        key, value = line.split("=", 1)
        entries.append((number, key.strip(), value.strip()))
    return entries


def short_digest(*parts: str) -> str:
    """First 16 hex chars of the sha256 of the joined parts."""
    digest = hashlib.sha256()
    for part in parts:
        digest.update(part.encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()[:16]


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
