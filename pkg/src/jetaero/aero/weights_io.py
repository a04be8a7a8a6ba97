"""
Binary network weights file.

Layout (little-endian):
    b'MLP1'
    uint32 layer count L, then L + 1 uint32 layer widths
    float64 dropout rate
    float64 input mean, input scale, output mean, output scale
    per layer: float64 W (row-major, n_i x n_{i-1}) then b (n_i)
"""
import struct
from pathlib import Path

import numpy as np

from jetaero.aero.mlp import Mlp, MlpArch
from jetaero.errors import WeightsFormatError
from jetaero.utils.logger import get_logger

logger = get_logger(__name__)

MAGIC = b"MLP1"
_F8 = np.dtype("<f8")


def encode_mlp(mlp: Mlp) -> bytes:
    dims = mlp.arch.dims
    parts = [MAGIC, struct.pack("<I", mlp.n_layers), struct.pack(f"<{len(dims)}I", *dims),
             struct.pack("<d", mlp.arch.dropout)]
    for vector in (mlp.input_mean, mlp.input_scale, mlp.output_mean, mlp.output_scale):
        parts.append(np.ascontiguousarray(vector, dtype=_F8).tobytes())
    for W, b in zip(mlp.weights, mlp.biases):
        parts.append(np.ascontiguousarray(W, dtype=_F8).tobytes())
        parts.append(np.ascontiguousarray(b, dtype=_F8).tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.data):
            raise WeightsFormatError(f"weights file truncated at byte {self.offset}")
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def floats(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(8 * count), dtype=_F8).astype(float)


def decode_mlp(data: bytes) -> Mlp:
    """
    Raises:
        WeightsFormatError: On a wrong magic, truncation, trailing bytes or
            inconsistent widths
    """
    reader = _Reader(data)
    if reader.take(4) != MAGIC:
        raise WeightsFormatError("not a weights file (bad magic)")
    (n_layers,) = struct.unpack("<I", reader.take(4))
    if n_layers < 1:
        raise WeightsFormatError("weights file declares no layers")
    dims = list(struct.unpack(f"<{n_layers + 1}I", reader.take(4 * (n_layers + 1))))
    (dropout,) = struct.unpack("<d", reader.take(8))
    hidden = dims[1:-1]
    if len(set(hidden)) > 1:
        raise WeightsFormatError(f"hidden layers must share one width, got {hidden}")
    try:
        arch = MlpArch(input_dim=dims[0], output_dim=dims[-1], n_hidden=len(hidden),
                       width=hidden[0] if hidden else 1, dropout=dropout)
    except ValueError as exc:
        raise WeightsFormatError(str(exc)) from None
    input_mean, input_scale = reader.floats(dims[0]), reader.floats(dims[0])
    output_mean, output_scale = reader.floats(dims[-1]), reader.floats(dims[-1])
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(reader.floats(fan_in * fan_out).reshape(fan_out, fan_in))
        biases.append(reader.floats(fan_out))
    if reader.offset != len(data):
        raise WeightsFormatError(f"{len(data) - reader.offset} trailing bytes after the last layer")
    return Mlp(arch, weights, biases, input_mean, input_scale, output_mean, output_scale)


def save_mlp(mlp: Mlp, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_mlp(mlp))
    logger.info(f"Wrote network weights ({mlp.n_layers} layers) to {path}")


def load_mlp(path) -> Mlp:
    path = Path(path)
    mlp = decode_mlp(path.read_bytes())
    logger.debug(f"Loaded network {mlp.arch} from {path}")
    return mlp
