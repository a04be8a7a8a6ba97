"""Piecewise-linear wind velocity profiles."""
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from jetaero.utils.helpers import format_float, format_vector, parse_vector


@dataclass(frozen=True, eq=False)
class WindProfile:
    """World wind velocity knots (t_k, v_k) with strictly increasing t_k."""
    times: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        velocities = np.asarray(self.velocities, dtype=float).reshape(-1, 3)
        if times.shape[0] == 0:
            raise ValueError("a wind profile needs at least one knot")
        if times.shape[0] != velocities.shape[0]:
            raise ValueError("wind profile needs one velocity per knot")
        if np.any(np.diff(times) <= 0):
            raise ValueError("wind knots must be strictly increasing in time")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(velocities))):
            raise ValueError("wind knots must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "velocities", velocities)

    @classmethod
    def calm(cls) -> "WindProfile":
        return cls(np.zeros(1), np.zeros((1, 3)))

    @classmethod
    def from_knots(cls, knots: Sequence[Tuple[float, Sequence[float]]]) -> "WindProfile":
        return cls(np.array([t for t, _ in knots], dtype=float),
                   np.array([v for _, v in knots], dtype=float))

    @classmethod
    def parse(cls, text: str) -> "WindProfile":
        """Parse `t:vx,vy,vz;t:vx,vy,vz;...`."""
        knots = []
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            if ":" not in chunk:
                raise ValueError(f"wind knot '{chunk}' is not of the form t:vx,vy,vz")
            t, v = chunk.split(":", 1)
            knots.append((float(t), parse_vector(v, 3)))
        if not knots:
            raise ValueError("empty wind profile")
        return cls.from_knots(knots)

    def format(self) -> str:
        return ";".join(f"{format_float(t)}:{format_vector(v)}" for t, v in zip(self.times, self.velocities))

    def rotated(self, rotation: np.ndarray) -> "WindProfile":
        return WindProfile(self.times.copy(), self.velocities @ np.asarray(rotation, dtype=float).T)

    def scaled(self, factor: float) -> "WindProfile":
        return WindProfile(self.times.copy(), factor * self.velocities)


def wind_at(profile: WindProfile, t: float) -> np.ndarray:
    """Linear interpolation between knots, constant beyond the first and last one."""
    return np.array([np.interp(t, profile.times, profile.velocities[:, k]) for k in range(3)])
