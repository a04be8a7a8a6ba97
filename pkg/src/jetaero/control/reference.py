"""
CoM reference trajectories and the momentum references derived from them.

A trajectory is a chain of quintic rest-to-rest segments
p(tau) = p0 + D (10 tau^3 - 15 tau^4 + 6 tau^5), which join with zero
velocity and acceleration, so the whole path is C2. The desired momentum is
h_d = (0, m v_G), with its first and second derivatives from the same path.
"""
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class Segment:
    t0: float
    duration: float
    start: np.ndarray
    displacement: np.ndarray

    @property
    def t1(self) -> float:
        return self.t0 + self.duration


def _quintic(tau: float, duration: float) -> Tuple[float, float, float, float]:
    """Shape value and its first three time derivatives."""
    s = 10 * tau ** 3 - 15 * tau ** 4 + 6 * tau ** 5
    ds = (30 * tau ** 2 - 60 * tau ** 3 + 30 * tau ** 4) / duration
    dds = (60 * tau - 180 * tau ** 2 + 120 * tau ** 3) / duration ** 2
    ddds = (60 - 360 * tau + 360 * tau ** 2) / duration ** 3
    return s, ds, dds, ddds


@dataclass(frozen=True, eq=False)
class MomentumReference:
    """Piecewise-quintic CoM path starting at `start` at t = 0; holds before and after."""
    start: np.ndarray
    segments: Tuple[Segment, ...] = field(default_factory=tuple)

    @classmethod
    def hover(cls, start: Sequence[float]) -> "MomentumReference":
        return cls(np.asarray(start, dtype=float))

    @classmethod
    def from_moves(cls, start: Sequence[float], moves: Sequence[Tuple[float, float, Sequence[float]]]
                   ) -> "MomentumReference":
        """
        Args:
            start: CoM position at t = 0
            moves: (t_begin, duration, displacement) per segment, in time order
        """
        start = np.asarray(start, dtype=float)
        position = start.copy()
        segments: List[Segment] = []
        last_end = 0.0
        for t_begin, duration, displacement in moves:
            if duration <= 0:
                raise ValueError(f"segment duration must be positive, got {duration}")
            if t_begin < last_end - 1e-12:
                raise ValueError("segments overlap or are out of order")
            d = np.asarray(displacement, dtype=float)
            segments.append(Segment(float(t_begin), float(duration), position.copy(), d))
            position = position + d
            last_end = t_begin + duration
        return cls(start, tuple(segments))

    def shifted(self, offset: Sequence[float]) -> "MomentumReference":
        """Same path translated so it starts at start + offset."""
        offset = np.asarray(offset, dtype=float)
        return MomentumReference(
            self.start + offset,
            tuple(Segment(s.t0, s.duration, s.start + offset, s.displacement) for s in self.segments),
        )

    @property
    def end_time(self) -> float:
        return self.segments[-1].t1 if self.segments else 0.0

    def com(self, t: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Position, velocity, acceleration and jerk of the CoM reference at t."""
        position = self.start.copy()
        zero = np.zeros(3)
        for seg in self.segments:
            if t < seg.t0:
                return position, zero, zero, zero
            if t < seg.t1:
                s, ds, dds, ddds = _quintic((t - seg.t0) / seg.duration, seg.duration)
                d = seg.displacement
                return seg.start + s * d, ds * d, dds * d, ddds * d
            position = seg.start + seg.displacement
        return position, zero, zero, zero

    def desired(self, t: float, mass: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(h_d, h_d_dot, h_d_ddot) with zero angular parts."""
        _, v, a, j = self.com(t)
        zero = np.zeros(3)
        return (np.concatenate([zero, mass * v]), np.concatenate([zero, mass * a]),
                np.concatenate([zero, mass * j]))
