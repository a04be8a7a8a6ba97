"""
Flight-envelope scenarios.

The standard envelope is a representative stand-in for a hover / translate /
return manoeuvre in crosswind; logs label it `reference=standard-stand-in`.
"""
from dataclasses import replace
from typing import List, Sequence, Tuple

import numpy as np

from jetaero.aero.forces import AXISYM, MLP, NONE
from jetaero.control.reference import MomentumReference
from jetaero.sim.wind import WindProfile
from jetaero.utils.logger import get_logger

logger = get_logger(__name__)

STANDARD_DURATION = 60.0
WIND_SPEED = 5.0

# (t_begin, duration, CoM displacement)
STANDARD_MOVES: Tuple[Tuple[float, float, Tuple[float, float, float]], ...] = (
    (10.0, 10.0, (2.0, 0.0, 0.0)),
    (20.0, 10.0, (0.0, 1.0, 0.0)),
    (30.0, 10.0, (-2.0, -1.0, 0.0)),
)


def standard_reference(start: Sequence[float]) -> MomentumReference:
    return MomentumReference.from_moves(start, STANDARD_MOVES)


def standard_wind(speed: float = WIND_SPEED) -> WindProfile:
    """Ramp to `speed` along +x over 5 s, hold, turn to +y over one second at t = 30 s."""
    return WindProfile.from_knots([
        (0.0, (0.0, 0.0, 0.0)),
        (5.0, (speed, 0.0, 0.0)),
        (30.0, (speed, 0.0, 0.0)),
        (31.0, (0.0, speed, 0.0)),
    ])


def standard_envelope(start: Sequence[float] = (0.0, 0.0, 0.0)) -> Tuple[MomentumReference, WindProfile]:
    """CoM reference starting at `start` and the crosswind profile."""
    return standard_reference(start), standard_wind()


def ablation_matrix(base) -> List:
    """
    Baseline and aero-aware controllers against each plant model, plus the
    mismatched pair (controller axisym, plant mlp).

    Pairs needing the network are skipped when `base` names no weights file.
    """
    pairs = [
        ("test1", AXISYM, NONE),
        ("test2", AXISYM, AXISYM),
        ("test3", MLP, NONE),
        ("test4", MLP, MLP),
        ("robustness", MLP, AXISYM),
    ]
    scenarios = []
    for label, plant, controller in pairs:
        if MLP in (plant, controller) and base.weights is None:
            logger.warning(f"Skipping {label}: no weights file for the mlp model")
            continue
        scenarios.append(replace(base, name=f"{base.name}-{label}", plant_aero=plant, controller_aero=controller))
    return scenarios


def fictitious_wind(base, controller_aero: str = AXISYM):
    """
    Hovering plant without aerodynamics whose controller is fed wind it does
    not feel; the controller reacts to forces that never act on the robot.
    """
    return replace(base, name=f"{base.name}-fictitious", plant_aero=NONE,
                   controller_aero=controller_aero, reference="hover")


def rotated_about_vertical(base, angle: float):
    """Wind and reference rotated about the world z axis."""
    c, s = np.cos(angle), np.sin(angle)
    rotation = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return replace(base, name=f"{base.name}-rot", wind=base.wind.rotated(rotation), heading=base.heading + angle)
