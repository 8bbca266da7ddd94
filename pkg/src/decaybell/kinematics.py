"""Massless three-body kinematics in the rest frame of the decaying particle.

The momentum of A defines the z axis, the decay plane is the x-z plane and
B has a positive x component.  Everything is in units of the parent mass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateKinematics, UnphysicalAngles

DEGENERACY_THRESHOLD = 1e-12
_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class DecayAngles:
    """Opening angles A-B (``theta_B``) and A-C (``theta_C``) in radians."""

    theta_B: float
    theta_C: float

    def __post_init__(self):
        if not (math.isfinite(self.theta_B) and math.isfinite(self.theta_C)):
            raise ValueError("decay angles must be finite")


@dataclass(frozen=True)
class MomentumTriple:
    p_A: float
    p_B: float
    p_C: float

    @property
    def total(self) -> float:
        return self.p_A + self.p_B + self.p_C


def physical_region(angles: DecayAngles) -> bool:
    """True when both angles lie in [0, pi] and their sum in [pi, 2 pi]."""
    b, c = angles.theta_B, angles.theta_C
    in_range = -_EDGE_TOL <= b <= math.pi + _EDGE_TOL and -_EDGE_TOL <= c <= math.pi + _EDGE_TOL
    s = b + c
    return in_range and math.pi - _EDGE_TOL <= s <= 2 * math.pi + _EDGE_TOL


def require_physical(angles: DecayAngles) -> None:
    if not physical_region(angles):
        raise UnphysicalAngles(
            f"(theta_B, theta_C) = ({angles.theta_B:.6g}, {angles.theta_C:.6g}) is outside the physical region"
        )


def solve_momenta(angles: DecayAngles) -> MomentumTriple:
    """Closed-form momentum magnitudes for a physical configuration.

    Raises
    ------
    UnphysicalAngles
        If the angles are outside the physical region.
    DegenerateKinematics
        If ``sin(theta_B) + sin(theta_C) - sin(theta_B + theta_C)`` is below
        ``DEGENERACY_THRESHOLD`` in magnitude (e.g. theta_B = theta_C = pi).
    """
    require_physical(angles)
    b, c = angles.theta_B, angles.theta_C
    denom = math.sin(b) + math.sin(c) - math.sin(b + c)
    if abs(denom) < DEGENERACY_THRESHOLD:
        raise DegenerateKinematics(
            f"momenta undetermined at (theta_B, theta_C) = ({b:.6g}, {c:.6g})"
        )
    D = 1.0 / denom
    # clip -0.0 and tiny negative round-off on the p_A = 0 boundary
    p_A = max(-D * math.sin(b + c), 0.0)
    return MomentumTriple(p_A=p_A, p_B=D * math.sin(c), p_C=D * math.sin(b))


def conservation_residuals(angles: DecayAngles, p: MomentumTriple) -> np.ndarray:
    """Residuals of energy, p_z and p_x conservation (m = 1)."""
    b, c = angles.theta_B, angles.theta_C
    return np.array([
        p.p_A + p.p_B + p.p_C - 1.0,
        p.p_A + p.p_B * math.cos(b) + p.p_C * math.cos(c),
        p.p_B * math.sin(b) - p.p_C * math.sin(c),
    ])

