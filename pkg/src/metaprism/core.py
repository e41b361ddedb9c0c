"""Geometry, OFDM band plan and near/far-field distances.

Surfaces lie in the x-y plane, centred at the origin, with outward normal +z.
Angles use a signed convention: ``theta`` in [-pi/2, pi/2) and ``phi`` in
[0, pi), so that every direction of the front half-space has a unique
representation and in-plane (``phi = 0``) directions keep their sign.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0
BOLTZMANN = 1.380649e-23


class Angle2D(NamedTuple):
    """Direction (theta, phi) in radians, signed convention."""

    theta: float
    phi: float = 0.0

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float = 0.0) -> "Angle2D":
        return cls(math.radians(theta_deg), math.radians(phi_deg))

    def degrees(self) -> tuple[float, float]:
        return math.degrees(self.theta), math.degrees(self.phi)


BORESIGHT = Angle2D(0.0, 0.0)


@dataclass(frozen=True)
class SurfaceGrid:
    """Regular N x M grid of cells of pitch (dx, dy) centred at the origin.

    Cell ``(n, m)`` sits at ``(n*dx - Lx/2, m*dy - Ly/2, 0)``. Flattened cell
    arrays use row-major ``(n, m)`` order.
    """

    n_x: int
    n_y: int
    dx: float
    dy: float

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError(f"grid needs at least one cell, got {self.n_x}x{self.n_y}")
        if self.dx <= 0 or self.dy <= 0:
            raise ValueError("cell pitch must be positive")

    @classmethod
    def square(cls, side: float, pitch: float) -> "SurfaceGrid":
        """Square surface of side ``side`` metres at the given pitch."""
        n = max(1, int(round(side / pitch)))
        return cls(n, n, pitch, pitch)

    @property
    def length_x(self) -> float:
        return self.n_x * self.dx

    @property
    def length_y(self) -> float:
        return self.n_y * self.dy

    @property
    def diameter(self) -> float:
        return max(self.length_x, self.length_y)

    @property
    def area(self) -> float:
        return self.length_x * self.length_y

    @property
    def n_cells(self) -> int:
        return self.n_x * self.n_y

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.n_x) * self.dx - self.length_x / 2

    @cached_property
    def y(self) -> np.ndarray:
        return np.arange(self.n_y) * self.dy - self.length_y / 2

    @cached_property
    def positions(self) -> np.ndarray:
        """(N*M, 3) array of cell centres."""
        xx, yy = np.meshgrid(self.x, self.y, indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel(), np.zeros(xx.size)])

    @cached_property
    def indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened (n, m) integer indices matching :attr:`positions`."""
        nn, mm = np.meshgrid(np.arange(self.n_x), np.arange(self.n_y), indexing="ij")
        return nn.ravel(), mm.ravel()


@dataclass(frozen=True)
class OfdmPlan:
    """OFDM band plan: ``K`` subcarriers over bandwidth ``W`` around ``f0``.

    Subcarrier ``k`` (1-based) sits at ``f0 - W/2 + k*W/K``.
    """

    f0: float
    bandwidth: float
    n_subcarriers: int

    def __post_init__(self):
        if self.n_subcarriers < 1:
            raise ValueError("need at least one subcarrier")
        if self.bandwidth <= 0 or self.f0 <= 0:
            raise ValueError("f0 and bandwidth must be positive")
        if self.bandwidth / self.f0 > 0.05:
            warnings.warn(
                f"relative bandwidth {self.bandwidth / self.f0:.3f} is not small; "
                "narrowband channel approximations degrade",
                stacklevel=3,
            )

    @property
    def spacing(self) -> float:
        return self.bandwidth / self.n_subcarriers

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f0

    @property
    def center_index(self) -> int:
        return self.n_subcarriers // 2

    @cached_property
    def frequencies(self) -> np.ndarray:
        k = np.arange(1, self.n_subcarriers + 1)
        return self.f0 - self.bandwidth / 2 + k * self.spacing

    def frequency(self, k: int) -> float:
        return subcarrier_frequency(self, k)


def subcarrier_frequency(plan: OfdmPlan, k: int) -> float:
    """Frequency of the 1-based subcarrier ``k``."""
    if not 1 <= k <= plan.n_subcarriers:
        raise IndexError(f"subcarrier {k} outside 1..{plan.n_subcarriers}")
    return plan.f0 - plan.bandwidth / 2 + k * plan.bandwidth / plan.n_subcarriers


def direction_cosines(theta, phi=0.0):
    """Return ``(u_x, u_y) = (sin t cos p, sin t sin p)``; broadcasts."""
    s = np.sin(theta)
    return s * np.cos(phi), s * np.sin(phi)


def angle_from_direction_cosines(ux: float, uy: float) -> Angle2D:
    """Signed front-half-space angle with the given direction cosines.

    Requires ``ux**2 + uy**2 <= 1`` (up to rounding).
    """
    rho = math.hypot(ux, uy)
    if rho > 1.0 + 1e-12:
        raise ValueError(f"|u| = {rho} > 1 is not a propagating direction")
    rho = min(rho, 1.0)
    if rho == 0.0:
        return Angle2D(0.0, 0.0)
    if uy > 0 or (uy == 0 and ux >= 0):
        return Angle2D(math.asin(rho), math.atan2(uy, ux))
    return Angle2D(-math.asin(rho), math.atan2(-uy, -ux))


def angle_of(position) -> Angle2D:
    """Signed direction of ``position`` seen from the surface centre."""
    x, y, z = (float(v) for v in position)
    r = math.sqrt(x * x + y * y + z * z)
    if r == 0.0:
        raise ValueError("direction of the zero vector is undefined")
    if z < 0:
        raise ValueError("position lies behind the surface (z < 0)")
    rho = math.hypot(x, y)
    if rho == 0.0:
        return Angle2D(0.0, 0.0)
    # atan2 keeps precision near grazing, where asin(rho/r) does not
    theta = math.atan2(rho, z)
    if y > 0 or (y == 0 and x >= 0):
        return Angle2D(theta, math.atan2(y, x))
    return Angle2D(-theta, math.atan2(-y, -x))


def position_of(angle: Angle2D, distance: float) -> np.ndarray:
    """Point at ``distance`` from the surface centre along ``angle``."""
    theta, phi = angle
    ux, uy = direction_cosines(theta, phi)
    return distance * np.array([ux, uy, math.cos(theta)])


def fraunhofer_distance(diameter: float, wavelength: float) -> float:
    """``2 D**2 / lambda``."""
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    if diameter < 0:
        raise ValueError("diameter must be non-negative")
    return 2.0 * diameter**2 / wavelength


def fresnel_distance(diameter: float, wavelength: float) -> float:
    """``(D**4 / (8 lambda)) ** (1/3)``; reactive near-field boundary."""
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    if diameter < 0:
        raise ValueError("diameter must be non-negative")
    return (diameter**4 / (8.0 * wavelength)) ** (1.0 / 3.0)
