"""Rough-wall scattering: Fresnel specular reflection plus coherent Lambertian
diffuse scattering, expressed as per-cell reflection coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Angle2D, SurfaceGrid, angle_of, direction_cosines


@dataclass(frozen=True)
class WallMaterial:
    eps_r: float
    tan_delta: float
    scattering: float  # S**2, power
    reduction: float  # R**2, power

    def __post_init__(self):
        if self.eps_r < 1:
            raise ValueError("relative permittivity must be >= 1")
        for name in ("scattering", "reduction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    @property
    def n_squared(self) -> complex:
        return complex(self.eps_r, -self.eps_r * self.tan_delta)

    @property
    def s(self) -> float:
        return math.sqrt(self.scattering)

    @property
    def r(self) -> float:
        return math.sqrt(self.reduction)


MATERIALS = {
    "aerated_concrete": WallMaterial(eps_r=2.26, tan_delta=0.0491, scattering=0.1, reduction=0.9),
}


def material(name: str) -> WallMaterial:
    try:
        return MATERIALS[name]
    except KeyError:
        raise KeyError(f"unknown wall material {name!r}; known: {sorted(MATERIALS)}") from None


def fresnel_te(theta_i: float, material: WallMaterial) -> complex:
    """TE Fresnel reflection coefficient at incidence angle ``theta_i``."""
    c = math.cos(theta_i)
    root = np.sqrt(material.n_squared - math.sin(theta_i) ** 2 + 0j)
    return complex((c - root) / (c + root))


def diffuse_phase(grid: SurfaceGrid, incidence: Angle2D, observation: Angle2D, wavelength: float, offset=0.0):
    """Per-cell phase making the diffuse term add coherently toward ``observation``.

    Cell offsets are measured from the grid corner (``n dx``, ``m dy``).
    """
    uxi, uyi = direction_cosines(*incidence)
    uxo, uyo = direction_cosines(*observation)
    n, m = grid.indices
    k0 = 2.0 * math.pi / wavelength
    return -k0 * (n * grid.dx * (uxi + uxo) + m * grid.dy * (uyi + uyo)) + offset


def wall_cell_reflection(
    grid: SurfaceGrid,
    incidence: Angle2D,
    observation: Angle2D,
    material: WallMaterial,
    wavelength: float,
    cells=None,
):
    """Complex reflection coefficient of each wall cell (or the selected ``cells``).

    Specular term ``Gamma(theta_i) R sqrt(Gs)`` plus diffuse term
    ``S sqrt(Gs cos(theta_i) cos(theta)) exp(j psi_nm)``, added coherently.
    """
    gs = 4.0 * math.pi * grid.dx * grid.dy / wavelength**2
    specular = fresnel_te(incidence[0], material) * material.r * math.sqrt(gs)
    cos_prod = max(math.cos(incidence[0]), 0.0) * max(math.cos(observation[0]), 0.0)
    diffuse = material.s * math.sqrt(gs * cos_prod)
    psi = diffuse_phase(grid, incidence, observation, wavelength)
    r = specular + diffuse * np.exp(1j * psi)
    return r if cells is None else r[cells]


@dataclass(frozen=True, eq=False)
class Wall:
    """Rough wall discretised like a metaprism."""

    grid: SurfaceGrid
    material: WallMaterial
    wavelength: float
    include_specular: bool = True
    include_diffuse: bool = True

    def response(self, p_bs, p):
        """Per-cell ``(amplitude, phase_intercept, phase_slope)``; frequency-flat."""
        incidence, observation = angle_of(p_bs), angle_of(p)
        mat = self.material
        if not self.include_specular:
            mat = WallMaterial(mat.eps_r, mat.tan_delta, mat.scattering, 0.0)
        if not self.include_diffuse:
            mat = WallMaterial(mat.eps_r, mat.tan_delta, 0.0, mat.reduction)
        r = wall_cell_reflection(self.grid, incidence, observation, mat, self.wavelength)
        return np.abs(r), np.angle(r), np.zeros(len(r))
