"""Metaprism cells and frequency-dependent phase profiles.

A metaprism cell reflects with amplitude ``sqrt(F(in) F(out)) * Gc * |Gamma|``
and a phase that is (to first order) linear in frequency. Every profile here
is exactly affine in frequency, ``phase(f) = intercept + slope * f``, which the
channel module exploits to sweep all subcarriers cheaply.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import (
    SPEED_OF_LIGHT,
    Angle2D,
    OfdmPlan,
    SurfaceGrid,
    angle_from_direction_cosines,
    angle_of,
    direction_cosines,
    fresnel_distance,
)


class UnrealizableLoadError(ValueError):
    """A requested phase slope cannot be produced by a passive series LC load."""


def cell_pattern(theta, q: float):
    """Normalised power pattern ``cos(theta)**q`` inside the front half-space.

    Uses ``|theta|`` so the signed-angle convention works; zero for
    ``|theta| >= pi/2``.
    """
    theta = np.abs(np.asarray(theta, dtype=float))
    inside = theta < np.pi / 2
    out = np.where(inside, np.cos(np.where(inside, theta, 0.0)) ** q, 0.0)
    return out if out.ndim else float(out)


def boresight_gain(dx: float, dy: float, wavelength: float) -> tuple[float, float]:
    """Cell gain whose effective area equals the cell area, and its pattern exponent.

    Returns ``(Gc, q)`` with ``Gc = 4 pi dx dy / lambda**2`` and ``q = Gc/2 - 1``.
    Cells smaller than ``lambda**2 / (2 pi)`` would need ``q < 0``; ``q`` is
    clamped to 0 with a warning.
    """
    if dx <= 0 or dy <= 0:
        raise ValueError("cell dimensions must be positive")
    gain = 4.0 * math.pi * dx * dy / wavelength**2
    q = gain / 2.0 - 1.0
    if q < 0:
        warnings.warn(f"cell too small for a cos^q pattern (q = {q:.3f}); using q = 0", stacklevel=2)
        q = 0.0
    return gain, q


@dataclass(frozen=True)
class CellModel:
    q: float
    gain: float
    gamma_magnitude: float = 1.0

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("pattern exponent q must be non-negative")
        if not 0.0 <= self.gamma_magnitude <= 1.0:
            raise ValueError("|Gamma| must lie in [0, 1] for a passive cell")

    @classmethod
    def for_cell(cls, dx: float, dy: float, wavelength: float, gamma_magnitude: float = 1.0):
        gain, q = boresight_gain(dx, dy, wavelength)
        return cls(q=q, gain=gain, gamma_magnitude=gamma_magnitude)

    def amplitude(self, incidence: Angle2D, observation: Angle2D) -> float:
        """Reflection amplitude ``sqrt(F(in) F(out)) Gc |Gamma|``."""
        f_in = cell_pattern(incidence[0], self.q)
        f_out = cell_pattern(observation[0], self.q)
        return math.sqrt(f_in * f_out) * self.gain * self.gamma_magnitude


def reflection_coefficient(model: CellModel, phase, incidence: Angle2D, observation: Angle2D):
    """Complex cell reflection coefficient for reflection phase ``phase``."""
    return model.amplitude(incidence, observation) * np.exp(1j * np.asarray(phase))


# -- beamsteering -------------------------------------------------------------


def steering_coefficients(
    incidence: Angle2D, target: Angle2D, wavelength: float, frequency_offset: float
) -> tuple[float, float]:
    """Linear phase-slope coefficients ``(a0, b0)`` steering toward ``target``
    at ``frequency_offset`` Hz away from the profile reference frequency."""
    uxi, uyi = direction_cosines(*incidence)
    uxt, uyt = direction_cosines(*target)
    scale = -2.0 * math.pi / (wavelength * frequency_offset)
    return scale * (uxi + uxt), scale * (uyi + uyt)


def beamsteer_coefficients(
    incidence: Angle2D, theta_m: float, wavelength: float, bandwidth: float
) -> tuple[float, float]:
    """Coefficients for the band-centre-referenced prism design.

    The centre subcarrier reflects specularly (``-theta_i``) and the top
    subcarrier toward ``-theta_i - theta_m`` in the plane of incidence.
    """
    theta_i, phi_i = incidence
    target = Angle2D(-theta_i - theta_m, phi_i)
    return steering_coefficients(incidence, target, wavelength, bandwidth / 2.0)


def steered_direction_cosines(a0, b0, incidence: Angle2D, wavelength: float, f, f_ref: float):
    """Direction cosines of the reflected beam at frequency ``f``.

    Values with ``ux**2 + uy**2 > 1`` denote evanescent (non-propagating) beams.
    """
    uxi, uyi = direction_cosines(*incidence)
    df = np.asarray(f, dtype=float) - f_ref
    ux = -uxi - a0 * wavelength * df / (2.0 * math.pi)
    uy = -uyi - b0 * wavelength * df / (2.0 * math.pi)
    return ux, uy


def steered_direction(a0: float, b0: float, incidence: Angle2D, plan: OfdmPlan, k: int):
    """Reflection direction of subcarrier ``k`` for a centre-referenced design.

    Returns ``None`` when the subcarrier has no propagating reflection.
    """
    f = plan.frequency(k)
    ux, uy = steered_direction_cosines(a0, b0, incidence, plan.wavelength, f, plan.f0)
    if ux * ux + uy * uy > 1.0:
        return None
    return angle_from_direction_cosines(float(ux), float(uy))


def near_grazing_subcarriers(
    a0: float, b0: float, incidence: Angle2D, plan: OfdmPlan, limit_deg: float = 80.0
) -> np.ndarray:
    """Boolean mask over subcarriers whose beam is evanescent or beyond ``limit_deg``."""
    ux, uy = steered_direction_cosines(
        a0, b0, incidence, plan.wavelength, plan.frequencies, plan.f0
    )
    return np.hypot(ux, uy) >= math.sin(math.radians(limit_deg))


def beamsteer_phase(x, y, f, a0: float, b0: float, f0: float):
    """``(a0 x + b0 y)(f - f0)``."""
    return (a0 * np.asarray(x) + b0 * np.asarray(y)) * (np.asarray(f) - f0)


# -- focusing -----------------------------------------------------------------


def focus_coefficient(d_min: float, plan: OfdmPlan, literal: bool = False) -> float:
    """Quadratic coefficient ``a_F`` placing the top subcarrier's focus at ``d_min``.

    By default ``a_F = pi f1 / (c d_min (f_K - f1))`` so the top subcarrier
    focuses at exactly ``d_min``. ``literal=True`` returns
    ``2 pi f1 / (c d_min W)``, which focuses it at about ``d_min / 2``.
    """
    if d_min <= 0:
        raise ValueError("minimum focal distance must be positive")
    f1 = plan.frequency(1)
    if literal:
        return 2.0 * math.pi * f1 / (SPEED_OF_LIGHT * d_min * plan.bandwidth)
    span = plan.frequencies[-1] - f1
    if span <= 0:
        raise ValueError("focusing needs at least two subcarriers")
    return math.pi * f1 / (SPEED_OF_LIGHT * d_min * span)


def focal_distance_at(a_focus: float, f, f_ref: float):
    """Focal distance ``pi f_ref / (c a_F (f - f_ref))``; ``inf`` at ``f == f_ref``."""
    df = np.asarray(f, dtype=float) - f_ref
    with np.errstate(divide="ignore"):
        d = np.where(df > 0, math.pi * f_ref / (SPEED_OF_LIGHT * a_focus * np.where(df > 0, df, 1.0)), np.inf)
    return d if d.ndim else float(d)


def focal_distance(a_focus: float, plan: OfdmPlan, k: int) -> float:
    """Focal distance of subcarrier ``k``; ``math.inf`` for ``k = 1``."""
    return focal_distance_at(a_focus, plan.frequency(k), plan.frequency(1))


def focus_phase(x, y, wavelength: float, incidence: Angle2D, target: Angle2D, d_focus: float):
    """Fresnel-approximation focusing phase: quadratic lens term plus steering."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    k0 = 2.0 * math.pi / wavelength
    uxi, uyi = direction_cosines(*incidence)
    uxt, uyt = direction_cosines(*target)
    steer = -k0 * (x * (uxi + uxt) + y * (uyi + uyt))
    if math.isinf(d_focus):
        return steer
    return k0 * (x * x + y * y) / (2.0 * d_focus) + steer


def ideal_phase(cells, p_bs, p, f):
    """Phase that cancels both propagation phases at every cell."""
    cells = np.atleast_2d(np.asarray(cells, dtype=float))
    d1 = np.linalg.norm(np.asarray(p_bs, dtype=float) - cells, axis=-1)
    d2 = np.linalg.norm(np.asarray(p, dtype=float) - cells, axis=-1)
    if np.any(d1 == 0) or np.any(d2 == 0):
        raise ValueError("endpoint coincides with a surface cell")
    return 2.0 * math.pi * np.multiply.outer(np.asarray(f, dtype=float), d1 + d2) / SPEED_OF_LIGHT


# -- profiles -----------------------------------------------------------------


class PhaseProfile:
    """Per-cell reflection phase, affine in frequency."""

    kind = "profile"

    def affine(self, cells: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(intercept, slope)`` with ``phase(f) = intercept + slope * f``."""
        raise NotImplementedError

    def phase(self, cells, f):
        """Phase for cells ``(n, 3)`` at frequency ``f``; shape ``f.shape + (n,)``."""
        cells = np.atleast_2d(np.asarray(cells, dtype=float))
        intercept, slope = self.affine(cells)
        return intercept + np.multiply.outer(np.asarray(f, dtype=float), slope)


@dataclass(frozen=True)
class SpecularProfile(PhaseProfile):
    """Frequency-flat uniform phase: a plain mirror."""

    offset: float = math.pi
    kind = "specular"

    def affine(self, cells):
        n = len(cells)
        return np.full(n, self.offset), np.zeros(n)


@dataclass(frozen=True)
class BeamsteerProfile(PhaseProfile):
    """``(a0 x + b0 y)(f - f_ref)``; ``f_ref`` is the band centre."""

    a0: float
    b0: float
    f_ref: float
    wavelength: float
    incidence: Angle2D = field(default=Angle2D(0.0, 0.0))
    kind = "beamsteer"

    @classmethod
    def design(cls, incidence: Angle2D, theta_m: float, plan: OfdmPlan) -> "BeamsteerProfile":
        a0, b0 = beamsteer_coefficients(incidence, theta_m, plan.wavelength, plan.bandwidth)
        return cls(a0, b0, plan.f0, plan.wavelength, Angle2D(*incidence))

    def slope(self, cells):
        return self.a0 * cells[:, 0] + self.b0 * cells[:, 1]

    def affine(self, cells):
        s = self.slope(cells)
        return -s * self.f_ref, s

    def direction_cosines(self, f):
        return steered_direction_cosines(
            self.a0, self.b0, self.incidence, self.wavelength, f, self.f_ref
        )

    def direction(self, f):
        """Steered direction at ``f``, or ``None`` if evanescent."""
        ux, uy = self.direction_cosines(f)
        if ux * ux + uy * uy > 1.0:
            return None
        return angle_from_direction_cosines(float(ux), float(uy))


@dataclass(frozen=True)
class FocusProfile(PhaseProfile):
    """``[a_F (x^2 + y^2) + a0 x + b0 y](f - f_ref)`` with ``f_ref = f_1``.

    The steering part uses the reference wavelength ``c / f_ref``.
    """

    a_focus: float
    a0: float
    b0: float
    f_ref: float
    incidence: Angle2D = field(default=Angle2D(0.0, 0.0))
    kind = "focus"

    @classmethod
    def design(
        cls,
        incidence: Angle2D,
        theta_m: float,
        d_min: float,
        plan: OfdmPlan,
        grid: SurfaceGrid | None = None,
        literal: bool = False,
    ) -> "FocusProfile":
        """Focus the top subcarrier at ``d_min`` toward ``-theta_i - theta_m``;
        the lowest subcarrier degenerates to specular steering."""
        if grid is not None:
            d_fresnel = fresnel_distance(grid.diameter, plan.wavelength)
            if d_min <= d_fresnel:
                warnings.warn(
                    f"d_min = {d_min} m is inside the reactive near field ({d_fresnel:.3f} m)",
                    stacklevel=2,
                )
        f1 = plan.frequency(1)
        span = plan.frequencies[-1] - f1
        theta_i, phi_i = incidence
        target = Angle2D(-theta_i - theta_m, phi_i)
        if span > 0:
            a0, b0 = steering_coefficients(incidence, target, SPEED_OF_LIGHT / f1, span)
        else:
            a0 = b0 = 0.0
        a_focus = focus_coefficient(d_min, plan, literal=literal)
        return cls(a_focus, a0, b0, f1, Angle2D(*incidence))

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_ref

    def slope(self, cells):
        x, y = cells[:, 0], cells[:, 1]
        return self.a_focus * (x * x + y * y) + self.a0 * x + self.b0 * y

    def affine(self, cells):
        s = self.slope(cells)
        return -s * self.f_ref, s

    def focal_distance(self, f):
        return focal_distance_at(self.a_focus, f, self.f_ref)

    def direction_cosines(self, f):
        return steered_direction_cosines(
            self.a0, self.b0, self.incidence, self.wavelength, f, self.f_ref
        )

    def direction(self, f):
        ux, uy = self.direction_cosines(f)
        if ux * ux + uy * uy > 1.0:
            return None
        return angle_from_direction_cosines(float(ux), float(uy))

    def focal_point(self, f):
        """Position of the focus at ``f``; ``None`` if unfocused or evanescent."""
        d = self.focal_distance(f)
        direction = self.direction(f)
        if direction is None or math.isinf(d):
            return None
        ux, uy = direction_cosines(*direction)
        return d * np.array([ux, uy, math.cos(direction.theta)])


def _path_length(endpoint, cells, far_field: bool):
    endpoint = np.asarray(endpoint, dtype=float)
    if far_field:
        r = float(np.linalg.norm(endpoint))
        return r - cells @ (endpoint / r)
    d = np.linalg.norm(endpoint - cells, axis=1)
    if np.any(d == 0):
        raise ValueError("endpoint coincides with a surface cell")
    return d


@dataclass(frozen=True, eq=False)
class IdealProfile(PhaseProfile):
    """Conjugate of the two-hop propagation phase toward ``target``.

    By default both hops use exact distances. Set ``bs_far_field`` (or
    ``rx_far_field``) to compensate a planar phase front instead, matching a
    channel evaluated with that hop in far-field mode.
    """

    p_bs: np.ndarray
    target: np.ndarray
    bs_far_field: bool = False
    rx_far_field: bool = False
    kind = "ideal"

    def slope(self, cells):
        d1 = _path_length(self.p_bs, cells, self.bs_far_field)
        d2 = _path_length(self.target, cells, self.rx_far_field)
        return 2.0 * math.pi * (d1 + d2) / SPEED_OF_LIGHT

    def affine(self, cells):
        return np.zeros(len(cells)), self.slope(cells)


@dataclass(frozen=True)
class FresnelProfile(PhaseProfile):
    """Frequency-flat point design: steer toward ``target`` and, for finite
    ``d_focus``, add the quadratic lens term focusing at that distance."""

    incidence: Angle2D
    target: Angle2D
    wavelength: float
    d_focus: float = math.inf
    kind = "fresnel"

    def affine(self, cells):
        psi = focus_phase(cells[:, 0], cells[:, 1], self.wavelength, self.incidence, self.target, self.d_focus)
        return psi, np.zeros(len(cells))


@dataclass(frozen=True, eq=False)
class Metaprism:
    """A grid of identical cells programmed with one phase profile."""

    grid: SurfaceGrid
    cell: CellModel
    profile: PhaseProfile

    @classmethod
    def build(cls, grid: SurfaceGrid, wavelength: float, profile: PhaseProfile, gamma_magnitude=1.0):
        cell = CellModel.for_cell(grid.dx, grid.dy, wavelength, gamma_magnitude)
        return cls(grid, cell, profile)

    def with_profile(self, profile: PhaseProfile) -> "Metaprism":
        return Metaprism(self.grid, self.cell, profile)

    def response(self, p_bs, p):
        """Per-cell ``(amplitude, phase_intercept, phase_slope)`` for this link.

        The cell pattern is evaluated at the surface-centre angles of both
        endpoints.
        """
        amp = self.cell.amplitude(angle_of(p_bs), angle_of(p))
        cells = self.grid.positions
        intercept, slope = self.profile.affine(cells)
        return np.full(len(cells), amp), intercept, slope


# -- LC loads -----------------------------------------------------------------


@dataclass(frozen=True)
class LcLoad:
    inductance: float
    capacitance: float

    @property
    def resonance(self) -> float:
        return 1.0 / (2.0 * math.pi * math.sqrt(self.inductance * self.capacitance))


def lc_load_synthesis(alpha: float, r0: float, f_ref: float) -> LcLoad:
    """Series LC load whose reflection phase has slope ``alpha`` rad/Hz at ``f_ref``."""
    if alpha >= 0:
        raise UnrealizableLoadError(
            f"phase slope {alpha:g} rad/Hz >= 0 needs a negative inductance"
        )
    inductance = -alpha * r0 / (8.0 * math.pi)
    capacitance = 1.0 / ((2.0 * math.pi * f_ref) ** 2 * inductance)
    return LcLoad(inductance, capacitance)


def lc_reactance(load: LcLoad, f):
    w = 2.0 * math.pi * np.asarray(f, dtype=float)
    return w * load.inductance - 1.0 / (w * load.capacitance)


def lc_phase_exact(load: LcLoad, r0: float, f):
    """Reflection phase ``-2 arctan(X(f) / R0)`` of the loaded cell."""
    return -2.0 * np.arctan(lc_reactance(load, f) / r0)


def realizable_slopes(slopes, margin: float = 0.01) -> np.ndarray:
    """Shift all phase slopes by one common constant so every slope is negative.

    A slope common to all cells is a frequency-dependent phase shared by the
    whole surface, which does not move beams or foci. After the shift the
    largest slope is ``-margin`` times the slope spread.
    """
    slopes = np.asarray(slopes, dtype=float)
    spread = float(slopes.max() - slopes.min())
    if spread == 0.0:
        if slopes.max() < 0:
            return slopes
        raise UnrealizableLoadError("uniform non-negative slope; profile has no frequency dispersion")
    return slopes - slopes.max() - margin * spread


def lc_table(metaprism: Metaprism, r0: float, common_shift: bool = True, margin: float = 0.01):
    """Rows ``(n, m, L, C)`` realising the metaprism's phase slopes with series LC loads."""
    profile = metaprism.profile
    cells = metaprism.grid.positions
    if isinstance(profile, (BeamsteerProfile, FocusProfile)):
        f_ref = profile.f_ref
    else:
        raise UnrealizableLoadError(f"{profile.kind} profile is not an LC-realisable design")
    _, slopes = profile.affine(cells)
    if common_shift:
        slopes = realizable_slopes(slopes, margin)
    n_idx, m_idx = metaprism.grid.indices
    rows = []
    for n, m, alpha in zip(n_idx, m_idx, slopes):
        load = lc_load_synthesis(float(alpha), r0, f_ref)
        rows.append((int(n), int(m), load.inductance, load.capacitance))
    return rows
