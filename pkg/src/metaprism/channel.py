"""Two-hop channel through a reflecting surface, array factor and path loss."""

from __future__ import annotations

import enum
import math

import numpy as np

from .core import SPEED_OF_LIGHT, Angle2D, SurfaceGrid, angle_of, direction_cosines
from .surface import CellModel, cell_pattern

# frequencies evaluated per exact re-anchoring in the subcarrier recursion
_ANCHOR_EVERY = 32
# below this many (cell, frequency) pairs the dense exp is used directly
_DENSE_LIMIT = 2_000_000


class PropagationMode(enum.Enum):
    EXACT = "exact"
    FAR_FIELD = "far_field"

    @classmethod
    def parse(cls, value) -> "PropagationMode":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower().replace("-", "_"))


def _hop(endpoint, cells, gain: float, wavelength: float, mode: PropagationMode):
    """Amplitude and delay-slope of one hop; phase at ``f`` is ``-slope * f``."""
    endpoint = np.asarray(endpoint, dtype=float)
    cells = np.atleast_2d(np.asarray(cells, dtype=float))
    mode = PropagationMode.parse(mode)
    if mode is PropagationMode.EXACT:
        d = np.linalg.norm(endpoint - cells, axis=1)
        if np.any(d == 0):
            raise ValueError("endpoint coincides with a surface cell")
        amp = math.sqrt(gain) * wavelength / (4.0 * math.pi * d)
        path = d
    else:
        r = float(np.linalg.norm(endpoint))
        if r == 0:
            raise ValueError("endpoint at the surface centre")
        amp = np.full(len(cells), math.sqrt(gain) * wavelength / (4.0 * math.pi * r))
        path = r - cells @ (endpoint / r)
    return amp, 2.0 * math.pi * path / SPEED_OF_LIGHT


def incident_gain(p_bs, cells, f, gain_t: float, wavelength: float, mode=PropagationMode.EXACT):
    """Complex BS-to-cell gain for each cell at frequency ``f``.

    ``EXACT`` uses the true distance to each cell. ``FAR_FIELD`` uses the
    centre distance for the amplitude and a planar phase front.
    """
    amp, slope = _hop(p_bs, cells, gain_t, wavelength, mode)
    return amp * np.exp(-1j * np.multiply.outer(np.asarray(f, dtype=float), slope))


def reflected_gain(cells, p, f, gain_r: float, wavelength: float, mode=PropagationMode.EXACT):
    """Complex cell-to-receiver gain; same model as :func:`incident_gain`."""
    return incident_gain(p, cells, f, gain_r, wavelength, mode)


def _sum_affine(amp, intercept, slope, frequencies):
    """``sum_n amp_n exp(j (intercept_n + slope_n f))`` for every ``f``."""
    freqs = np.atleast_1d(np.asarray(frequencies, dtype=float))
    n_f = len(freqs)
    steps = np.diff(freqs)
    uniform = n_f > 2 and np.allclose(steps, steps[0], rtol=1e-9, atol=0.0)
    if not uniform or n_f * len(amp) <= _DENSE_LIMIT:
        out = np.empty(n_f, dtype=complex)
        chunk = max(1, _DENSE_LIMIT // max(len(amp), 1))
        for start in range(0, n_f, chunk):
            f = freqs[start:start + chunk]
            out[start:start + chunk] = np.exp(1j * (intercept + np.multiply.outer(f, slope))) @ amp
        return out
    # uniform grid: geometric recursion, re-anchored exactly every few steps
    step = np.exp(1j * slope * steps[0])
    out = np.empty(n_f, dtype=complex)
    for start in range(0, n_f, _ANCHOR_EVERY):
        term = amp * np.exp(1j * (intercept + slope * freqs[start]))
        out[start] = term.sum()
        for i in range(start + 1, min(start + _ANCHOR_EVERY, n_f)):
            term *= step
            out[i] = term.sum()
    return out


def composite_channel(
    reflector,
    p_bs,
    p,
    frequencies,
    wavelength: float,
    gain_t: float = 1.0,
    gain_r: float = 1.0,
    bs_mode=PropagationMode.FAR_FIELD,
    rx_mode=PropagationMode.EXACT,
):
    """End-to-end channel ``sum_nm h_nm r_nm g_nm`` at each frequency.

    ``reflector`` is anything with ``grid`` and ``response(p_bs, p)`` returning
    per-cell ``(amplitude, phase_intercept, phase_slope)`` (a
    :class:`~metaprism.surface.Metaprism` or
    :class:`~metaprism.environment.Wall`). Returns a complex array with one
    entry per frequency (a scalar for scalar ``frequencies``).
    """
    cells = reflector.grid.positions
    amp_r, intercept, slope_r = reflector.response(p_bs, p)
    amp_h, slope_h = _hop(p_bs, cells, gain_t, wavelength, bs_mode)
    amp_g, slope_g = _hop(p, cells, gain_r, wavelength, rx_mode)
    amp = amp_h * amp_r * amp_g
    slope = slope_r - slope_h - slope_g
    out = _sum_affine(amp, intercept, slope, frequencies)
    return out if np.ndim(frequencies) else complex(out[0])


def array_factor(grid: SurfaceGrid, target, theta, wavelength: float, phi: float = 0.0):
    """Equivalent array factor of the surface steered toward ``target``.

    ``target`` is an :class:`Angle2D` or a pair of direction cosines (which
    may describe an evanescent direction). ``theta`` may be an array of
    observation angles, all at azimuth ``phi``.
    """
    if isinstance(target, Angle2D):
        ux0, uy0 = direction_cosines(*target)
    else:
        ux0, uy0 = target
    ux, uy = direction_cosines(np.asarray(theta, dtype=float), phi)
    k0 = 2.0 * math.pi / wavelength
    n = np.arange(grid.n_x)
    m = np.arange(grid.n_y)
    af_x = np.exp(1j * k0 * grid.dx * np.multiply.outer(ux - ux0, n)).sum(axis=-1)
    af_y = np.exp(1j * k0 * grid.dy * np.multiply.outer(uy - uy0, m)).sum(axis=-1)
    return af_x * af_y


def path_loss_db(c):
    """``-20 log10 |c|``; ``inf`` where the channel vanishes."""
    mag = np.abs(np.asarray(c))
    with np.errstate(divide="ignore"):
        out = -20.0 * np.log10(mag)
    return out if out.ndim else float(out)


def path_loss_ideal_db(
    p_bs,
    p,
    wavelength: float,
    cell: CellModel,
    n_cells: int,
    gain_t: float = 1.0,
    gain_r: float = 1.0,
    incidence: Angle2D | None = None,
    observation: Angle2D | None = None,
):
    """Closed-form path loss of a perfectly phased surface, amplitude approximation."""
    incidence = angle_of(p_bs) if incidence is None else incidence
    observation = angle_of(p) if observation is None else observation
    d1 = float(np.linalg.norm(p_bs))
    d2 = float(np.linalg.norm(p))
    pattern = cell_pattern(incidence[0], cell.q) * cell_pattern(observation[0], cell.q)
    denom = wavelength**4 * gain_t * gain_r * cell.gain**2 * cell.gamma_magnitude**2 * pattern * n_cells**2
    if denom == 0:
        return math.inf
    loss = (4.0 * math.pi) ** 4 * d1**2 * d2**2 / denom
    return 10.0 * math.log10(loss)


def equivalent_rcs(area: float, wavelength: float, q: float, incidence=None, observation=None) -> float:
    """Directional RCS ``4 pi A^2 F(in) F(out) / lambda^2`` of a perfectly phased surface."""
    if area <= 0:
        raise ValueError("area must be positive")
    f_in = 1.0 if incidence is None else cell_pattern(incidence[0], q)
    f_out = 1.0 if observation is None else cell_pattern(observation[0], q)
    return 4.0 * math.pi * area**2 * f_in * f_out / wavelength**2


def radar_equation_loss_db(d_tx: float, d_rx: float, wavelength: float, rcs: float, gain_t=1.0, gain_r=1.0):
    """Bistatic radar-equation loss ``(4 pi)^3 d_tx^2 d_rx^2 / (lambda^2 Gt Gr rcs)``."""
    loss = (4.0 * math.pi) ** 3 * d_tx**2 * d_rx**2 / (wavelength**2 * gain_t * gain_r * rcs)
    return 10.0 * math.log10(loss)
