"""Noise, SNR, achievable rate and greedy equal-rate subcarrier assignment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import BOLTZMANN, OfdmPlan


class AssignmentError(ValueError):
    """The SNR matrix cannot be assigned (too many users or no usable entry)."""


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def noise_variance(plan: OfdmPlan, noise_figure_db: float = 0.0, temperature: float = 290.0) -> float:
    """Thermal noise power (W) in one subcarrier: ``k_B T0 df F``."""
    if plan.spacing <= 0:
        raise ValueError("subcarrier spacing must be positive")
    return BOLTZMANN * temperature * plan.spacing * 10.0 ** (noise_figure_db / 10.0)


@dataclass(frozen=True)
class LinkBudget:
    ptx: float  # watts, total
    noise_power: float  # watts, per subcarrier
    gain_t: float = 1.0
    gain_r: float = 1.0

    def __post_init__(self):
        if self.ptx <= 0 or self.noise_power <= 0:
            raise ValueError("transmit and noise power must be positive")

    @classmethod
    def from_db(
        cls,
        plan: OfdmPlan,
        ptx_dbm: float,
        noise_figure_db: float,
        gain_t_db: float = 0.0,
        gain_r_db: float = 0.0,
        temperature: float = 290.0,
    ) -> "LinkBudget":
        return cls(
            ptx=dbm_to_watts(ptx_dbm),
            noise_power=noise_variance(plan, noise_figure_db, temperature),
            gain_t=float(db_to_linear(gain_t_db)),
            gain_r=float(db_to_linear(gain_r_db)),
        )


def snr(c, omega, budget: LinkBudget):
    """``Ptx |c omega|^2 / sigma^2`` (linear)."""
    return budget.ptx * np.abs(np.asarray(c) * np.asarray(omega)) ** 2 / budget.noise_power


def achievable_rate(snr_linear):
    """Shannon rate ``log2(1 + SNR)`` in bit/s/Hz."""
    snr_linear = np.asarray(snr_linear, dtype=float)
    if np.any(snr_linear < 0):
        raise ValueError("SNR must be non-negative")
    out = np.log2(1.0 + snr_linear)
    return out if out.ndim else float(out)


@dataclass
class AssignmentPlan:
    """User-to-subcarrier map (0-based indices) with per-subcarrier amplitude weights.

    ``subcarrier[u]`` is ``-1`` for users left uncovered (no positive SNR
    left when their turn came).
    """

    subcarrier: np.ndarray
    omega: np.ndarray
    mode: str
    steps: list = field(default_factory=list)  # (user, subcarrier, snr) in pick order

    @property
    def uncovered(self) -> np.ndarray:
        return np.flatnonzero(self.subcarrier < 0)

    @property
    def covered(self) -> np.ndarray:
        return np.flatnonzero(self.subcarrier >= 0)

    def user_weights(self) -> np.ndarray:
        w = np.zeros(len(self.subcarrier))
        ok = self.subcarrier >= 0
        w[ok] = self.omega[self.subcarrier[ok]]
        return w

    def user_snr(self, snr_matrix) -> np.ndarray:
        """Per-user SNR after weighting: ``SNR(u, A(u)) * omega(A(u))**2``."""
        snr_matrix = np.asarray(snr_matrix, dtype=float)
        out = np.zeros(len(self.subcarrier))
        ok = self.subcarrier >= 0
        users = np.flatnonzero(ok)
        out[ok] = snr_matrix[users, self.subcarrier[ok]] * self.omega[self.subcarrier[ok]] ** 2
        return out


def assign_subcarriers(snr_matrix, mode: str = "amplitude_consistent") -> AssignmentPlan:
    """Greedy equal-rate assignment over a ``(U, K)`` unit-weight SNR matrix.

    Repeatedly takes the largest remaining entry, gives that subcarrier to
    that user and removes both. The first pick sets the reference SNR. In
    ``"literal"`` mode the weight of each pick is ``ref / snr`` and the
    weights are normalised to sum to one. In ``"amplitude_consistent"`` mode
    it is ``sqrt(ref / snr)`` normalised to unit energy, which gives every
    covered user the same weighted SNR. Ties go to the lowest user, then the
    lowest subcarrier.
    """
    if mode not in ("literal", "amplitude_consistent"):
        raise ValueError(f"unknown assignment mode {mode!r}")
    remaining = np.array(snr_matrix, dtype=float, copy=True)
    if remaining.ndim != 2:
        raise ValueError("SNR matrix must be 2-D (users x subcarriers)")
    n_users, n_sub = remaining.shape
    if n_users > n_sub:
        raise AssignmentError(f"{n_users} users exceed {n_sub} subcarriers")
    if np.any(remaining < 0) or not np.all(np.isfinite(remaining)):
        raise ValueError("SNR entries must be finite and non-negative")
    subcarrier = np.full(n_users, -1, dtype=int)
    omega = np.zeros(n_sub)
    if n_users == 0:
        return AssignmentPlan(subcarrier, omega, mode)
    if not np.any(remaining > 0):
        raise AssignmentError("all SNR entries are zero; nothing can be assigned")

    steps = []
    ref = None
    for _ in range(n_users):
        flat = int(np.argmax(remaining))
        iu, ik = divmod(flat, n_sub)
        best = remaining[iu, ik]
        if best <= 0:
            break
        if ref is None:
            ref = best
        subcarrier[iu] = ik
        omega[ik] = ref / best if mode == "literal" else math.sqrt(ref / best)
        steps.append((iu, ik, best))
        remaining[iu, :] = 0.0
        remaining[:, ik] = 0.0

    if mode == "literal":
        omega /= omega.sum()
    else:
        omega /= math.sqrt(np.sum(omega**2))
    return AssignmentPlan(subcarrier, omega, mode, steps)


def assignment_rows(plan: AssignmentPlan, snr_matrix) -> list[dict]:
    """Per-user rows ``(user, subcarrier, omega, snr_db, rate_bps_hz)``, 1-based indices.

    Uncovered users get subcarrier 0, zero weight and zero rate.
    """
    user_snr = plan.user_snr(snr_matrix)
    rows = []
    for u, k in enumerate(plan.subcarrier):
        covered = k >= 0
        rows.append({
            "user": u + 1,
            "subcarrier": int(k) + 1 if covered else 0,
            "omega": float(plan.omega[k]) if covered else 0.0,
            "snr_db": float(linear_to_db(user_snr[u])),
            "rate_bps_hz": float(achievable_rate(user_snr[u])),
        })
    return rows
