"""Experiment runners behind the CLI: SNR maps, path-loss sweeps, rate sweeps,
array-factor cuts and LC load export.

Every runner is a pure function of the scenario (and seed) and returns a list
of row dicts in a deterministic order. Independent points and trials may be
spread over a process pool; results are always assembled in input order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from .channel import array_factor, composite_channel, path_loss_db
from .core import Angle2D, fraunhofer_distance, fresnel_distance, position_of
from .link import AssignmentError, achievable_rate, assign_subcarriers, linear_to_db, snr
from .scenario import ConfigError, Scenario
from .surface import FresnelProfile, Metaprism, lc_table

PRNG_NAME = "PCG64 (numpy default_rng, SeedSequence([seed, users, trial]))"


def _pool_map(fn, items, workers: int):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def point_channels(scenario: Scenario, p, frequencies, profile: str | None = None, surface: str | None = None):
    """Channel at receiver ``p`` for each frequency, summed over the scenario's surfaces."""
    surface = surface or scenario.surface
    plan, budget = scenario.plan, scenario.budget
    kw = dict(
        wavelength=plan.wavelength, gain_t=budget.gain_t, gain_r=budget.gain_r,
        bs_mode=scenario.bs_mode, rx_mode=scenario.rx_mode,
    )
    p = np.asarray(p, dtype=float)
    c = np.zeros(len(np.atleast_1d(frequencies)), dtype=complex)
    if surface in ("wall", "both"):
        c += composite_channel(scenario.wall_obj(), scenario.bs_position, p, frequencies, **kw)
    if surface in ("metaprism", "both"):
        mp = scenario.metaprism_obj(profile, target=p)
        c += composite_channel(mp, scenario.bs_position, p, frequencies, **kw)
    return c


# -- SNR map ------------------------------------------------------------------


def _map_point(scenario: Scenario, ks, p):
    plan = scenario.plan
    freqs = plan.frequencies[np.asarray(ks) - 1]
    c = point_channels(scenario, p, freqs)
    s = snr(c, 1.0, scenario.budget)
    best = int(np.argmax(s))
    row = {"x_m": float(p[0]), "y_m": float(p[1]), "z_m": float(p[2]), "k_best": int(ks[best]), "snr_db_best": float(linear_to_db(s[best]))}
    for k, v in zip(ks, s):
        row[f"snr_db_k{k}"] = float(linear_to_db(v))
    return row


def run_snr_map(scenario: Scenario, subcarriers=None, points=None):
    """Unit-weight SNR over the receiver grid for the requested subcarriers.

    ``k_best`` and ``snr_db_best`` refer to the best of the requested
    subcarriers (all subcarriers when none are given).
    """
    scenario.validate()
    ks = list(subcarriers) if subcarriers else list(scenario.map_subcarriers)
    if not ks:
        ks = list(range(1, scenario.plan.n_subcarriers + 1))
    pts = scenario.region_points() if points is None else np.atleast_2d(np.asarray(points, dtype=float))
    if len(pts) == 0:
        raise ConfigError("empty receiver grid")
    if np.any(pts[:, 2] <= 0):
        raise ConfigError("receiver points must lie in front of the surface")
    return _pool_map(partial(_map_point, scenario, ks), pts, scenario.workers)


# -- path-loss sweep ----------------------------------------------------------


def _pl_point(scenario: Scenario, direction: Angle2D, d: float):
    plan = scenario.plan
    lam = plan.wavelength
    p = position_of(direction, d)
    base = scenario.metaprism_obj("specular")
    incidence = scenario.incidence
    row = {"d_m": d}
    designs = {
        "beamsteer": FresnelProfile(incidence, direction, lam),
        "focus": FresnelProfile(incidence, direction, lam, d),
        "ideal": scenario.profile("ideal", target=p),
    }
    budget = scenario.budget
    for name, prof in designs.items():
        c = composite_channel(
            base.with_profile(prof), scenario.bs_position, p, plan.f0, lam,
            budget.gain_t, budget.gain_r, scenario.bs_mode, scenario.rx_mode,
        )
        row[f"L_{name}_db"] = path_loss_db(c)
    return row


def run_pl_sweep(scenario: Scenario, distances, direction: Angle2D | None = None):
    """Path loss at the centre frequency versus receiver distance along one ray.

    Each distance gets point designs aimed at the receiver: a pure steering
    profile, a Fresnel focusing profile with focal distance equal to the
    range, and the ideal profile.
    """
    scenario.validate()
    distances = [float(d) for d in distances]
    if any(d <= 0 for d in distances):
        raise ConfigError("distances must be positive")
    if direction is None:
        r = scenario.region
        direction = (
            Angle2D.from_degrees(r.ray_theta_deg, r.ray_phi_deg) if r.ray_theta_deg is not None else Angle2D(0.0, 0.0)
        )
    return _pool_map(partial(_pl_point, scenario, direction), distances, scenario.workers)


def default_distances(scenario: Scenario, n: int = 40, d_max: float = 200.0):
    """Log-spaced distances from the Fresnel distance up to ``d_max``."""
    grid = scenario.metaprism_grid()
    d0 = max(fresnel_distance(grid.diameter, scenario.plan.wavelength), 0.1)
    return list(np.geomspace(d0, d_max, n))


# -- rate sweep ---------------------------------------------------------------


def _trial(scenario: Scenario, variants, n_users: int, seed: int, trial: int):
    rng = np.random.default_rng([seed, n_users, trial])
    users = scenario.sample_users(n_users, rng)
    plan = scenario.plan
    freqs = plan.frequencies
    wall_cache = {}
    out = []
    for surface, profile in variants:
        rows = []
        for i, p in enumerate(users):
            c = np.zeros(len(freqs), dtype=complex)
            if surface in ("wall", "both"):
                if i not in wall_cache:
                    wall_cache[i] = point_channels(scenario, p, freqs, surface="wall")
                c = c + wall_cache[i]
            if surface in ("metaprism", "both"):
                c = c + point_channels(scenario, p, freqs, profile=profile, surface="metaprism")
            rows.append(c)
        snr_matrix = snr(np.array(rows), 1.0, scenario.budget)
        try:
            plan_ = assign_subcarriers(snr_matrix, scenario.assignment)
            rates = achievable_rate(plan_.user_snr(snr_matrix))
            uncovered = len(plan_.uncovered)
        except AssignmentError:
            if n_users > plan.n_subcarriers:
                raise
            rates, uncovered = np.zeros(n_users), n_users
        out.append((float(np.mean(rates)), uncovered / n_users))
    return out


def run_rate_sweep(scenario: Scenario, users_list, trials: int | None = None, seed: int | None = None, variants=None):
    """Mean per-user achievable rate versus number of users.

    Users are dropped uniformly in the receiver region, one independent PRNG
    stream per (seed, users, trial). ``variants`` lists ``(surface, profile)``
    pairs evaluated on the same drops; with more than one variant the rate
    columns are suffixed ``_<surface>_<profile>``.
    """
    scenario.validate()
    trials = scenario.trials if trials is None else trials
    seed = scenario.seed if seed is None else seed
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    variants = variants or [(scenario.surface, scenario.metaprism.profile)]
    k = scenario.plan.n_subcarriers
    rows = []
    for n_users in users_list:
        n_users = int(n_users)
        if n_users <= 0:
            continue
        if n_users > k:
            raise AssignmentError(f"{n_users} users exceed {k} subcarriers")
        per_trial = _pool_map(
            partial(_trial, scenario, tuple(variants), n_users, seed), range(trials), scenario.workers
        )
        row = {"users": n_users}
        for j, (surface, profile) in enumerate(variants):
            suffix = "" if len(variants) == 1 else f"_{surface}_{profile}"
            row[f"mean_rate{suffix}"] = float(np.mean([t[j][0] for t in per_trial]))
            row[f"frac_uncovered{suffix}"] = float(np.mean([t[j][1] for t in per_trial]))
        rows.append(row)
    return rows


# -- array factor -------------------------------------------------------------


def run_array_factor(scenario: Scenario, subcarriers=None, theta_deg=None, profile: str | None = None):
    """Normalised array-factor cuts ``|AF| / (N M)`` in the plane of incidence."""
    scenario.validate()
    plan = scenario.plan
    grid = scenario.metaprism_grid()
    kind = profile or scenario.metaprism.profile
    if kind not in ("beamsteer", "focus"):
        raise ConfigError("array-factor cuts need a beamsteer or focus design")
    prof = scenario.profile(kind)
    ks = list(subcarriers) if subcarriers else list(scenario.map_subcarriers)
    thetas = np.arange(-90.0, 90.0 + 1e-9, 0.1) if theta_deg is None else np.asarray(theta_deg, dtype=float)
    phi = scenario.incidence.phi
    rows = []
    for k in ks:
        target = prof.direction_cosines(plan.frequency(int(k)))
        af = np.abs(array_factor(grid, target, np.radians(thetas), plan.wavelength, phi)) / grid.n_cells
        rows.extend({"k": int(k), "theta_deg": float(t), "af_norm": float(a)} for t, a in zip(thetas, af))
    return rows


# -- LC export ----------------------------------------------------------------


def run_lc_export(scenario: Scenario, profile: str | None = None):
    scenario.validate()
    mp: Metaprism = scenario.metaprism_obj(profile or scenario.metaprism.profile)
    return [
        {"n": n, "m": m, "L_henries": L, "C_farads": C}
        for n, m, L, C in lc_table(mp, scenario.metaprism.r0_ohm)
    ]


def far_field_boundary(scenario: Scenario) -> float:
    grid = scenario.metaprism_grid()
    return fraunhofer_distance(grid.diameter, scenario.plan.wavelength)
