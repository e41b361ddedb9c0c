"""Scenario files: YAML with units in key names, resolved into model objects.

Defaults reproduce the street-corner NLOS setup: BS 20 m from the surface
at 45 degrees, 28 GHz carrier, 100 MHz over 256 subcarriers, 20 dBm
transmit power, 10/2 dBi antennas, 3 dB noise figure, users in
x in [-15, -5] m, z in [2, 10] m.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .channel import PropagationMode
from .core import Angle2D, OfdmPlan, SurfaceGrid, angle_of, position_of
from .environment import Wall, material
from .link import LinkBudget
from .surface import (
    BeamsteerProfile,
    FocusProfile,
    IdealProfile,
    Metaprism,
    SpecularProfile,
)

PROFILES = ("beamsteer", "focus", "ideal", "specular")
SURFACES = ("metaprism", "wall", "both")


class ConfigError(ValueError):
    """Invalid or inconsistent scenario."""


@dataclass
class BandConfig:
    f0_ghz: float = 28.0
    bandwidth_mhz: float = 100.0
    subcarriers: int = 256


@dataclass
class LinkConfig:
    ptx_dbm: float = 20.0
    gt_dbi: float = 10.0
    gr_dbi: float = 2.0
    noise_figure_db: float = 3.0
    temperature_k: float = 290.0
    bs_mode: str = "far_field"
    rx_mode: str = "exact"


@dataclass
class MetaprismConfig:
    side_m: float = 0.5
    pitch_wavelengths: float = 0.5
    profile: str = "beamsteer"
    theta_m_deg: float = 40.0
    d_min_m: float = 2.0
    literal_focus: bool = False
    gamma_magnitude: float = 1.0
    r0_ohm: float = 50.0


@dataclass
class WallConfig:
    side_m: float = 2.0
    pitch_wavelengths: float = 0.5
    material: str = "aerated_concrete"
    specular: bool = True
    diffuse: bool = True


@dataclass
class RegionConfig:
    """Receiver region: a rectangle in the x-z plane, or a ray when ``ray_theta_deg`` is set."""

    x_m: list = field(default_factory=lambda: [-15.0, -5.0])
    z_m: list = field(default_factory=lambda: [2.0, 10.0])
    y_m: float = 0.0
    step_m: float = 0.25
    ray_theta_deg: float | None = None
    ray_phi_deg: float = 0.0
    range_m: list = field(default_factory=lambda: [2.0, 10.0])


@dataclass
class Scenario:
    surface: str = "metaprism"
    bs_position_m: list = field(default_factory=lambda: [14.21, 0.0, 14.21])
    band: BandConfig = field(default_factory=BandConfig)
    link: LinkConfig = field(default_factory=LinkConfig)
    metaprism: MetaprismConfig = field(default_factory=MetaprismConfig)
    wall: WallConfig = field(default_factory=WallConfig)
    region: RegionConfig = field(default_factory=RegionConfig)
    users: int = 10
    trials: int = 20
    assignment: str = "amplitude_consistent"
    map_subcarriers: list = field(default_factory=lambda: [1, 64, 128, 192, 256])
    seed: int = 0
    workers: int = 1

    # -- construction / serialisation ------------------------------------

    @classmethod
    def from_dict(cls, data: dict | None) -> "Scenario":
        return _build(cls, data or {}, "scenario")

    @classmethod
    def load(cls, path) -> "Scenario":
        text = Path(path).read_text()
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        if data is not None and not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "Scenario":
        """Copy with top-level or dotted (``"metaprism.profile"``) overrides."""
        data = self.to_dict()
        for key, value in changes.items():
            node = data
            *parents, leaf = key.split(".")
            for p in parents:
                node = node[p]
            if leaf not in node:
                raise ConfigError(f"unknown scenario key {key!r}")
            node[leaf] = value
        return Scenario.from_dict(data)

    def canonical_json(self) -> str:
        """Sorted compact JSON of everything that affects results (not ``workers``)."""
        data = self.to_dict()
        data.pop("workers")
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def validate(self) -> "Scenario":
        if self.surface not in SURFACES:
            raise ConfigError(f"surface must be one of {SURFACES}, got {self.surface!r}")
        if self.metaprism.profile not in PROFILES:
            raise ConfigError(f"profile must be one of {PROFILES}, got {self.metaprism.profile!r}")
        if self.assignment not in ("literal", "amplitude_consistent"):
            raise ConfigError(f"unknown assignment mode {self.assignment!r}")
        for mode in (self.link.bs_mode, self.link.rx_mode):
            try:
                PropagationMode.parse(mode)
            except ValueError:
                raise ConfigError(f"unknown propagation mode {mode!r}") from None
        if len(self.bs_position_m) != 3 or self.bs_position_m[2] <= 0:
            raise ConfigError("bs_position_m must be [x, y, z] with z > 0")
        r = self.region
        if r.ray_theta_deg is None:
            if r.z_m[0] <= 0:
                raise ConfigError("receiver region must lie in front of the surface (z > 0)")
            if r.step_m <= 0:
                raise ConfigError("region step must be positive")
        elif r.range_m[0] <= 0 or abs(r.ray_theta_deg) >= 90:
            raise ConfigError("ray must start at a positive range and point into the front half-space")
        if self.band.subcarriers < 1:
            raise ConfigError("need at least one subcarrier")
        bad = [k for k in self.map_subcarriers if not 1 <= int(k) <= self.band.subcarriers]
        if bad:
            raise ConfigError(f"map subcarriers out of range: {bad}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.wall.material:
            try:
                material(self.wall.material)
            except KeyError as exc:
                raise ConfigError(str(exc)) from None
        return self

    # -- resolved objects -------------------------------------------------

    @property
    def plan(self) -> OfdmPlan:
        b = self.band
        return OfdmPlan(b.f0_ghz * 1e9, b.bandwidth_mhz * 1e6, int(b.subcarriers))

    @property
    def bs_position(self) -> np.ndarray:
        return np.asarray(self.bs_position_m, dtype=float)

    @property
    def incidence(self) -> Angle2D:
        return angle_of(self.bs_position)

    @property
    def budget(self) -> LinkBudget:
        lk = self.link
        return LinkBudget.from_db(
            self.plan, lk.ptx_dbm, lk.noise_figure_db, lk.gt_dbi, lk.gr_dbi, lk.temperature_k
        )

    @property
    def bs_mode(self) -> PropagationMode:
        return PropagationMode.parse(self.link.bs_mode)

    @property
    def rx_mode(self) -> PropagationMode:
        return PropagationMode.parse(self.link.rx_mode)

    def metaprism_grid(self) -> SurfaceGrid:
        mc = self.metaprism
        return SurfaceGrid.square(mc.side_m, mc.pitch_wavelengths * self.plan.wavelength)

    def wall_obj(self) -> Wall:
        wc = self.wall
        grid = SurfaceGrid.square(wc.side_m, wc.pitch_wavelengths * self.plan.wavelength)
        return Wall(grid, material(wc.material), self.plan.wavelength, wc.specular, wc.diffuse)

    def profile(self, kind: str | None = None, target=None):
        """Phase profile of the given kind; ``ideal`` needs the ``target`` position."""
        kind = kind or self.metaprism.profile
        mc = self.metaprism
        plan = self.plan
        if kind == "beamsteer":
            return BeamsteerProfile.design(self.incidence, math.radians(mc.theta_m_deg), plan)
        if kind == "focus":
            return FocusProfile.design(
                self.incidence, math.radians(mc.theta_m_deg), mc.d_min_m, plan,
                self.metaprism_grid(), literal=mc.literal_focus,
            )
        if kind == "specular":
            return SpecularProfile()
        if kind == "ideal":
            if target is None:
                raise ConfigError("the ideal profile needs a target position")
            return IdealProfile(
                self.bs_position,
                np.asarray(target, dtype=float),
                bs_far_field=self.bs_mode is PropagationMode.FAR_FIELD,
                rx_far_field=self.rx_mode is PropagationMode.FAR_FIELD,
            )
        raise ConfigError(f"unknown profile {kind!r}")

    def metaprism_obj(self, kind: str | None = None, target=None) -> Metaprism:
        return Metaprism.build(
            self.metaprism_grid(), self.plan.wavelength,
            self.profile(kind, target), self.metaprism.gamma_magnitude,
        )

    def region_points(self) -> np.ndarray:
        """Map grid in declared order: x outer, z inner (or along the ray)."""
        r = self.region
        if r.ray_theta_deg is not None:
            n = max(2, int(round((r.range_m[1] - r.range_m[0]) / r.step_m)) + 1)
            ds = np.linspace(r.range_m[0], r.range_m[1], n)
            direction = Angle2D.from_degrees(r.ray_theta_deg, r.ray_phi_deg)
            return np.array([position_of(direction, d) for d in ds])
        xs = _axis(r.x_m, r.step_m)
        zs = _axis(r.z_m, r.step_m)
        if len(xs) == 0 or len(zs) == 0:
            raise ConfigError("empty receiver grid")
        xx, zz = np.meshgrid(xs, zs, indexing="ij")
        return np.column_stack([xx.ravel(), np.full(xx.size, r.y_m), zz.ravel()])

    def sample_users(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """``n`` positions drawn uniformly over the receiver region."""
        r = self.region
        if r.ray_theta_deg is not None:
            ds = rng.uniform(r.range_m[0], r.range_m[1], n)
            direction = Angle2D.from_degrees(r.ray_theta_deg, r.ray_phi_deg)
            return np.array([position_of(direction, d) for d in ds]).reshape(n, 3)
        xs = rng.uniform(r.x_m[0], r.x_m[1], n)
        zs = rng.uniform(r.z_m[0], r.z_m[1], n)
        return np.column_stack([xs, np.full(n, r.y_m), zs])


def _axis(bounds, step):
    lo, hi = float(bounds[0]), float(bounds[1])
    if hi < lo:
        return np.array([])
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def _build(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be a mapping")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(fields))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")
    kwargs = {}
    for name, value in data.items():
        default = fields[name].default_factory() if fields[name].default_factory is not dataclasses.MISSING else None
        if dataclasses.is_dataclass(default):
            kwargs[name] = _build(type(default), value or {}, f"{where}.{name}")
        else:
            kwargs[name] = value
    return cls(**kwargs)
