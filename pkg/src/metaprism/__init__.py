"""Passive frequency-selective metasurfaces ("metaprisms") for OFDM coverage."""

from .channel import (
    PropagationMode,
    array_factor,
    composite_channel,
    equivalent_rcs,
    path_loss_db,
    path_loss_ideal_db,
    radar_equation_loss_db,
)
from .core import (
    BOLTZMANN,
    SPEED_OF_LIGHT,
    Angle2D,
    OfdmPlan,
    SurfaceGrid,
    angle_of,
    fraunhofer_distance,
    fresnel_distance,
    position_of,
    subcarrier_frequency,
)
from .environment import Wall, WallMaterial, fresnel_te, material
from .link import (
    AssignmentError,
    AssignmentPlan,
    LinkBudget,
    achievable_rate,
    assign_subcarriers,
    assignment_rows,
    noise_variance,
    snr,
)
from .scenario import ConfigError, Scenario
from .surface import (
    BeamsteerProfile,
    CellModel,
    FocusProfile,
    FresnelProfile,
    IdealProfile,
    LcLoad,
    Metaprism,
    SpecularProfile,
    UnrealizableLoadError,
    lc_load_synthesis,
    lc_table,
    steered_direction,
)

__all__ = [
    "achievable_rate",
    "Angle2D",
    "angle_of",
    "array_factor",
    "assign_subcarriers",
    "assignment_rows",
    "AssignmentError",
    "AssignmentPlan",
    "BeamsteerProfile",
    "BOLTZMANN",
    "CellModel",
    "composite_channel",
    "ConfigError",
    "equivalent_rcs",
    "FocusProfile",
    "fraunhofer_distance",
    "fresnel_distance",
    "fresnel_te",
    "FresnelProfile",
    "IdealProfile",
    "lc_load_synthesis",
    "lc_table",
    "LcLoad",
    "LinkBudget",
    "material",
    "Metaprism",
    "noise_variance",
    "OfdmPlan",
    "path_loss_db",
    "path_loss_ideal_db",
    "position_of",
    "PropagationMode",
    "radar_equation_loss_db",
    "Scenario",
    "snr",
    "SpecularProfile",
    "SPEED_OF_LIGHT",
    "steered_direction",
    "subcarrier_frequency",
    "SurfaceGrid",
    "UnrealizableLoadError",
    "Wall",
    "WallMaterial",
]

__version__ = "0.1.0"
