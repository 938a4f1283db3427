"""Morrey and weak Morrey norms of radial piecewise-power functions."""

__version__ = "0.1.0"

from .constructions import (
    Theorem13Spec,
    ball_indicator,
    bounding_profile_g,
    matched_radii,
    power_function,
    probe_family,
    section4_function,
    theorem13_function,
)
from .geometry import cap_fraction, offcenter_mass, shell_in_ball_fraction, unit_ball_volume
from .maximal import maximal_morrey_lower_bound, maximal_value
from .norms import (
    NormVerdict,
    SpaceParams,
    centered_norm,
    exact_norm_1d,
    growth_exponent_fit,
    local_norm,
    offcenter_audit,
    weak_norm,
)
from .radial import (
    AnnularSet,
    PowerSegment,
    RadialProfile,
    centered_mass,
    evaluate,
    power_map,
    segment_mass,
    superlevel_set,
)
