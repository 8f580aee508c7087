"""Holonomy of Riccati foliations, developing maps and contracting semigroups."""

from . import errors
from .continuation import (
    continue_inverse_developing,
    holonomy_to_curve,
    natural_boundary_experiment,
    natural_boundary_probe,
    painleve_continue,
    shadowing_word_sequence,
)
from .integrate import DEFAULT_TOLERANCES, Tolerances
from .moebius import INF, Circle, Moebius, spherical_distance
from .projective import (
    explicit_monodromy,
    from_quadratic,
    ideal_polygon_group,
    limit_set_orbit,
    trace_map_scan,
)
from .rational import RationalMap1D
from .riccati_family import (
    CuspData,
    explicit_quadratic,
    explicit_riccati,
    explicit_schwarzian,
    schwarzian_of_riccati,
)
from .semigroup import (
    DiscMap,
    IFSystem,
    annulus_modulus,
    dense_limit_construction,
    limit_set,
    loray_rebelo_renormalize,
    modulus_growth_check,
)
from .transport import BasePath, RiccatiSystem, holonomy, monodromy_representation, transport

__all__ = [
    "annulus_modulus",
    "BasePath",
    "Circle",
    "continue_inverse_developing",
    "CuspData",
    "DEFAULT_TOLERANCES",
    "dense_limit_construction",
    "DiscMap",
    "errors",
    "explicit_monodromy",
    "explicit_quadratic",
    "explicit_riccati",
    "explicit_schwarzian",
    "from_quadratic",
    "holonomy",
    "holonomy_to_curve",
    "ideal_polygon_group",
    "IFSystem",
    "INF",
    "limit_set",
    "limit_set_orbit",
    "loray_rebelo_renormalize",
    "modulus_growth_check",
    "Moebius",
    "monodromy_representation",
    "natural_boundary_experiment",
    "natural_boundary_probe",
    "painleve_continue",
    "RationalMap1D",
    "RiccatiSystem",
    "schwarzian_of_riccati",
    "shadowing_word_sequence",
    "spherical_distance",
    "Tolerances",
    "trace_map_scan",
    "transport",
]

__version__ = "0.1.0"
