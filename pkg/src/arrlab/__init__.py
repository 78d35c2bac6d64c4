"""Exact combinatorics and projection volumes of central hyperplane arrangements."""

from .arrangement import (
    Arrangement,
    Face,
    Hyperplane,
    SignVector,
    canonicalize,
    enumerate_faces,
    enumerate_regions,
    essentialize,
    rank,
    region_cone,
)
from .cones import (
    Cone,
    classify_projection,
    estimate_volumes_mc,
    exact_volumes_rank2,
    normal_cone_solid_angle,
    project_point,
    project_point_exact,
)
from .generators import GeneratorSpec, generate
from .lattice import (
    CharPoly,
    Flat,
    IntersectionLattice,
    build_lattice,
    characteristic_polynomial,
    dual_characteristic_polynomial,
    lower_interval,
    mobius_values,
    region_count_check,
    truncate,
)
from .verify import emit_report, verify_flat_identity, verify_main_theorem
from .zonotope import (
    AngleProfile,
    ZonotopeModel,
    angle_sums_dual,
    angle_sums_perles_shephard,
    f_vector_zaslavsky,
    vertex_lemma_check,
    zonotope_vertices,
)

__version__ = "0.1.0"
