"""Exact computations for nef cones of level-n Voronoi compactifications in genus 2 and 3."""

from .divisor import (
    CurveClass,
    DivisorClass,
    NefVerdict,
    canonical_class,
    epsilon_margin,
    fiber_curve,
    general_type_coefficient,
    humbert_decompose,
    intersect,
    max_epsilon,
    modular_curve,
    nef_test,
    pigeonhole_boundary,
    pullback_level,
    restrict_to_boundary,
)
from .exactfan import Cone, LatticeMap, SymMatrix, gl_conjugate, standard_cone
from .charts import MonomialMap, chart_embedding, dual_of_lattice_map, invert
from .strata import (
    boundary_degree,
    check_minus_nD_nef,
    enumerate_cusps,
    fiber_type,
    group_order_psl2,
    satake_strata,
    shioda_model,
)
from .theta import (
    SectionSpec,
    ThetaCharacteristic,
    check_extension,
    check_transformation,
    form_order,
    term_exponents_T,
    term_exponents_t,
    theta_numeric,
    valuation,
)

__version__ = "0.1.0"
