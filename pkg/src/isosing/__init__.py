"""Numerical toolkit for isolated singularities of spatial mappings with
unbounded distortion: dilatations, integral hypotheses, curve-family
moduli, and sampling-based singularity classification."""

__version__ = "0.1.0"

from .dilatation import dilatations_at, inner_dilatation, jacobian_at, ki_lq_norm
from .gallery import (
    FoldingParams,
    MapHandle,
    RingMapParams,
    compose,
    make_folding_map,
    make_inversion,
    make_ring_map,
    make_standard,
)
from .geometry import (
    AnnulusSpec,
    PolylineCurve,
    curve_line_integral,
    dimension_constants,
    sphere_sample,
)
from .integrals import (
    MajorantField,
    WeightFunction,
    annulus_condition_lhs,
    check_condition_4,
    check_condition_14,
    constant_field,
    fmo_estimate,
    log_weight,
    normalizer_I,
    radial_field,
    sphere_average,
)
from .modulus import (
    CurveFamily,
    GridDensity,
    analytic_modulus,
    cap_family,
    check_poletskii,
    discrete_modulus,
    is_admissible,
    rho_a_density,
    ring_family,
)
from .singularity import (
    GrowthEnvelope,
    check_growth,
    classify,
    corollary1_transform,
    count_preimages,
    lemma1_chain,
    verify_prop3_envelope,
)
from .verify import verify_theorem4, verify_theorem5

__all__ = [
    "__version__",
    "AnnulusSpec",
    "CurveFamily",
    "FoldingParams",
    "GridDensity",
    "GrowthEnvelope",
    "MajorantField",
    "MapHandle",
    "PolylineCurve",
    "RingMapParams",
    "WeightFunction",
    "analytic_modulus",
    "annulus_condition_lhs",
    "cap_family",
    "check_condition_14",
    "check_condition_4",
    "check_growth",
    "check_poletskii",
    "classify",
    "compose",
    "constant_field",
    "corollary1_transform",
    "count_preimages",
    "curve_line_integral",
    "dilatations_at",
    "dimension_constants",
    "discrete_modulus",
    "fmo_estimate",
    "inner_dilatation",
    "is_admissible",
    "jacobian_at",
    "ki_lq_norm",
    "lemma1_chain",
    "log_weight",
    "make_folding_map",
    "make_inversion",
    "make_ring_map",
    "make_standard",
    "normalizer_I",
    "radial_field",
    "rho_a_density",
    "ring_family",
    "sphere_average",
    "sphere_sample",
    "verify_prop3_envelope",
    "verify_theorem4",
    "verify_theorem5",
]
