"""facetforge: convex quadratic systems with prescribed facial dimension
signatures.

Construct explicit systems realizing a given signature, verify signatures
exactly or by seeded probing, compute certified lower bounds on the number
of inequalities, and search sumset decompositions for cheaper realizations.
"""

from .constructor import (
    ConstructionParams,
    ExposingHalfspace,
    RealizationPlan,
    RealizationResult,
    boundary_disjointness_margins,
    build_ball,
    build_ball_cylinder_system,
    build_complete_dyadic,
    build_cylinder,
    default_params,
    exposing_halfspace,
    realize,
)
from .exact_linalg import Subspace, rank, rmatrix, rvector
from .quadratics import (
    ConvexQuadratic,
    QuadraticClass,
    QuadraticKind,
    QuadraticSystem,
    classify,
    direct_sum,
    embed,
    evaluate,
    face_direction_space,
    single_signature,
)
from .signatures import (
    DecompositionCapExceeded,
    Leaf,
    LowerBoundCertificate,
    Signature,
    Sum,
    check_certificate,
    decompose_min_cost,
    is_complete,
    lower_bound,
    minkowski_sum,
    shift,
    tree_cost,
    tree_leaves,
    tree_signature,
)
from .verifier import (
    Confidence,
    DisjointnessCertificate,
    InfeasibleSystem,
    NoInteriorFound,
    ProbeMismatch,
    UnrecognizedStructure,
    VerificationReport,
    blocks,
    boundary_sample,
    disjointness_certificate,
    exact_signature,
    interior_point,
    minimal_face_dim_at,
    probe_signature,
)

__version__ = "0.1.0"

__all__ = [
    "ConstructionParams",
    "ConvexQuadratic",
    "Confidence",
    "DecompositionCapExceeded",
    "DisjointnessCertificate",
    "ExposingHalfspace",
    "InfeasibleSystem",
    "Leaf",
    "LowerBoundCertificate",
    "NoInteriorFound",
    "ProbeMismatch",
    "QuadraticClass",
    "QuadraticKind",
    "QuadraticSystem",
    "RealizationPlan",
    "RealizationResult",
    "Signature",
    "Subspace",
    "Sum",
    "UnrecognizedStructure",
    "VerificationReport",
    "blocks",
    "boundary_disjointness_margins",
    "boundary_sample",
    "build_ball",
    "build_ball_cylinder_system",
    "build_complete_dyadic",
    "build_cylinder",
    "check_certificate",
    "classify",
    "decompose_min_cost",
    "default_params",
    "direct_sum",
    "disjointness_certificate",
    "embed",
    "evaluate",
    "exact_signature",
    "exposing_halfspace",
    "face_direction_space",
    "interior_point",
    "is_complete",
    "lower_bound",
    "minimal_face_dim_at",
    "minkowski_sum",
    "probe_signature",
    "rank",
    "realize",
    "rmatrix",
    "rvector",
    "shift",
    "single_signature",
    "tree_cost",
    "tree_leaves",
    "tree_signature",
]
