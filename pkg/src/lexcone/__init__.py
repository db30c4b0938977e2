"""Exact enumeration of admissible orders of polynomial families over cones."""

from .exact_lp import (
    DimensionMismatch,
    FeasibilityCertificate,
    Rational,
    RationalMatrix,
    RationalVector,
    Verdict,
    lp_feasible,
    verify_certificate,
)
from .cone import ConeSpec, NotPointed, check_pointed, in_cone, interior_functional
from .order import (
    CyclicRefinement,
    LinearExtension,
    PartialOrder,
    TooLarge,
    boolean_index_of,
    count_linear_extensions,
    is_linear_extension,
    one_bit_covers,
    refine_order,
)
from .lclep import (
    InvalidPartition,
    LCLEPInstance,
    LinearForm,
    SolutionSet,
    base_cone,
    check_sigma,
    solve,
    solve_partitioned,
)
from .psd import (
    InteractionType,
    LinearizedInstance,
    NonPositiveParameter,
    ParameterPoint,
    PSDInstance,
    RealizationFailed,
    TypeMismatch,
    UnsupportedMode,
    WrongType,
    build_psd,
    evaluate,
    linearize,
    log_transfer_map,
    quad_constraints,
    realize_parameter,
    solve_psd,
    special_case_domain,
    subproblem_refinements,
)
from .sampler import (
    SampleConfig,
    SampleReport,
    WitnessOutsideCandidates,
    export_residual,
    residual,
    sample,
)

__version__ = "0.1.0"
