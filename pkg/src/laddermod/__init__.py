"""Exact decomposition of persistence-module morphisms into ladder summands.

The library works over the rationals or a prime field, always exactly. It
reduces modules to barcode bases, extracts the single-matrix presentation of
a morphism, brings it to matching form by admissible operations, certifies
delta-interleavings, coarsens by bar length, and derives partial matchings
with exact costs.
"""

from .fields import (
    Fp,
    Matrix,
    PrimeField,
    QQ,
    RationalField,
    field_by_name,
    is_barcode_form,
    mat_inverse,
    mat_mul,
    mat_solve,
)
from .persistence import (
    BarGenerator,
    Barcode,
    BarcodeBasis,
    BasisChange,
    Interval,
    PersistenceModule,
    interval_lex_key,
    interval_lex_leq,
    interval_overlap,
    interval_strictly_nested,
    module_from_barcode,
    nestedness,
    offset_origins,
    reduce_to_barcode_basis,
    shift,
    shift_basis,
    shift_interval,
)
from .morphism import (
    InterleavingCertificate,
    LadderModule,
    MorphismMatrix,
    TriangleFailure,
    check_delta_invertible,
    check_interleaving,
    compose_ladder,
    compose_single,
    from_single_matrix,
    identity_ladder,
    inner_ladder,
    shift_morphism,
    to_single_matrix,
    validate_ladder,
)
from .ladder import (
    AdmissibleOp,
    LadderDecomposition,
    NestednessReport,
    ReductionFailure,
    SearchResult,
    apply_op,
    apply_ops,
    check_nestedness_precondition,
    decompose,
    is_matching_form,
    reduce_to_matching_form,
    search_matching_form,
    verify_decomposition,
)
from .coarse import (
    CoarseDecomposition,
    CoarseInterleaving,
    CoarseMorphism,
    QSplitting,
    coarse_decompose,
    coarse_interleaving,
    induce_coarse_morphism,
    q_split,
    refine_interval,
    refine_module,
    refine_morphism,
)
from .matching import (
    BasisIndependentTable,
    CorrespondenceReport,
    CostReport,
    PartialMatching,
    bl_matching,
    bottleneck_distance,
    check_cost_bound,
    check_matching_correspondence,
    induced_matching,
    matching_cost,
    to_basis_independent,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibleOp",
    "BarGenerator",
    "Barcode",
    "BarcodeBasis",
    "BasisChange",
    "BasisIndependentTable",
    "CoarseDecomposition",
    "CoarseInterleaving",
    "CoarseMorphism",
    "CorrespondenceReport",
    "CostReport",
    "Fp",
    "InterleavingCertificate",
    "Interval",
    "LadderDecomposition",
    "LadderModule",
    "Matrix",
    "MorphismMatrix",
    "NestednessReport",
    "PartialMatching",
    "PersistenceModule",
    "PrimeField",
    "QQ",
    "QSplitting",
    "RationalField",
    "ReductionFailure",
    "SearchResult",
    "TriangleFailure",
    "apply_op",
    "apply_ops",
    "bl_matching",
    "bottleneck_distance",
    "check_cost_bound",
    "check_delta_invertible",
    "check_interleaving",
    "check_matching_correspondence",
    "check_nestedness_precondition",
    "coarse_decompose",
    "coarse_interleaving",
    "compose_ladder",
    "compose_single",
    "decompose",
    "field_by_name",
    "from_single_matrix",
    "identity_ladder",
    "induce_coarse_morphism",
    "induced_matching",
    "inner_ladder",
    "interval_lex_key",
    "interval_lex_leq",
    "interval_overlap",
    "interval_strictly_nested",
    "is_barcode_form",
    "is_matching_form",
    "mat_inverse",
    "mat_mul",
    "mat_solve",
    "matching_cost",
    "module_from_barcode",
    "nestedness",
    "offset_origins",
    "q_split",
    "reduce_to_barcode_basis",
    "reduce_to_matching_form",
    "refine_interval",
    "refine_module",
    "refine_morphism",
    "search_matching_form",
    "shift",
    "shift_basis",
    "shift_interval",
    "shift_morphism",
    "to_basis_independent",
    "to_single_matrix",
    "validate_ladder",
    "verify_decomposition",
]
