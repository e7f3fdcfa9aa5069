"""Bipartite correlation sets at desk scale.

Construct, transform, and test correlation tensors p(i,j|x,y): normalized
trace evaluations of operator measures on maximally entangled states,
exact rational convex combinations by block direct sums, corners and
synchronous lifts, POVM-to-PVM dilation, and local-polytope membership
with checkable certificates.
"""

from .combine import (
    BlockPlan,
    approximate_weights,
    embed_factorial,
    plan_blocks,
    rational_combination,
    synchronous_from_blocks,
)
from .corners import corner, lift_max_ent, lift_nonsignalling
from .dilation import (
    check_pairwise_commuting,
    dilate_commuting_rational,
    eval_almost_max_ent,
    predicted_dilation_dim,
    rational_spectrum,
    round_to_rational_spectrum,
)
from .errors import (
    CommutationError,
    CorrsetsError,
    DiagonalizationError,
    DimensionCapError,
    RationalApproximationError,
    ShapeError,
    SpectrumError,
    WeightError,
)
from .membership import (
    BellFunctional,
    MembershipVerdict,
    bell_value,
    chsh_game_functional,
    chsh_optimal_rep,
    enumerate_deterministic,
    is_local,
)
from .operators import (
    MaxEntRep,
    MeasureKind,
    OperatorMeasure,
    SchmidtForm,
    StateRep,
    canonicalize,
    eval_max_ent,
    eval_state_rep,
    is_maximally_entangled,
    random_max_ent_rep,
    random_povm,
    random_pvm,
    schmidt_decompose,
    validate_measure,
)
from .tensors import (
    Correlation,
    MarginalPair,
    ValidityReport,
    convex_combine,
    is_symmetric,
    is_synchronous,
    marginals,
    pr_box,
    sup_distance,
    uniform_correlation,
    validate_correlation,
)

__version__ = "0.1.0"
