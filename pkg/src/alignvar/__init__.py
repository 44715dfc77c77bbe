"""Optimal alignment of binary sequences under a block-transfer move.

Exact and Monte Carlo tooling for the variance of the optimal alignment
score ``L_n`` of two iid Bernoulli(1/2) texts, the random transfer of a zero
from a 5-block to a 1-block, and the block-profile chain it induces.
"""

from alignvar.sequences import BinarySequence, as_sequence
from alignvar.scoring import ScoringScheme
from alignvar.align import (
    AlignmentPairs,
    InvalidAlignmentError,
    matched_ones_alignment,
    min_matched_ones_among_optimal,
    optimal_score,
    optimal_traceback,
    score_of_alignment,
)
from alignvar.blocks import (
    E_VEC,
    BlockProfile,
    NoEligibleBlockError,
    ProfileDecomposition,
    TransferChoice,
    decompose_runs,
    expected_block_count,
    profile_decompose,
    reconstruct,
    transfer,
    zero_block_profile,
)
from alignvar.sampling import (
    ChainTrajectory,
    InfeasibleProfileError,
    RngStream,
    chain_trajectory,
    conditional_profile_sample,
    iid_sequence,
)
from alignvar.events import (
    BlockAlignStats,
    DeltaDistribution,
    EpsilonParams,
    EventReport,
    block_align_stats,
    check_events,
    delta_distribution_exact,
    gap_vector,
    geometric_block_pmf,
    in_V,
    predicted_delta_distribution,
    validate_parameters,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentPairs",
    "BinarySequence",
    "BlockAlignStats",
    "BlockProfile",
    "ChainTrajectory",
    "DeltaDistribution",
    "E_VEC",
    "EpsilonParams",
    "EventReport",
    "InfeasibleProfileError",
    "InvalidAlignmentError",
    "NoEligibleBlockError",
    "ProfileDecomposition",
    "RngStream",
    "ScoringScheme",
    "TransferChoice",
    "as_sequence",
    "block_align_stats",
    "chain_trajectory",
    "check_events",
    "conditional_profile_sample",
    "decompose_runs",
    "delta_distribution_exact",
    "expected_block_count",
    "gap_vector",
    "geometric_block_pmf",
    "iid_sequence",
    "in_V",
    "matched_ones_alignment",
    "min_matched_ones_among_optimal",
    "optimal_score",
    "optimal_traceback",
    "predicted_delta_distribution",
    "profile_decompose",
    "reconstruct",
    "score_of_alignment",
    "transfer",
    "validate_parameters",
    "zero_block_profile",
]
