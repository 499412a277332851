"""swissrank: Swiss-system contest simulation over benchmark score tables.

Turns a static model x benchmark score table into a dynamic multi-round
ranking: pairwise win rates feed a seeded Swiss-system tournament with
zero-point byes and bottom-group elimination, Monte Carlo averaging yields
each model's expected win score, and sweeping the elimination count profiles
how sensitive that score is to competitive pressure.
"""

from __future__ import annotations

from .analysis import (
    AverageRanking,
    FsaReport,
    FsaThresholds,
    RankingComparison,
    average_baseline_rank,
    exact_expected_scores,
    fsa,
    perturbation_experiment,
    rank_models,
    round_expectation,
)
from .engine import (
    ContestState,
    EliminationSchedule,
    InstanceResult,
    RoundOutcome,
    apply_elimination,
    group_by_score,
    pair_group,
    play_round,
    run_single_instance,
)
from .errors import (
    DimensionMismatchError,
    DomainError,
    DuplicateDatasetError,
    DuplicateModelError,
    EmptyQuestionError,
    InactiveModelError,
    InstanceTooLargeError,
    MissingScoreError,
    ParseError,
    SwissRankError,
    UnknownDatasetError,
    UnknownModelError,
)
from .ingestion import (
    MissingPolicy,
    Round,
    RoundSequence,
    ScoreTable,
    ValidatedInputs,
    load_round_sequence,
    load_score_table,
    save_round_sequence,
    save_score_table,
    validate_inputs,
)
from .montecarlo import (
    SimulationConfig,
    SimulationResult,
    estimate,
    estimate_sweep,
)
from .ordering import (
    OutcomeMatrix,
    TierPartition,
    TierRounds,
    WeightedSuite,
    build_tiers,
    estimate_weighted,
    load_outcomes,
    load_weighted_suite,
    sample_order,
    tier_sequence_to_rounds,
)
from .winrate import (
    WinRateTensor,
    build_tensor,
    load_tensor,
    perturb_scores,
    save_tensor,
    tensor_from_round_matrices,
)

__version__ = "0.1.0"

__all__ = [
    "AverageRanking",
    "ContestState",
    "DimensionMismatchError",
    "DomainError",
    "DuplicateDatasetError",
    "DuplicateModelError",
    "EliminationSchedule",
    "EmptyQuestionError",
    "FsaReport",
    "FsaThresholds",
    "InactiveModelError",
    "InstanceResult",
    "InstanceTooLargeError",
    "MissingPolicy",
    "MissingScoreError",
    "OutcomeMatrix",
    "ParseError",
    "RankingComparison",
    "Round",
    "RoundOutcome",
    "RoundSequence",
    "ScoreTable",
    "SimulationConfig",
    "SimulationResult",
    "SwissRankError",
    "TierPartition",
    "TierRounds",
    "UnknownDatasetError",
    "UnknownModelError",
    "ValidatedInputs",
    "WeightedSuite",
    "WinRateTensor",
    "apply_elimination",
    "average_baseline_rank",
    "build_tensor",
    "build_tiers",
    "estimate",
    "estimate_sweep",
    "estimate_weighted",
    "exact_expected_scores",
    "fsa",
    "group_by_score",
    "load_outcomes",
    "load_round_sequence",
    "load_score_table",
    "load_tensor",
    "load_weighted_suite",
    "pair_group",
    "perturb_scores",
    "perturbation_experiment",
    "play_round",
    "rank_models",
    "round_expectation",
    "run_single_instance",
    "sample_order",
    "save_round_sequence",
    "save_score_table",
    "save_tensor",
    "tensor_from_round_matrices",
    "tier_sequence_to_rounds",
    "validate_inputs",
]
